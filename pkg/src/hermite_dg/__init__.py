"""Hermite-spectral / discontinuous Galerkin solver for the 1D-1V
Vlasov-Poisson system with a time-dependent velocity scaling."""

from .diagnostics import (
    DiagnosticsRecord,
    ErrorReport,
    collect_record,
    compare_states,
    convergence_order,
    electric_energy,
    jump_dissipation,
    moments,
    stability_check,
    standard_l2,
    weighted_l2,
)
from .errors import ConfigError, NumericalFailure
from .hermite import (
    HermiteSpec,
    ScalingState,
    alpha_lower_bound,
    alpha_rate,
    fokker_planck_apply,
    hermite_polys,
    project_velocity,
    psi,
    reconstruct,
    weight,
    weighted_norm_v,
)
from .mesh import (
    DGScalarField,
    Mesh1D,
    QuadRule,
    build_mesh,
    eval_field,
    gauss_legendre,
    project_to_Xh,
    skeleton_norm,
    traces,
)
from .poisson import ElectricField, potential, solve_poisson, sup_norm
from .rhs import FluxSpec, KineticState, g_field, numerical_flux, rhs, source_field
from .scenarios import (
    RunConfig,
    init_bump_on_tail,
    init_from_function,
    init_landau,
    load_config,
    parse_config,
)
from .snapshots import DiagnosticsCSV, read_diagnostics_csv, read_snapshot, write_snapshot
from .stepper import StepperConfig, hou_li_filter, run, ssp_rk3_step

__all__ = [name for name in dir() if not name.startswith("_")]
