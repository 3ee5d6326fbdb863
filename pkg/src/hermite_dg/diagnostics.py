"""Conserved quantities, norms, stability checks and cross-run errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hermite import HermiteSpec, psi, velocity_quadrature, weight
from .mesh import gauss_legendre, legendre_basis, legendre_edge_values, locate_cells
from .poisson import ElectricField, solve_poisson
from .rhs import FluxSpec, KineticState

CSV_COLUMNS = ("t", "mass", "momentum", "kinetic", "electric", "total_energy",
               "l2_standard", "l2_weighted", "alpha", "Einf", "jump_dissipation")


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time sample of the conserved quantities and norms."""

    t: float
    mass: float
    momentum: float
    kinetic: float
    electric: float
    total_energy: float
    l2_standard: float
    l2_weighted: float
    alpha: float
    Einf: float
    jump_dissipation: float


@dataclass(frozen=True)
class ErrorReport:
    """Weighted and standard L2 distances between two states."""

    l2_weighted_error: float
    l2_standard_error: float
    resolutions: tuple[str, str]


def _mode_integrals(state: KineticState) -> np.ndarray:
    """Exact integral of every mode over the domain (N,)."""
    return state.coeffs[:, :, 0] @ state.mesh.h / math.sqrt(2.0)


def _mode_l2_sq(state: KineticState) -> np.ndarray:
    """Exact squared L2(dx) norm of every mode (N,)."""
    return np.einsum("njm,j->n", state.coeffs**2, 0.5 * state.mesh.h)


def moments(state: KineticState) -> tuple[float, float, float]:
    """Mass, momentum and kinetic energy from the first three modes.

    Velocity moments of the basis vanish except for
    int Psi_0 = 1, int v Psi_1 = 1/alpha, int v^2 (Psi_0 + sqrt(2) Psi_2)
    contributions, so the moments are exact linear functionals of the
    low-mode integrals.
    """
    a = state.scaling.alpha
    ints = _mode_integrals(state)
    mass = float(ints[0])
    momentum = float(ints[1]) / a if state.n_modes > 1 else 0.0
    kin = float(ints[0])
    if state.n_modes > 2:
        kin += math.sqrt(2.0) * float(ints[2])
    kinetic = kin / (2.0 * a * a)
    return mass, momentum, kinetic


def electric_energy(E: ElectricField) -> float:
    """Exact electrostatic energy 0.5 * int E^2 dx."""
    return float(0.5 * np.sum(0.5 * E.mesh.h[:, None] * E.coeffs**2))


def weighted_l2(state: KineticState) -> float:
    """Weighted L2 norm sqrt(alpha * sum_n |C_n|^2_{L2(dx)})."""
    return math.sqrt(state.scaling.alpha * float(np.sum(_mode_l2_sq(state))))


def standard_l2(state: KineticState, spec: HermiteSpec | None = None) -> float:
    """Unweighted L2(dx dv) norm via quadrature of the basis-function squares.

    The basis is not orthonormal without the Gaussian weight; the diagonal
    s_n = int Psi_n(v)^2 dv is evaluated by quadrature on the truncation
    domain.
    """
    if spec is None:
        spec = HermiteSpec(state.n_modes)
    nodes, w = velocity_quadrature(spec)
    tab = psi(state.scaling.alpha, nodes, state.n_modes)
    s_n = (tab * tab) @ w
    return math.sqrt(float(np.dot(_mode_l2_sq(state), s_n)))


def jump_dissipation(state: KineticState, flux: FluxSpec) -> float:
    """Penalty-weighted sum of squared interface jumps over all modes."""
    uminus, uplus = all_traces_modes(state)
    jumps2 = (uplus - uminus) ** 2
    return float(np.dot(flux.nu, jumps2.sum(axis=1)))


def all_traces_modes(state: KineticState) -> tuple[np.ndarray, np.ndarray]:
    """One-sided traces of every mode at the Nx distinct edges, (N, Nx)."""
    minus_basis, plus_basis = legendre_edge_values(state.k)
    uminus = np.roll(state.coeffs @ plus_basis, 1, axis=1)
    uplus = state.coeffs @ minus_basis
    return uminus, uplus


def collect_record(state: KineticState, flux: FluxSpec,
                   spec: HermiteSpec | None = None,
                   E: ElectricField | None = None) -> DiagnosticsRecord:
    """Assemble one diagnostics sample (solves the field if not supplied)."""
    if E is None:
        E = solve_poisson(state.mode(0))
    mass, momentum, kinetic = moments(state)
    electric = electric_energy(E)
    return DiagnosticsRecord(
        t=state.t,
        mass=mass,
        momentum=momentum,
        kinetic=kinetic,
        electric=electric,
        total_energy=kinetic + electric,
        l2_standard=standard_l2(state, spec),
        l2_weighted=weighted_l2(state),
        alpha=state.scaling.alpha,
        Einf=E.Einf,
        jump_dissipation=jump_dissipation(state, flux),
    )


def stability_check(records: Sequence[DiagnosticsRecord], gamma: float,
                    tol: float = 1e-2) -> tuple[bool, float]:
    """Check the exponential bound on the weighted norm along one run.

    Verifies l2_weighted(t) <= l2_weighted(0) * exp(t / 4 gamma) * (1 + tol)
    at every sample; works in log space so huge bounds cannot overflow.
    Returns (passed, worst ratio of norm to bound).
    """
    if gamma <= 0.0:
        raise ValueError("the bound needs gamma > 0")
    if not records:
        raise ValueError("no records to check")
    l0 = records[0].l2_weighted
    t0 = records[0].t
    if l0 <= 0.0:
        raise ValueError("initial norm must be positive")
    worst_log = -math.inf
    for rec in records:
        log_ratio = math.log(rec.l2_weighted) - math.log(l0) - (rec.t - t0) / (4.0 * gamma)
        worst_log = max(worst_log, log_ratio)
    worst = math.exp(worst_log) if worst_log < 700.0 else math.inf
    return worst_log <= math.log1p(tol), worst


def _eval_modes_at(state: KineticState, x: np.ndarray) -> np.ndarray:
    """Values of every mode at arbitrary points x, (N, len(x))."""
    j, xi = locate_cells(state.mesh, x)
    P = legendre_basis(state.k, xi)
    return np.einsum("npl,lp->np", state.coeffs[:, j, :], P)


def _resolution_tag(state: KineticState) -> str:
    return f"Nx={state.mesh.Nx},N={state.n_modes},P{state.k}"


def compare_states(a: KineticState, ref: KineticState,
                   spec: HermiteSpec | None = None) -> ErrorReport:
    """Error of state `a` against a reference, by evaluation in (x, v).

    Both reconstructed distributions are evaluated on a tensor grid built
    from the reference mesh (k+3 Gauss points per cell) and the velocity
    quadrature; the weighted error uses the reference run's alpha in the
    Gaussian weight.
    """
    if abs(a.t - ref.t) > 1e-9 * max(1.0, abs(ref.t)):
        raise ValueError("states are at different times")
    if abs(a.mesh.L - ref.mesh.L) > 1e-12 * ref.mesh.L:
        raise ValueError("states live on different domains")
    if spec is None:
        spec = HermiteSpec(ref.n_modes)

    rule = gauss_legendre(ref.k + 3)
    mesh = ref.mesh
    xs = (mesh.centers[:, None] + 0.5 * mesh.h[:, None] * rule.nodes[None, :]).ravel()
    wx = (0.5 * mesh.h[:, None] * rule.weights[None, :]).ravel()

    # same evaluation path for both states, so identical inputs give zero
    C_ref = _eval_modes_at(ref, xs)
    C_a = _eval_modes_at(a, xs)

    vq, wv = velocity_quadrature(spec)
    f_a = C_a.T @ psi(a.scaling.alpha, vq, a.n_modes)
    f_ref = C_ref.T @ psi(ref.scaling.alpha, vq, ref.n_modes)
    diff2 = (f_a - f_ref) ** 2

    omega = weight(ref.scaling.alpha, vq)
    std = math.sqrt(float(wx @ diff2 @ wv))
    wgt = math.sqrt(float(wx @ diff2 @ (wv * omega)))
    return ErrorReport(wgt, std, (_resolution_tag(a), _resolution_tag(ref)))


def convergence_order(errors: Sequence[float], meshes: Sequence[float]) -> list[float]:
    """Observed orders log2(e_{i-1} / e_i) for a mesh-doubling ladder.

    `meshes` may list cell counts (doubling) or cell sizes (halving); any
    other ladder is rejected.
    """
    if len(errors) < 2 or len(errors) != len(meshes):
        raise ValueError("need matching errors and meshes for at least 2 levels")
    for prev, cur in zip(meshes, meshes[1:]):
        ratio = cur / prev
        if not (abs(ratio - 2.0) < 1e-9 or abs(ratio - 0.5) < 1e-9):
            raise ValueError("mesh ladder must double counts or halve sizes")
    return [math.log2(errors[i - 1] / errors[i]) for i in range(1, len(errors))]
