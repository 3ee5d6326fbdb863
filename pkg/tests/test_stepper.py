import math

import numpy as np
import pytest

from hermite_dg.hermite import HermiteSpec, ScalingState, alpha_rate
from hermite_dg.mesh import build_mesh
from hermite_dg.rhs import FluxSpec, KineticState
from hermite_dg.scenarios import init_landau
from hermite_dg.stepper import (
    StepperConfig,
    hou_li_filter,
    hou_li_sigma,
    run,
    ssp_rk3_step,
)


def uniform_equilibrium(N=6, Nx=4, k=2, gamma=0.0):
    mesh = build_mesh(2.0, Nx)
    coeffs = np.zeros((N, Nx, k + 1))
    coeffs[0, :, 0] = math.sqrt(2.0)
    return KineticState(coeffs, mesh, k, ScalingState.initial(1.0, gamma))


class TestSspRk3Step:
    def test_steady_state_only_advances_time(self):
        state = uniform_equilibrium()
        out = ssp_rk3_step(state, FluxSpec.lax_friedrichs(6), 0.01)
        assert np.abs(out.coeffs - state.coeffs).max() < 1e-14
        assert out.scaling.alpha == state.scaling.alpha
        assert out.t == pytest.approx(0.01)

    def test_stability_polynomial(self):
        # synthetic rhs y' = lam y: one step must reproduce
        # 1 + z + z^2/2 + z^3/6 exactly
        lam = -2.3
        state = uniform_equilibrium(N=1, Nx=1, k=0)
        fake = lambda s, f: (lam * s.coeffs, None, 0.0)
        out = ssp_rk3_step(state, None, 0.1, rhs_fn=fake)
        z = lam * 0.1
        growth = 1.0 + z + z * z / 2.0 + z**3 / 6.0
        assert out.coeffs[0, 0, 0] == pytest.approx(
            growth * state.coeffs[0, 0, 0], abs=1e-14)

    def test_alpha_ode_one_step_accuracy(self):
        # alpha' = -alpha^3 / 2 has the closed form (1 + t)^{-1/2}
        state = uniform_equilibrium(gamma=1.0)
        fake = lambda s, f: (np.zeros_like(s.coeffs), None,
                             alpha_rate(s.scaling, 0.0))
        out = ssp_rk3_step(state, None, 0.1, rhs_fn=fake)
        exact = (1.0 + 0.1) ** -0.5
        assert abs(out.scaling.alpha - exact) < 1e-5

    def test_alpha_closed_form_long_time(self):
        # gamma = 1, no field: alpha(3) = (1 + 3)^{-1/2} = 0.5
        state = uniform_equilibrium(gamma=1.0)
        fake = lambda s, f: (np.zeros_like(s.coeffs), None,
                             alpha_rate(s.scaling, 0.0))
        dt, steps = 1e-3, 3000
        for _ in range(steps):
            state = ssp_rk3_step(state, None, dt, rhs_fn=fake)
        assert state.scaling.alpha == pytest.approx(0.5, abs=1e-9)
        assert state.t == pytest.approx(3.0)


class TestHouLiFilter:
    def test_low_modes_untouched(self):
        cfg = StepperConfig(dt=1e-3, T=1.0, filter_enabled=True)
        sigma = hou_li_sigma(16, cfg)
        cutoff_index = int(2.0 / 3.0 * 15)
        assert np.all(sigma[:cutoff_index + 1] == 1.0)

    def test_top_mode_damping(self):
        cfg = StepperConfig(dt=1e-3, T=1.0, filter_enabled=True)
        sigma = hou_li_sigma(12, cfg)
        assert sigma[-1] == pytest.approx(math.exp(-36.0), rel=1e-12)

    def test_mode_zero_only_state_unchanged(self):
        state = uniform_equilibrium(N=8)
        cfg = StepperConfig(dt=1e-3, T=1.0, filter_enabled=True)
        out = hou_li_filter(state, cfg)
        assert np.array_equal(out.coeffs, state.coeffs)

    def test_idempotent_on_low_modes(self):
        rng = np.random.default_rng(5)
        state = uniform_equilibrium(N=12)
        state.coeffs[:] = rng.standard_normal(state.coeffs.shape)
        cfg = StepperConfig(dt=1e-3, T=1.0, filter_enabled=True)
        once = hou_li_filter(state, cfg)
        twice = hou_li_filter(once, cfg)
        cutoff = int(cfg.filter_cutoff * 11)
        assert np.array_equal(once.coeffs[:cutoff + 1], twice.coeffs[:cutoff + 1])

    def test_needs_two_modes(self):
        cfg = StepperConfig(dt=1e-3, T=1.0)
        with pytest.raises(ValueError):
            hou_li_sigma(1, cfg)


class TestRun:
    def test_single_step_run(self):
        state = uniform_equilibrium()
        cfg = StepperConfig(dt=0.02, T=0.02)
        recs = []
        out = run(state, FluxSpec.lax_friedrichs(6), cfg, sink=recs.append)
        assert out.t == pytest.approx(0.02)
        assert len(recs) == 2  # initial sample plus the single step

    def test_equilibrium_run_is_static(self):
        state = uniform_equilibrium(gamma=0.0)
        cfg = StepperConfig(dt=1e-3, T=0.1, record_every=20)
        out = run(state, FluxSpec.lax_friedrichs(6), cfg)
        assert np.abs(out.coeffs - state.coeffs).max() < 1e-13

    def test_gamma_zero_keeps_alpha_constant(self):
        mesh = build_mesh(12.0, 8)
        state = init_landau(0.01, math.pi / 6.0, mesh, 8, 1, 1.0, 0.0)
        cfg = StepperConfig(dt=2e-3, T=0.05, filter_enabled=True)
        recs = []
        run(state, FluxSpec.lax_friedrichs(8), cfg, sink=recs.append,
            spec=HermiteSpec(8))
        assert all(r.alpha == 1.0 for r in recs)

    def test_final_time_landing_with_remainder(self):
        state = uniform_equilibrium()
        cfg = StepperConfig(dt=0.004, T=0.01)  # 2 full steps + remainder
        out = run(state, FluxSpec.lax_friedrichs(6), cfg)
        assert out.t == pytest.approx(0.01, abs=1e-12)

    def test_record_cadence_row_count(self):
        state = uniform_equilibrium()
        cfg = StepperConfig(dt=1e-3, T=0.05, record_every=10)
        recs = []
        run(state, FluxSpec.lax_friedrichs(6), cfg, sink=recs.append)
        assert len(recs) == 6  # t=0 plus 50/10 samples

    def test_records_strictly_increasing_time(self):
        mesh = build_mesh(12.0, 8)
        state = init_landau(0.01, math.pi / 6.0, mesh, 8, 1, 1.0, 1.0)
        cfg = StepperConfig(dt=2e-3, T=0.03, record_every=3)
        recs = []
        run(state, FluxSpec.lax_friedrichs(8), cfg, sink=recs.append,
            spec=HermiteSpec(8))
        ts = [r.t for r in recs]
        assert all(b > a for a, b in zip(ts, ts[1:]))
        assert ts[-1] == pytest.approx(0.03)

    def test_determinism(self):
        mesh = build_mesh(12.0, 8)
        cfg = StepperConfig(dt=1e-3, T=0.02, filter_enabled=True)
        outs = []
        for _ in range(2):
            state = init_landau(0.01, math.pi / 6.0, mesh, 8, 2, 1.0, 1.0)
            outs.append(run(state, FluxSpec.lax_friedrichs(8), cfg,
                            spec=HermiteSpec(8)))
        assert np.array_equal(outs[0].coeffs, outs[1].coeffs)
        assert outs[0].scaling.alpha == outs[1].scaling.alpha

    def test_cfl_warning(self):
        state = uniform_equilibrium()
        cfg = StepperConfig(dt=0.5, T=1.0)
        with pytest.warns(UserWarning, match="stability"):
            run(state, FluxSpec.lax_friedrichs(6), cfg)

    def test_filter_cadence_validation(self):
        with pytest.raises(ValueError):
            StepperConfig(dt=1e-3, T=1.0, filter_cadence=0)
        with pytest.raises(ValueError):
            StepperConfig(dt=1e-3, T=1.0, filter_cutoff=1.5)
        with pytest.raises(ValueError):
            StepperConfig(dt=2.0, T=1.0)
        with pytest.raises(ValueError):
            StepperConfig(dt=1e-3, T=1.0, filter_order=7)


class TestAlphaMonotonicity:
    def test_alpha_nonincreasing_and_bounded(self):
        mesh = build_mesh(12.0, 8)
        state = init_landau(0.01, math.pi / 6.0, mesh, 8, 1, 1.0, 1.0)
        cfg = StepperConfig(dt=2e-3, T=0.1)
        recs = []
        run(state, FluxSpec.lax_friedrichs(8), cfg, sink=recs.append,
            spec=HermiteSpec(8))
        alphas = [r.alpha for r in recs]
        assert all(b <= a for a, b in zip(alphas, alphas[1:]))
        assert all(a <= 1.0 for a in alphas)

    def test_temporal_order_three(self):
        # self-convergence of the full scheme on a small filtered-off setup
        mesh = build_mesh(12.0, 8)
        flux = FluxSpec.lax_friedrichs(8)
        finals = []
        dts = (4e-3, 2e-3, 1e-3, 5e-4)
        for dt in dts:
            state = init_landau(0.01, math.pi / 6.0, mesh, 8, 2, 1.0, 1.0)
            cfg = StepperConfig(dt=dt, T=0.2)
            finals.append(run(state, flux, cfg))
        errs = []
        for a, b in zip(finals, finals[1:]):
            diff = a.coeffs - b.coeffs
            errs.append(math.sqrt(b.scaling.alpha * float(
                np.einsum("njm,njm,j->", diff, diff, 0.5 * mesh.h))))
        slope = np.polyfit(np.log2(dts[:-1]), np.log2(errs), 1)[0]
        assert abs(slope - 3.0) < 0.3
