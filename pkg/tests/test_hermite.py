import math

import numpy as np
import pytest

from hermite_dg.errors import NumericalFailure
from hermite_dg.hermite import (
    HermiteSpec,
    ScalingState,
    alpha_rate,
    fokker_planck_apply,
    hermite_derivs,
    hermite_polys,
    project_velocity,
    psi,
    reconstruct,
    velocity_quadrature,
    weight,
    weighted_norm_v,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)


def wide_spec(N, alpha=1.0, factor=12):
    """Quadrature wide/dense enough to resolve basis products up to mode N."""
    v_max = max(12.0, math.sqrt(2.0 * N) * 1.8) / alpha
    return HermiteSpec(N, v_max=v_max, points=max(factor * N, 200), panels=16)


class TestHermitePolys:
    def test_first_two_values(self):
        assert np.allclose(hermite_polys(2.0, 2), [1.0, 2.0])

    def test_third_value_from_recurrence(self):
        got = hermite_polys(2.0, 3)
        assert got[2] == pytest.approx(3.0 / math.sqrt(2.0), abs=1e-14)

    def test_fourth_value_from_recurrence(self):
        # one more recurrence step by hand: sqrt(3) H_3 = 2 H_2 - sqrt(2) H_1
        h2 = 3.0 / math.sqrt(2.0)
        expected = (2.0 * h2 - math.sqrt(2.0) * 2.0) / math.sqrt(3.0)
        assert hermite_polys(2.0, 4)[3] == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-14)

    def test_empty_request_rejected(self):
        with pytest.raises(ValueError):
            hermite_polys(1.0, 0)

    def test_vectorized_matches_scalar(self):
        xi = np.linspace(-3, 3, 11)
        vals = hermite_polys(xi, 6)
        for i, x in enumerate(xi):
            assert np.allclose(vals[:, i], hermite_polys(float(x), 6))

    def test_derivative_identity(self):
        xi = np.linspace(-4, 4, 9)
        H = hermite_polys(xi, 8)
        D = hermite_derivs(xi, 8)
        for n in range(1, 8):
            assert np.allclose(D[n], math.sqrt(n) * H[n - 1])
        assert np.all(D[0] == 0.0)


class TestPsi:
    def test_ground_mode_at_origin(self):
        assert psi(1.0, 0.0, 1)[0] == pytest.approx(1.0 / SQRT_2PI, rel=1e-14)

    def test_scaled_ground_and_odd_mode(self):
        vals = psi(2.0, 0.0, 2)
        assert vals[0] == pytest.approx(2.0 / SQRT_2PI, rel=1e-14)
        assert vals[1] == pytest.approx(0.0, abs=1e-15)

    def test_gaussian_decay(self):
        assert psi(1.0, 1.0, 1)[0] == pytest.approx(math.exp(-0.5) / SQRT_2PI, rel=1e-14)

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            psi(0.0, 1.0, 3)


class TestWeight:
    def test_at_origin(self):
        assert weight(1.0, 0.0) == pytest.approx(SQRT_2PI, rel=1e-15)

    def test_scaled(self):
        assert weight(2.0, 1.0) == pytest.approx(SQRT_2PI * math.e**2, rel=1e-14)

    def test_unit(self):
        assert weight(1.0, 1.0) == pytest.approx(SQRT_2PI * math.exp(0.5), rel=1e-14)

    def test_overflow_guard(self):
        with pytest.raises(OverflowError):
            weight(1.0, 60.0)


class TestProjectVelocity:
    def test_ground_mode_projects_to_unit_vector(self):
        spec = wide_spec(8)
        coeffs = project_velocity(lambda v: psi(1.0, v, 1)[0], 1.0, spec)
        assert coeffs[0] == pytest.approx(1.0, abs=1e-12)
        assert np.abs(coeffs[1:]).max() < 1e-12

    def test_maxwellian_is_ground_mode(self):
        spec = wide_spec(8)
        coeffs = project_velocity(
            lambda v: np.exp(-0.5 * v * v) / SQRT_2PI, 1.0, spec)
        assert coeffs[0] == pytest.approx(1.0, abs=1e-12)
        assert np.abs(coeffs[1:]).max() < 1e-12

    def test_shifted_gaussian_moments(self):
        # brute-force trapezoid oracle, independent of the Gauss-Legendre path
        a = 1.0
        grid = np.linspace(-12.0, 12.0, 240_001)
        f = np.exp(-0.5 * (grid - a) ** 2) / SQRT_2PI
        H = hermite_polys(grid, 8)
        oracle = np.trapezoid(f * H, grid, axis=1)
        closed_form = np.array([a**n / math.sqrt(math.factorial(n)) for n in range(8)])
        assert np.abs(oracle - closed_form).max() < 1e-10

        spec = HermiteSpec(8, v_max=12.0, points=160, panels=16)
        coeffs = project_velocity(
            lambda v: np.exp(-0.5 * (v - a) ** 2) / SQRT_2PI, 1.0, spec)
        assert np.abs(coeffs - closed_form).max() < 1e-10

    def test_nonfinite_result_raises(self):
        spec = wide_spec(4)
        with pytest.raises(NumericalFailure):
            project_velocity(lambda v: np.full_like(v, np.nan), 1.0, spec)


class TestReconstruct:
    def test_ground_mode(self):
        assert reconstruct(np.array([1.0, 0.0, 0.0]), 1.0, 0.0) == pytest.approx(
            1.0 / SQRT_2PI, rel=1e-14)

    def test_zero_coefficients(self):
        coeffs = np.zeros(5)
        for v in (-2.0, 0.0, 1.3):
            assert reconstruct(coeffs, 1.0, v) == 0.0

    def test_single_higher_mode(self):
        coeffs = np.zeros(4)
        coeffs[1] = 1.0
        expected = psi(1.0, 1.0, 2)[1]
        assert reconstruct(coeffs, 1.0, 1.0) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(math.exp(-0.5) / SQRT_2PI, rel=1e-13)

    def test_roundtrip_in_span(self):
        rng = np.random.default_rng(7)
        N, alpha = 12, 0.8
        spec = wide_spec(N, alpha=alpha)
        target = rng.standard_normal(N)
        g = lambda v: reconstruct(target, alpha, v)
        coeffs = project_velocity(g, alpha, spec)
        assert np.abs(coeffs - target).max() < 1e-12
        nodes, _ = velocity_quadrature(spec)
        assert np.abs(reconstruct(coeffs, alpha, nodes) - g(nodes)).max() < 1e-12


class TestWeightedNormV:
    def test_scaling(self):
        assert weighted_norm_v(np.array([1.0, 0.0]), 4.0) == pytest.approx(2.0)

    def test_zero(self):
        assert weighted_norm_v(np.zeros(6), 2.5) == 0.0

    def test_euclidean(self):
        assert weighted_norm_v(np.array([3.0, 4.0]), 1.0) == pytest.approx(5.0)


class TestAlphaRate:
    def test_unit_field_free(self):
        s = ScalingState(1.0, 1.0, 1.0, 0.0)
        assert alpha_rate(s, 0.0) == pytest.approx(-0.5)

    def test_gamma_zero(self):
        s = ScalingState(1.0, 0.0, 1.0, 0.0)
        assert alpha_rate(s, 5.0) == 0.0

    def test_strong_field(self):
        s = ScalingState(1.0, 1.0, 1.0, 0.0)
        assert alpha_rate(s, 2.0) == pytest.approx(-2.0)


class TestScalingState:
    def test_rejects_alpha_above_alpha0(self):
        with pytest.raises(ValueError):
            ScalingState(1.0, 1.0, 1.5, 0.0)

    def test_rejects_negative_gamma(self):
        with pytest.raises(ValueError):
            ScalingState(1.0, -0.1, 1.0, 0.0)

    def test_initial(self):
        s = ScalingState.initial(0.5, 2.0)
        assert s.alpha == 0.5 and s.t == 0.0


class TestFokkerPlanck:
    def test_ground_mode_in_kernel(self):
        g = lambda v: psi(1.0, v, 1)[0]
        vals = fokker_planck_apply(g, 1.0, np.linspace(-3, 3, 20))
        assert np.abs(vals).max() < 1e-6

    def test_third_mode_eigenvalue(self):
        g = lambda v: psi(1.0, v, 4)[3]
        v = np.linspace(-4, 4, 41)
        assert np.abs(fokker_planck_apply(g, 1.0, v) - 3.0 * g(v)).max() < 1e-5

    def test_scaled_first_mode_eigenvalue(self):
        g = lambda v: psi(2.0, v, 2)[1]
        v = np.linspace(-2, 2, 41)
        assert np.abs(fokker_planck_apply(g, 2.0, v) - 4.0 * g(v)).max() < 1e-5


class TestBasisProperties:
    def test_weighted_orthogonality(self):
        for alpha in (1.0, 0.5):
            N = 40
            spec = wide_spec(N, alpha=alpha)
            nodes, w = velocity_quadrature(spec)
            tab = psi(alpha, nodes, N)
            om = weight(alpha, nodes)
            gram = np.einsum("nq,q,mq->nm", tab, w * om, tab)
            assert np.abs(gram - alpha * np.eye(N)).max() < 1e-10 * alpha

    def test_derivative_ladder_relation(self):
        # d/dv Psi_n = -alpha sqrt(n+1) Psi_{n+1}, checked by central differences
        alpha, N = 1.3, 21
        v = np.linspace(-4.0, 4.0, 100)
        dv = 1e-5
        up = psi(alpha, v + dv, N)
        dn = psi(alpha, v - dv, N)
        deriv = (up - dn) / (2.0 * dv)
        tab = psi(alpha, v, N)
        for n in range(20):
            resid = deriv[n] + alpha * math.sqrt(n + 1) * tab[n + 1]
            assert np.abs(resid).max() < 5e-8

    def test_multiplication_ladder_relation(self):
        alpha, N = 0.9, 22
        v = np.linspace(-5.0, 5.0, 64)
        tab = psi(alpha, v, N)
        for n in range(1, 20):
            resid = (alpha * v * tab[n]
                     - math.sqrt(n + 1) * tab[n + 1]
                     - math.sqrt(n) * tab[n - 1])
            assert np.abs(resid).max() < 1e-12

    def test_eigenfunction_property_low_modes(self):
        alpha = 1.1
        v = np.linspace(-5.0, 5.0, 80)
        for n in range(10):
            g = lambda u, n=n: psi(alpha, u, n + 1)[n]
            resid = fokker_planck_apply(g, alpha, v) - alpha**2 * n * g(v)
            assert np.abs(resid).max() < 2e-5

    def test_spectral_projection_decay(self):
        # broad off-center Gaussian, alpha < 1 so it lies in the weighted space
        alpha = 0.5
        g = lambda v: np.exp(-0.25 * (v - 1.0) ** 2)
        full_spec = HermiteSpec(128, v_max=28.0, points=12 * 128, panels=32)
        coeffs = project_velocity(g, alpha, full_spec)
        norms = []
        for N in (4, 8, 16, 32, 64):
            tail = coeffs[N:]
            norms.append(math.sqrt(alpha * float(tail @ tail)))
        for lo, hi in zip(norms[1:], norms[:-1]):
            if hi <= 1e-10:
                break
            assert lo < hi
            assert hi / max(lo, 1e-30) >= 4.0
