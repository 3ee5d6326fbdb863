"""Scaled asymmetrically weighted Hermite basis in velocity.

The basis functions carry a Gaussian factor whose width is set by a
time-dependent scaling parameter alpha(t); the dual (test) functions are the
bare Hermite polynomials, so velocity moments of the expansion coefficients
are exact.  This module holds the basis itself, coefficient transforms by
quadrature, and the ODE rate of the scaling parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import NumericalFailure

SQRT_2PI = math.sqrt(2.0 * math.pi)

# exp() overflows float64 just above 709; stay clear of it
_MAX_WEIGHT_EXPONENT = 700.0


@dataclass(frozen=True)
class ScalingState:
    """Current value and parameters of the basis scaling alpha(t).

    alpha0 is the initial value, gamma the free decay parameter; gamma = 0
    freezes alpha at alpha0.  alpha is nonincreasing along any trajectory.
    """

    alpha0: float
    gamma: float
    alpha: float
    t: float

    def __post_init__(self):
        if self.alpha0 <= 0.0:
            raise ValueError("alpha0 must be positive")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if not self.alpha > 0.0:
            raise ValueError("alpha must stay positive")
        if self.alpha > self.alpha0 * (1.0 + 1e-12):
            raise ValueError("alpha may not exceed alpha0")

    @classmethod
    def initial(cls, alpha0: float, gamma: float) -> "ScalingState":
        return cls(float(alpha0), float(gamma), float(alpha0), 0.0)


@dataclass(frozen=True)
class HermiteSpec:
    """Mode count plus the velocity quadrature used for transforms.

    The quadrature is composite Gauss-Legendre on [-v_max, v_max]; the
    default budget is 4N points spread over 8 panels, which resolves
    products of any two basis functions (point count >= 2N is enforced).
    """

    N: int
    v_max: float = 8.0
    points: int = 0
    panels: int = 8

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need at least one Hermite mode")
        if self.v_max <= 0.0:
            raise ValueError("v_max must be positive")
        if self.panels < 1:
            raise ValueError("panels must be positive")
        if self.points == 0:
            per = max((4 * self.N + self.panels - 1) // self.panels, 2)
            object.__setattr__(self, "points", per * self.panels)
        if self.points < 2 * self.N:
            raise ValueError("quadrature needs at least 2N points")


@lru_cache(maxsize=128)
def velocity_quadrature(spec: HermiteSpec) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [-v_max, v_max]."""
    panels = spec.panels
    per = (spec.points + panels - 1) // panels
    # keep the per-panel rule at a sane order; add panels instead
    if per > 64:
        panels = (spec.points + 63) // 64
        per = (spec.points + panels - 1) // panels
    ref_x, ref_w = np.polynomial.legendre.leggauss(per)
    edges = np.linspace(-spec.v_max, spec.v_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def hermite_polys(xi, N: int) -> np.ndarray:
    """Normalized Hermite polynomials H_0..H_{N-1} at xi.

    Evaluated with the three-term recurrence
    sqrt(n) H_n = xi H_{n-1} - sqrt(n-1) H_{n-2}, which is overflow-free for
    large n.  Returns shape (N,) + shape(xi).
    """
    if N < 1:
        raise ValueError("need at least one Hermite mode")
    xi = np.asarray(xi, dtype=float)
    out = np.empty((N,) + xi.shape)
    out[0] = 1.0
    if N > 1:
        out[1] = xi
    for n in range(2, N):
        out[n] = (xi * out[n - 1] - math.sqrt(n - 1) * out[n - 2]) / math.sqrt(n)
    return out


def hermite_derivs(xi, N: int) -> np.ndarray:
    """Derivatives H_n'(xi) = sqrt(n) H_{n-1}(xi) for n = 0..N-1."""
    H = hermite_polys(xi, N)
    out = np.zeros_like(H)
    for n in range(1, N):
        out[n] = math.sqrt(n) * H[n - 1]
    return out


def psi(alpha: float, v, N: int) -> np.ndarray:
    """Scaled basis functions Psi_0..Psi_{N-1} at velocity v.

    Psi_n(v) = alpha H_n(alpha v) exp(-(alpha v)^2 / 2) / sqrt(2 pi).
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    xi = alpha * np.asarray(v, dtype=float)
    H = hermite_polys(xi, N)
    return alpha * H * np.exp(-0.5 * xi * xi) / SQRT_2PI


def weight(alpha: float, v):
    """Gaussian weight sqrt(2 pi) exp((alpha v)^2 / 2) of the stability norm.

    Only meant for integrals on the truncated velocity domain; raises
    OverflowError when the exponent is unsafe, which signals a misconfigured
    v_max rather than a solver failure.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    expo = 0.5 * (alpha * np.asarray(v, dtype=float)) ** 2
    if np.any(expo > _MAX_WEIGHT_EXPONENT):
        raise OverflowError("weight exponent too large; shrink v_max or alpha")
    return SQRT_2PI * np.exp(expo)


def project_velocity(f: Callable, alpha: float, spec: HermiteSpec) -> np.ndarray:
    """Hermite coefficients of a velocity profile by quadrature.

    Computes g_n = integral of f(v) H_n(alpha v) dv over the truncation
    domain, for n = 0..N-1.
    """
    nodes, weights = velocity_quadrature(spec)
    vals = np.asarray(f(nodes), dtype=float)
    H = hermite_polys(alpha * nodes, spec.N)
    coeffs = H @ (weights * vals)
    if not np.all(np.isfinite(coeffs)):
        raise NumericalFailure("velocity projection produced non-finite coefficients")
    return coeffs


def reconstruct(coeffs: np.ndarray, alpha: float, v):
    """Evaluate the truncated expansion sum_n coeffs[n] Psi_n(alpha, v)."""
    coeffs = np.asarray(coeffs, dtype=float)
    return np.tensordot(coeffs, psi(alpha, v, coeffs.shape[0]), axes=(0, 0))


def weighted_norm_v(coeffs: np.ndarray, alpha: float) -> float:
    """Weighted L2 norm of a velocity profile from its coefficients.

    The Gaussian-weighted norm of sum_n c_n Psi_n equals
    sqrt(alpha * sum_n c_n^2).
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    c = np.asarray(coeffs, dtype=float)
    return math.sqrt(alpha * float(np.dot(c, c)))


def alpha_rate(state: ScalingState, Einf: float) -> float:
    """Exact ODE rate of the scaling parameter.

    alpha' = -(gamma/2) max(1, Einf^2) alpha^3, with Einf the sup-norm of the
    current electric field.
    """
    return -0.5 * state.gamma * max(1.0, Einf * Einf) * state.alpha**3


def alpha_lower_bound(alpha0: float, gamma: float, max_Einf: float, T: float) -> float:
    """A-priori lower bound of alpha over [0, T] given a field bound."""
    return alpha0 / math.sqrt(1.0 + gamma * alpha0**2 * (1.0 + max_Einf**2) * T)


def fokker_planck_apply(g: Callable, alpha: float, v):
    """Apply -d2g/dv2 - alpha^2 v dg/dv - alpha^2 g by central differences.

    Test-suite helper: the basis functions are eigenfunctions of this
    operator with eigenvalues alpha^2 n.  Uses second-order stencils with
    step 1e-4 * max(1, |v|).
    """
    v = np.asarray(v, dtype=float)
    step = 1e-4 * np.maximum(1.0, np.abs(v))
    gp = np.asarray(g(v + step), dtype=float)
    gm = np.asarray(g(v - step), dtype=float)
    g0 = np.asarray(g(v), dtype=float)
    d1 = (gp - gm) / (2.0 * step)
    d2 = (gp - 2.0 * g0 + gm) / (step * step)
    return -d2 - alpha**2 * v * d1 - alpha**2 * g0
