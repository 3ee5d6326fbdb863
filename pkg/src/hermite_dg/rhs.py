"""Semi-discrete spatial operator for the Hermite-mode transport system.

Each Hermite mode is advected by its neighbours through the ladder couplings
sqrt(n), sqrt(n+1); interfaces use an average flux with a jump penalty, and
the sources carry the scaling-parameter drift plus the electric-field
coupling.  Assembly is fully vectorized over (mode, cell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import NumericalFailure
from .hermite import ScalingState, alpha_rate
from .mesh import (
    DGScalarField,
    Mesh1D,
    gauss_legendre,
    legendre_basis,
    legendre_basis_deriv,
    legendre_edge_values,
)
from .poisson import ElectricField, solve_poisson


@dataclass(frozen=True, eq=False)
class FluxSpec:
    """Per-mode jump-penalty coefficients nu_n of the interface flux.

    nu_n must be positive for n >= 1; nu_0 = 0 (a centered flux on the charge
    mode, which conserves discrete total energy) is allowed only when
    centered_mode0 is set.
    """

    nu: np.ndarray
    centered_mode0: bool = False

    def __post_init__(self):
        nu = np.asarray(self.nu, dtype=float)
        object.__setattr__(self, "nu", nu)
        if nu.ndim != 1 or nu.size < 1:
            raise ValueError("nu must be a vector with one entry per mode")
        if np.any(nu[1:] <= 0.0):
            raise ValueError("penalty coefficients must be positive for modes n >= 1")
        if nu[0] < 0.0 or (nu[0] == 0.0 and not self.centered_mode0):
            raise ValueError("nu[0] = 0 requires the centered_mode0 switch")

    @classmethod
    def lax_friedrichs(cls, N: int, nu: float | None = None,
                       centered_mode0: bool = False) -> "FluxSpec":
        """Global coefficient sqrt(2N), an upper bound for the mode couplings
        in the scaled variable; optionally centered on mode 0."""
        base = math.sqrt(2.0 * N) if nu is None else float(nu)
        arr = np.full(N, base)
        if centered_mode0:
            arr[0] = 0.0
        return cls(arr, centered_mode0)


@dataclass(frozen=True, eq=False)
class KineticState:
    """All Hermite modes as one (N, Nx, k+1) coefficient array, plus the
    scaling state; every mode shares one mesh and polynomial degree."""

    coeffs: np.ndarray
    mesh: Mesh1D
    k: int
    scaling: ScalingState

    def __post_init__(self):
        if self.coeffs.ndim != 3 or self.coeffs.shape[1:] != (self.mesh.Nx, self.k + 1):
            raise ValueError("coefficients must have shape (N, Nx, k+1)")

    @property
    def n_modes(self) -> int:
        return self.coeffs.shape[0]

    @property
    def t(self) -> float:
        return self.scaling.t

    def mode(self, n: int) -> DGScalarField:
        return DGScalarField(self.mesh, self.k, self.coeffs[n])

    @property
    def modes(self) -> tuple[DGScalarField, ...]:
        return tuple(self.mode(n) for n in range(self.n_modes))

    def with_coeffs(self, coeffs: np.ndarray, scaling: ScalingState | None = None) -> "KineticState":
        return KineticState(coeffs, self.mesh, self.k,
                            self.scaling if scaling is None else scaling)


class _RefTables(NamedTuple):
    nodes: np.ndarray
    w: np.ndarray
    V: np.ndarray        # basis values at the volume nodes, (k+1, q)
    VwT: np.ndarray      # projection matrix (q, k+1): weights folded into V
    VE: np.ndarray       # field basis values (one degree higher), (k+2, q)
    S: np.ndarray        # stiffness S[m, l] = sum_q w_q P'_m P_l
    bminus: np.ndarray   # basis values at -1
    bplus: np.ndarray    # basis values at +1


@lru_cache(maxsize=32)
def _tables(k: int, q: int) -> _RefTables:
    rule = gauss_legendre(q)
    V = legendre_basis(k, rule.nodes)
    D = legendre_basis_deriv(k, rule.nodes)
    VE = legendre_basis(k + 1, rule.nodes)
    S = np.einsum("mq,q,lq->ml", D, rule.weights, V)
    bminus, bplus = legendre_edge_values(k)
    return _RefTables(rule.nodes, rule.weights, V, rule.weights[:, None] * V.T,
                      VE, S, bminus, bplus)


def _shift_down(C: np.ndarray, by: int = 1) -> np.ndarray:
    """Array holding C_{n-by} in slot n, zero where out of range."""
    out = np.zeros_like(C)
    out[by:] = C[:-by]
    return out


def g_field(state: KineticState, n: int) -> DGScalarField:
    """Transport flux of mode n: (sqrt(n) C_{n-1} + sqrt(n+1) C_{n+1}) / alpha.

    Out-of-range modes count as zero, which truncates the top coupling.
    """
    N = state.n_modes
    if not 0 <= n < N:
        raise ValueError("mode index out of range")
    g = np.zeros_like(state.coeffs[n])
    if n - 1 >= 0:
        g += math.sqrt(n) * state.coeffs[n - 1]
    if n + 1 < N:
        g += math.sqrt(n + 1) * state.coeffs[n + 1]
    return DGScalarField(state.mesh, state.k, g / state.scaling.alpha)


def numerical_flux(gminus, gplus, Cminus, Cplus, nu_n: float, alpha: float):
    """Single-valued interface flux: average of the one-sided fluxes minus a
    scaled jump penalty (nu_n = 0 gives the centered flux)."""
    return 0.5 * (gminus + gplus - (nu_n / alpha) * (Cplus - Cminus))


def source_field(state: KineticState, E: ElectricField, n: int,
                 alpha_rate_value: float) -> DGScalarField:
    """Source of mode n: scaling drift plus field coupling, projected back to
    degree k with the volume quadrature."""
    N = state.n_modes
    if not 0 <= n < N:
        raise ValueError("mode index out of range")
    mesh, k = state.mesh, state.k
    a = state.scaling.alpha
    if n == 0:
        return DGScalarField(mesh, k, np.zeros_like(state.coeffs[0]))
    tab = _tables(k, k + 2)
    res = (alpha_rate_value / a) * n * state.coeffs[n].copy()
    if n >= 2:
        res += (alpha_rate_value / a) * math.sqrt((n - 1) * n) * state.coeffs[n - 2]
    Eq = E.coeffs @ tab.VE            # field values at the volume nodes
    Cq = state.coeffs[n - 1] @ tab.V
    proj = np.einsum("jq,q,mq->jm", Eq * Cq, tab.w, tab.V)
    res += a * math.sqrt(n) * proj
    return DGScalarField(mesh, k, res)


def rhs(state: KineticState, flux: FluxSpec):
    """Assemble dC_n/dt for every mode and cell.

    Solves the Poisson problem from mode 0, evaluates the scaling rate from
    the fresh field sup-norm, then accumulates volume, interface and source
    contributions tested against the orthonormal cell basis.  Returns
    (derivatives (N, Nx, k+1), electric field, alpha rate).
    """
    mesh, k = state.mesh, state.k
    N = state.n_modes
    if flux.nu.size != N:
        raise ValueError("flux spec sized for a different mode count")
    C = state.coeffs
    a = state.scaling.alpha
    tab = _tables(k, k + 2)

    E = solve_poisson(state.mode(0))
    if not math.isfinite(E.Einf):
        raise NumericalFailure(f"non-finite electric field at t={state.t:.6g}")
    arate = alpha_rate(state.scaling, E.Einf)

    n_idx = np.arange(N, dtype=float)
    sq_lo = np.sqrt(n_idx)
    sq_hi = np.sqrt(n_idx + 1.0)
    K = k + 1
    flat = C.reshape(N * mesh.Nx, K)

    # ladder couplings without materializing shifted copies of C
    G = np.empty_like(C)
    G[0] = sq_hi[0] * C[1] if N > 1 else 0.0
    if N > 1:
        G[-1] = sq_lo[-1] * C[-2]
    if N > 2:
        G[1:-1] = sq_lo[1:-1, None, None] * C[:-2]
        G[1:-1] += sq_hi[1:-1, None, None] * C[2:]
    G *= 1.0 / a

    gflat = G.reshape(N * mesh.Nx, K)
    vol = (gflat @ tab.S.T).reshape(N, mesh.Nx, K)

    # one-sided traces at the Nx distinct edges (edge e = left edge of cell e)
    Gminus = np.roll((gflat @ tab.bplus).reshape(N, mesh.Nx), 1, axis=1)
    Gplus = (gflat @ tab.bminus).reshape(N, mesh.Nx)
    Cminus = np.roll((flat @ tab.bplus).reshape(N, mesh.Nx), 1, axis=1)
    Cplus = (flat @ tab.bminus).reshape(N, mesh.Nx)
    ghat = numerical_flux(Gminus, Gplus, Cminus, Cplus, flux.nu[:, None], a)
    ghat_right = np.roll(ghat, -1, axis=1)

    dC = vol
    dC -= ghat_right[:, :, None] * tab.bplus
    dC += ghat[:, :, None] * tab.bminus
    dC *= (2.0 / mesh.h)[None, :, None]

    # sources: scaling drift plus the projected field coupling
    drift = n_idx[:, None, None] * C
    drift[2:] += np.sqrt(n_idx[2:] * (n_idx[2:] - 1.0))[:, None, None] * C[:-2]
    dC += (arate / a) * drift
    Eq = E.coeffs @ tab.VE
    Cq = (flat @ tab.V).reshape(N, mesh.Nx, tab.w.size)
    Cq *= Eq[None, :, :]
    proj = (Cq.reshape(N * mesh.Nx, -1) @ tab.VwT).reshape(N, mesh.Nx, K)
    dC[1:] += (a * sq_lo[1:])[:, None, None] * proj[:-1]

    if not np.all(np.isfinite(dC)):
        n_bad, j_bad = np.argwhere(~np.isfinite(dC))[0][:2]
        raise NumericalFailure(
            f"non-finite update at t={state.t:.6g}, mode {n_bad}, cell {j_bad}")
    return dC, E, arate
