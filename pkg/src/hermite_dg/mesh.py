"""Periodic 1D mesh, modal Legendre basis, quadrature and L2 projection.

Fields are stored per cell as coefficients in the Legendre basis that is
orthonormal on the reference interval [-1, 1], so the local mass matrix is
(h_j / 2) times the identity and all cell reductions are diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Mesh1D:
    """Partition of the periodic interval [0, L] into Nx cells."""

    L: float
    Nx: int
    edges: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        if self.L <= 0.0 or self.Nx < 1:
            raise ValueError("domain length and cell count must be positive")
        if self.edges.shape != (self.Nx + 1,) or self.h.shape != (self.Nx,):
            raise ValueError("inconsistent mesh arrays")
        if np.any(self.h <= 0.0):
            raise ValueError("edges must be strictly increasing")
        if abs(self.edges[0]) > 1e-14 * self.L or abs(self.edges[-1] - self.L) > 1e-12 * self.L:
            raise ValueError("edges must span [0, L]")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def build_mesh(L: float, Nx: int) -> Mesh1D:
    """Uniform periodic mesh with cell size L / Nx."""
    if L <= 0.0 or Nx < 1:
        raise ValueError("domain length and cell count must be positive")
    edges = np.linspace(0.0, float(L), Nx + 1)
    edges[-1] = float(L)
    return Mesh1D(float(L), int(Nx), edges, np.diff(edges))


def mesh_from_edges(edges) -> Mesh1D:
    """General (possibly nonuniform) partition from its edge coordinates."""
    edges = np.asarray(edges, dtype=float)
    return Mesh1D(float(edges[-1]), edges.size - 1, edges, np.diff(edges))


@dataclass(frozen=True)
class QuadRule:
    """Quadrature nodes/weights on the reference interval [-1, 1]."""

    q: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=128)
def gauss_legendre(q: int) -> QuadRule:
    """Gauss-Legendre rule with q points, exact for degree 2q - 1."""
    if not 1 <= q <= 64:
        raise ValueError("point count must be between 1 and 64")
    nodes, weights = np.polynomial.legendre.leggauss(q)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(q, nodes, weights)


def legendre_basis(k: int, xi) -> np.ndarray:
    """Orthonormal Legendre values P~_0..P~_k at xi, shape (k+1, len(xi))."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    P = np.empty((k + 1, xi.size))
    P[0] = 1.0
    if k >= 1:
        P[1] = xi
    for m in range(1, k):
        P[m + 1] = ((2 * m + 1) * xi * P[m] - m * P[m - 1]) / (m + 1)
    return P * np.sqrt(np.arange(k + 1) + 0.5)[:, None]


def legendre_basis_deriv(k: int, xi) -> np.ndarray:
    """Derivatives of the orthonormal Legendre basis at xi."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    P = np.empty((k + 1, xi.size))
    D = np.zeros((k + 1, xi.size))
    P[0] = 1.0
    if k >= 1:
        P[1] = xi
        D[1] = 1.0
    for m in range(1, k):
        P[m + 1] = ((2 * m + 1) * xi * P[m] - m * P[m - 1]) / (m + 1)
        D[m + 1] = (2 * m + 1) * P[m] + D[m - 1]
    return D * np.sqrt(np.arange(k + 1) + 0.5)[:, None]


def legendre_basis_deriv2(k: int, xi) -> np.ndarray:
    """Second derivatives of the orthonormal Legendre basis at xi."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    P = np.empty((k + 1, xi.size))
    D = np.zeros((k + 1, xi.size))
    D2 = np.zeros((k + 1, xi.size))
    P[0] = 1.0
    if k >= 1:
        P[1] = xi
        D[1] = 1.0
    for m in range(1, k):
        P[m + 1] = ((2 * m + 1) * xi * P[m] - m * P[m - 1]) / (m + 1)
        D[m + 1] = (2 * m + 1) * P[m] + D[m - 1]
        D2[m + 1] = (2 * m + 1) * D[m] + D2[m - 1]
    return D2 * np.sqrt(np.arange(k + 1) + 0.5)[:, None]


@lru_cache(maxsize=32)
def legendre_edge_values(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Basis values at the cell endpoints: (at -1, at +1)."""
    vals = legendre_basis(k, np.array([-1.0, 1.0]))
    minus = vals[:, 0].copy()
    plus = vals[:, 1].copy()
    minus.setflags(write=False)
    plus.setflags(write=False)
    return minus, plus


@dataclass(frozen=True)
class DGScalarField:
    """One scalar function as per-cell modal coefficients of degree <= k."""

    mesh: Mesh1D
    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.mesh.Nx, self.k + 1):
            raise ValueError("coefficient array must have shape (Nx, k+1)")


def zero_field(mesh: Mesh1D, k: int) -> DGScalarField:
    return DGScalarField(mesh, k, np.zeros((mesh.Nx, k + 1)))


def locate_cells(mesh: Mesh1D, x) -> tuple[np.ndarray, np.ndarray]:
    """Cell index and reference coordinate for each point, with periodic wrap.

    Cells are half-open on the right, so interior edge points belong to the
    cell on their right.
    """
    xm = np.mod(np.asarray(x, dtype=float), mesh.L)
    j = np.clip(np.searchsorted(mesh.edges, xm, side="right") - 1, 0, mesh.Nx - 1)
    xi = 2.0 * (xm - mesh.centers[j]) / mesh.h[j]
    return j, xi


def eval_field(u: DGScalarField, x):
    """Point values of the cell-local polynomials at x (periodic wrap)."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    j, xi = locate_cells(u.mesh, np.atleast_1d(x))
    P = legendre_basis(u.k, xi)
    vals = np.einsum("pm,mp->p", u.coeffs[j], P)
    return float(vals[0]) if scalar else vals


def traces(u: DGScalarField, j: int) -> tuple[float, float]:
    """One-sided limits (u-, u+) at edge j, for j = 0..Nx (periodic wrap)."""
    Nx = u.mesh.Nx
    if not 0 <= j <= Nx:
        raise ValueError("edge index out of range")
    minus_basis, plus_basis = legendre_edge_values(u.k)
    uminus = float(u.coeffs[(j - 1) % Nx] @ plus_basis)
    uplus = float(u.coeffs[j % Nx] @ minus_basis)
    return uminus, uplus


def all_traces(u: DGScalarField) -> tuple[np.ndarray, np.ndarray]:
    """(u-, u+) at the Nx distinct edges; edge e is the left edge of cell e."""
    minus_basis, plus_basis = legendre_edge_values(u.k)
    uminus = np.roll(u.coeffs @ plus_basis, 1)
    uplus = u.coeffs @ minus_basis
    return uminus, uplus


def project_to_Xh(g: Callable, mesh: Mesh1D, k: int, quad: QuadRule | None = None) -> DGScalarField:
    """Per-cell L2 projection of a function onto degree-k polynomials."""
    if quad is None:
        quad = gauss_legendre(k + 2)
    xq = mesh.centers[:, None] + 0.5 * mesh.h[:, None] * quad.nodes[None, :]
    vals = np.asarray(g(xq), dtype=float)
    if vals.shape != xq.shape:
        vals = np.broadcast_to(vals, xq.shape)
    P = legendre_basis(k, quad.nodes)
    coeffs = np.einsum("jq,q,mq->jm", vals, quad.weights, P)
    return DGScalarField(mesh, k, coeffs)


def skeleton_norm(u: DGScalarField) -> float:
    """Root sum of squared one-sided trace values over all mesh edges."""
    uminus, uplus = all_traces(u)
    return float(np.sqrt(np.sum(uminus**2) + np.sum(uplus**2)))


def l2_norm(u: DGScalarField) -> float:
    """L2(dx) norm over the whole domain (exact, diagonal mass matrix)."""
    return float(np.sqrt(np.sum(0.5 * u.mesh.h[:, None] * u.coeffs**2)))


def cell_integrals(u: DGScalarField) -> np.ndarray:
    """Exact integral of u over each cell."""
    return u.mesh.h * u.coeffs[:, 0] / np.sqrt(2.0)


def integral(u: DGScalarField) -> float:
    """Exact integral of u over the whole domain."""
    return float(np.sum(cell_integrals(u)))
