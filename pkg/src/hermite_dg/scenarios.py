"""Benchmark initial conditions and run configuration.

Configs are flat UTF-8 ``key = value`` files with ``#`` comments; unknown
keys are errors so a typo cannot silently fall back to a default.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError
from .hermite import HermiteSpec, ScalingState, hermite_polys, velocity_quadrature
from .mesh import Mesh1D, QuadRule, build_mesh, gauss_legendre, legendre_basis
from .rhs import FluxSpec, KineticState
from .stepper import StepperConfig

SQRT_PI = math.sqrt(math.pi)


def _init_spec(N: int, v_max: float) -> HermiteSpec:
    # denser than the transform default: initial coefficients should be
    # quadrature-converged so only the domain truncation remains
    return HermiteSpec(N, v_max=v_max, points=max(8 * N, 128))


def init_from_function(f0, mesh: Mesh1D, N: int, k: int, alpha0: float,
                       gamma: float, spec: HermiteSpec | None = None,
                       quad: QuadRule | None = None) -> KineticState:
    """Initial modes of an arbitrary f0(x, v) by tensor quadrature.

    Velocity transform first (coefficients at every spatial quadrature node),
    then the per-cell L2 projection in x.  f0 must broadcast over numpy
    arrays.
    """
    if spec is None:
        spec = _init_spec(N, 8.0)
    if quad is None:
        quad = gauss_legendre(k + 2)
    vq, wv = velocity_quadrature(spec)
    H = hermite_polys(alpha0 * vq, N)
    xs = mesh.centers[:, None] + 0.5 * mesh.h[:, None] * quad.nodes[None, :]
    F = np.asarray(f0(xs[:, :, None], vq[None, None, :]), dtype=float)
    C_at_nodes = np.einsum("jqv,v,nv->njq", F, wv, H)
    P = legendre_basis(k, quad.nodes)
    coeffs = np.einsum("njq,q,mq->njm", C_at_nodes, quad.weights, P)
    return KineticState(coeffs, mesh, k, ScalingState.initial(alpha0, gamma))


def init_landau(delta: float, wavenumber: float, mesh: Mesh1D, N: int, k: int,
                alpha0: float, gamma: float, v_max: float = 8.0) -> KineticState:
    """Cosine-perturbed Maxwellian: f0 = (1 + delta cos(wavenumber x)) M(v)."""

    def f0(x, v):
        return (1.0 + delta * np.cos(wavenumber * x)) * np.exp(-0.5 * v * v) / math.sqrt(2.0 * math.pi)

    return init_from_function(f0, mesh, N, k, alpha0, gamma,
                              spec=_init_spec(N, v_max))


def init_bump_on_tail(kappa: float, n_harm: int, n_p: float, n_b: float,
                      v_d: float, v_p: float, v_b: float, mesh: Mesh1D,
                      N: int, k: int, alpha0: float, gamma: float,
                      v_max: float = 8.0) -> KineticState:
    """Maxwellian bulk plus a drifting beam, perturbed on the n-th harmonic."""
    wavenumber = 2.0 * math.pi / mesh.L * n_harm

    def f0(x, v):
        bulk = n_p / (SQRT_PI * v_p) * np.exp(-(v / v_p) ** 2)
        beam = n_b / (SQRT_PI * v_b) * np.exp(-(((v - v_d)) / v_b) ** 2)
        return (bulk + beam) * (1.0 + kappa * np.cos(wavenumber * x))

    return init_from_function(f0, mesh, N, k, alpha0, gamma,
                              spec=_init_spec(N, v_max))


_EXPR_NAMES = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "sqrt": np.sqrt, "abs": np.abs, "tanh": np.tanh, "cosh": np.cosh,
    "log": np.log, "pi": math.pi,
}


def init_custom(expr: str, mesh: Mesh1D, N: int, k: int, alpha0: float,
                gamma: float, v_max: float = 8.0) -> KineticState:
    """Initial condition from an expression in x and v (numpy semantics)."""

    def f0(x, v):
        try:
            return eval(expr, {"__builtins__": {}},
                        dict(_EXPR_NAMES, x=x, v=v))  # noqa: S307 - sandboxed names
        except Exception as exc:
            raise ConfigError(f"cannot evaluate f0 expression: {exc}") from exc

    return init_from_function(f0, mesh, N, k, alpha0, gamma,
                              spec=_init_spec(N, v_max))


_SCENARIOS = ("landau", "bump_on_tail", "custom")

# physics defaults that depend on the scenario; everything else has a
# field-level default below
_SCENARIO_DEFAULTS = {
    "landau": dict(L=12.0, T=0.5, gamma=1.0, alpha0=1.0),
    "bump_on_tail": dict(L=62.0, T=50.0, gamma=1e-2, alpha0=5.0 / 7.0),
    "custom": dict(L=2.0 * math.pi, T=1.0, gamma=1.0, alpha0=1.0),
}


@dataclass
class RunConfig:
    """Everything one run needs; parsed from a key = value file."""

    scenario: str = "landau"
    Nx: int = 32
    N: int = 32
    k: int = 2
    L: float | None = None
    v_max: float = 8.0
    dt: float = 1e-3
    T: float | None = None
    gamma: float | None = None
    alpha0: float | None = None
    nu_default: float | None = None
    centered_mode0: bool = False
    filter_enabled: bool = True
    filter_strength: float = 36.0
    filter_order: int = 36
    filter_cutoff: float = 2.0 / 3.0
    filter_cadence: int = 1
    output_every: int = 10
    diagnostics_csv: str = "diagnostics.csv"
    snapshot: str = "final.snap"
    # landau parameters
    delta: float = 0.01
    wavenumber: float | None = None
    # bump-on-tail parameters
    kappa: float = 0.04
    n_harm: int = 3
    n_p: float = 0.9
    n_b: float = 0.1
    v_d: float = 4.5
    v_p: float = math.sqrt(2.0)
    v_b: float = math.sqrt(2.0) / 2.0
    # custom scenario
    f0: str | None = None
    # convergence-study reference resolution
    ref_Nx: int = 512
    ref_N: int = 512
    ref_k: int = 2
    ref_dt: float = 1e-4

    def finalize(self) -> "RunConfig":
        """Fill scenario-dependent defaults and validate the combination."""
        if self.scenario not in _SCENARIOS:
            raise ConfigError(f"unknown scenario: {self.scenario!r}")
        for key, value in _SCENARIO_DEFAULTS[self.scenario].items():
            if getattr(self, key) is None:
                setattr(self, key, value)
        if self.wavenumber is None:
            self.wavenumber = 2.0 * math.pi / self.L
        if self.scenario == "custom" and not self.f0:
            raise ConfigError("scenario custom requires an f0 expression")
        if self.k not in (0, 1, 2, 3):
            raise ConfigError("polynomial degree k must be one of 0, 1, 2, 3")
        if self.N < 1 or self.Nx < 1:
            raise ConfigError("N and Nx must be positive")
        if self.filter_enabled and self.N < 4:
            raise ConfigError("filtered runs need N >= 4")
        for key in ("L", "v_max", "dt", "T", "alpha0"):
            if getattr(self, key) <= 0.0:
                raise ConfigError(f"{key} must be positive")
        if self.gamma < 0.0:
            raise ConfigError("gamma must be nonnegative")
        if self.dt > self.T:
            raise ConfigError("dt may not exceed T")
        if self.output_every < 1:
            raise ConfigError("output_every must be positive")
        return self


_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _parse_value(raw: str, target_type, key: str):
    raw = raw.strip()
    if target_type is bool:
        try:
            return _BOOL_WORDS[raw.lower()]
        except KeyError:
            raise ConfigError(f"key {key}: expected a boolean, got {raw!r}") from None
    try:
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"key {key}: cannot parse {raw!r}") from None
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse key = value lines into a finalized RunConfig."""
    field_types = {}
    for f in fields(RunConfig):
        t = f.type
        if "int" in str(t):
            field_types[f.name] = int
        elif "float" in str(t):
            field_types[f.name] = float
        elif "bool" in str(t):
            field_types[f.name] = bool
        else:
            field_types[f.name] = str

    cfg = RunConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in field_types:
            raise ConfigError(f"line {lineno}: unknown config key: {key}")
        setattr(cfg, key, _parse_value(raw, field_types[key], key))
    return cfg.finalize()


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def scenario_hash(cfg: RunConfig) -> str:
    """Stable digest of the physics parameters (not the output paths)."""
    keys = ("scenario", "Nx", "N", "k", "L", "v_max", "dt", "T", "gamma",
            "alpha0", "nu_default", "centered_mode0", "filter_enabled",
            "filter_strength", "filter_order", "filter_cutoff",
            "filter_cadence", "delta", "wavenumber", "kappa", "n_harm",
            "n_p", "n_b", "v_d", "v_p", "v_b", "f0")
    canon = "\n".join(f"{k}={getattr(cfg, k)!r}" for k in keys)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def build_state(cfg: RunConfig, Nx: int | None = None, N: int | None = None,
                k: int | None = None) -> tuple[KineticState, HermiteSpec]:
    """Initial state (optionally at an override resolution) plus its spec."""
    Nx = cfg.Nx if Nx is None else Nx
    N = cfg.N if N is None else N
    k = cfg.k if k is None else k
    mesh = build_mesh(cfg.L, Nx)
    spec = HermiteSpec(N, v_max=cfg.v_max)
    if cfg.scenario == "landau":
        state = init_landau(cfg.delta, cfg.wavenumber, mesh, N, k,
                            cfg.alpha0, cfg.gamma, v_max=cfg.v_max)
    elif cfg.scenario == "bump_on_tail":
        state = init_bump_on_tail(cfg.kappa, cfg.n_harm, cfg.n_p, cfg.n_b,
                                  cfg.v_d, cfg.v_p, cfg.v_b, mesh, N, k,
                                  cfg.alpha0, cfg.gamma, v_max=cfg.v_max)
    else:
        state = init_custom(cfg.f0, mesh, N, k, cfg.alpha0, cfg.gamma,
                            v_max=cfg.v_max)
    return state, spec


def build_flux(cfg: RunConfig, N: int | None = None) -> FluxSpec:
    return FluxSpec.lax_friedrichs(cfg.N if N is None else N,
                                   nu=cfg.nu_default,
                                   centered_mode0=cfg.centered_mode0)


def build_stepper(cfg: RunConfig, dt: float | None = None) -> StepperConfig:
    return StepperConfig(
        dt=cfg.dt if dt is None else dt,
        T=cfg.T,
        filter_enabled=cfg.filter_enabled,
        filter_strength=cfg.filter_strength,
        filter_order=cfg.filter_order,
        filter_cutoff=cfg.filter_cutoff,
        filter_cadence=cfg.filter_cadence,
        record_every=cfg.output_every,
    )
