"""Command-line entry points: run, convergence and compare.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from .diagnostics import compare_states, convergence_order
from .errors import ConfigError, NumericalFailure
from .hermite import HermiteSpec
from .scenarios import (
    RunConfig,
    build_flux,
    build_state,
    build_stepper,
    load_config,
    scenario_hash,
)
from .snapshots import DiagnosticsCSV, read_snapshot, write_snapshot
from .stepper import run


def _resolve(base: Path, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else base / p


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    state, spec = build_state(cfg)
    flux = build_flux(cfg)
    stepper_cfg = build_stepper(cfg)
    csv_path = _resolve(outdir, cfg.diagnostics_csv)
    snap_path = _resolve(outdir, cfg.snapshot)
    with DiagnosticsCSV(csv_path) as sink:
        final = run(state, flux, stepper_cfg, sink=sink, spec=spec)
    write_snapshot(snap_path, final, scenario=cfg.scenario,
                   scenario_hash=scenario_hash(cfg), v_max=cfg.v_max)
    print(f"run complete: t={final.t:g}, diagnostics -> {csv_path}, "
          f"snapshot -> {snap_path}")
    return 0


def _reference_config(cfg: RunConfig) -> RunConfig:
    return dataclasses.replace(cfg, Nx=cfg.ref_Nx, N=cfg.ref_N, k=cfg.ref_k,
                               dt=cfg.ref_dt)


def _load_or_compute_reference(cfg: RunConfig, outdir: Path, quiet=False):
    """Compute the reference run once and reuse its snapshot afterwards."""
    ref_cfg = _reference_config(cfg)
    tag = scenario_hash(ref_cfg)
    path = outdir / f"reference_{cfg.ref_Nx}x{cfg.ref_N}_P{cfg.ref_k}.snap"
    if path.exists():
        state, header = read_snapshot(path)
        if header.get("scenario_hash") == tag and abs(header["t"] - cfg.T) <= 1e-9 * cfg.T:
            if not quiet:
                print(f"reusing cached reference {path}")
            return state
    if not quiet:
        print(f"computing reference {cfg.ref_Nx}x{cfg.ref_N} P{cfg.ref_k} "
              f"(dt={ref_cfg.dt:g}) ...")
    state, spec = build_state(ref_cfg)
    final = run(state, build_flux(ref_cfg, N=cfg.ref_N),
                build_stepper(ref_cfg), spec=spec)
    write_snapshot(path, final, scenario=cfg.scenario, scenario_hash=tag,
                   v_max=cfg.v_max)
    return final


def convergence_table(cfg: RunConfig, levels: int, degree: int,
                      outdir: Path, quiet=False):
    """Run the resolution ladder against the cached reference.

    Returns a list of (label, error, order-or-None); the ladder doubles both
    the cell count and the mode count starting from 16x16.
    """
    if levels < 2:
        raise ConfigError("need at least 2 ladder levels")
    resolutions = [(16 * 2**i, 16 * 2**i) for i in range(levels)]
    for nx, n in resolutions:
        if (nx, n, degree) == (cfg.ref_Nx, cfg.ref_N, cfg.ref_k):
            raise ConfigError(
                "degenerate ladder: level matches the reference resolution")
    reference = _load_or_compute_reference(cfg, outdir, quiet=quiet)
    spec = HermiteSpec(cfg.ref_N, v_max=cfg.v_max)

    errors = []
    for nx, n in resolutions:
        state, _ = build_state(cfg, Nx=nx, N=n, k=degree)
        final = run(state, build_flux(cfg, N=n), build_stepper(cfg),
                    spec=HermiteSpec(n, v_max=cfg.v_max))
        report = compare_states(final, reference, spec=spec)
        errors.append(report.l2_weighted_error)
        if not quiet:
            print(f"  level {nx}x{n}: weighted error {report.l2_weighted_error:.3e}")
    orders = convergence_order(errors, [nx for nx, _ in resolutions])
    rows = []
    for i, ((nx, n), err) in enumerate(zip(resolutions, errors)):
        rows.append((f"{nx}x{n}", err, None if i == 0 else orders[i - 1]))
    return rows


def format_convergence_table(rows) -> str:
    lines = [f"{'resolution':<12} {'weighted L2 error':<20} {'order':<6}"]
    for label, err, order in rows:
        order_txt = "--" if order is None else f"{order:.2f}"
        lines.append(f"{label:<12} {err:<20.6e} {order_txt:<6}")
    return "\n".join(lines)


def _cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    degree = cfg.k if args.degree is None else args.degree
    if degree not in (0, 1, 2, 3):
        raise ConfigError("degree must be one of 0, 1, 2, 3")
    rows = convergence_table(cfg, args.levels, degree, outdir)
    table = format_convergence_table(rows)
    print(table)
    out = outdir / f"convergence_P{degree}.csv"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("resolution,weighted_l2_error,order\n")
        for label, err, order in rows:
            fh.write(f"{label},{err!r},{'' if order is None else repr(order)}\n")
    print(f"table -> {out}")
    return 0


def _cmd_compare(args) -> int:
    state_a, header_a = read_snapshot(args.a)
    state_b, header_b = read_snapshot(args.b)
    spec = HermiteSpec(state_b.n_modes, v_max=header_b.get("v_max", 8.0))
    try:
        report = compare_states(state_a, state_b, spec=spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"l2_weighted_error {report.l2_weighted_error!r}")
    print(f"l2_standard_error {report.l2_standard_error!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermite-dg",
        description="Hermite-spectral / discontinuous Galerkin kinetic solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--output-dir", default=".")
    p_run.set_defaults(func=_cmd_run)

    p_conv = sub.add_parser("convergence", help="resolution ladder vs reference")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--levels", type=int, required=True)
    p_conv.add_argument("--degree", type=int, default=None)
    p_conv.add_argument("--output-dir", default=".")
    p_conv.set_defaults(func=_cmd_convergence)

    p_cmp = sub.add_parser("compare", help="error norms between two snapshots")
    p_cmp.add_argument("--a", required=True)
    p_cmp.add_argument("--b", required=True)
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main(sys.argv[1:]))
