"""Batch command-line front end.

Every computation is a subcommand that writes one machine-readable table
(CSV or JSON) and exits 0 on success, 2 on an invalid configuration and 3
on a numerical failure.  Floats print with 17 significant digits and a '.'
decimal so identical configurations produce byte-identical files; elapsed
time goes to stderr, never into the output.  A JSON config file passed via
--config overrides the corresponding flags; unknown keys are rejected.
SPECTRA_THREADS caps the parallel width of the fiber loops.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .core import DomainError, Grid, Interval, NumericalError
from .closed_form import (
    CalogeroParams,
    MultitrapParams,
    calogero_spectrum,
    infinite_well_spectrum,
    kinetic_spectrum,
    momentum_spectrum,
    well_state,
)
from .direct_integral import band_structure, cell_grid
from .discrete_solver import (
    CalogeroPotential,
    Dirichlet,
    PeriodicCellPotential,
    ZeroPotential,
    assemble,
    eigensolve,
    half_line_grid,
)
from .dynamics import (
    CrankNicolsonPropagator,
    MultitrapSystem,
    dirichlet_well_propagator,
    evolve,
    free_line_propagator,
    leakage,
    sine_packet,
)
from .kinematics import momentum_distribution
from .core import QuasiPeriodic, inner_product, norm_squared
from .verification import ALL_CHECKS, run_suite


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _write_table(args, columns: list[str], rows: list[list], config: dict) -> None:
    if args.format == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "meta": {
                "tool": "spectra",
                "version": __version__,
                "command": args.command,
                "config": config,
            },
            "columns": columns,
            "rows": [[_fmt(v) for v in row] for row in rows],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_echo(args, keys: Sequence[str]) -> dict:
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _parse_label_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except Exception as exc:
        raise ConfigError(f"cannot parse label range {text!r}; expected LO..HI") from exc


def cmd_spectrum(args) -> int:
    families = [f for f in ("well", "halpha", "palpha", "calogero") if getattr(args, f)]
    if len(families) != 1:
        raise ConfigError("choose exactly one of --well/--halpha/--palpha/--calogero")
    family = families[0]
    columns = ["label", "eigenvalue_closed_form"]
    rows: list[list] = []
    fd_values: Optional[np.ndarray] = None

    if family == "well":
        spec = infinite_well_spectrum(args.nmax)
        if args.fd:
            op = assemble(Grid(Interval(0.0, math.pi), args.grid_n), ZeroPotential(), Dirichlet())
            fd_values = eigensolve(op, len(spec)).eigenvalues
    elif family == "halpha":
        lo, hi = _parse_label_range(args.n)
        spec = kinetic_spectrum(args.alpha, (lo, hi))
        if args.fd:
            op = assemble(cell_grid(args.grid_n), ZeroPotential(), QuasiPeriodic(args.alpha))
            fd_values = eigensolve(op, len(spec)).eigenvalues
    elif family == "palpha":
        if args.fd:
            raise ConfigError("the momentum family has no finite-difference route")
        lo, hi = _parse_label_range(args.n)
        spec = momentum_spectrum(args.alpha, (lo, hi))
    else:
        params = CalogeroParams(args.gamma)
        spec = calogero_spectrum(params, args.k - 1)
        if args.fd:
            op = assemble(
                half_line_grid(args.length, args.grid_n),
                CalogeroPotential(args.gamma),
                Dirichlet(),
            )
            fd_values = eigensolve(op, len(spec)).eigenvalues

    if fd_values is not None:
        columns += ["eigenvalue_fd", "rel_error"]
    for i, (label, ev) in enumerate(zip(spec.labels, spec.eigenvalues)):
        row: list = [label, float(ev)]
        if fd_values is not None:
            denom = abs(ev) if abs(ev) > 1e-14 else 1.0
            row += [float(fd_values[i]), abs(float(fd_values[i]) - float(ev)) / denom]
        rows.append(row)
    _write_table(args, columns, rows, _config_echo(args, ("nmax", "alpha", "n", "gamma", "k", "fd", "grid_n", "length")))
    return 0


def cmd_evolve(args) -> int:
    grid = cell_grid(args.grid_n)
    if args.well_state is not None:
        psi0 = well_state(args.well_state, grid)
    else:
        psi0 = sine_packet(grid, Interval(0.0, math.pi), (1.0, 0.5, 0.3, 0.1))
    if args.method == "spectral":
        prop = dirichlet_well_propagator(grid)
    else:
        sgrid = Grid(Interval(0.0, math.pi), args.grid_n)
        op = assemble(sgrid, ZeroPotential(), Dirichlet())
        prop = CrankNicolsonPropagator(op, dt=args.dt)
        if args.well_state is not None:
            psi0 = well_state(args.well_state, sgrid)
        else:
            psi0 = sine_packet(sgrid, Interval(0.0, math.pi), (1.0, 0.5, 0.3, 0.1))
    times = np.linspace(0.0, args.t, args.nt)
    rows = []
    for t in times:
        psi_t = evolve(prop, psi0, float(t))
        rows.append(
            [float(t), norm_squared(psi_t), abs(inner_product(psi0, psi_t))]
        )
    _write_table(
        args,
        ["t", "norm_squared", "overlap_abs"],
        rows,
        _config_echo(args, ("well_state", "t", "method", "dt", "grid_n", "nt")),
    )
    return 0


def cmd_leakage(args) -> int:
    times = np.linspace(0.0, args.tmax, args.nt)[1:]
    if args.free:
        grid = Grid(Interval(-2.0 * math.pi, 3.0 * math.pi), 5 * (args.grid_n + 1) - 1)
        prop = free_line_propagator(grid)
        psi = sine_packet(grid, Interval(0.0, math.pi))
        cell = Interval(0.0, math.pi)
    else:
        mt = MultitrapSystem.build(
            MultitrapParams(q=args.q), n_cells=args.cells, points_per_cell=args.grid_n
        )
        prop = mt.propagator
        psi = mt.packet(args.cell)
        cell = mt.cell(args.cell)
    report = leakage(prop, psi, cell, times)
    rows = [
        [float(t), float(i), float(l)]
        for t, i, l in zip(report.times, report.inside_mass, report.leaked_mass)
    ]
    _write_table(
        args,
        ["t", "inside_mass", "leaked_mass"],
        rows,
        _config_echo(args, ("q", "cell", "cells", "tmax", "nt", "grid_n", "free")),
    )
    return 0


def cmd_momentum(args) -> int:
    grid = Grid(Interval(0.0, math.pi), args.grid_n)
    psi = well_state(args.well_state, grid)
    p = np.linspace(-args.pmax, args.pmax, args.np_points)
    dist = momentum_distribution(psi, p)
    rows = [[float(pv), float(dv)] for pv, dv in zip(dist.p_grid, dist.density)]
    _write_table(
        args,
        ["p", "density"],
        rows,
        _config_echo(args, ("well_state", "pmax", "np_points", "grid_n")),
    )
    return 0


def cmd_bands(args) -> int:
    if args.bump_height > 0.0:
        height = args.bump_height

        def bump(x):
            return height * np.sin(np.asarray(x, dtype=float)) ** 2

        potential = PeriodicCellPotential(bump)
    else:
        potential = PeriodicCellPotential(
            lambda x: np.zeros_like(np.asarray(x, dtype=float))
        )
    alphas = 2.0 * math.pi * np.arange(args.alphas) / args.alphas
    table = band_structure(potential, alphas, k=args.k, n=args.grid_n)
    columns = ["alpha"] + [f"E_{j}" for j in range(args.k)]
    rows = [
        [float(a)] + [float(e) for e in table.energies[i]]
        for i, a in enumerate(table.alphas)
    ]
    _write_table(
        args, columns, rows, _config_echo(args, ("bump_height", "alphas", "k", "grid_n"))
    )
    return 0


def cmd_verify(args) -> int:
    names = None
    if args.checks:
        names = [s.strip() for s in args.checks.split(",") if s.strip()]
        known = {n for n, _ in ALL_CHECKS}
        unknown = [n for n in names if n not in known]
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(unknown)}")
    if not args.all and names is None:
        raise ConfigError("pass --all or --checks NAMES")
    results = run_suite(seed=args.seed, names=names)
    rows = [
        [r.name, "PASS" if r.passed else "FAIL", r.metric, r.bound, r.note]
        for r in results
    ]
    _write_table(
        args,
        ["check", "status", "metric", "bound", "note"],
        rows,
        _config_echo(args, ("seed", "all", "checks")),
    )
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectra",
        description="Spectra, dynamics and barriers of 1D quantum Hamiltonians",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None, help="write the table to a file")
        p.add_argument("--config", default=None, help="JSON file overriding flags")

    p = sub.add_parser("spectrum", help="closed-form and finite-difference spectra")
    p.add_argument("--well", action="store_true", help="infinite well on [0, pi]")
    p.add_argument("--halpha", action="store_true", help="quasi-periodic kinetic family")
    p.add_argument("--palpha", action="store_true", help="quasi-periodic momentum family")
    p.add_argument("--calogero", action="store_true", help="x^2 + gamma/x^2 on the half line")
    p.add_argument("--nmax", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--n", default="-3..3", help="label range LO..HI")
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--k", type=int, default=2, help="number of levels (calogero)")
    p.add_argument("--fd", action="store_true", help="add a finite-difference column")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=1200)
    p.add_argument("--length", type=float, default=12.0, help="half-line truncation")
    add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("evolve", help="unitary evolution diagnostics in the well")
    p.add_argument("--well-state", dest="well_state", type=int, default=None)
    p.add_argument("--t", type=float, default=float(2.0 * math.pi))
    p.add_argument("--method", choices=("spectral", "cn"), default="spectral")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=600)
    p.add_argument("--nt", type=int, default=9, help="number of report times")
    add_common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("leakage", help="probability outside a trap cell over time")
    p.add_argument("--multitrap", action="store_true", help="direct-sum trap propagator")
    p.add_argument("--free", action="store_true", help="free-line negative control")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--cell", type=int, default=0)
    p.add_argument("--cells", type=int, default=4)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--nt", type=int, default=6)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=250, help="points per cell")
    add_common(p)
    p.set_defaults(func=cmd_leakage)

    p = sub.add_parser("momentum", help="full-line momentum density of a well state")
    p.add_argument("--well-state", dest="well_state", type=int, default=0)
    p.add_argument("--pmax", type=float, default=40.0)
    p.add_argument("--np", dest="np_points", type=int, default=2001)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=2000)
    add_common(p)
    p.set_defaults(func=cmd_momentum)

    p = sub.add_parser("bands", help="band structure of the fibered cell Hamiltonian")
    p.add_argument("--bump-height", dest="bump_height", type=float, default=0.0)
    p.add_argument("--alphas", type=int, default=17)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=300)
    add_common(p)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--all", action="store_true")
    p.add_argument("--checks", default=None, help="comma-separated check names")
    p.add_argument("--seed", type=int, default=7)
    add_common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def _apply_config(args) -> None:
    if not args.config:
        return
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            overrides = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    if not isinstance(overrides, dict):
        raise ConfigError("config file must hold a JSON object")
    protected = {"command", "func", "config"}
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if dest in protected or not hasattr(args, dest):
            raise ConfigError(f"unknown config key {key!r}")
        setattr(args, dest, value)


def _merge_negative_ranges(argv: Sequence[str]) -> list[str]:
    """Join ``--n -2..2`` into ``--n=-2..2`` so argparse accepts it."""
    out: list[str] = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok == "--n" and nxt is not None and nxt.startswith("-"):
            out.append(f"--n={nxt}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_merge_negative_ranges(list(argv if argv is not None else sys.argv[1:])))
    started = time.monotonic()
    try:
        _apply_config(args)
        code = args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(f"elapsed: {time.monotonic() - started:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
