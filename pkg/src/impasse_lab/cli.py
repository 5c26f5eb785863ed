"""Command-line front end.

::

    impasse-lab analyze FILE [--box X0 X1 Y0 Y1] [--tol T] [--json OUT]
    impasse-lab portrait FILE [--box ...] [--grid NxM] [--t-end T] [--svg OUT] [--csv OUT]
    impasse-lab compactify FILE [--json OUT]
    impasse-lab slowfast FILE [--eps E1,E2,...] [--mode equilibrium|periodic] [--json OUT] [--csv OUT]
    impasse-lab catastrophe NAME [--svg OUT] [--json OUT] [--grid NxM]

Exit codes: 0 success, 1 input error, 2 wrong kind of system for the
command, 3 numerical failure.  Reports go to stdout unless ``--json`` is
given.  ``IMPASSE_LAB_THREADS`` bounds the number of worker threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .classify import adjoint_equilibria
from .errors import ImpasseLabError, ParseError
from .numerics import Box2
from .portrait import portrait_csv, render_svg, sample_portrait, zero_contour
from .reduction import (ConstrainedSystem, cancel_row_factors, reduce_general, reduce_potential,
                        takens_catalog)
from .report import (analyze_constrained, analyze_surface, catastrophe_report, compactify_report,
                     continuation_report, dumps, SCHEMA)
from .slowfast import continue_equilibrium, continue_periodic
from .systemfile import Mode, SystemFile, load_system

__all__ = ["main", "build_parser"]

BANNER = f"impasse-lab {__version__}"


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); 2 is reserved for mode mismatches
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        n, m = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 5x5, not {text!r}") from None
    if n < 1 or m < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return n, m


def _eps_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"eps must be a comma-separated list, not {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="impasse-lab", description="Impasse analysis of constrained systems "
                "induced on invariant graph surfaces.")
    p.add_argument("--version", action="version", version=BANNER)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def box_opt(sp):
        sp.add_argument("--box", nargs=4, type=float, metavar=("X0", "X1", "Y0", "Y1"),
                        help="analysis box (overrides [analysis] box)")

    a = sub.add_parser("analyze", help="full report for a system file")
    a.add_argument("path")
    box_opt(a)
    a.add_argument("--tol", type=float, help="zero tolerance (overrides [analysis] tol)")
    a.add_argument("--json", metavar="OUT", help="write the report here instead of stdout")

    pt = sub.add_parser("portrait", help="phase portrait as SVG and/or CSV")
    pt.add_argument("path")
    box_opt(pt)
    pt.add_argument("--grid", type=_grid, help="seed grid NxM (overrides [analysis] grid)")
    pt.add_argument("--t-end", type=float, help="integration time per direction")
    pt.add_argument("--svg", metavar="OUT")
    pt.add_argument("--csv", metavar="OUT")

    c = sub.add_parser("compactify", help="boundary of the surface at infinity")
    c.add_argument("path")
    c.add_argument("--json", metavar="OUT")

    s = sub.add_parser("slowfast", help="continuation of equilibria or cycles in eps")
    s.add_argument("path")
    s.add_argument("--eps", type=_eps_list, help="decreasing comma-separated eps values")
    s.add_argument("--mode", choices=("equilibrium", "periodic"))
    s.add_argument("--json", metavar="OUT")
    s.add_argument("--csv", metavar="OUT")

    k = sub.add_parser("catastrophe", help="one of the 12 generic normal forms")
    k.add_argument("name")
    k.add_argument("--svg", metavar="OUT")
    k.add_argument("--json", metavar="OUT")
    k.add_argument("--grid", type=_grid, default=(7, 7))
    return p


def _write(text: str, path: str | None, out) -> None:
    if path is None:
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _box(args, sysfile: SystemFile) -> Box2:
    if getattr(args, "box", None):
        try:
            return Box2(*args.box)
        except ValueError as exc:
            raise ParseError(f"--box: {exc}") from None
    return sysfile.analysis.box


def _planar(sysfile: SystemFile) -> ConstrainedSystem:
    sysfile.require(Mode.SURFACE, Mode.CONSTRAINED)
    if sysfile.mode is Mode.CONSTRAINED:
        return sysfile.constrained
    return cancel_row_factors(reduce_general(sysfile.field, sysfile.surface))[0]


def _portrait_svg(cs: ConstrainedSystem, box: Box2, grid, t_end: float, title: str):
    curves = sample_portrait(cs, box, grid, t_end)
    impasse = zero_contour(cs.detA.to_function(("x", "y")), box)
    try:
        eqs = [(e.point, e.on_impasse) for e in adjoint_equilibria(cs, box)]
    except ImpasseLabError:
        eqs = []
    return curves, render_svg(box, curves, impasse, eqs, title, BANNER)


def cmd_analyze(args, out) -> int:
    sysfile = load_system(args.path)
    sysfile.require(Mode.SURFACE, Mode.CONSTRAINED)
    box = _box(args, sysfile)
    tol = args.tol if args.tol is not None else sysfile.analysis.tol
    if sysfile.mode is Mode.SURFACE:
        report = analyze_surface(sysfile.field, sysfile.surface, box, tol)
    else:
        report = analyze_constrained(sysfile.constrained, box, tol)
    report = {**report, "title": sysfile.title}
    _write(dumps(report), args.json, out)
    return 0


def cmd_portrait(args, out) -> int:
    sysfile = load_system(args.path)
    cs = _planar(sysfile)
    box = _box(args, sysfile)
    grid = args.grid or sysfile.analysis.grid
    t_end = args.t_end if args.t_end is not None else sysfile.analysis.t_end
    curves, svg = _portrait_svg(cs, box, grid, t_end, sysfile.title)
    if args.svg is None and args.csv is None:
        out.write(svg)
    if args.svg is not None:
        _write(svg, args.svg, out)
    if args.csv is not None:
        _write(portrait_csv(curves), args.csv, out)
    return 0


def cmd_compactify(args, out) -> int:
    sysfile = load_system(args.path)
    sysfile.require(Mode.SURFACE)
    report = {"schema": SCHEMA, "mode": "compactify", "title": sysfile.title,
              "surface": {"f": str(sysfile.surface.f), "g": str(sysfile.surface.g)},
              "infinity": compactify_report(sysfile.surface)}
    _write(dumps(report), args.json, out)
    return 0


def _continuation_csv(result) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    first = result.items[0]
    dim = len(first) if not hasattr(first, "points") else first.points.shape[1]
    w.writerow(["eps", "obj_index"] + [f"coord{i}" for i in range(dim)] + ["distance"])
    f = lambda v: format(float(v), ".17g")
    for e, item, d in zip(result.eps_values, result.items, result.distances):
        rows = item.points if hasattr(item, "points") else [item]
        for i, p in enumerate(rows):
            w.writerow([f(e), i] + [f(v) for v in p] + [f(d)])
    return buf.getvalue()


def cmd_slowfast(args, out) -> int:
    sysfile = load_system(args.path)
    sysfile.require(Mode.SLOWFAST)
    setup = sysfile.slowfast
    eps = args.eps or setup.eps
    mode = args.mode or setup.mode
    try:
        if mode == "equilibrium":
            if setup.point is None:
                raise ParseError("[slowfast] equilibrium mode needs 'point'")
            result = continue_equilibrium(setup.family, setup.point, eps, setup.tol)
        else:
            result = continue_periodic(setup.family, setup.seed_orbit(), eps, setup.tol)
    except ValueError as exc:
        if isinstance(exc, ImpasseLabError):
            raise
        raise ParseError(str(exc)) from None
    report = {**continuation_report(result, mode), "title": sysfile.title}
    _write(dumps(report), args.json, out)
    if args.csv is not None:
        _write(_continuation_csv(result), args.csv, out)
    return 0


def cmd_catastrophe(args, out) -> int:
    spec = takens_catalog(args.name)
    report = catastrophe_report(spec)
    if args.svg is not None:
        cs = reduce_potential(spec.V, spec.X.beta, spec.X.gamma)
        box = Box2(-2.0, 2.0, -2.0, 2.0)
        _, svg = _portrait_svg(cs, box, args.grid, 5.0, f"{spec.name}: {cs}")
        _write(svg, args.svg, out)
    if args.json is not None or args.svg is None:
        _write(dumps(report), args.json, out)
    return 0


_COMMANDS = {"analyze": cmd_analyze, "portrait": cmd_portrait, "compactify": cmd_compactify,
             "slowfast": cmd_slowfast, "catastrophe": cmd_catastrophe}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    """Run one command; returns the exit code."""
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except ImpasseLabError as exc:
        sys.stderr.write(f"impasse-lab: {type(exc).__name__}: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
