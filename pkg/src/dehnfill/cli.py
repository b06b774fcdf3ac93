"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 reducible monodromy
word, 3 triangulation failed validation, 4 no solutions found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import fileformat
from .bundle import ReducibleMonodromy, build_from_word
from .equations import assemble_system, parse_filling
from .geometry import analyze
from .holonomy import (INF, DevelopmentError, edge_relation_check, generators_text, holonomy_generators,
                       invariant_circle_heuristic, peripheral_holonomy)
from .solver import SolveResult, SolverOptions, load_report, multistart_solve, solution_report
from .triangulation import Triangulation, TriangulationError, validate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REDUCIBLE = 2
EXIT_INVALID = 3
EXIT_NO_SOLUTIONS = 4


@dataclass
class RunConfig:
    path: str | None = None
    word: str | None = None
    fillings: list = field(default_factory=list)
    options: SolverOptions = field(default_factory=SolverOptions)
    fmt: str = "table"
    output: str | None = None

    def __post_init__(self):
        if (self.path is None) == (self.word is None):
            raise ValueError("give exactly one of a triangulation file or --word")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(cfg: RunConfig) -> Triangulation:
    if cfg.word is not None:
        try:
            return build_from_word(cfg.word)
        except ReducibleMonodromy as exc:
            raise CliError(str(exc), EXIT_REDUCIBLE) from None
    try:
        return fileformat.load(cfg.path)
    except OSError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def _validated(tri: Triangulation) -> Triangulation:
    report = validate(tri)
    if not report.ok:
        raise CliError(f"validation failed:\n{report}", EXIT_INVALID)
    return tri


def _fillings(tri: Triangulation, cfg: RunConfig):
    if not cfg.fillings:
        return [None] * tri.num_cusps
    if len(cfg.fillings) != tri.num_cusps:
        raise CliError(f"{len(cfg.fillings)} filling specs for {tri.num_cusps} cusps", EXIT_INPUT)
    return cfg.fillings


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _c7(x: complex) -> str:
    return f"{x.real:.7f} {x.imag:+.7f}i"


def _v7(v) -> str:
    return "*" if v is None else f"{v:.7f}"


def format_table(tri: Triangulation, result, analyses) -> str:
    lines = [f"{tri.name or 'triangulation'}: {len(result.solutions)} solutions from {result.starts} starts"]
    for note in result.notes:
        lines.append(f"note: {note}")
    for k, (s, an) in enumerate(zip(result.solutions, analyses), 1):
        lines.append("")
        lines.append(f"Solution {k}  [{s.classification}]")
        if s.note:
            lines.append(f"  {s.note}")
        lines.append(f"  {'tet':<6}{'Re z':>14}{'Im z':>14}{'volume':>14}")
        for t, zi, v in zip(tri.tetrahedra, s.z, an.per_tet_volume):
            lines.append(f"  {t.name:<6}{zi.real:>14.7f}{zi.imag:>14.7f}{_v7(v):>14}")
        lines.append(f"  total volume {an.total_volume:.7f}")
        sums = ", ".join("nan" if math.isnan(x) else f"{x:.7f}" for x in an.edge_angle_sums)
        lines.append(f"  edge angle sums: {sums}")
        lines.append(f"  angle sums all 2 pi: {'yes' if an.angles_ok else 'no'}")
        for j, c in enumerate(an.cusp_summaries):
            lines.append(f"  cusp {j}: rho(mu) = {_c7(c.rho_mu)}, rho(lambda) = {_c7(c.rho_lambda)}, "
                         f"euclidean = {c.euclidean}")
        for flag in an.flags:
            lines.append(f"  {flag}")
        lines.append(f"  residuals: mult {s.residual_mult:.2e}, log {s.residual_log:.2e}")
    return "\n".join(lines) + "\n"


def format_csv(tri: Triangulation, result, analyses) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [t.name for t in tri.tetrahedra]
    w.writerow(["solution", "classification"] + [f"{n}_{p}" for n in names for p in ("re", "im")]
               + [f"vol_{n}" for n in names] + ["total_volume", "angle_sums_2pi"])
    for k, (s, an) in enumerate(zip(result.solutions, analyses), 1):
        w.writerow([k, s.classification]
                   + [f"{x:.7f}" for zi in s.z for x in (zi.real, zi.imag)]
                   + [_v7(v) for v in an.per_tet_volume] + [f"{an.total_volume:.7f}", an.angles_ok])
    return buf.getvalue()


def _analyses(tri, sols):
    ref = next((s.volume for s in sols if s.kind == "positive" and not s.degenerate), None)
    return [analyze(tri, s.z, reference_volume=ref, degenerate=s.degenerate) for s in sols]


def run_solve(cfg: RunConfig):
    tri = _validated(_load(cfg))
    system = assemble_system(tri, _fillings(tri, cfg))
    result = multistart_solve(system, cfg.options)
    return tri, system, result, _analyses(tri, result.solutions)


def cmd_build_bundle(args) -> int:
    try:
        tri = build_from_word(args.word)
    except ReducibleMonodromy as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REDUCIBLE
    _emit(fileformat.serialize(tri), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    tri = _load(_config(args))
    report = validate(tri)
    _emit(str(report) + "\n", args.output)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_solve(args) -> int:
    cfg = _config(args)
    tri, system, result, analyses = run_solve(cfg)
    if cfg.fmt == "csv":
        text = format_csv(tri, result, analyses)
    elif cfg.fmt == "report":
        text = json.dumps(solution_report(system, result, analyses), indent=2) + "\n"
    else:
        text = format_table(tri, result, analyses)
    _emit(text, cfg.output)
    return EXIT_OK if result.solutions else EXIT_NO_SOLUTIONS


def cmd_analyze(args) -> int:
    cfg = _config(args)
    tri = _validated(_load(cfg))
    sols = load_report(Path(args.solutions).read_text(), tri)
    analyses = _analyses(tri, sols)
    result = SolveResult(sols, 0, {}, {})
    text = format_csv(tri, result, analyses) if cfg.fmt == "csv" else format_table(tri, result, analyses)
    _emit(text, cfg.output)
    return EXIT_OK if sols else EXIT_NO_SOLUTIONS


def _parse_tree(tri: Triangulation, text: str | None):
    if not text:
        return None
    tree = []
    for item in text.split(","):
        name, face = item.split(":")
        t = tri.tet_index(name.strip())
        tree.append((t, tri.tetrahedra[t].index(face.strip())))
    return tree


def _parse_placement(tri: Triangulation, base: int, text: str | None):
    if not text:
        return None
    tet = tri.tetrahedra[base]
    out = {}
    for item in text.split(","):
        label, point = item.split("=")
        point = point.strip()
        out[tet.index(label.strip())] = INF if point.lower() in ("inf", "oo") else complex(point)
    return out


def cmd_holonomy(args) -> int:
    cfg = _config(args)
    tri = _validated(_load(cfg))
    if args.solutions:
        sols = load_report(Path(args.solutions).read_text(), tri)
    else:
        _, _, result, _ = run_solve(cfg)
        sols = result.solutions
    if not sols:
        print("error: no solutions", file=sys.stderr)
        return EXIT_NO_SOLUTIONS
    if not 1 <= args.index <= len(sols):
        raise CliError(f"solution index {args.index} out of range 1..{len(sols)}", EXIT_INPUT)
    s = sols[args.index - 1]
    if s.degenerate:
        raise CliError("holonomy is not defined at a degenerate limit", EXIT_INPUT)
    base = tri.tet_index(args.base) if args.base else 0
    tree = _parse_tree(tri, args.tree)
    placement = _parse_placement(tri, base, args.place)

    gens = holonomy_generators(tri, s.z, base, placement, tree)
    lines = [f"Solution {args.index}: generators (base {tri.tetrahedra[base].name})", generators_text(tri, gens)]
    lines.append(f"edge relation deviation: {edge_relation_check(tri, s.z, base):.3e}")
    for k, (mu, lam) in enumerate(tri.peripheral):
        for which, curve in (("mu", mu), ("lambda", lam)):
            ph = peripheral_holonomy(tri, s.z, curve, base)
            lines.append(f"cusp {k} {which}: rho = {ph.rho.real:.12g}{ph.rho.imag:+.12g}i, "
                         f"trace = {ph.trace.real:.12g}{ph.trace.imag:+.12g}i, parabolic = {ph.parabolic}")
    h = invariant_circle_heuristic([m for _, m in gens])
    if h["invariant_circle_possible"]:
        lines.append("heuristic: all short words have real trace^2; an invariant line is not ruled out")
    else:
        lines.append(f"heuristic: no invariant line found (max |Im trace^2| = {h['max_imag_trace_squared']:.3e})")
    _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


def _config(args) -> RunConfig:
    opts = SolverOptions(**{k: v for k, v in (("tolerance", getattr(args, "tol", None)),
                                              ("starts", getattr(args, "starts", None)),
                                              ("seed", getattr(args, "seed", None))) if v is not None})
    fillings = []
    if not getattr(args, "complete", False):
        try:
            fillings = [parse_filling(f) for f in (getattr(args, "filling", None) or [])]
        except ValueError as exc:
            raise CliError(str(exc), EXIT_INPUT) from None
    try:
        return RunConfig(getattr(args, "input", None), getattr(args, "word", None), fillings, opts,
                         getattr(args, "format", "table"), getattr(args, "output", None))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def _add_input(p, solver=True):
    p.add_argument("input", nargs="?", help="triangulation file (.tri)")
    p.add_argument("--word", help="monodromy word in L and R instead of a file")
    p.add_argument("-o", "--output", help="write output to this file")
    if solver:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--complete", action="store_true", help="completeness equations at every cusp (default)")
        g.add_argument("--filling", action="append", metavar="p,q",
                       help="Dehn filling coefficients, once per cusp ('inf' for a complete cusp)")
        p.add_argument("--tol", type=float, help="Newton log-residual tolerance")
        p.add_argument("--starts", type=int, help="number of random starts")
        p.add_argument("--seed", type=int, help="random seed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dehnfill", description="Gluing equations and hyperbolic Dehn filling.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-bundle", help="layered triangulation of a punctured torus bundle")
    p.add_argument("--word", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build_bundle)

    p = sub.add_parser("validate", help="check a triangulation")
    _add_input(p, solver=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="find solutions of the gluing equations")
    _add_input(p)
    p.add_argument("--format", choices=("table", "csv", "report"), default="table")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="re-analyze solutions from a structured report")
    _add_input(p, solver=False)
    p.add_argument("--solutions", required=True, help="report written by 'solve --format report'")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("holonomy", help="holonomy generators and peripheral data of one solution")
    _add_input(p)
    p.add_argument("--solutions", help="report written by 'solve --format report' (otherwise solve inline)")
    p.add_argument("--index", type=int, default=1, help="1-based solution number")
    p.add_argument("--base", help="base tetrahedron name")
    p.add_argument("--tree", help="spanning tree as TET:FACE,... (faces by opposite vertex label)")
    p.add_argument("--place", help="base placement as LABEL=point,... with three labels, e.g. 3/2=0,0=1,4/3=inf")
    p.set_defaults(func=cmd_holonomy)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (TriangulationError, DevelopmentError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
