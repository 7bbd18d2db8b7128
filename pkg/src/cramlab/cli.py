"""Command-line entry point.  Every subcommand prints one JSON document."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import density as dens
from . import experiments as exp
from .errors import BudgetExhausted, CramlabError, DensityBoundError, NoValidColouring
from .graph import Graph, graph_from_name, parse_graph
from .hblocks import CopyIndex, block_decomposition, closed_status
from .oracle import decide_aram, decide_cram
from .rainbow import DEFAULT_BLOCK_BUDGET, rainbow_colour, rainbow_colour_constrained, verify_trace
from .triangle import colour_graph_triangle_mode, triangle_components

EXIT_CODES = {"ok": 0, "error": 1, "indeterminate": 2}


@dataclass
class CommandResult:
    status: str  # ok | error | indeterminate
    payload: dict

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def render(self) -> str:
        return json.dumps({"status": self.status, **self.payload}, ensure_ascii=False)


def load_graph(spec: str) -> Graph:
    """A file path if one exists, otherwise a named graph."""
    path = Path(spec)
    if path.is_file():
        return parse_graph(path.read_text(encoding="utf-8"))
    return graph_from_name(spec)


def _number(text: str) -> Fraction | float:
    return Fraction(text) if "/" in text else float(text)


def _edges(es) -> list[list[int]]:
    return [list(e) for e in es]


# ---------------------------------------------------------------------------
# subcommands


def cmd_density(a) -> CommandResult:
    return CommandResult("ok", dens.density_report(load_graph(a.input)).to_json())


def _try(fn, g):
    try:
        return fn(g)
    except CramlabError as exc:
        return {"error": str(exc)}


def cmd_check(a) -> CommandResult:
    g = load_graph(a.input)
    gate = _try(dens.special_case_gate, g)
    return CommandResult(
        "ok",
        {
            "balanced": _try(dens.is_balanced, g),
            "strictly_balanced": _try(dens.is_strictly_balanced, g),
            "2_balanced": _try(dens.is_2_balanced, g),
            "strictly_2_balanced": _try(dens.is_strictly_2_balanced, g),
            "spacious": _try(dens.is_spacious, g),
            "superspacious": _try(dens.robust_spacious_check, g),
            "two_connected": _try(dens.is_two_connected, g),
            "gate": gate if isinstance(gate, dict) else gate.to_json(),
        },
    )


def cmd_blocks(a) -> CommandResult:
    g, pattern = load_graph(a.input), load_graph(a.pattern)
    index = CopyIndex(g, pattern)
    status = closed_status(g, pattern, index)
    payload = {"copies": len(index.copies), "closed": status.to_json(), "blocks": None}
    if status.is_closed:
        payload["blocks"] = block_decomposition(g, pattern, index).to_json()["blocks"]
    return CommandResult("ok", payload)


def cmd_colour(a) -> CommandResult:
    g, pattern = load_graph(a.input), load_graph(a.pattern)
    try:
        if a.mode == "aram":
            trace = rainbow_colour(g, pattern, a.block_budget)
        else:
            trace = rainbow_colour_constrained(g, pattern, a.k, a.block_budget)
    except BudgetExhausted as exc:
        return CommandResult("indeterminate", {"error": str(exc), "explored": exc.explored})
    except NoValidColouring as exc:
        return CommandResult("error", {"error": str(exc), "certificate": _edges(exc.edges)})
    checks = verify_trace(trace, pattern, a.mode, a.k)
    payload = {"trace": trace.to_json(), "colouring": trace.colouring.to_json(), "checks": checks}
    return CommandResult("ok" if all(checks.values()) else "error", payload)


def cmd_colour_triangle(a) -> CommandResult:
    g = load_graph(a.input)
    try:
        col = colour_graph_triangle_mode(g, a.k)
    except DensityBoundError as exc:
        return CommandResult("error", {"error": str(exc), "certificate": _edges(exc.edges)})
    return CommandResult("ok", {**col.to_json(), "meta": col.meta})


def cmd_triangles(a) -> CommandResult:
    g = load_graph(a.input)
    comps = []
    for comp in triangle_components(g):
        v = len({x for e in comp for x in e})
        comps.append({"v": v, "e": len(comp), "r": len(comp) - 2 * v + 3, "edges": _edges(comp)})
    scan = exp.scan_triangle_density(g, strict=True)
    return CommandResult("ok", {"components": comps, "max_excess": scan.to_json()["max_excess"]})


def cmd_decide(a) -> CommandResult:
    g, pattern = load_graph(a.input), load_graph(a.pattern)
    try:
        if a.mode == "aram":
            verdict = decide_aram(g, pattern, a.budget, a.jobs)
        else:
            verdict = decide_cram(g, a.k, pattern, a.budget, a.jobs)
    except BudgetExhausted as exc:
        return CommandResult("indeterminate", {"error": str(exc), "explored": exc.explored})
    return CommandResult("ok", verdict.to_json())


def cmd_experiment(a) -> CommandResult:
    pattern = load_graph(a.pattern)
    if a.exponent is not None:
        exponent = Fraction(a.exponent)
    else:
        rep = dens.density_report(pattern)
        exponent = 1 / (rep.m if a.mode == "appear" else rep.m2)
    cfg = exp.TrialConfig(
        n=a.n,
        c=float(_number(a.c)),
        exponent=exponent,
        trials=a.trials,
        seed=a.seed,
        pattern=pattern,
        pattern_name=a.pattern,
        mode=a.mode,
        k=a.k,
        block_budget=a.block_budget,
    )
    report = exp.run_experiment(cfg, jobs=a.jobs).to_json()
    if a.out:
        Path(a.out).write_text(json.dumps(report, indent=2), encoding="utf-8")
    return CommandResult("ok", report)


def cmd_janson(a) -> CommandResult:
    return CommandResult("ok", exp.janson_bound(load_graph(a.pattern), a.n, _number(a.p)).to_json())


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cramlab",
        description="Constrained-Ramsey and anti-Ramsey colouring tools.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, fn, help_text, graph=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        if graph:
            p.add_argument("--input", required=True, help="edge-list file or graph name")
        return p

    add("density", cmd_density, "density and 2-density report")
    add("check", cmd_check, "structural predicates and the colouring gate")

    p = add("blocks", cmd_blocks, "closedness and block decomposition")
    p.add_argument("--pattern", required=True)

    p = add("colour", cmd_colour, "rainbow-free colouring by reduction to blocks")
    p.add_argument("--mode", choices=["aram", "cram"], required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--block-budget", type=int, default=DEFAULT_BLOCK_BUDGET)

    p = add("colour-triangle", cmd_colour_triangle, "colouring with no rainbow triangle")
    p.add_argument("--k", type=int, choices=[3, 4], required=True)

    add("triangles", cmd_triangles, "triangle components with (v, e, r)")

    p = add("decide", cmd_decide, "exhaustive arrows decision")
    p.add_argument("--mode", choices=["cram", "aram"], required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--pattern", required=True)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)

    p = add("experiment", cmd_experiment, "Monte Carlo trials on G(n, p)", graph=False)
    p.add_argument("--mode", choices=list(exp.MODES), required=True)
    p.add_argument("--pattern", default="K3")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", required=True, help="constant, decimal or p/q")
    p.add_argument("--exponent", default=None, help="p/q; defaults to 1/m2 or 1/m of the pattern")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--block-budget", type=int, default=DEFAULT_BLOCK_BUDGET)
    p.add_argument("--out", default=None)

    p = add("janson", cmd_janson, "exact Janson lower bound", graph=False)
    p.add_argument("--pattern", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", required=True, help="probability, decimal or p/q")
    return parser


def dispatch(argv: list[str]) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        status = "ok" if exc.code == 0 else "error"
        return CommandResult(status, {"usage": parser.format_usage()})
    if args.command is None:
        return CommandResult("error", {"error": "no command given", "usage": parser.format_usage()})
    try:
        return args.fn(args)
    except (CramlabError, OSError) as exc:
        return CommandResult("error", {"error": str(exc), "type": type(exc).__name__})


def main(argv: list[str] | None = None) -> int:
    result = dispatch(sys.argv[1:] if argv is None else argv)
    print(result.render())
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
