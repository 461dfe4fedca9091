"""Command-line interface: ``spohn-lab <command> ...`` (or ``python3 -m spohn_lab``).

Reports are JSON lines on stdout (or ``--out``); ``--pretty`` indents them.
Exit codes: 0 success, 1 a reproduce check failed, 2 invalid input,
3 no solutions found while ``--require-solutions`` was given.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import chow, io
from .catalog import GAMES, GRAPHS, named_game, named_graph
from .cimodel import model_dimension, model_quadrics
from .game import Game, p_vartable, spohn_minors
from .graph import Graph, Partition, global_markov, pairwise_markov
from .numeric import (
    NonIsolatedWarning,
    SolveConfig,
    dimension_probe_report,
    payoff_region_sample,
    sample_ci_equilibria,
    solve_totally_mixed_nash,
)
from .polyring import export_lines
from .reproduce import DEFAULT_SEED, TARGETS, verdict
from .spohnci import build_system, expected_nash_ci_dimension, expected_spohn_ci_dimension, nash_ci_system
from .universality import embed_variety, lift_game

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_NO_SOLUTIONS = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_game(name: str) -> Game:
    if name in GAMES:
        return named_game(name)
    if not Path(name).exists():
        raise UsageError(f"game {name!r} is neither a built-in ({', '.join(sorted(GAMES))}) nor a file")
    return io.load_game(name)


def _load_graph(name: str) -> Graph:
    if name in GRAPHS or name.startswith(("empty", "complete")) and not Path(name).exists():
        try:
            return named_graph(name)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    if not Path(name).exists():
        raise UsageError(f"graph {name!r} is neither a built-in nor a file")
    return io.load_graph(name)


def _partition(text: str) -> Partition:
    try:
        sizes = sorted(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"partition {text!r} must be comma-separated positive integers") from None
    if not sizes:
        raise UsageError("empty partition")
    try:
        return Partition.from_sizes(sizes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args) -> SolveConfig:
    kw = {"seed": args.seed}
    for name in ("tol", "starts", "max_iter"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    return SolveConfig(**kw)


# ---------------------------------------------------------------------------
# commands; each returns (records, exit code) or a text blob

def cmd_markov(args):
    g = _load_graph(args.graph)
    stmts = pairwise_markov(g) if args.kind == "pairwise" else global_markov(g)
    return [{"graph": io.graph_to_json(g), "kind": args.kind, "count": len(stmts),
             "statements": [s.to_json() for s in stmts]}]


def cmd_model(args):
    g = _load_graph(args.graph)
    quads = model_quadrics(g, markov=args.markov)
    if args.export_ideal:
        return export_lines(p_vartable((2,) * g.n), quads)
    return [{"graph": io.graph_to_json(g), "dimension": model_dimension(g), "quadrics": len(quads)}]


def cmd_spohn(args):
    game = _load_game(args.game)
    minors = spohn_minors(game)
    if args.export:
        return export_lines(p_vartable(game.d), minors)
    return [{"players": game.n, "choices": list(game.d), "minors": [str(m) for m in minors]}]


def cmd_nashci(args):
    game = _load_game(args.game)
    if args.partition:
        system = nash_ci_system(_partition(args.partition), game)
    else:
        system = build_system(_load_graph(args.graph), game)
    if args.export:
        return system.export()
    return [{
        "variables": list(system.vt.names),
        "equations": [str(f) for f in system.polynomials],
        "multidegrees": [list(system.expected_multidegree(i)) for i in range(game.n)],
    }]


def cmd_dim(args):
    if args.partition:
        part = _partition(args.partition)
        return [{"partition": list(part.sizes), "model_dimension": sum(2 ** s - 1 for s in part.sizes),
                 "nash_ci_dimension": expected_nash_ci_dimension(part)}]
    g = _load_graph(args.graph)
    return [{"graph": io.graph_to_json(g), "model_dimension": model_dimension(g),
             "spohn_ci_dimension": expected_spohn_ci_dimension(g)}]


def cmd_degree(args):
    part = _partition(args.partition)
    rec = {"partition": list(part.sizes), "dimension": chow.expected_dimension(part.sizes),
           "degree": chow.nash_ci_degree(part.sizes),
           "canonical_multidegree": list(chow.canonical_multidegree(part.sizes))}
    if args.show_class:
        rec["class"] = str(chow.degree_class(part.sizes))
    return [rec]


def _points(pts):
    return [pt.to_json() for pt in pts]


def cmd_solve_nash(args):
    game = _load_game(args.game)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonIsolatedWarning)
        pts = solve_totally_mixed_nash(game, _config(args))
    notes = sorted({str(w.message) for w in caught if issubclass(w.category, NonIsolatedWarning)})
    return [{"command": "solve-nash", "seed": args.seed, "count": len(pts), "warnings": notes,
             "points": _points(pts)}], len(pts)


def cmd_sample_ci(args):
    game = _load_game(args.game)
    g = _load_graph(args.graph)
    pts = sample_ci_equilibria(g, game, args.count, _config(args), markov=args.markov)
    return [{"command": "sample-ci", "seed": args.seed, "requested": args.count, "count": len(pts),
             "points": _points(pts)}], len(pts)


def cmd_probe_dim(args):
    game = _load_game(args.game)
    g = _load_graph(args.graph)
    try:
        rep = dimension_probe_report(g, game, _config(args), markov=args.markov, space=args.space)
    except RuntimeError:
        return [{"command": "probe-dim", "seed": args.seed, "dimension": None,
                 "expected": expected_spohn_ci_dimension(g)}], 0
    rec = {"command": "probe-dim", "seed": args.seed, "space": args.space,
           "expected": expected_spohn_ci_dimension(g)}
    rec.update(rep.to_json())
    return [rec], 1


def cmd_payoff_region(args):
    game = _load_game(args.game)
    g = _load_graph(args.graph)
    pts = payoff_region_sample(g, game, args.count, _config(args))
    return [{"command": "payoff-region", "seed": args.seed, "count": len(pts), "payoffs": pts}], len(pts)


def cmd_lift(args):
    base = _load_game(args.game)
    if args.embed is not None:
        res = embed_variety(base, args.l, args.embed)
    else:
        res = lift_game(base, args.l)
    rec = res.to_json()
    rec["game"] = io.game_to_json(res.game)
    return [rec]


def cmd_reproduce(args):
    if args.target not in TARGETS:
        raise UsageError(f"unknown target {args.target!r}; available: {', '.join(sorted(TARGETS))}")
    records = TARGETS[args.target](seed=args.seed, count=args.count)
    code = EXIT_OK if verdict(records) else EXIT_CHECK_FAILED
    if args.pretty_text:
        lines = []
        for r in records:
            tag = r["status"] + (" (known discrepancy)" if r.get("known_discrepancy") else "")
            lines.append(f"{tag}: {r['check']}")
        lines.append("OVERALL: " + ("PASS" if code == EXIT_OK else "FAIL"))
        return "\n".join(lines) + "\n", code
    return records, code


# ---------------------------------------------------------------------------

def _solver_flags(p, count: bool = False):
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--starts", type=int)
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--require-solutions", action="store_true")
    if count:
        p.add_argument("--count", type=int, default=20)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spohn-lab", description="Spohn CI varieties of binary games on graphical models.")
    parser.add_argument("--pretty", action="store_true", help="indent JSON output")
    parser.add_argument("--out", help="write output to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("markov", help="CI statements of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--kind", choices=("global", "pairwise"), default="global")
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("model", help="graphical model dimension and quadrics")
    p.add_argument("--graph", required=True)
    p.add_argument("--markov", choices=("global", "pairwise", "auto"), default="global")
    p.add_argument("--export-ideal", action="store_true", help="print the quadrics in text format")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("spohn", help="Spohn variety minors of a game")
    p.add_argument("--game", required=True)
    p.add_argument("--export", action="store_true", help="print the minors in text format")
    p.set_defaults(func=cmd_spohn)

    p = sub.add_parser("nashci", help="reduced equations F_i on the torus")
    p.add_argument("--game", required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--partition")
    grp.add_argument("--graph")
    p.add_argument("--export", action="store_true", help="print the system in text format")
    p.set_defaults(func=cmd_nashci)

    p = sub.add_parser("dim", help="expected dimensions")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--graph")
    grp.add_argument("--partition")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("degree", help="degree of a Nash CI variety")
    p.add_argument("--partition", required=True)
    p.add_argument("--show-class", action="store_true")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("solve-nash", help="totally mixed Nash equilibria")
    p.add_argument("--game", required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_solve_nash)

    p = sub.add_parser("sample-ci", help="sample totally mixed CI equilibria")
    p.add_argument("--game", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--markov", choices=("global", "pairwise", "auto"), default="auto")
    _solver_flags(p, count=True)
    p.set_defaults(func=cmd_sample_ci)

    p = sub.add_parser("probe-dim", help="numerical local dimension of the Spohn CI set")
    p.add_argument("--game", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--markov", choices=("global", "pairwise", "auto"), default="auto")
    p.add_argument("--space", choices=("ambient", "torus"), default="ambient")
    _solver_flags(p)
    p.set_defaults(func=cmd_probe_dim)

    p = sub.add_parser("payoff-region", help="expected payoffs at sampled CI equilibria")
    p.add_argument("--game", required=True)
    p.add_argument("--graph", required=True)
    _solver_flags(p, count=True)
    p.set_defaults(func=cmd_payoff_region)

    p = sub.add_parser("lift", help="extend a game by pairs of players")
    p.add_argument("--game", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--embed", type=int, metavar="M",
                   help="replace the last l payoff-free players; M = number of nonzero tables")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("reproduce", help="re-check a built-in worked example")
    p.add_argument("target", nargs="?", default="example-4player")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--text", action="store_true", dest="pretty_text", help="one PASS/FAIL line per check")
    p.set_defaults(func=cmd_reproduce)
    return parser


def _render(result, pretty: bool) -> str:
    if isinstance(result, str):
        return result if result.endswith("\n") else result + "\n"
    return "".join(io.dumps(rec, pretty) + "\n" for rec in result)


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = args.func(args)
        code = EXIT_OK
        if isinstance(out, tuple):
            out, extra = out
            if args.command == "reproduce":
                code = extra
            elif getattr(args, "require_solutions", False) and extra == 0:
                code = EXIT_NO_SOLUTIONS
    except UsageError as exc:
        print(f"spohn-lab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (io.FormatError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"spohn-lab: error: {msg}", file=sys.stderr)
        return EXIT_INVALID
    text = _render(out, args.pretty)
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return code


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
