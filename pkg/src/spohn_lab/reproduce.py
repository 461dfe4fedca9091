"""End-to-end regression of the built-in 4-player example.

Each check yields a record ``{"check", "status", "detail"}``. A few checks
compare against displayed values that are known to be inconsistent with the
rest of the example; they carry ``"known_discrepancy": true`` and do not
affect the overall verdict.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterator

import numpy as np

from .catalog import example_4player, example_4player_printed
from .cimodel import model_quadrics
from .game import Game, p_vartable, payoff_map, spohn_minors
from .graph import Graph, Partition
from .numeric import SolveConfig, pareto_dominates, sample_ci_equilibria, solve_totally_mixed_nash
from .polyring import Polynomial, evaluate
from .spohnci import nash_ci_system

DEFAULT_SEED = 2024
# p-coordinate indices of z0..z3 = p2222, p2221, p2122, p2121
Z_INDEX = (15, 14, 11, 10)


def _p_from_z(z) -> list:
    """Point of the 16-dim simplex cut out by the twelve linear relations."""
    z0, z1, z2, z3 = z
    p = [0] * 16

    def put(prof: str, v):
        p[int("".join(str(int(c) - 1) for c in prof), 2)] = v

    for prof, v in (("1111", 4 * z0), ("1122", 2 * z0), ("2211", 2 * z0), ("2222", z0),
                    ("1212", 4 * z3), ("1221", 2 * z3), ("2112", 2 * z3), ("2121", z3),
                    ("1112", 4 * z1), ("1121", 2 * z1), ("2212", 2 * z1), ("2221", z1),
                    ("1211", 4 * z2), ("2111", 2 * z2), ("1222", 2 * z2), ("2122", z2)):
        put(prof, v)
    return p


def phi(a: Fraction, b: Fraction) -> tuple:
    d = 9 * (a + 1) * (b + 1)
    return (a * b / d, a / d, b / d, 1 / d)


def displayed_factors(vt, transpose_even: bool = False) -> list[tuple[Polynomial, Polynomial]]:
    """(l_i, q_i) as displayed; block 1 holds players 1,2 and block 2 players 3,4."""
    def s(block: str, ij: str) -> Polynomial:
        return Polynomial.var(vt, f"s{block}_{ij}")

    def q(block: str, first: str) -> Polynomial:
        other = "12" if first == "21" else "21"
        return (2 * s(block, "11") * s(block, first) + s(block, "21") * s(block, "12")
                + 3 * s(block, "11") * s(block, "22") + 2 * s(block, other) * s(block, "22"))

    def lin(block: str, a: str, b: str) -> Polynomial:
        return s(block, a) - 2 * s(block, b)

    even = ("12", "21") if transpose_even else ("21", "12")
    return [
        (lin("34", "11", "22"), q("12", "21")),
        (lin("34", *even), q("12", "12")),
        (lin("12", "11", "22"), q("34", "21")),
        (lin("12", *even), q("34", "12")),
    ]


def _record(check: str, ok: bool, detail: str, known: bool = False) -> dict:
    rec = {"check": check, "status": "PASS" if ok else "FAIL", "detail": detail}
    if known:
        rec["known_discrepancy"] = True
    return rec


def _exact_zero_on(p: list, polys: list[Polynomial]) -> bool:
    point = {nm: v for nm, v in zip(polys[0].vt.names, p)}
    return all(evaluate(f, point) == 0 for f in polys)


def _equation_checks(game: Game) -> Iterator[dict]:
    system = nash_ci_system(Partition.from_sizes([2, 2]), game)
    vt = system.vt
    F = system.polynomials
    literal = displayed_factors(vt)
    fixed = displayed_factors(vt, transpose_even=True)
    for i in (0, 2):
        l, q = literal[i]
        yield _record(f"equation F{i + 1} = l{i + 1} q{i + 1}", F[i] == (l * q).primitive(),
                      f"F{i + 1} = {F[i]}")
    for i in (1, 3):
        l, q = fixed[i]
        yield _record(f"equation F{i + 1} = l{i + 1} q{i + 1} (linear factor indices transposed)",
                      F[i] == (l * q).primitive(), f"F{i + 1} = {F[i]}")
    for i in (1, 3):
        l, q = literal[i]
        yield _record(f"equation F{i + 1} = l{i + 1} q{i + 1} as displayed", F[i] == (l * q).primitive(),
                      "displayed linear factor contradicts the example's own linear relations and Nash point",
                      known=True)


def _surface_checks(game: Game) -> Iterator[dict]:
    vt = p_vartable((2,) * 4)
    g4 = Graph.from_edges(4, [(0, 1), (2, 3)])
    quads = model_quadrics(g4, (2,) * 4, vt)
    minors = spohn_minors(game, vt)
    grid = [Fraction(k, 4) for k in (1, 2, 3, 4, 6, 9)]
    on_variety = True
    payoffs_ok = True
    relation_ok = True
    sum_as_displayed = True
    for a in grid:
        for b in grid:
            z = phi(a, b)
            p = _p_from_z(z)
            on_variety &= sum(p) == 1 and _exact_zero_on(p, quads) and _exact_zero_on(p, minors)
            px = payoff_map(game, p)
            want = (24 * (z[0] + z[2]), -24 * (z[1] + z[3]), 24 * (z[0] + z[1]), -24 * (z[2] + z[3]))
            payoffs_ok &= tuple(px) == want
            relation_ok &= (px[0], px[2]) == (Fraction(8, 3) * b / (b + 1), Fraction(8, 3) * a / (a + 1))
            relation_ok &= px[0] - px[1] == Fraction(8, 3) and px[2] - px[3] == Fraction(8, 3)
            sum_as_displayed &= px[0] + px[1] == Fraction(8, 3)
    yield _record("phi(a,b) lands on the CI surface (exact, 36 grid points)", on_variety,
                  "quadrics of the two-clique model and all Spohn minors vanish exactly")
    yield _record("payoffs 24(z0+z2), -24(z1+z3), 24(z0+z1), -24(z2+z3)", payoffs_ok, "exact on the grid")
    yield _record("payoff square: (PX1, PX3) = 8/3 (b/(b+1), a/(a+1))", relation_ok,
                  "image is the open square (0, 8/3)^2; PX1 - PX2 = PX3 - PX4 = 8/3")
    yield _record("PX1 + PX2 = 8/3 as displayed", sum_as_displayed,
                  "the constant combination is PX1 - PX2 = 24/9", known=True)


def _nash_checks(game: Game, cfg: SolveConfig) -> Iterator[dict]:
    pts = solve_totally_mixed_nash(game, cfg)
    yield _record("exactly one totally mixed Nash point", len(pts) == 1, f"found {len(pts)}")
    if pts:
        p = np.array(pts[0].probabilities)
        z = p[list(Z_INDEX)]
        px = payoff_map(game, list(p))
        yield _record("Nash point z = (1/36, 1/36, 1/36, 1/36)", bool(np.abs(z - 1 / 36).max() <= 1e-8),
                      f"z = {[float(x) for x in z]}")
        yield _record("Nash payoff (PX1, PX3) = (4/3, 4/3)",
                      abs(px[0] - 4 / 3) <= 1e-8 and abs(px[2] - 4 / 3) <= 1e-8,
                      f"payoffs = {[float(x) for x in px]}")
    exact = _p_from_z((Fraction(1, 36),) * 4)
    empty_quads = model_quadrics(Graph.empty(4), (2,) * 4, p_vartable((2,) * 4))
    ok = _exact_zero_on(exact, empty_quads) and _exact_zero_on(exact, spohn_minors(game))
    yield _record("z = 1/36 is an exact Nash point", ok, "product distribution with vanishing minors")


def _curve_checks(game: Game, cfg: SolveConfig, count: int) -> Iterator[dict]:
    cases = (("{1,2}", [(0, 1)], 0, 2), ("{3,4}", [(2, 3)], 2, 0))
    for label, edges, fixed, free in cases:
        g = Graph.from_edges(4, edges)
        pts = sample_ci_equilibria(g, game, count, cfg)
        px = np.array([payoff_map(game, list(pt.probabilities)) for pt in pts]) if pts else np.zeros((0, 4))
        yield _record(f"Nash CI curve {label}: sampled {count} points", len(pts) == count, f"found {len(pts)}")
        if not pts:
            continue
        flat = bool(np.abs(px[:, fixed] - 4 / 3).max() <= 1e-8)
        inside = bool((px[:, free] > 0).all() and (px[:, free] < 8 / 3).all())
        yield _record(f"Nash CI curve {label}: PX{fixed + 1} = 4/3 and PX{free + 1} in (0, 8/3)", flat and inside,
                      f"PX{free + 1} range [{px[:, free].min():.4f}, {px[:, free].max():.4f}]")
        narrow = bool((px[:, free] < 4 / 3).all())
        yield _record(f"Nash CI curve {label}: PX{free + 1} in (0, 4/3) as displayed", narrow,
                      "the displayed interval excludes the example's own Pareto points", known=True)


def _pareto_checks(game: Game, cfg: SolveConfig, count: int) -> Iterator[dict]:
    vt = p_vartable((2,) * 4)
    nash = (Fraction(4, 3), Fraction(4, 3))
    minors = spohn_minors(game, vt)
    for label, edges, z in (("{1,2}", [(0, 1)], (3, 3, 1, 1)), ("{3,4}", [(2, 3)], (3, 1, 3, 1))):
        p = _p_from_z(tuple(Fraction(v, 72) for v in z))
        quads = model_quadrics(Graph.from_edges(4, edges), (2,) * 4, vt)
        px = payoff_map(game, p)
        pair = (px[0], px[2])
        ok = _exact_zero_on(p, quads) and _exact_zero_on(p, minors) and pareto_dominates(pair, nash)
        yield _record(f"z = {tuple(f'{v}/72' for v in z)} lies on curve {label} and Pareto-dominates the Nash payoff",
                      ok, f"(PX1, PX3) = ({pair[0]}, {pair[1]})")
    pts = sample_ci_equilibria(Graph.from_edges(4, [(0, 1), (2, 3)]), game, count, cfg)
    better = [pt for pt in pts if pareto_dominates(
        (payoff_map(game, list(pt.probabilities))[0], payoff_map(game, list(pt.probabilities))[2]), (4 / 3, 4 / 3))]
    yield _record("some sampled CI equilibrium Pareto-dominates the Nash payoff", bool(better),
                  f"{len(better)} of {len(pts)} samples")


def _printed_table_check() -> Iterator[dict]:
    game = example_4player_printed()
    z = phi(Fraction(1), Fraction(2))
    px = payoff_map(game, _p_from_z(z))
    ok = px[0] == 24 * (z[0] + z[2])
    yield _record("printed entry list gives PX1 = 24(z0+z2)", ok,
                  "entries X2_1222, X4_2212 belong to players 1, 3 and X1_1122, X3_2211 = 6 are missing",
                  known=True)



def reproduce_example_4player(seed: int = DEFAULT_SEED, count: int = 20) -> list[dict]:
    game = example_4player()
    cfg = SolveConfig(seed=seed)
    out: list[dict] = []
    for gen in (_equation_checks(game), _surface_checks(game), _nash_checks(game, cfg),
                _curve_checks(game, cfg, count), _pareto_checks(game, cfg, count), _printed_table_check()):
        out.extend(gen)
    return out


TARGETS = {"example-4player": reproduce_example_4player}


def verdict(records: list[dict]) -> bool:
    return all(r["status"] == "PASS" for r in records if not r.get("known_discrepancy"))
