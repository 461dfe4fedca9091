"""The eleven acceptance criteria; each records one PASS/FAIL line for the run summary."""
from __future__ import annotations

import json
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from spohn_lab.catalog import example_4player, named_graph
from spohn_lab.chow import nash_ci_degree, partitions
from spohn_lab.cimodel import model_dimension, model_quadrics, param_map
from spohn_lab.game import payoff_map, random_game
from spohn_lab.graph import CIStatement, Graph, Partition, all_graphs, global_markov, pairwise_markov, random_graph
from spohn_lab.numeric import (
    SolveConfig,
    dimension_probe_report,
    dimension_probe,
    pareto_dominates,
    sample_ci_equilibria,
    solve_totally_mixed_nash,
)
from spohn_lab.polyring import multidegree
from spohn_lab.reproduce import Z_INDEX, displayed_factors
from spohn_lab.spohnci import build_system, expected_spohn_ci_dimension, nash_ci_system
from spohn_lab.universality import lift_game
from oracles import naive_degree
from test_spohnci import law

RESULTS: dict[str, str] = {}


def record(key: str, ok: bool, detail: str, expected_failure: bool = False):
    status = "PASS" if ok else ("FAIL (expected)" if expected_failure else "FAIL")
    RESULTS[key] = f"{status}  criterion {key}: {detail}"
    print(RESULTS[key])


class timed:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def S(A, B, C=()):
    return CIStatement.of(A, B, C)


THREE_VERTEX = [Graph.empty(3), Graph.from_edges(3, [(0, 1)]), Graph.from_edges(3, [(0, 1), (1, 2)]), Graph.complete(3)]


def test_criterion_01_markov_properties():
    ok = False
    with timed() as t:
        line4 = named_graph("line4")
        pw = pairwise_markov(line4)
        gm = global_markov(line4)
        ok = (pw == {S({0}, {3}, {1, 2}), S({0}, {2}, {1, 3}), S({1}, {3}, {0, 2})}
              and S({0}, {2, 3}, {1}) in gm and S({0, 1}, {3}, {2}) in gm)
    ok = ok and t.seconds < 1
    record("1", ok, f"line4 pairwise = 3 statements, global contains both displayed ({t.seconds:.3f} s)")
    assert ok


def test_criterion_02_model_dimensions():
    with timed() as t:
        named = [model_dimension(named_graph(n)) for n in ("line4", "cycle4", "figure2")]
        three = [model_dimension(g) for g in THREE_VERTEX]
    ok = named == [7, 8, 31] and three == [3, 4, 5, 7] and t.seconds < 1
    record("2", ok, f"line4, cycle4, figure2 -> {named}; 3-vertex -> {three} ({t.seconds:.3f} s)")
    assert ok


def test_criterion_03_spohn_ci_dimensions():
    with timed() as t:
        three = [expected_spohn_ci_dimension(g) for g in THREE_VERTEX]
        fig, line = (expected_spohn_ci_dimension(named_graph(n)) for n in ("figure2", "line4"))
    ok = three == [0, 1, 2, 4] and fig == 24 and line == 3 and t.seconds < 1
    record("3", ok, f"3-vertex -> {three}, figure2 -> {fig}, line4 -> {line} ({t.seconds:.3f} s)")
    assert ok


def test_criterion_04_parametrization_kills_ideal():
    with timed() as t:
        graphs = [named_graph(n) for n in ("line4", "cycle4", "figure2", "g4-example")]
        for seed in range(20):
            rng = np.random.default_rng([4, seed])
            graphs.append(random_graph(rng, int(rng.integers(2, 7))))
        checked = 0
        ok = True
        for g in graphs:
            pm = param_map(g)
            for q in model_quadrics(g, vt=pm.p_vt, markov="global"):
                ok &= pm.compose(q).is_zero()
                checked += 1
    ok = ok and t.seconds < 30
    record("4", ok, f"{checked} quadrics on {len(graphs)} graphs vanish exactly ({t.seconds:.1f} s)")
    assert ok


def _example_system():
    return nash_ci_system(Partition.from_sizes([2, 2]), example_4player())


def test_criterion_05_example_equations_corrected_indices():
    with timed() as t:
        system = _example_system()
        fixed = displayed_factors(system.vt, transpose_even=True)
        ok = all(F == (l * q).primitive() for F, (l, q) in zip(system.polynomials, fixed))
    ok = ok and t.seconds < 5
    record("5", ok, f"F1..F4 = l_i q_i exactly, with the linear factors of l2, l4 index-transposed ({t.seconds:.2f} s)")
    assert ok


@pytest.mark.xfail(strict=True, reason="displayed l2, l4 contradict the example's own linear relations and Nash point")
def test_criterion_05_example_equations_as_displayed():
    system = _example_system()
    literal = displayed_factors(system.vt)
    matches = [F == (l * q).primitive() for F, (l, q) in zip(system.polynomials, literal)]
    record("5 (literal display)", all(matches), f"per-equation match {matches}", expected_failure=True)
    assert all(matches)


def test_criterion_06_example_equilibria():
    game = example_4player()
    with timed() as t:
        nash = solve_totally_mixed_nash(game, SolveConfig(seed=0))
        p = np.array(nash[0].probabilities) if nash else np.zeros(16)
        px = payoff_map(game, list(p))
        nash_ok = (len(nash) == 1 and np.abs(p[list(Z_INDEX)] - 1 / 36).max() <= 1e-8
                   and abs(px[0] - 4 / 3) <= 1e-8 and abs(px[2] - 4 / 3) <= 1e-8)
        pts = sample_ci_equilibria(named_graph("g4-example"), game, 50, SolveConfig(seed=0))
        surface_ok = len(pts) >= 50
        dominating = 0
        for pt in pts:
            q = np.array(pt.probabilities)
            z = q[list(Z_INDEX)]
            pay = payoff_map(game, list(q))
            surface_ok &= bool((q > 0).all()) and abs(z[0] * z[3] - z[1] * z[2]) <= 1e-9
            surface_ok &= 0 < pay[0] < 8 / 3 and 0 < pay[2] < 8 / 3
            dominating += pareto_dominates((pay[0], pay[2]), (4 / 3, 4 / 3))
    ok = nash_ok and surface_ok and dominating > 0 and t.seconds < 60
    record("6", ok, f"one Nash point at z = 1/36 with payoff (4/3, 4/3); {len(pts)} CI points on z0z3 = z1z2 "
                    f"inside (0, 8/3)^2, {dominating} Pareto-dominate ({t.seconds:.1f} s)")
    assert ok


def test_criterion_07_degree_formula():
    with timed() as t:
        parts = [p for n in range(1, 6) for p in partitions(n)]
        oracle_ok = all(nash_ci_degree(Partition.from_sizes(p)) == naive_degree(p) for p in parts)
        full = [nash_ci_degree(Partition.from_sizes([n])) for n in (2, 3, 4)]
        small = (nash_ci_degree(Partition.from_sizes([1, 1])), nash_ci_degree(Partition.from_sizes([1, 1, 1])))
    ok = oracle_ok and full == [4, 8, 16] and small == (1, 2) and t.seconds < 5
    record("7", ok, f"{len(parts)} partitions agree with the naive oracle; (n) for n = 2..4 -> {full}; "
                    f"(1,1), (1,1,1) -> {small} ({t.seconds:.2f} s)")
    assert ok


@pytest.mark.xfail(strict=True, reason="one isolated player: the stripped system is a nonzero constant, degree 0")
def test_criterion_07_single_player_full_partition():
    d = nash_ci_degree(Partition.from_sizes([1]))
    record("7 (n = 1)", d == 2, f"nash_ci_degree((1)) = {d}, 2^1 = 2", expected_failure=True)
    assert d == 2


def test_criterion_08_codimension_theorem():
    lines = []
    worst = 10
    with timed() as t:
        for n in (2, 3, 4):
            for g in all_graphs(n):
                want = expected_spohn_ci_dimension(g)
                hits = 0
                for trial in range(10):
                    game = random_game(np.random.default_rng([n, trial, len(g.edges())]), n, generic=True)
                    try:
                        hits += dimension_probe(g, game, SolveConfig(seed=trial)) == want
                    except RuntimeError:
                        pass
                worst = min(worst, hits)
                lines.append(f"n={n} edges={[(a + 1, b + 1) for a, b in g.edges()]} expected={want} hits={hits}/10")
    print("\n".join(lines))
    ok = worst >= 9 and t.seconds < 600
    record("8", ok, f"{len(lines)} graphs with n <= 4, worst {worst}/10 trials matching ({t.seconds:.0f} s)")
    assert ok


def test_criterion_09_multidegree_law():
    with timed() as t:
        ok = True
        isolated = 0
        for seed in range(50):
            rng = np.random.default_rng([9, seed])
            n = int(rng.integers(2, 6))
            g = random_graph(rng, n, edge_prob=float(rng.uniform(0.2, 0.8)))
            system = build_system(g, random_game(rng, n, generic=True))
            for i, F in enumerate(system.polynomials):
                ok &= multidegree(F) == law(g, system.pm.cliques, i)
                isolated += g.adj[i] == 0
    ok = ok and isolated > 0 and t.seconds < 60
    record("9", ok, f"50 random (graph, game) pairs, {isolated} isolated players included ({t.seconds:.1f} s)")
    assert ok


def test_criterion_10_universality_round_trip():
    base = random_game(np.random.default_rng(10), 3, generic=True)
    details = []
    with timed() as t:
        d0 = dimension_probe(Graph.empty(3), base, SolveConfig(seed=0), space="torus")
        ok = True
        for l in (1, 2):
            res = lift_game(base, l)
            system = nash_ci_system(res.partition, res.game)
            identity = all(res.report.values()) and all(
                system.polynomials[3 + k] == tgt.primitive() for k, tgt in enumerate(res.targets))
            d1 = dimension_probe(res.partition.graph(), res.game, SolveConfig(seed=0), space="torus")
            ok &= identity and d1 - d0 == l
            details.append(f"l={l}: identity {identity}, probe {d0} -> {d1}")
    ok = ok and t.seconds < 120
    record("10", ok, "; ".join(details) + f" ({t.seconds:.1f} s)")
    assert ok


STOCHASTIC = [
    ["solve-nash", "--game", "example-4player", "--seed", "5"],
    ["sample-ci", "--game", "example-4player", "--graph", "g4-example", "--seed", "5", "--count", "8"],
    ["probe-dim", "--game", "example-4player", "--graph", "line4", "--seed", "5"],
    ["payoff-region", "--game", "example-4player", "--graph", "g4-example", "--seed", "5", "--count", "8"],
    ["reproduce", "example-4player", "--seed", "5", "--count", "8"],
]


def _cli(argv: list[str]) -> bytes:
    proc = subprocess.run([sys.executable, "-m", "spohn_lab", *argv], capture_output=True, check=False)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def test_criterion_11_determinism():
    same = []
    for argv in STOCHASTIC:
        a, b = _cli(argv), _cli(argv)
        json.loads(a.splitlines()[0])
        same.append(a == b)
    ok = all(same)
    record("11", ok, f"{sum(same)}/{len(same)} stochastic commands byte-identical across two processes")
    assert ok
