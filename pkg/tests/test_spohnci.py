from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import to_networkx
from spohn_lab.catalog import example_4player, named_graph
from spohn_lab.cimodel import param_map
from spohn_lab.game import Game, payoff_differences, random_game
from spohn_lab.graph import Graph, Partition, all_graphs, is_disjoint_cliques, random_graph
from spohn_lab.numeric import SolveConfig, solve_totally_mixed_nash
from spohn_lab.polyring import Polynomial, evaluate, multidegree, parse_export
from spohn_lab.reproduce import displayed_factors
from spohn_lab.spohnci import (
    PreimageError,
    build_system,
    expected_linear_system_dimension,
    expected_nash_ci_dimension,
    expected_spohn_ci_dimension,
    linear_system_dimension,
    nash_ci_system,
    partition_param_map,
    product_point_to_torus,
    reduced_determinant,
    solve_payoff_preimage,
    w_system_generators,
)
from test_graph import graphs


def law(g: Graph, cliques, i: int) -> tuple[int, ...]:
    """Block degrees of F_i: 0 on an isolated vertex's own block, 2 on its component, 1 elsewhere."""
    comp = nx.node_connected_component(to_networkx(g), i)
    out = []
    for c in cliques:
        if c == (i,) and len(comp) == 1:
            out.append(0)
        elif set(c) <= comp:
            out.append(2)
        else:
            out.append(1)
    return tuple(out)


def generic(seed: int, n: int) -> Game:
    return random_game(np.random.default_rng(seed), n, generic=True)


class TestBuildSystem:
    @given(graphs(max_n=4), st.integers(0, 10 ** 6))
    def test_multidegree_law(self, g, seed):
        if g.n < 2:
            return
        system = build_system(g, generic(seed, g.n))
        for i, F in enumerate(system.polynomials):
            assert multidegree(F) == law(g, system.pm.cliques, i)

    @pytest.mark.parametrize("g", all_graphs(3) + all_graphs(4), ids=str)
    def test_reconstruction(self, g):
        system = build_system(g, generic(g.n + len(g.edges()), g.n))
        assert all(system.verify_reconstruction(i) for i in range(g.n))

    def test_connected_graph_strips_nothing(self):
        system = build_system(named_graph("line4"), generic(3, 4))
        for rec in system.records:
            assert rec.component_factor == Polynomial.constant(system.vt, 1)
            assert not rec.isolated

    def test_primitive_normalization(self):
        for F in build_system(named_graph("cycle4"), generic(4, 4)).polynomials:
            assert F == F.primitive() and F.leading_term()[1] > 0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_empty_graph_is_payoff_difference_form(self, n):
        game = generic(10 + n, n)
        system = build_system(Graph.empty(n), game)
        vt = system.vt
        for i in range(n):
            diff = payoff_differences(game, i)
            others = [k for k in range(n) if k != i]
            form = Polynomial.zero(vt)
            for prof in itertools.product((0, 1), repeat=n - 1):
                mono = Polynomial.constant(vt, diff[prof])
                for k, j in zip(others, prof):
                    mono = mono * Polynomial.var(vt, f"s{k + 1}_{j + 1}")
                form = form + mono
            assert system.polynomials[i] == form.primitive()

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            build_system(Graph.empty(2), Game.zero((2, 3)))

    def test_export_round_trip(self):
        system = build_system(named_graph("line4"), generic(1, 4))
        vt, polys = parse_export(system.export())
        assert vt.names == system.vt.names
        assert [p.to_vartable(system.vt) for p in polys] == system.polynomials


class TestNashContainment:
    # seeds whose generic game has a totally mixed equilibrium
    @pytest.mark.parametrize("seed", [1, 2, 7])
    def test_nash_points_solve_every_graph(self, seed):
        game = generic(100 + seed, 3)
        pts = solve_totally_mixed_nash(game, SolveConfig(seed=seed))
        assert pts
        for pt in pts:
            p = np.array(pt.probabilities).reshape(2, 2, 2)
            marg = [p.sum(axis=tuple(k for k in range(3) if k != i)) for i in range(3)]
            for g in all_graphs(3):
                system = build_system(g, game)
                sigma = product_point_to_torus(system.pm, marg)
                point = dict(zip(system.vt.names, sigma))
                scale = max(abs(c) for F in system.polynomials for c in F.terms.values())
                for F in system.polynomials:
                    assert abs(evaluate(F, point)) <= 1e-9 * scale


class TestPartitionSystems:
    @pytest.mark.parametrize("sizes", [(1, 1), (1, 1, 1), (1, 2), (2, 2), (1, 1, 2), (1, 3)])
    def test_agrees_with_graph_system(self, sizes):
        part = Partition.from_sizes(sizes)
        game = generic(sum(sizes) * 7, part.n)
        a = nash_ci_system(part, game)
        b = build_system(part.graph(), game)
        assert len(a.polynomials) == part.n
        assert [F.to_vartable(b.vt) for F in a.polynomials] == b.polynomials

    def test_unsorted_blocks_from_graph(self):
        g = Graph.from_edges(3, [(0, 1)])
        part = is_disjoint_cliques(g)
        assert part.blocks == ((2,), (0, 1))
        game = generic(9, 3)
        a = nash_ci_system(part, game)
        b = build_system(g, game)
        assert [F.to_vartable(b.vt) for F in a.polynomials] == b.polynomials

    def test_example_factors_up_to_transposed_indices(self):
        system = nash_ci_system(Partition.from_sizes([2, 2]), example_4player())
        vt = system.vt
        assert system.vt.names[:4] == ("s12_11", "s12_12", "s12_21", "s12_22")
        for i, ((l_lit, q_lit), (l_fix, q_fix)) in enumerate(
                zip(displayed_factors(vt), displayed_factors(vt, transpose_even=True))):
            l, q = (l_lit, q_lit) if i % 2 == 0 else (l_fix, q_fix)
            assert system.polynomials[i] == (l * q).primitive()

    @pytest.mark.parametrize("sizes,dim", [((1, 1, 1), 0), ((1, 1, 1, 1), 0), ((1, 2), 1), ((1, 1, 2), 1),
                                           ((2, 2), 2), ((1, 1, 2, 2), 2), ((3,), 4)])
    def test_expected_dimension(self, sizes, dim):
        assert expected_nash_ci_dimension(Partition.from_sizes(sizes)) == dim


class TestExpectedDimension:
    def test_three_vertices(self):
        graphs3 = [Graph.empty(3), Graph.from_edges(3, [(0, 1)]),
                   Graph.from_edges(3, [(0, 1), (1, 2)]), Graph.complete(3)]
        assert [expected_spohn_ci_dimension(g) for g in graphs3] == [0, 1, 2, 4]

    def test_figure2(self):
        assert expected_spohn_ci_dimension(named_graph("figure2")) == 24

    @pytest.mark.parametrize("n", range(2, 7))
    def test_complete(self, n):
        assert expected_spohn_ci_dimension(Graph.complete(n)) == 2 ** n - n - 1


class TestLinearSystems:
    def test_w_generator_count(self):
        gens = w_system_generators(Partition.from_sizes([2, 2]), 0, 0)
        assert len(gens) == 5
        assert all(multidegree(g) == (2,) for g in gens)

    @pytest.mark.parametrize("size", [2, 3])
    def test_w_generator_count_general(self, size):
        gens = w_system_generators(Partition.from_sizes([size]), 0, 1)
        assert len(gens) == 2 * 2 ** (size - 1) + 1

    def test_w_needs_a_clique(self):
        with pytest.raises(ValueError):
            w_system_generators(Partition.from_sizes([1, 2]), 0, 0)

    @pytest.mark.parametrize("sizes", [(1, 1), (1, 2), (2, 2), (1, 1, 2), (3,)])
    def test_payoff_map_rank(self, sizes):
        part = Partition.from_sizes(sizes)
        for i, block in enumerate(part.blocks):
            for l in range(len(block)):
                assert linear_system_dimension(part, i, l) == expected_linear_system_dimension(part, i)


class TestPreimage:
    PART = Partition.from_sizes([1, 2])

    def test_zero_target(self):
        pm = partition_param_map(self.PART)
        assert set(solve_payoff_preimage(self.PART, 1, 0, Polynomial.zero(pm.vt))) == {0}

    @given(st.lists(st.integers(-9, 9), min_size=8, max_size=8), st.sampled_from([(0, 0), (1, 0), (1, 1)]))
    def test_round_trip(self, table, slot):
        i, l = slot
        pm = partition_param_map(self.PART)
        player = self.PART.blocks[i][l]
        target, _ = reduced_determinant(pm, table, player)
        back = solve_payoff_preimage(self.PART, i, l, target)
        assert reduced_determinant(pm, back, player)[0] == target

    def test_target_outside_image(self):
        pm = partition_param_map(self.PART)
        bad = Polynomial.var(pm.vt, "s1_1") ** 3
        with pytest.raises(PreimageError):
            solve_payoff_preimage(self.PART, 1, 0, bad)

    def test_linear_form_target(self):
        part = Partition.from_sizes([1, 1, 2])
        pm = partition_param_map(part)
        v = {nm: Polynomial.var(pm.vt, nm) for nm in pm.vt.names}
        target = (v["s34_11"] + v["s34_21"]) * v["s34_22"] * v["s1_2"] * v["s2_2"]
        table = solve_payoff_preimage(part, 2, 1, target)
        assert reduced_determinant(pm, table, 3)[0] == target
