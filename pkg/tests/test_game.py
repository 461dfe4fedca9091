from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_conditional, brute_payoff
from spohn_lab.catalog import example_4player
from spohn_lab.game import (
    BoundaryDistribution,
    Distribution,
    Game,
    conditional_expected_payoff,
    expected_payoff,
    is_generic,
    p_vartable,
    payoff_map,
    random_game,
    spohn_matrix,
    spohn_minors,
)
from spohn_lab.polyring import evaluate
from spohn_lab.reproduce import Z_INDEX, _p_from_z

NASH = _p_from_z((Fraction(1, 36),) * 4)

small = st.integers(-6, 6)


@st.composite
def games(draw, n=None):
    n = n or draw(st.integers(2, 3))
    d = tuple(draw(st.integers(2, 3)) for _ in range(n))
    size = int(np.prod(d))
    return Game(n, d, tuple(tuple(draw(st.lists(small, min_size=size, max_size=size))) for _ in range(n)))


@st.composite
def distributions(draw, size):
    w = draw(st.lists(st.integers(1, 9), min_size=size, max_size=size))
    total = sum(w)
    return [Fraction(v, total) for v in w]


@st.composite
def game_and_point(draw):
    g = draw(games())
    return g, draw(distributions(g.size))


def product_point(marginals):
    return [np.prod([m[j] for m, j in zip(marginals, prof)], dtype=object)
            for prof in itertools.product(*(range(len(m)) for m in marginals))]


class TestConstruction:
    def test_shape_checked(self):
        with pytest.raises(ValueError):
            Game(2, (2, 2), ((1, 2, 3), (0, 0, 0, 0)))

    def test_needs_two_players(self):
        with pytest.raises(ValueError):
            Game(1, (2,), ((1, 2),))

    def test_distribution_flag(self):
        assert Distribution((Fraction(1, 2), Fraction(1, 2))).totally_mixed
        assert not Distribution((1, 0)).totally_mixed

    def test_nash_distribution_sums_to_one(self):
        assert sum(NASH) == 1 and all(v > 0 for v in NASH)
        assert [NASH[k] for k in Z_INDEX] == [Fraction(1, 36)] * 4


class TestExpectedPayoff:
    def test_zero_game(self):
        g = Game.zero((2, 3))
        assert expected_payoff(g, [Fraction(1, 6)] * 6, 0) == 0

    def test_constant_game(self):
        g = Game(2, (2, 2), ((5,) * 4, (-2,) * 4))
        assert payoff_map(g, [Fraction(1, 10), Fraction(2, 10), Fraction(3, 10), Fraction(4, 10)]) == [5, -2]

    def test_example_nash_payoff(self):
        assert expected_payoff(example_4player(), NASH, 0) == Fraction(4, 3)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            expected_payoff(Game.zero((2, 2)), [1, 0, 0], 0)

    @given(game_and_point())
    def test_matches_brute_force(self, gp):
        g, p = gp
        assert payoff_map(g, p) == [brute_payoff(g, p, i) for i in range(g.n)]

    @given(game_and_point(), st.data())
    def test_linear_in_distribution_and_table(self, gp, data):
        g, p = gp
        q = data.draw(distributions(g.size))
        t = data.draw(st.fractions(0, 1, max_denominator=5))
        mix = [t * a + (1 - t) * b for a, b in zip(p, q)]
        assert expected_payoff(g, mix, 0) == t * expected_payoff(g, p, 0) + (1 - t) * expected_payoff(g, q, 0)
        doubled = Game(g.n, g.d, tuple(tuple(2 * c + 1 for c in t_) for t_ in g.payoffs))
        assert expected_payoff(doubled, p, 1) == 2 * expected_payoff(g, p, 1) + 1

    def test_float_distribution(self):
        g = example_4player()
        assert expected_payoff(g, [float(v) for v in NASH], 0) == pytest.approx(4 / 3, abs=1e-12)


class TestConditionalPayoff:
    def test_constant_game_product_point(self):
        g = Game(2, (2, 3), ((7,) * 6, (1,) * 6))
        p = product_point([[Fraction(1, 3), Fraction(2, 3)], [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]])
        assert {conditional_expected_payoff(g, p, 0, k) for k in range(2)} == {7}

    def test_example_nash_both_strategies(self):
        g = example_4player()
        assert [conditional_expected_payoff(g, NASH, 0, k) for k in (0, 1)] == [Fraction(4, 3)] * 2

    def test_boundary_refused(self):
        g = Game.zero((2, 2))
        with pytest.raises(BoundaryDistribution):
            conditional_expected_payoff(g, [Fraction(1, 2), Fraction(1, 2), 0, 0], 0, 1)

    @given(game_and_point())
    def test_matches_brute_force(self, gp):
        g, p = gp
        for i in range(g.n):
            for k in range(g.d[i]):
                assert conditional_expected_payoff(g, p, i, k) == brute_conditional(g, p, i, k)


class TestSpohnMatrix:
    def test_zero_game_second_column(self):
        m = spohn_matrix(Game.zero((2, 2)), 0)
        assert all(row[1].is_zero() for row in m)

    def test_binary_marginal_rows(self):
        g = random_game(np.random.default_rng(0), 4)
        for i in range(4):
            for row in spohn_matrix(g, i):
                assert len(row[0].terms) == 8
                assert all(c == 1 and sum(e) == 1 for e, c in row[0].terms.items())

    def test_minor_count(self):
        assert len(spohn_minors(random_game(np.random.default_rng(1), 3))) == 3
        assert len(spohn_minors(Game.zero((2, 3, 4)))) == 1 + 3 + 6

    def test_zero_game_minors(self):
        assert all(m.is_zero() for m in spohn_minors(Game.zero((2, 2, 2))))

    @given(game_and_point())
    def test_minors_vanish_iff_conditionals_agree(self, gp):
        g, p = gp
        vt = p_vartable(g.d)
        point = dict(zip(vt.names, p))
        minors = spohn_minors(g, vt)
        k = 0
        for i in range(g.n):
            cond = [conditional_expected_payoff(g, p, i, a) for a in range(g.d[i])]
            for a, b in itertools.combinations(range(g.d[i]), 2):
                assert (evaluate(minors[k], point) == 0) == (cond[a] == cond[b])
                k += 1


class TestPermutation:
    @given(game_and_point(), st.data())
    def test_commutes_with_payoffs(self, gp, data):
        g, p = gp
        perm = data.draw(st.permutations(range(g.n)))
        h = g.permute_players(perm)
        arr = np.array(p, dtype=object).reshape(g.d)
        q = list(np.transpose(arr, perm).ravel())
        assert payoff_map(h, q) == [payoff_map(g, p)[j] for j in perm]
        for k, j in enumerate(perm):
            assert conditional_expected_payoff(h, q, k, 0) == conditional_expected_payoff(g, p, j, 0)

    def test_commutes_with_minor_vanishing(self):
        g = example_4player()
        h = g.permute_players([2, 3, 0, 1])
        vt = p_vartable(h.d)
        arr = np.array(NASH, dtype=object).reshape(g.d)
        q = list(np.transpose(arr, [2, 3, 0, 1]).ravel())
        assert all(evaluate(m, dict(zip(vt.names, q))) == 0 for m in spohn_minors(h, vt))


class TestRandomGames:
    def test_seeded(self):
        a = random_game(np.random.default_rng(5), 3)
        b = random_game(np.random.default_rng(5), 3)
        assert a == b

    def test_range(self):
        g = random_game(np.random.default_rng(2), 3)
        assert all(-10 <= c <= 10 for t in g.payoffs for c in t)

    def test_generic_redraw(self):
        for seed in range(20):
            assert is_generic(random_game(np.random.default_rng(seed), 2, generic=True))

    def test_genericity_screen(self):
        assert not is_generic(Game(2, (2, 2), ((1, 1, 1, 2), (3, 1, 2, 5))))
        assert is_generic(Game(2, (2, 2), ((1, 3, 0, 2), (3, 1, 2, 5))))
