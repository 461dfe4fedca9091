"""Normal-form games, expected payoffs and the Spohn matrices.

Players and strategies are 0-based in the Python API. Payoff tensors are
stored flat with player 1 varying slowest (C order over the shape ``d``),
which is also the order of the ``p`` coordinates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polyring import Coefficient, Matrix2x2, Polynomial, VarTable, as_coefficient, det2


class BoundaryDistribution(ValueError):
    """A conditional payoff was requested where the conditioning marginal vanishes."""


@dataclass(frozen=True)
class Game:
    n: int
    d: tuple[int, ...]
    payoffs: tuple[tuple[Coefficient, ...], ...]

    def __post_init__(self):
        d = tuple(int(x) for x in self.d)
        object.__setattr__(self, "d", d)
        if self.n < 2 or len(d) != self.n:
            raise ValueError("a game needs n >= 2 players and one choice count per player")
        if any(x < 2 for x in d):
            raise ValueError("every player needs at least two strategies")
        size = int(np.prod(d))
        if len(self.payoffs) != self.n:
            raise ValueError(f"expected {self.n} payoff tensors, got {len(self.payoffs)}")
        tables = []
        for i, t in enumerate(self.payoffs):
            t = tuple(as_coefficient(c) for c in t)
            if len(t) != size:
                raise ValueError(f"payoff tensor {i + 1} has {len(t)} entries, expected {size}")
            tables.append(t)
        object.__setattr__(self, "payoffs", tuple(tables))

    @classmethod
    def from_arrays(cls, payoffs: Sequence, d: Sequence[int] | None = None) -> Game:
        arrs = [np.asarray(p, dtype=object) for p in payoffs]
        if d is None:
            d = arrs[0].shape
        return cls(len(arrs), tuple(d), tuple(tuple(a.ravel().tolist()) for a in arrs))

    @classmethod
    def zero(cls, d: Sequence[int]) -> Game:
        size = int(np.prod(d))
        return cls(len(d), tuple(d), tuple((0,) * size for _ in d))

    @property
    def size(self) -> int:
        return len(self.payoffs[0])

    @property
    def binary(self) -> bool:
        return all(x == 2 for x in self.d)

    def profiles(self) -> list[tuple[int, ...]]:
        """All pure strategy profiles (0-based) in storage order."""
        return list(itertools.product(*(range(x) for x in self.d)))

    def flat_index(self, profile: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(profile), self.d))

    def payoff(self, i: int, profile: Sequence[int]) -> Coefficient:
        return self.payoffs[i][self.flat_index(profile)]

    def array(self, i: int, dtype=float) -> np.ndarray:
        if dtype is object:
            return np.array(self.payoffs[i], dtype=object)
        return np.array([float(c) for c in self.payoffs[i]], dtype=dtype)

    def permute_players(self, perm: Sequence[int]) -> Game:
        """Relabel so that new player k is old player perm[k]."""
        perm = list(perm)
        d = tuple(self.d[j] for j in perm)
        tables = []
        for k in range(self.n):
            src = np.array(self.payoffs[perm[k]], dtype=object).reshape(self.d)
            tables.append(tuple(np.transpose(src, perm).ravel().tolist()))
        return Game(self.n, d, tuple(tables))


@dataclass(frozen=True)
class Distribution:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def totally_mixed(self) -> bool:
        return all(v > 0 for v in self.values)

    def __len__(self) -> int:
        return len(self.values)


def _values(g: Game, p) -> list:
    vals = list(p.values) if isinstance(p, Distribution) else list(np.asarray(p, dtype=object).ravel())
    if len(vals) != g.size:
        raise ValueError(f"distribution has {len(vals)} entries, the game needs {g.size}")
    return vals


def _is_exact(vals) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in vals)


def _dot(table, vals):
    if _is_exact(vals):
        total = sum((c * v for c, v in zip(table, vals)), Fraction(0))
        return total.numerator if total.denominator == 1 else total
    return float(np.dot(np.array([float(c) for c in table]), np.array(vals, dtype=float)))


def expected_payoff(g: Game, p, i: int):
    return _dot(g.payoffs[i], _values(g, p))


def payoff_map(g: Game, p) -> list:
    vals = _values(g, p)
    return [_dot(t, vals) for t in g.payoffs]


def conditional_expected_payoff(g: Game, p, i: int, k: int):
    """Expected payoff of player i conditioned on player i playing k."""
    vals = _values(g, p)
    num = []
    den = []
    for idx, prof in enumerate(g.profiles()):
        if prof[i] == k:
            num.append(g.payoffs[i][idx] * vals[idx] if _is_exact(vals) else float(g.payoffs[i][idx]) * float(vals[idx]))
            den.append(vals[idx])
    marginal = sum(den) if _is_exact(vals) else float(np.sum(np.array(den, dtype=float)))
    if marginal == 0:
        raise BoundaryDistribution(f"marginal of player {i + 1} playing {k + 1} is zero")
    if _is_exact(vals):
        out = Fraction(sum(num)) / Fraction(marginal)
        return out.numerator if out.denominator == 1 else out
    return float(np.sum(num) / marginal)


# ---------------------------------------------------------------------------
# symbolic side

def p_name(profile: Sequence[int], d: Sequence[int]) -> str:
    if max(d) > 9:
        return "p" + "_".join(str(j + 1) for j in profile)
    return "p" + "".join(str(j + 1) for j in profile)


def p_vartable(d: Sequence[int]) -> VarTable:
    names = tuple(p_name(prof, d) for prof in itertools.product(*(range(x) for x in d)))
    return VarTable(names)


def spohn_matrix(g: Game, i: int, vt: VarTable | None = None) -> list[list[Polynomial]]:
    """Rows k of M_i: (marginal of i playing k, payoff-weighted marginal)."""
    vt = vt or p_vartable(g.d)
    size = g.size
    rows = []
    for k in range(g.d[i]):
        marg: dict = {}
        weighted: dict = {}
        for idx, prof in enumerate(g.profiles()):
            if prof[i] != k:
                continue
            e = [0] * size
            e[idx] = 1
            e = tuple(e)
            marg[e] = 1
            c = g.payoffs[i][idx]
            if c:
                weighted[e] = c
        rows.append([Polynomial.from_pairs(vt, marg), Polynomial.from_pairs(vt, weighted)])
    return rows


def spohn_minors(g: Game, vt: VarTable | None = None) -> list[Polynomial]:
    """All 2x2 minors of M_1, ..., M_n, player by player."""
    vt = vt or p_vartable(g.d)
    out = []
    for i in range(g.n):
        m = spohn_matrix(g, i, vt)
        for a, b in itertools.combinations(range(g.d[i]), 2):
            out.append(det2(Matrix2x2(m[a][0], m[a][1], m[b][0], m[b][1])))
    return out


def payoff_differences(g: Game, i: int) -> np.ndarray:
    """X_i(j_i = 2) - X_i(j_i = 1) over opponents' profiles (binary games)."""
    arr = g.array(i, dtype=object).reshape(g.d)
    return np.take(arr, 1, axis=i) - np.take(arr, 0, axis=i)


def is_generic(g: Game) -> bool:
    """Cheap genericity screen: no player is ever indifferent between strategies."""
    return g.binary and all((payoff_differences(g, i) != 0).all() for i in range(g.n))


def random_game(rng: np.random.Generator, n: int, d: Sequence[int] | None = None, low: int = -10,
                high: int = 10, generic: bool = False, max_redraws: int = 1000) -> Game:
    """Integer payoffs uniform on [low, high]; ``generic`` redraws until ``is_generic`` holds."""
    d = tuple(d) if d is not None else (2,) * n
    size = int(np.prod(d))
    for _ in range(max_redraws):
        tables = tuple(tuple(int(x) for x in rng.integers(low, high + 1, size=size)) for _ in range(n))
        g = Game(n, d, tables)
        if not generic or is_generic(g):
            return g
    raise RuntimeError(f"no generic game in {max_redraws} whole-game redraws; acceptance shrinks "
                       f"geometrically with the number of payoff differences, widen [low, high]")
