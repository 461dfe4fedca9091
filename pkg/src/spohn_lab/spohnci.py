"""Spohn CI polynomial systems on the parametrization torus.

For player i, the Spohn matrix pulled back to the torus factors as

    minor_i = c * K_i * (s^{(i)}_1 s^{(i)}_2 if i is isolated) * F_i

where K_i sums the clique monomials of the vertices outside the connected
component of i (K_i = 1 for connected graphs) and F_i is stored in
primitive integer form. The reduced determinant is built directly from
its factors; polynomial division is only used as a cross-check.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cimodel import ParamMap, param_map
from .game import Game, spohn_matrix
from .graph import Graph, Partition, clique_complex_face_counts, components
from .polyring import Polynomial, VarTable, divide_exact, multidegree


class InternalInconsistency(RuntimeError):
    """A structural identity that must hold failed; indicates a bug."""


class PreimageError(ValueError):
    """The target polynomial is not in the image of the payoff-table map."""

    def __init__(self, message: str, residual_support: list[str]):
        super().__init__(message)
        self.residual_support = residual_support


@dataclass(frozen=True)
class PlayerPolynomial:
    player: int
    F: Polynomial
    scale: Fraction
    component_factor: Polynomial
    isolated: bool

    def stripped_factor(self, pm: ParamMap) -> Polynomial:
        """Everything removed from the raw minor, including the rational constant."""
        out = self.component_factor.scale(self.scale)
        if self.isolated:
            out = out * _isolated_pair(pm, self.player)
        return out


@dataclass(frozen=True)
class SpohnCISystem:
    graph: Graph
    game: Game
    pm: ParamMap
    records: tuple[PlayerPolynomial, ...]

    @property
    def vt(self) -> VarTable:
        return self.pm.vt

    @property
    def polynomials(self) -> list[Polynomial]:
        return [r.F for r in self.records]

    def raw_minor(self, i: int) -> Polynomial:
        """Minor of M_i composed with the parametrization (no stripping)."""
        m = spohn_matrix(self.game, i, self.pm.p_vt)
        (a, b), (c, d) = [[self.pm.compose(x) for x in row] for row in m]
        return a * d - b * c

    def verify_reconstruction(self, i: int, check_division: bool = True) -> bool:
        rec = self.records[i]
        raw = self.raw_minor(i)
        factor = rec.stripped_factor(self.pm)
        if factor * rec.F != raw:
            return False
        if check_division and not raw.is_zero():
            q = divide_exact(raw, factor)
            if q is None or q != rec.F:
                return False
        return True

    def expected_multidegree(self, i: int) -> tuple[int, ...]:
        return expected_multidegree(self.pm, i)

    def export(self) -> str:
        from .polyring import export_lines

        return export_lines(self.vt, self.polynomials)


def _component_of(g: Graph, v: int) -> list[int]:
    for comp in components(g):
        if v in comp:
            return comp
    raise AssertionError("vertex belongs to no component")


def _component_cliques(pm: ParamMap, i: int) -> list[int]:
    comp = set(_component_of(pm.graph, i))
    return [b for b, c in enumerate(pm.cliques) if set(c) <= comp]


def _isolated_pair(pm: ParamMap, i: int) -> Polynomial:
    b = pm.cliques.index((i,))
    e = [0] * len(pm.vt)
    for col in pm.block_of_clique(b):
        e[col] = 1
    return Polynomial.from_pairs(pm.vt, {tuple(e): 1})


def is_isolated(g: Graph, i: int) -> bool:
    return g.adj[i] == 0


def expected_multidegree(pm: ParamMap, i: int) -> tuple[int, ...]:
    inside = set(_component_cliques(pm, i))
    out = []
    for b, c in enumerate(pm.cliques):
        if c == (i,) and is_isolated(pm.graph, i):
            out.append(0)
        elif b in inside:
            out.append(2)
        else:
            out.append(1)
    return tuple(out)


def _columns(pm: ParamMap, blocks: Sequence[int]) -> np.ndarray:
    cols = []
    for b in blocks:
        cols.extend(pm.block_of_clique(b))
    return np.array(sorted(cols), dtype=np.int64)


def _distinct_rows(rows: np.ndarray, keep: np.ndarray) -> list[tuple[int, ...]]:
    masked = np.zeros_like(rows)
    masked[:, keep] = rows[:, keep]
    return sorted(set(map(tuple, masked.tolist())))


def reduced_linear_map(pm: ParamMap, i: int) -> tuple[list[Polynomial], Polynomial]:
    """Images of the unit payoff tables under X^{(i)} -> reduced determinant.

    Returns one polynomial per profile (storage order) together with the
    component factor K_i. The reduced determinant of a table X is
    ``sum_t X_t * images[t]``.
    """
    n = pm.graph.n
    vt = pm.vt
    rows = pm.images
    inside = _component_cliques(pm, i)
    outside = [b for b in range(len(pm.cliques)) if b not in inside]
    in_cols = _columns(pm, inside)
    out_cols = _columns(pm, outside)
    profiles = list(itertools.product((0, 1), repeat=n))
    strat = np.array([prof[i] for prof in profiles])

    if outside:
        k_terms = {e: 1 for e in _distinct_rows(rows, out_cols)}
    else:
        k_terms = {(0,) * len(vt): 1}
    component_factor = Polynomial.from_pairs(vt, k_terms)

    images: list[Polynomial] = []
    if is_isolated(pm.graph, i):
        b = pm.cliques.index((i,))
        own = pm.block_of_clique(b)
        for t, prof in enumerate(profiles):
            e = list(rows[t])
            e[own[prof[i]]] -= 1
            sign = 1 if prof[i] == 1 else -1
            images.append(Polynomial.from_pairs(vt, {tuple(e): sign}))
        return images, component_factor

    marg = []
    for a in (0, 1):
        sel = rows[strat == a]
        marg.append(Polynomial.from_pairs(vt, {e: 1 for e in _distinct_rows(sel, in_cols)}))
    for t, prof in enumerate(profiles):
        mono = Polynomial.from_pairs(vt, {tuple(int(x) for x in rows[t]): 1})
        # G_1 T_2 - G_2 T_1
        images.append(marg[0] * mono if prof[i] == 1 else -(marg[1] * mono))
    return images, component_factor


def reduced_determinant(pm: ParamMap, table: Sequence, i: int) -> tuple[Polynomial, Polynomial]:
    """(reduced determinant for payoff table ``table`` of player i, component factor)."""
    images, k = reduced_linear_map(pm, i)
    total: dict = {}
    for x, img in zip(table, images):
        if not x:
            continue
        for e, c in img.terms.items():
            v = total.get(e, 0) + x * c
            if v:
                total[e] = v
            else:
                total.pop(e, None)
    terms = {e: (c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c) for e, c in total.items()}
    return Polynomial.from_pairs(pm.vt, terms), k


def _record(pm: ParamMap, game: Game, i: int) -> PlayerPolynomial:
    raw, k = reduced_determinant(pm, game.payoffs[i], i)
    if raw.is_zero():
        return PlayerPolynomial(i, raw, Fraction(1), k, is_isolated(pm.graph, i))
    F = raw.primitive()
    e, c = F.leading_term()
    scale = Fraction(raw.terms[e]) / Fraction(c)
    rec = PlayerPolynomial(i, F, scale, k, is_isolated(pm.graph, i))
    want = expected_multidegree(pm, i)
    got = multidegree(F)
    if got != want:
        raise InternalInconsistency(f"player {i + 1}: multidegree {got} differs from {want}")
    return rec


def _system(pm: ParamMap, game: Game) -> SpohnCISystem:
    if not game.binary:
        raise ValueError("Spohn CI systems are only built for binary games")
    if game.n != pm.graph.n:
        raise ValueError("game and graph disagree on the number of players")
    records = tuple(_record(pm, game, i) for i in range(game.n))
    return SpohnCISystem(pm.graph, game, pm, records)


def build_system(g: Graph, game: Game) -> SpohnCISystem:
    return _system(param_map(g), game)


def partition_param_map(part: Partition) -> ParamMap:
    return param_map(part.graph(), cliques=part.blocks)


def nash_ci_system(part: Partition, game: Game) -> SpohnCISystem:
    """F_{(1,1)}, ..., F_{(k,n_k)} on the Segre torus, blocks in partition order."""
    if part.n != game.n:
        raise ValueError("partition and game disagree on the number of players")
    return _system(partition_param_map(part), game)


def expected_spohn_ci_dimension(g: Graph) -> int:
    return clique_complex_face_counts(g)[1]


def expected_nash_ci_dimension(part: Partition) -> int:
    return sum(2 ** s for s in part.sizes) - part.k - part.n


# ---------------------------------------------------------------------------
# linear systems W and payoff-table preimages

def _block_split(part: Partition, i: int, l: int) -> tuple[list[str], list[str], list[str]]:
    """Block-i variable names split by the strategy of its l-th player."""
    block = part.blocks[i]
    pm = partition_param_map(part)
    cols = pm.block_of_clique(i)
    names = [pm.vt.names[c] for c in cols]
    strategies = list(itertools.product((0, 1), repeat=len(block)))
    ones = [nm for nm, js in zip(names, strategies) if js[l] == 0]
    twos = [nm for nm, js in zip(names, strategies) if js[l] == 1]
    return names, ones, twos


def w_system_generators(part: Partition, i: int, l: int) -> list[Polynomial]:
    """Quadric generators of W_{(i,l)} in the block-i variables."""
    size = part.sizes[i]
    if size < 2:
        raise ValueError("a block of size 1 has a complete linear system; W is not needed")
    if not 0 <= l < size:
        raise ValueError(f"block {i + 1} has no player {l + 1}")
    names, ones, twos = _block_split(part, i, l)
    vt = VarTable(tuple(names), (0,) * len(names))
    s1 = [Polynomial.var(vt, nm) for nm in ones]
    s2 = [Polynomial.var(vt, nm) for nm in twos]
    sum1 = sum(s1[1:], s1[0])
    sum2 = sum(s2[1:], s2[0])
    gens = [a * sum2 for a in s1]
    gens += [a * sum1 for a in s2]
    cross = Polynomial.zero(vt)
    for a in s1[1:]:
        for b in s2[1:]:
            cross = cross + a * b
    gens.append(s1[0] * s2[0] - cross)
    return gens


def exact_solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> tuple[list[Fraction] | None, list[int]]:
    """Solve A x = b exactly; free variables are set to 0.

    Returns (solution or None, indices of inconsistent rows).
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(matrix, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((k for k in range(r, rows) if aug[k][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for k in range(rows):
            if k != r and aug[k][c] != 0:
                f = aug[k][c]
                aug[k] = [a - f * b for a, b in zip(aug[k], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    bad = [k for k in range(r, rows) if aug[k][cols] != 0]
    if bad:
        return None, bad
    x = [Fraction(0)] * cols
    for k, c in enumerate(pivots):
        x[c] = aug[k][cols]
    return x, []


def exact_rank(matrix: list[list[Fraction]]) -> int:
    rows = [list(map(Fraction, r)) for r in matrix]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((k for k in range(rank, len(rows)) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for k in range(rank + 1, len(rows)):
            if rows[k][c] != 0:
                f = rows[k][c] / rows[rank][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[rank])]
        rank += 1
    return rank


def payoff_map_matrix(part: Partition, i: int, l: int) -> tuple[list[tuple[int, ...]], list[list[Fraction]], ParamMap]:
    """Matrix of X^{(i,l)} -> reduced determinant, rows indexed by torus monomials."""
    pm = partition_param_map(part)
    player = part.blocks[i][l]
    images, _ = reduced_linear_map(pm, player)
    monos = sorted({e for img in images for e in img.terms})
    pos = {e: r for r, e in enumerate(monos)}
    mat = [[Fraction(0)] * len(images) for _ in monos]
    for t, img in enumerate(images):
        for e, c in img.terms.items():
            mat[pos[e]][t] = Fraction(c)
    return monos, mat, pm


def solve_payoff_preimage(part: Partition, i: int, l: int, target: Polynomial) -> tuple:
    """Payoff table X^{(i,l)} whose reduced determinant equals ``target`` exactly."""
    monos, mat, pm = payoff_map_matrix(part, i, l)
    if target.vt != pm.vt:
        target = target.to_vartable(pm.vt)
    pos = {e: r for r, e in enumerate(monos)}
    stray = [e for e in target.terms if e not in pos]
    if stray:
        names = sorted({str(Polynomial.from_pairs(pm.vt, {e: 1})) for e in stray})
        raise PreimageError("target has monomials outside the image", names)
    rhs = [Fraction(target.terms.get(e, 0)) for e in monos]
    x, bad = exact_solve(mat, rhs)
    if x is None:
        support = [str(Polynomial.from_pairs(pm.vt, {monos[k]: 1})) for k in bad]
        raise PreimageError("target is not in the image of the payoff-table map", support)
    table = tuple(v.numerator if v.denominator == 1 else v for v in x)
    check, _ = reduced_determinant(pm, table, part.blocks[i][l])
    if check != target:
        raise InternalInconsistency("preimage round trip failed")
    return table


def linear_system_dimension(part: Partition, i: int, l: int) -> int:
    """Rank of the payoff-table map for player (i, l), computed exactly."""
    _, mat, _ = payoff_map_matrix(part, i, l)
    return exact_rank(mat)


def expected_linear_system_dimension(part: Partition, i: int) -> int:
    others = 1
    for j, s in enumerate(part.sizes):
        if j != i:
            others *= 2 ** s
    if part.sizes[i] == 1:
        return others
    return (2 ** part.sizes[i] - 1) * others


def product_point_to_torus(pm: ParamMap, marginals: Sequence[Sequence[float]]) -> np.ndarray:
    """Torus coordinates realizing the product distribution of per-player marginals."""
    owner: dict[int, int] = {}
    for b, c in enumerate(pm.cliques):
        for v in c:
            owner.setdefault(v, b)
    marginals = [np.asarray(m) for m in marginals]
    dtype = np.result_type(*marginals)
    sigma = np.ones(len(pm.vt), dtype=dtype)
    for b, c in enumerate(pm.cliques):
        for local, js in enumerate(itertools.product((0, 1), repeat=len(c))):
            val = 1
            for v, j in zip(c, js):
                if owner[v] == b:
                    val = val * marginals[v][j]
            sigma[pm.offsets[b] + local] = val
    return sigma
