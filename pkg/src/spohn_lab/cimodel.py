"""Conditional-independence quadrics and the clique-monomial parametrization."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import (
    CIStatement,
    Graph,
    clique_complex_face_counts,
    global_markov,
    maximal_cliques,
    pairwise_markov,
)
from .polyring import Polynomial, VarTable, substitute_monomial
from .game import p_vartable


def _assignments(vertices: Sequence[int], d: Sequence[int]):
    return itertools.product(*(range(d[v]) for v in vertices))


def _marginal_terms(fixed: dict[int, int], d: Sequence[int]) -> list[int]:
    """Flat indices of all profiles agreeing with ``fixed``."""
    n = len(d)
    ranges = [(fixed[v],) if v in fixed else range(d[v]) for v in range(n)]
    return [int(np.ravel_multi_index(prof, d)) for prof in itertools.product(*ranges)]


def _product_of_sums(vt: VarTable, first: list[int], second: list[int], sign: int, into: dict):
    size = len(vt)
    for a in first:
        for b in second:
            e = [0] * size
            e[a] += 1
            e[b] += 1
            e = tuple(e)
            c = into.get(e, 0) + sign
            if c:
                into[e] = c
            else:
                del into[e]


def ci_quadrics(stmt: CIStatement, d: Sequence[int], vt: VarTable | None = None) -> list[Polynomial]:
    """Quadrics of A _||_ B | C in marginalized p-coordinates."""
    d = tuple(d)
    vt = vt or p_vartable(d)
    A, B, C = sorted(stmt.A), sorted(stmt.B), sorted(stmt.C)
    if max(A + B + C) >= len(d):
        raise ValueError("statement mentions a player outside the game")
    out = []
    a_vals = list(_assignments(A, d))
    b_vals = list(_assignments(B, d))
    for ic in _assignments(C, d):
        base = dict(zip(C, ic))
        for ia, ja in itertools.combinations(a_vals, 2):
            for ib, jb in itertools.combinations(b_vals, 2):
                def idx(xa, xb):
                    fixed = dict(base)
                    fixed.update(zip(A, xa))
                    fixed.update(zip(B, xb))
                    return _marginal_terms(fixed, d)

                terms: dict = {}
                _product_of_sums(vt, idx(ia, ib), idx(ja, jb), 1, terms)
                _product_of_sums(vt, idx(ia, jb), idx(ja, ib), -1, terms)
                if terms:
                    out.append(Polynomial.from_pairs(vt, terms))
    return out


def quadrics_for_statements(stmts: Iterable[CIStatement], d: Sequence[int], vt: VarTable | None = None) -> list[Polynomial]:
    """Union of the statements' quadrics, deduplicated by primitive form, in a stable order."""
    d = tuple(d)
    vt = vt or p_vartable(d)
    seen: dict[Polynomial, None] = {}
    for stmt in sorted(stmts, key=CIStatement.sort_key):
        for q in ci_quadrics(stmt, d, vt):
            seen.setdefault(q.primitive(), None)
    return list(seen)


def model_quadrics(g: Graph, d: Sequence[int] | None = None, vt: VarTable | None = None, markov: str = "global") -> list[Polynomial]:
    """Quadrics of the global (or pairwise) Markov property of g."""
    d = tuple(d) if d is not None else (2,) * g.n
    if markov == "auto":
        markov = "global" if g.n <= 5 else "pairwise"
    if markov == "global":
        stmts = global_markov(g)
    elif markov == "pairwise":
        stmts = pairwise_markov(g)
    else:
        raise ValueError(f"unknown Markov property {markov!r}")
    return quadrics_for_statements(stmts, d, vt)


# ---------------------------------------------------------------------------
# parametrization

def torus_name(clique: Sequence[int], strategies: Sequence[int]) -> str:
    sep = "x" if max(clique) >= 9 else ""
    return "s" + sep.join(str(v + 1) for v in clique) + "_" + "".join(str(j + 1) for j in strategies)


def torus_vartable(cliques: Sequence[Sequence[int]]) -> VarTable:
    """One block per clique; inside a block strategies run lexicographically, 1 before 2."""
    names = []
    blocks = []
    for b, c in enumerate(cliques):
        for js in itertools.product((0, 1), repeat=len(c)):
            names.append(torus_name(c, js))
            blocks.append(b)
    return VarTable(tuple(names), tuple(blocks))


@dataclass(frozen=True)
class ParamMap:
    graph: Graph
    cliques: tuple[tuple[int, ...], ...]
    vt: VarTable
    p_vt: VarTable
    images: np.ndarray = field(repr=False)
    offsets: tuple[int, ...] = field(repr=False)

    def image(self, profile: Sequence[int]) -> Polynomial:
        idx = int(np.ravel_multi_index(tuple(profile), (2,) * self.graph.n))
        return Polynomial.from_pairs(self.vt, {tuple(int(x) for x in self.images[idx]): 1})

    def compose(self, p: Polynomial) -> Polynomial:
        """Pull a polynomial in p-coordinates back to the torus."""
        return substitute_monomial(p, self.images, self.vt)

    def torus_index(self, clique: int, strategies: Sequence[int]) -> int:
        local = 0
        for j in strategies:
            local = 2 * local + j
        return self.offsets[clique] + local

    def p_values(self, sigma: np.ndarray) -> np.ndarray:
        """Numeric p-vector (unnormalized) for torus coordinates ``sigma``."""
        sigma = np.asarray(sigma)
        out = np.ones(self.images.shape[0], dtype=sigma.dtype)
        rows, cols = np.nonzero(self.images)
        np.multiply.at(out, rows, sigma[cols])
        return out

    def block_of_clique(self, clique: int) -> list[int]:
        size = 1 << len(self.cliques[clique])
        return list(range(self.offsets[clique], self.offsets[clique] + size))


def param_map(g: Graph, cliques: Sequence[Sequence[int]] | None = None) -> ParamMap:
    """p_j = prod over maximal cliques C of s^{(C)}_{j_C} (binary games only)."""
    cliques = tuple(tuple(c) for c in (cliques if cliques is not None else maximal_cliques(g)))
    vt = torus_vartable(cliques)
    p_vt = p_vartable((2,) * g.n)
    offsets = []
    off = 0
    for c in cliques:
        offsets.append(off)
        off += 1 << len(c)
    images = np.zeros((1 << g.n, len(vt)), dtype=np.int64)
    for idx, prof in enumerate(itertools.product((0, 1), repeat=g.n)):
        for b, c in enumerate(cliques):
            local = 0
            for v in c:
                local = 2 * local + prof[v]
            images[idx, offsets[b] + local] = 1
    images.setflags(write=False)
    return ParamMap(g, cliques, vt, p_vt, images, tuple(offsets))


def model_dimension(g: Graph) -> int:
    n, f2 = clique_complex_face_counts(g)
    return n + f2
