"""Undirected dependency graphs on player vertices.

Vertices are 0-based internally; JSON and printed output use 1-based labels.
Adjacency is a tuple of bitmasks, one per vertex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

GLOBAL_MARKOV_LIMIT = 12


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ValueError("adjacency must have one row per vertex")
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise ValueError(f"loop at vertex {v + 1}")
            if row >> self.n:
                raise ValueError(f"vertex {v + 1} has a neighbour outside the graph")
            for u in _bits(row):
                if not self.adj[u] >> v & 1:
                    raise ValueError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        """Build from 0-based edge pairs."""
        adj = [0] * n
        for a, b in edges:
            if a == b:
                raise ValueError(f"loop at vertex {a + 1}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a + 1},{b + 1}) leaves the vertex range 1..{n}")
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return cls(n, tuple(adj))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def from_cliques(cls, n: int, cliques: Iterable[Iterable[int]]) -> Graph:
        edges = []
        for c in cliques:
            edges.extend(itertools.combinations(sorted(c), 2))
        return cls.from_edges(n, edges)

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adj[a] >> b & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in _bits(self.adj[a]) if a < b]

    def neighbours(self, v: int) -> list[int]:
        return _bits(self.adj[v])

    def induced(self, vertices: Sequence[int]) -> Graph:
        vs = list(vertices)
        pos = {v: i for i, v in enumerate(vs)}
        return Graph.from_edges(len(vs), [(pos[a], pos[b]) for a, b in self.edges() if a in pos and b in pos])


@dataclass(frozen=True, order=True)
class CIStatement:
    A: frozenset[int]
    B: frozenset[int]
    C: frozenset[int]

    def __post_init__(self):
        A, B, C = (frozenset(x) for x in (self.A, self.B, self.C))
        if not A or not B:
            raise ValueError("A and B must be non-empty")
        if A & B or A & C or B & C:
            raise ValueError("A, B and C must be pairwise disjoint")
        if min(B) < min(A):
            A, B = B, A
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @classmethod
    def of(cls, A: Iterable[int], B: Iterable[int], C: Iterable[int] = ()) -> CIStatement:
        return cls(frozenset(A), frozenset(B), frozenset(C))

    def sort_key(self):
        return (sorted(self.A), sorted(self.B), sorted(self.C))

    def __str__(self) -> str:
        def fmt(s):
            return "{" + ",".join(str(v + 1) for v in sorted(s)) + "}"

        return f"{fmt(self.A)} _||_ {fmt(self.B)} | {fmt(self.C)}"

    def to_json(self) -> dict:
        return {k: [v + 1 for v in sorted(getattr(self, k))] for k in "ABC"}


@dataclass(frozen=True)
class Partition:
    sizes: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if list(self.sizes) != sorted(self.sizes):
            raise ValueError("partition sizes must be ascending")
        if tuple(len(b) for b in self.blocks) != tuple(self.sizes):
            raise ValueError("block sizes disagree with the size vector")
        flat = sorted(v for b in self.blocks for v in b)
        if flat != list(range(len(flat))):
            raise ValueError("blocks must partition the players 0..n-1")

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> Partition:
        """Consecutive player blocks for ascending sizes."""
        sizes = tuple(int(s) for s in sizes)
        if any(s < 1 for s in sizes):
            raise ValueError("partition sizes must be positive")
        if list(sizes) != sorted(sizes):
            raise ValueError("partition sizes must be ascending")
        blocks = []
        start = 0
        for s in sizes:
            blocks.append(tuple(range(start, start + s)))
            start += s
        return cls(sizes, tuple(blocks))

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    def graph(self) -> Graph:
        return Graph.from_cliques(self.n, self.blocks)


def _check_disjoint(*sets: frozenset[int]):
    for a, b in itertools.combinations(sets, 2):
        if a & b:
            raise ValueError("subsets must be pairwise disjoint")


def reachable(g: Graph, start: int, allowed: int) -> int:
    """Bitmask of vertices reachable from ``start`` inside ``allowed``."""
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= g.adj[v]
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def separates(g: Graph, A: Iterable[int], B: Iterable[int], C: Iterable[int]) -> bool:
    A, B, C = frozenset(A), frozenset(B), frozenset(C)
    _check_disjoint(A, B, C)
    allowed = ((1 << g.n) - 1) & ~_mask(C)
    bmask = _mask(B)
    return all(not reachable(g, a, allowed) & bmask for a in A)


def components(g: Graph, within: int | None = None) -> list[list[int]]:
    allowed = (1 << g.n) - 1 if within is None else within
    out = []
    left = allowed
    while left:
        v = (left & -left).bit_length() - 1
        comp = reachable(g, v, allowed)
        out.append(_bits(comp))
        left &= ~comp
    return out


def global_markov(g: Graph, limit: int = GLOBAL_MARKOV_LIMIT) -> set[CIStatement]:
    """Every A _||_ B | C with C separating A from B."""
    if g.n > limit:
        raise ValueError(f"global Markov enumeration is limited to n <= {limit}; use pairwise_markov for larger graphs")
    full = (1 << g.n) - 1
    out: set[CIStatement] = set()
    for cmask in range(full + 1):
        rest = full & ~cmask
        comps = [_mask(c) for c in components(g, rest)]
        if len(comps) < 2:
            continue
        C = frozenset(_bits(cmask))
        for asub in _nonempty_submasks(rest):
            touched = 0
            for c in comps:
                if c & asub:
                    touched |= c
            A = frozenset(_bits(asub))
            low_a = (asub & -asub)
            for bsub in _nonempty_submasks(rest & ~touched):
                # keep one orientation: the smaller minimum goes in A
                if (bsub & -bsub) < low_a:
                    continue
                out.add(CIStatement(A, frozenset(_bits(bsub)), C))
    return out


def _nonempty_submasks(mask: int):
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def pairwise_markov(g: Graph) -> set[CIStatement]:
    full = frozenset(range(g.n))
    out = set()
    for a, b in itertools.combinations(range(g.n), 2):
        if not g.has_edge(a, b):
            out.add(CIStatement.of({a}, {b}, full - {a, b}))
    return out


def maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """Bron-Kerbosch with pivoting; cliques sorted lexicographically."""
    found: list[tuple[int, ...]] = []

    def expand(r: int, p: int, x: int):
        if not p and not x:
            found.append(tuple(_bits(r)))
            return
        pivot = max(_bits(p | x), key=lambda u: bin(g.adj[u] & p).count("1"))
        for v in _bits(p & ~g.adj[pivot]):
            expand(r | 1 << v, p & g.adj[v], x & g.adj[v])
            p &= ~(1 << v)
            x |= 1 << v

    if g.n:
        expand(0, (1 << g.n) - 1, 0)
    return sorted(found)


def complete_subgraphs(g: Graph, min_size: int = 1) -> list[tuple[int, ...]]:
    """Every clique (face of the clique complex) with at least ``min_size`` vertices."""
    out = []

    def grow(clique: list[int], cand: int):
        if len(clique) >= min_size:
            out.append(tuple(clique))
        for v in _bits(cand):
            grow(clique + [v], cand & g.adj[v] & ~((1 << (v + 1)) - 1))

    for v in range(g.n):
        grow([v], g.adj[v] & ~((1 << (v + 1)) - 1))
    return sorted(out, key=lambda c: (len(c), c))


def clique_complex_face_counts(g: Graph) -> tuple[int, int]:
    return g.n, len(complete_subgraphs(g, 2))


def is_complete(g: Graph, vertices: Sequence[int]) -> bool:
    return all(g.has_edge(a, b) for a, b in itertools.combinations(vertices, 2))


def is_disjoint_cliques(g: Graph) -> Partition | None:
    """Partition when every connected component is complete, else None.

    Blocks are ordered by (size, smallest vertex).
    """
    comps = components(g)
    if not all(is_complete(g, c) for c in comps):
        return None
    comps.sort(key=lambda c: (len(c), c[0]))
    return Partition(tuple(len(c) for c in comps), tuple(tuple(c) for c in comps))


def is_subgraph(g: Graph, h: Graph) -> bool:
    if g.n != h.n:
        raise ValueError("graphs must have the same vertex count")
    return all(a & ~b == 0 for a, b in zip(g.adj, h.adj))


def graph_to_json(g: Graph) -> dict:
    return {"vertices": g.n, "edges": [[a + 1, b + 1] for a, b in g.edges()]}


def graph_from_json(obj: dict) -> Graph:
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise ValueError("graph JSON needs a 'vertices' field")
    n = obj["vertices"]
    if not isinstance(n, int) or n < 1:
        raise ValueError("'vertices' must be a positive integer")
    edges = []
    for k, e in enumerate(obj.get("edges", [])):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) for v in e)):
            raise ValueError(f"edges[{k}] must be a pair of 1-based vertex labels")
        edges.append((e[0] - 1, e[1] - 1))
    return Graph.from_edges(n, edges)


def all_graphs(n: int) -> list[Graph]:
    """One representative per isomorphism class of graphs on n vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    seen = set()
    reps = []
    perms = list(itertools.permutations(range(n)))
    for bits in range(1 << len(pairs)):
        edges = [pairs[k] for k in range(len(pairs)) if bits >> k & 1]
        canon = min(tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges)) for p in perms)
        if canon in seen:
            continue
        seen.add(canon)
        reps.append(Graph.from_edges(n, edges))
    return reps


def random_graph(rng, n: int, edge_prob: float = 0.5) -> Graph:
    edges = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < edge_prob]
    return Graph.from_edges(n, edges)
