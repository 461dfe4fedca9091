"""Truncated Chow ring Z[x_1..x_k]/(x_i^(2^n_i)) of a Segre product of projective spaces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .graph import Partition


def _sizes(part) -> tuple[int, ...]:
    if isinstance(part, Partition):
        return part.sizes
    sizes = tuple(int(s) for s in part)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("a partition needs positive block sizes")
    return sizes


@dataclass(frozen=True)
class ChowClass:
    sizes: tuple[int, ...]
    terms: Mapping[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        sizes = _sizes(self.sizes)
        object.__setattr__(self, "sizes", sizes)
        caps = [2 ** s for s in sizes]
        clean = {}
        for e, c in dict(self.terms).items():
            e = tuple(int(x) for x in e)
            if len(e) != len(sizes):
                raise ValueError("exponent vector length differs from the number of blocks")
            if c and all(x < cap for x, cap in zip(e, caps)):
                clean[e] = int(c)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def one(cls, sizes) -> ChowClass:
        sizes = _sizes(sizes)
        return cls(sizes, {(0,) * len(sizes): 1})

    @classmethod
    def linear(cls, sizes, coeffs: Sequence[int]) -> ChowClass:
        sizes = _sizes(sizes)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * len(sizes)
            e[i] = 1
            terms[tuple(e)] = c
        return cls(sizes, terms)

    def __mul__(self, other: ChowClass) -> ChowClass:
        return chow_mul(self, other)

    def __add__(self, other: ChowClass) -> ChowClass:
        if self.sizes != other.sizes:
            raise ValueError("partition mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return ChowClass(self.sizes, out)

    def __pow__(self, k: int) -> ChowClass:
        result = ChowClass.one(self.sizes)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.terms.get(tuple(exps), 0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
            mono = "*".join(f"x{i + 1}^{x}" if x > 1 else f"x{i + 1}" for i, x in enumerate(e) if x)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def chow_mul(a: ChowClass, b: ChowClass) -> ChowClass:
    if a.sizes != b.sizes:
        raise ValueError("partition mismatch")
    caps = [2 ** s for s in a.sizes]
    out: dict[tuple[int, ...], int] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if all(x < cap for x, cap in zip(e, caps)):
                out[e] = out.get(e, 0) + ca * cb
    return ChowClass(a.sizes, out)


def expected_dimension(sizes) -> int:
    sizes = _sizes(sizes)
    return sum(2 ** s for s in sizes) - len(sizes) - sum(sizes)


def degree_class(part) -> ChowClass:
    """H^(dim) * prod_b (H + sign_b x_b)^(n_b) with H = x_1 + ... + x_k."""
    sizes = _sizes(part)
    dim = expected_dimension(sizes)
    if dim < 0:
        raise ValueError(f"expected dimension {dim} is negative")
    k = len(sizes)
    h = ChowClass.linear(sizes, [1] * k)
    cls = h ** dim
    for b, s in enumerate(sizes):
        coeffs = [1] * k
        coeffs[b] += -1 if s == 1 else 1
        cls = cls * ChowClass.linear(sizes, coeffs) ** s
    return cls


def nash_ci_degree(part) -> int:
    sizes = _sizes(part)
    top = tuple(2 ** s - 1 for s in sizes)
    return degree_class(sizes).coefficient(top)


def canonical_multidegree(part) -> tuple[int, ...]:
    sizes = _sizes(part)
    n = sum(sizes)
    return tuple(n + s * (1 - 2 * (s == 1)) - 2 ** s for s in sizes)


def is_general_type_surface(part) -> bool:
    sizes = _sizes(part)
    if expected_dimension(sizes) != 2:
        raise ValueError("the general-type test applies to Nash CI surfaces only")
    return all(x > 0 for x in canonical_multidegree(sizes))


def partitions(n: int, smallest: int = 1):
    """Ascending integer partitions of n."""
    if n == 0:
        yield ()
        return
    for first in range(smallest, n + 1):
        for rest in partitions(n - first, first):
            yield (first,) + rest
