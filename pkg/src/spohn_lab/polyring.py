"""Exact sparse multivariate polynomials over the rationals.

Exponent vectors are dense tuples with one slot per variable of a shared
:class:`VarTable`. Coefficients are ``int`` when integral and
:class:`fractions.Fraction` otherwise; both compare and hash consistently,
and no floating point value is ever stored.

Text format (also pasteable into Macaulay2)::

    3/2*x^2*y + -1/1*y^3 + 5/1

Terms are written in descending graded-lex order and joined by ``" + "``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

Coefficient = int | Fraction


class VarTableMismatch(ValueError):
    """Raised when two polynomials over different variable tables meet."""


class InhomogeneousError(ValueError):
    """Raised when a polynomial is not homogeneous inside some block."""

    def __init__(self, block: int, degrees: set[int]):
        super().__init__(f"polynomial is not homogeneous in block {block}: degrees {sorted(degrees)}")
        self.block = block
        self.degrees = degrees


@dataclass(frozen=True)
class VarTable:
    names: tuple[str, ...]
    blocks: tuple[int, ...] | None = None
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        if self.blocks is not None:
            blocks = tuple(int(b) for b in self.blocks)
            if len(blocks) != len(names):
                raise ValueError("block indices must cover every variable")
            object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def nblocks(self) -> int:
        return 0 if self.blocks is None else max(self.blocks, default=-1) + 1

    def block_members(self, block: int) -> list[int]:
        if self.blocks is None:
            raise ValueError("variable table has no block structure")
        return [i for i, b in enumerate(self.blocks) if b == block]

    def without(self, names: Iterable[str]) -> VarTable:
        drop = set(names)
        keep = [i for i, n in enumerate(self.names) if n not in drop]
        blocks = None if self.blocks is None else tuple(self.blocks[i] for i in keep)
        return VarTable(tuple(self.names[i] for i in keep), blocks)

    def declaration(self) -> str:
        """Macaulay2-style ring declaration line."""
        return "R = QQ[" + ",".join(self.names) + "]"


def as_coefficient(c) -> Coefficient:
    """Exact coefficient from an int, Fraction, Decimal-like or string."""
    if isinstance(c, bool):
        c = int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, float):
        raise TypeError("polynomial coefficients must be exact; got float")
    if isinstance(c, (Rational, str)) or hasattr(c, "as_integer_ratio"):
        f = Fraction(c)
        return f.numerator if f.denominator == 1 else f
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


def _norm(c) -> Coefficient:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def grlex_key(e: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    return (sum(e), e)


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("vt", "terms", "_hash")

    def __init__(self, vt: VarTable, terms: Mapping[tuple[int, ...], object] | None = None, *, _trusted: bool = False):
        self.vt = vt
        if _trusted:
            self.terms = terms
        else:
            n = len(vt)
            clean: dict[tuple[int, ...], Coefficient] = {}
            for e, c in (terms or {}).items():
                e = tuple(int(x) for x in e)
                if len(e) != n or any(x < 0 for x in e):
                    raise ValueError(f"bad exponent vector {e} for {n} variables")
                c = as_coefficient(c)
                if c:
                    clean[e] = _norm(clean.get(e, 0) + c)
                    if not clean[e]:
                        del clean[e]
            self.terms = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, vt: VarTable) -> Polynomial:
        return cls(vt, {}, _trusted=True)

    @classmethod
    def constant(cls, vt: VarTable, c) -> Polynomial:
        c = as_coefficient(c)
        return cls(vt, {(0,) * len(vt): c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, vt: VarTable, name: str) -> Polynomial:
        e = [0] * len(vt)
        e[vt.index(name)] = 1
        return cls(vt, {tuple(e): 1}, _trusted=True)

    @classmethod
    def monomial(cls, vt: VarTable, exps: Sequence[int], c=1) -> Polynomial:
        return cls(vt, {tuple(exps): c})

    @classmethod
    def from_pairs(cls, vt: VarTable, pairs: Mapping[tuple[int, ...], Coefficient]) -> Polynomial:
        """Wrap a term map of exact coefficients, dropping zeros."""
        return cls(vt, {e: _norm(c) for e, c in pairs.items() if c}, _trusted=True)

    # basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Coefficient]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], Coefficient]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def support(self) -> set[str]:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return {self.vt.names[i] for i in sorted(used)}

    def constant_term(self) -> Coefficient:
        return self.terms.get((0,) * len(self.vt), 0)

    # arithmetic -------------------------------------------------------
    def _check(self, other: Polynomial):
        if self.vt is not other.vt and self.vt != other.vt:
            raise VarTableMismatch("polynomials live over different variable tables")

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.vt, other)

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _norm(s)
            else:
                out.pop(e, None)
        return Polynomial(self.vt, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.vt, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other) -> Polynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Polynomial:
        return self._coerce(other) - self

    def scale(self, c) -> Polynomial:
        c = as_coefficient(c)
        if not c:
            return Polynomial.zero(self.vt)
        return Polynomial(self.vt, {e: _norm(v * c) for e, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[tuple[int, ...], Coefficient] = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                out[e] = get(e, 0) + ca * cb
        return Polynomial(self.vt, {e: _norm(c) for e, c in out.items() if c}, _trusted=True)

    def __rmul__(self, other) -> Polynomial:
        return self.scale(other)

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(self.vt, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.vt == other.vt and self.terms == other.terms
        try:
            return self == Polynomial.constant(self.vt, other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vt.names, frozenset(self.terms.items())))
        return self._hash

    # calculus and normal forms ---------------------------------------
    def diff(self, name: str) -> Polynomial:
        k = self.vt.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = _norm(c * e[k])
        return Polynomial(self.vt, out, _trusted=True)

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        from math import gcd, lcm

        if not self.terms:
            return Fraction(0)
        den = 1
        for c in self.terms.values():
            den = lcm(den, Fraction(c).denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, int(Fraction(c) * den))
        return Fraction(num, den)

    def primitive(self) -> Polynomial:
        """Integer primitive form with positive graded-lex leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return self.scale(1 / c)

    def specialize(self, values: Mapping[str, object]) -> Polynomial:
        """Substitute exact constants for some variables; they are removed from the table."""
        vt = self.vt.without(values)
        fixed = {self.vt.index(n): as_coefficient(v) for n, v in values.items()}
        keep = [i for i in range(len(self.vt)) if i not in fixed]
        out: dict[tuple[int, ...], Coefficient] = {}
        for e, c in self.terms.items():
            for i, v in fixed.items():
                if e[i]:
                    c = c * v ** e[i]
            if not c:
                continue
            f = tuple(e[i] for i in keep)
            out[f] = out.get(f, 0) + c
        return Polynomial(vt, {e: _norm(c) for e, c in out.items() if c}, _trusted=True)

    def to_vartable(self, vt: VarTable) -> Polynomial:
        """Re-express over another table containing every variable in use."""
        idx = [vt.index(n) for n in self.vt.names]
        n = len(vt)
        out = {}
        for e, c in self.terms.items():
            f = [0] * n
            for i, x in enumerate(e):
                if x:
                    f[idx[i]] = x
            out[tuple(f)] = c
        return Polynomial(vt, out, _trusted=True)

    def homogeneous_in_block(self, block: int) -> bool:
        try:
            multidegree(self)
        except InhomogeneousError as err:
            return err.block != block
        return True

    # text -------------------------------------------------------------
    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"


# ---------------------------------------------------------------------------
# module-level operations

def add(p: Polynomial, q: Polynomial) -> Polynomial:
    if not isinstance(q, Polynomial):
        raise TypeError("add expects two polynomials")
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    if not isinstance(q, Polynomial):
        raise TypeError("mul expects two polynomials")
    return p * q


@dataclass(frozen=True)
class Matrix2x2:
    a: Polynomial
    b: Polynomial
    c: Polynomial
    d: Polynomial

    def __post_init__(self):
        vt = self.a.vt
        for p in (self.b, self.c, self.d):
            if p.vt != vt:
                raise VarTableMismatch("matrix entries must share a variable table")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Polynomial]]) -> Matrix2x2:
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def swap_rows(self) -> Matrix2x2:
        return Matrix2x2(self.c, self.d, self.a, self.b)


def det2(m: Matrix2x2) -> Polynomial:
    return m.a * m.d - m.b * m.c


def evaluate(p: Polynomial, point: Mapping[str, object]):
    """Exact value when every input is rational, IEEE double (or complex) otherwise."""
    values = []
    for name in p.vt.names:
        if name not in point:
            if any(e[p.vt.index(name)] for e in p.terms):
                raise KeyError(f"no value assigned to variable {name!r}")
            values.append(0)
            continue
        values.append(point[name])
    exact = all(isinstance(v, (int, Fraction)) or (isinstance(v, Rational)) for v in values)
    if exact:
        values = [as_coefficient(v) for v in values]
        total: Coefficient = 0
        for e, c in p.terms.items():
            t = c
            for v, x in zip(values, e):
                if x:
                    t = t * v ** x
            total += t
        return _norm(Fraction(total)) if isinstance(total, Fraction) else total
    arr = np.asarray([complex(v) if isinstance(v, complex) else float(v) for v in values])
    if not p.terms:
        return arr.dtype.type(0)
    exps = np.array(list(p.terms.keys()), dtype=np.int64)
    coefs = np.array([float(c) for c in p.terms.values()])
    vals = np.prod(arr[None, :] ** exps, axis=1)
    return (coefs * vals).sum()


def substitute(p: Polynomial, assignment: Mapping[str, Polynomial], target: VarTable | None = None) -> Polynomial:
    """Compose p with the given images (one polynomial per variable of p)."""
    images = []
    for name in p.vt.names:
        if name not in assignment:
            if any(e[p.vt.index(name)] for e in p.terms):
                raise KeyError(f"no image assigned to variable {name!r}")
            images.append(None)
            continue
        images.append(assignment[name])
    present = [q for q in images if q is not None]
    if target is None:
        if not present:
            raise ValueError("cannot infer the target table from an empty assignment")
        target = present[0].vt
    for q in present:
        if q.vt != target:
            raise VarTableMismatch("all images must share one variable table")

    if all(q is None or _is_unit_monomial(q) for q in images):
        rows = [next(iter(q.terms)) if q is not None else (0,) * len(target) for q in images]
        return substitute_monomial(p, np.array(rows, dtype=np.int64).reshape(len(images), len(target)), target)

    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, k: int) -> Polynomial:
        key = (i, k)
        if key not in powers:
            powers[key] = images[i] if k == 1 else power(i, k - 1) * images[i]
        return powers[key]

    result = Polynomial.zero(target)
    for e, c in p.terms.items():
        t = Polynomial.constant(target, c)
        for i, x in enumerate(e):
            if x:
                t = t * power(i, x)
        result = result + t
    return result


def _is_unit_monomial(q: Polynomial) -> bool:
    if len(q.terms) != 1:
        return False
    return next(iter(q.terms.values())) == 1


def substitute_monomial(p: Polynomial, images: np.ndarray, target: VarTable) -> Polynomial:
    """Compose with a monomial map; ``images[i]`` is the exponent row of variable i's image."""
    if not p.terms:
        return Polynomial.zero(target)
    exps = np.array(list(p.terms.keys()), dtype=np.int64)
    mapped = exps @ images
    out: dict[tuple[int, ...], Coefficient] = {}
    get = out.get
    for row, c in zip(map(tuple, mapped.tolist()), p.terms.values()):
        out[row] = get(row, 0) + c
    return Polynomial(target, {e: _norm(c) for e, c in out.items() if c}, _trusted=True)


def divide_exact(p: Polynomial, q: Polynomial) -> Polynomial | None:
    """Return r with p == q*r, or None when q does not divide p."""
    p._check(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_e, lead_c = q.leading_term()
    rest = {e: c for e, c in q.terms.items() if e != lead_e}
    rem = dict(p.terms)
    quot: dict[tuple[int, ...], Coefficient] = {}
    while rem:
        e = max(rem, key=grlex_key)
        if any(x < y for x, y in zip(e, lead_e)):
            return None
        shift = tuple(x - y for x, y in zip(e, lead_e))
        c = _norm(Fraction(rem[e]) / lead_c)
        quot[shift] = c
        del rem[e]
        for f, d in rest.items():
            g = tuple(x + y for x, y in zip(f, shift))
            v = rem.get(g, 0) - c * d
            if v:
                rem[g] = _norm(v)
            else:
                rem.pop(g, None)
    return Polynomial(p.vt, quot, _trusted=True)


def multidegree(p: Polynomial) -> tuple[int, ...]:
    """Degree of p in each block; raises InhomogeneousError when some block is mixed."""
    vt = p.vt
    if vt.blocks is None:
        raise ValueError("variable table has no block structure")
    k = vt.nblocks
    members = [vt.block_members(b) for b in range(k)]
    degs: list[set[int]] = [set() for _ in range(k)]
    for e in p.terms:
        for b in range(k):
            degs[b].add(sum(e[i] for i in members[b]))
    out = []
    for b, ds in enumerate(degs):
        if len(ds) > 1:
            raise InhomogeneousError(b, ds)
        out.append(next(iter(ds)) if ds else 0)
    return tuple(out)


# ---------------------------------------------------------------------------
# text serialisation

def _format_coefficient(c: Coefficient) -> str:
    f = Fraction(c)
    return f"{f.numerator}/{f.denominator}"


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        factors = [_format_coefficient(c)]
        for name, x in zip(p.vt.names, e):
            if x == 1:
                factors.append(name)
            elif x:
                factors.append(f"{name}^{x}")
        parts.append("*".join(factors))
    return " + ".join(parts)


_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?$")


def parse_polynomial(text: str, vt: VarTable) -> Polynomial:
    """Inverse of :func:`format_polynomial` (also accepts bare monomials and integers)."""
    text = text.strip()
    if text == "0":
        return Polynomial.zero(vt)
    terms: dict[tuple[int, ...], Coefficient] = {}
    for chunk in text.split(" + "):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError("empty term in polynomial text")
        coef: Coefficient = 1
        e = [0] * len(vt)
        for k, factor in enumerate(chunk.split("*")):
            factor = factor.strip()
            m = _FACTOR.match(factor)
            if m:
                e[vt.index(m.group(1))] += int(m.group(2) or 1)
            elif k == 0:
                coef = as_coefficient(factor)
            else:
                raise ValueError(f"cannot parse factor {factor!r}")
        key = tuple(e)
        terms[key] = _norm(terms.get(key, 0) + coef)
    return Polynomial(vt, {e: c for e, c in terms.items() if c}, _trusted=True)


def export_lines(vt: VarTable, polys: Iterable[Polynomial]) -> str:
    """Variable declaration line followed by one polynomial per line."""
    lines = [vt.declaration()]
    lines.extend(format_polynomial(p) for p in polys)
    return "\n".join(lines) + "\n"


def parse_export(text: str) -> tuple[VarTable, list[Polynomial]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    m = re.match(r"^R = QQ\[(.*)\]$", lines[0].strip())
    if not m:
        raise ValueError("first line must be a ring declaration 'R = QQ[...]'")
    names = tuple(n.strip() for n in m.group(1).split(",") if n.strip())
    vt = VarTable(names)
    return vt, [parse_polynomial(ln, vt) for ln in lines[1:]]
