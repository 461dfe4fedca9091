"""Floating-point solving and validation of Nash and CI equilibria.

Everything stochastic draws from ``numpy.random.default_rng`` streams spawned
from ``SolveConfig.seed``; with a fixed seed and backend, outputs are
bit-for-bit reproducible.
"""
from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .cimodel import ParamMap, model_quadrics
from .game import Game, payoff_map, spohn_minors
from .graph import Graph
from .polyring import Polynomial, VarTable
from .spohnci import SpohnCISystem, build_system


class NonIsolatedWarning(UserWarning):
    """The solution set is positive dimensional where isolated points were expected."""


@dataclass(frozen=True)
class SolveConfig:
    seed: int
    tol: float = 1e-10
    max_iter: int = 100
    starts: int = 200
    start_box: tuple[float, float] = (0.0, 1.0)
    dedup_radius: float = 1e-6
    slice_starts: int = 8
    attempts_per_point: int = 10
    probe_points: int = 3
    rank_threshold: float = 1e-8

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("a seed is required")
        if self.tol <= 0 or self.dedup_radius <= 0 or self.rank_threshold <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1 or self.starts < 1:
            raise ValueError("iteration and start counts must be positive")
        lo, hi = self.start_box
        if not lo < hi:
            raise ValueError("start box must satisfy low < high")


# ---------------------------------------------------------------------------
# compiled systems

@dataclass(frozen=True)
class CompiledSystem:
    names: tuple[str, ...]
    m: int
    ptr: np.ndarray
    coef: np.ndarray
    fptr: np.ndarray
    fvar: np.ndarray
    fpow: np.ndarray
    jrow: np.ndarray
    jcol: np.ndarray
    jptr: np.ndarray
    jcoef: np.ndarray
    jfptr: np.ndarray
    jfvar: np.ndarray
    jfpow: np.ndarray
    dense: tuple = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.names)

    def evaluate(self, X: np.ndarray, backend: str | None = None) -> np.ndarray:
        X = _as_batch(X)
        if _pick(backend) == "numba":
            return _kernels.evaluate_batch_nb(X, self.ptr, self.coef, self.fptr, self.fvar, self.fpow)
        return _kernels.evaluate_numpy(X, self.dense)

    def jacobian(self, X: np.ndarray, backend: str | None = None) -> np.ndarray:
        X = _as_batch(X)
        if _pick(backend) == "numba":
            return _kernels.jacobian_batch_nb(X, self.m, self.jrow, self.jcol, self.jptr,
                                              self.jcoef, self.jfptr, self.jfvar, self.jfpow)
        return _kernels.jacobian_numpy(X, self.dense, self.m, self.n)

    def newton(self, X0: np.ndarray, tol: float, max_iter: int, backend: str | None = None):
        if self.m != self.n:
            raise ValueError(f"Newton needs a square system, got {self.m} equations in {self.n} variables")
        X0 = _as_batch(X0)
        if _pick(backend) == "numba":
            return _kernels.newton_batch_nb(X0, tol, max_iter, 12, 1e8,
                                            self.ptr, self.coef, self.fptr, self.fvar, self.fpow,
                                            self.jrow, self.jcol, self.jptr, self.jcoef,
                                            self.jfptr, self.jfvar, self.jfpow)
        return _kernels.newton_numpy(X0, self.dense, self.m, self.n, tol, max_iter)


def _pick(backend: str | None) -> str:
    if backend is None:
        return _kernels.backend_name()
    if backend == "numba" and not _kernels.HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def _as_batch(X) -> np.ndarray:
    X = np.asarray(X)
    if X.dtype.kind not in "fc":
        X = X.astype(float)
    if X.dtype.kind == "f":
        X = X.astype(np.float64)
    else:
        X = X.astype(np.complex128)
    if X.ndim == 1:
        X = X[None, :]
    return np.ascontiguousarray(X)


def _flatten_terms(polys: Sequence[Polynomial]):
    ptr = [0]
    coef, fptr, fvar, fpow = [], [0], [], []
    exps = []
    for p in polys:
        for e, c in p.sorted_terms():
            coef.append(float(c))
            for v, x in enumerate(e):
                if x:
                    fvar.append(v)
                    fpow.append(x)
            fptr.append(len(fvar))
            exps.append(e)
        ptr.append(len(coef))
    return (np.array(ptr, dtype=np.int64), np.array(coef, dtype=np.float64), np.array(fptr, dtype=np.int64),
            np.array(fvar, dtype=np.int64), np.array(fpow, dtype=np.int64), exps)


def compile_system(polys: Sequence[Polynomial]) -> CompiledSystem:
    """Flatten polynomials and their exact partial derivatives for the kernels."""
    if not polys:
        raise ValueError("empty system")
    vt = polys[0].vt
    for p in polys:
        if p.vt != vt:
            raise ValueError("all polynomials must share a variable table")
    n = len(vt)
    m = len(polys)
    ptr, coef, fptr, fvar, fpow, exps = _flatten_terms(polys)

    jac_polys, jrow, jcol = [], [], []
    for r, p in enumerate(polys):
        used = sorted({v for e in p.terms for v, x in enumerate(e) if x})
        for c in used:
            jac_polys.append(p.diff(vt.names[c]))
            jrow.append(r)
            jcol.append(c)
    if jac_polys:
        jptr, jcoef, jfptr, jfvar, jfpow, jexps = _flatten_terms(jac_polys)
    else:
        jptr = np.zeros(1, dtype=np.int64)
        jcoef = np.zeros(0)
        jfptr = np.zeros(1, dtype=np.int64)
        jfvar = np.zeros(0, dtype=np.int64)
        jfpow = np.zeros(0, dtype=np.int64)
        jexps = []

    E = np.array(exps, dtype=np.int64).reshape(len(exps), n)
    EJ = np.array(jexps, dtype=np.int64).reshape(len(jexps), n)
    jflat = np.array(jrow, dtype=np.int64) * n + np.array(jcol, dtype=np.int64)
    return CompiledSystem(tuple(vt.names), m, ptr, coef, fptr, fvar, fpow,
                          np.array(jrow, dtype=np.int64), np.array(jcol, dtype=np.int64),
                          jptr, jcoef, jfptr, jfvar, jfpow, (E, ptr, coef, EJ, jptr, jcoef, jflat))


def finite_difference_jacobian(cs: CompiledSystem, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    J = np.zeros((cs.m, cs.n))
    for c in range(cs.n):
        e = np.zeros(cs.n)
        e[c] = h
        J[:, c] = (cs.evaluate(x + e)[0] - cs.evaluate(x - e)[0]) / (2 * h)
    return J


# ---------------------------------------------------------------------------
# multistart Newton

def _dedup(points: np.ndarray, radius: float) -> np.ndarray:
    if len(points) == 0:
        return points
    key = np.round(points.real if np.iscomplexobj(points) else points, 12)
    order = np.lexsort(key.T[::-1])
    kept: list[np.ndarray] = []
    for idx in order:
        p = points[idx]
        if all(np.max(np.abs(p - q)) > radius for q in kept):
            kept.append(p)
    return np.array(kept)


def _starts(rng: np.random.Generator, count: int, n: int, box: tuple[float, float], dtype=float) -> np.ndarray:
    lo, hi = box
    X = rng.uniform(lo, hi, size=(count, n))
    if dtype is complex or np.dtype(dtype).kind == "c":
        X = X + 1j * rng.uniform(lo, hi, size=(count, n))
    return X


def _torus_starts(rng: np.random.Generator, count: int, n: int, box: tuple[float, float]) -> np.ndarray:
    """Starts for torus ratios: a box inside [0, 1] is read as probabilities and mapped to odds."""
    lo, hi = box
    if not (0.0 <= lo and hi <= 1.0):
        return _starts(rng, count, n, box)
    U = np.clip(rng.uniform(lo, hi, size=(count, n)), 1e-3, 1 - 1e-3)
    return U / (1.0 - U)


def _run_starts(cs: CompiledSystem, X0: np.ndarray, cfg: SolveConfig, polish: int = 3):
    X, conv, res, _ = cs.newton(X0, cfg.tol, cfg.max_iter)
    sols = X[conv]
    if polish and len(sols):
        # a few extra full steps push converged points to rounding level
        Xp, convp, resp, _ = cs.newton(sols, 1e-300, polish)
        keep = np.isfinite(Xp).all(axis=1) & (resp <= res[conv] + 1e-300)
        sols = np.where(keep[:, None], Xp, sols)
    return sols


def newton_solve(system: Sequence[Polynomial], cfg: SolveConfig, rng: np.random.Generator | None = None) -> list[np.ndarray]:
    """Deduplicated real solutions of a square system from ``cfg.starts`` random starts."""
    cs = compile_system(system)
    if cs.m != cs.n:
        raise ValueError(f"system is not square: {cs.m} equations in {cs.n} unknowns")
    rng = rng or np.random.default_rng(cfg.seed)
    X0 = _starts(rng, cfg.starts, cs.n, cfg.start_box)
    sols = _run_starts(cs, X0, cfg)
    sols = _dedup(sols, cfg.dedup_radius)
    return [s for s in sols]


# ---------------------------------------------------------------------------
# equilibrium points

@dataclass(frozen=True)
class EquilibriumPoint:
    torus: tuple[float, ...]
    probabilities: tuple[float, ...]
    quadric_residual: float
    minor_residual: float
    totally_mixed: bool
    kind: str = "positive"

    def to_json(self) -> dict:
        return {
            "torus": [float(x) for x in self.torus],
            "p": [float(x) for x in self.probabilities],
            "quadric_residual": float(self.quadric_residual),
            "minor_residual": float(self.minor_residual),
            "totally_mixed": bool(self.totally_mixed),
            "kind": self.kind,
        }


class _Problem:
    """Everything needed to sample and validate equilibria for one (graph, game)."""

    def __init__(self, system: SpohnCISystem, markov: str = "auto"):
        self.system = system
        self.pm: ParamMap = system.pm
        g = system.graph
        self.n = g.n
        vt = self.pm.vt
        # dehomogenize: the all-2 variable of each block is fixed to 1
        self.fixed = [self.pm.block_of_clique(b)[-1] for b in range(len(self.pm.cliques))]
        self.free = [c for c in range(len(vt)) if c not in set(self.fixed)]
        sub = {vt.names[c]: 1 for c in self.fixed}
        self.free_vt: VarTable = vt.without(sub)
        self.equations = [p.specialize(sub) for p in system.polynomials]
        nonzero = [p for p in self.equations if not p.is_zero()]
        self.degenerate = len(nonzero) < len(self.equations)
        self.F = compile_system(nonzero) if nonzero else None
        p_vt = self.pm.p_vt
        quads = model_quadrics(g, (2,) * g.n, p_vt, markov=markov)
        minors = [q for q in spohn_minors(system.game, p_vt) if not q.is_zero()]
        self.validators = compile_system(quads + minors) if quads + minors else None
        self.nquad = len(quads)
        self.payoff_tables = np.array([system.game.array(i) for i in range(g.n)])

    @property
    def unknowns(self) -> int:
        return len(self.free)

    @property
    def expected_slices(self) -> int:
        return self.unknowns - (self.F.m if self.F is not None else 0)

    def torus_point(self, y: np.ndarray) -> np.ndarray:
        sigma = np.ones(len(self.pm.vt), dtype=y.dtype)
        sigma[self.free] = y
        return sigma

    def probabilities(self, y: np.ndarray) -> np.ndarray:
        p = self.pm.p_values(self.torus_point(y))
        return p / p.sum()

    def residuals(self, p: np.ndarray) -> tuple[float, float]:
        if self.validators is None:
            return 0.0, 0.0
        vals = np.abs(self.validators.evaluate(p)[0])
        q = float(vals[: self.nquad].max()) if self.nquad else 0.0
        mi = float(vals[self.nquad:].max()) if len(vals) > self.nquad else 0.0
        return q, mi

    def point(self, y: np.ndarray, kind: str) -> EquilibriumPoint:
        p = self.probabilities(y)
        q, mi = self.residuals(p)
        return EquilibriumPoint(tuple(self.torus_point(y).tolist()), tuple(p.tolist()), q, mi,
                                bool(np.isrealobj(p) and (p > 0).all()), kind)


@lru_cache(maxsize=64)
def _problem(g: Graph, game: Game, markov: str = "auto") -> _Problem:
    return _Problem(build_system(g, game), markov)


def _sample_slices(prob: _Problem, cfg: SolveConfig, rng: np.random.Generator, complex_: bool = False,
                   anchor: np.ndarray | None = None) -> np.ndarray:
    """Solutions of one randomly sliced square system (unknown space).

    The slices pass through ``anchor`` (a random point of the start box when
    omitted) and Newton starts from the anchor plus random box points.
    """
    k = prob.expected_slices
    N = prob.unknowns
    lo, hi = cfg.start_box
    A = rng.uniform(-1.0, 1.0, size=(k, N))
    if anchor is None:
        anchor = rng.uniform(lo, hi, size=N)
    if complex_:
        A = A + 1j * rng.uniform(-1.0, 1.0, size=(k, N))
        anchor = anchor + 1j * rng.uniform(lo, hi, size=N)
    b = A @ anchor
    extra = _starts(rng, max(cfg.slice_starts - 1, 0), N, cfg.start_box, complex if complex_ else float)
    starts = np.vstack([anchor[None, :], extra]) if len(extra) else anchor[None, :]
    return _solve_sliced(prob, A, b, starts, cfg)


def _solve_sliced(prob: _Problem, A, b, starts, cfg: SolveConfig) -> np.ndarray:
    if A.shape[0] == 0:
        return _run_starts(prob.F, starts, cfg)
    return _newton_with_slices(prob.F, A, b, starts, cfg)


def _newton_with_slices(F: CompiledSystem | None, A, b, starts, cfg: SolveConfig) -> np.ndarray:
    """Damped Newton on [F(y); A y - b] = 0, vectorized across starts."""
    X = np.array(starts, dtype=np.result_type(starts, A, float))
    S = X.shape[0]
    status = np.zeros(S, dtype=np.int64)

    def full(Y):
        lin = Y @ A.T - b[None, :]
        return lin if F is None else np.concatenate([F.evaluate(Y), lin], axis=1)

    def jac(Y):
        lin = np.broadcast_to(A, (Y.shape[0],) + A.shape)
        return lin if F is None else np.concatenate([F.jacobian(Y), lin], axis=1)

    R = full(X)
    for _ in range(cfg.max_iter + 3):
        act = np.nonzero(status == 0)[0]
        if act.size == 0:
            break
        Y = X[act]
        Ra = R[act]
        J = jac(Y)
        step, ok = _kernels._solve_batch_np(J, Ra)
        norm0 = np.linalg.norm(Ra, axis=1)
        t = np.ones(act.size)
        Yn = Y + step
        Rn = full(Yn)
        normn = np.linalg.norm(Rn, axis=1)
        for _h in range(12):
            bad = ~(normn < norm0) & ok & (norm0 > 1e-14)
            if not bad.any():
                break
            t[bad] *= 0.5
            Yn[bad] = Y[bad] + t[bad, None] * step[bad]
            Rn[bad] = full(Yn[bad])
            normn[bad] = np.linalg.norm(Rn[bad], axis=1)
        X[act] = np.where(ok[:, None], Yn, Y)
        R[act] = np.where(ok[:, None], Rn, Ra)
        r = np.abs(R[act]).max(axis=1)
        big = ~np.isfinite(X[act]).all(axis=1) | (np.abs(X[act]).max(axis=1) > 1e8)
        # keep iterating a couple of steps below tol to polish
        status[act] = np.where(~ok | big, 2, np.where(r < cfg.tol * 1e-3, 1, 0))
    r = np.abs(R).max(axis=1)
    good = (status != 2) & (r < cfg.tol) & np.isfinite(X).all(axis=1)
    return X[good]


def _seeded(cfg: SolveConfig, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, tag]))


_TAG_NASH, _TAG_SAMPLE, _TAG_PROBE_REAL, _TAG_PROBE_COMPLEX = 1, 2, 3, 4


def solve_totally_mixed_nash(game: Game, cfg: SolveConfig) -> list[EquilibriumPoint]:
    """Totally mixed Nash equilibria from the multilinear system on the product torus."""
    if not game.binary:
        raise ValueError("only binary games are supported")
    prob = _problem(Graph.empty(game.n), game)
    rng = _seeded(cfg, _TAG_NASH)
    if prob.degenerate:
        warnings.warn("some player's equation vanishes identically; equilibria are not isolated",
                      NonIsolatedWarning, stacklevel=2)
        # report one witness per slice family instead of a continuum
        sols = _dedup(_sample_slices(prob, replace(cfg, slice_starts=1), rng), cfg.dedup_radius)
    else:
        # half the starts on the box, half on odds so ratios above 1 are reached as well
        half = cfg.starts // 2
        X0 = np.vstack([_starts(rng, cfg.starts - half, prob.unknowns, cfg.start_box),
                        _torus_starts(rng, half, prob.unknowns, cfg.start_box)])
        sols = _dedup(_run_starts(prob.F, X0, cfg), cfg.dedup_radius)
    out = []
    for y in sols:
        if (y > 0).all():
            pt = prob.point(y, "positive")
            if pt.totally_mixed and _valid(pt, cfg):
                out.append(pt)
    if out and not prob.degenerate:
        J = prob.F.jacobian(np.array([list(np.array(pt.torus)[prob.free]) for pt in out]))
        sv = np.linalg.svd(J, compute_uv=False)
        if (sv[:, -1] <= cfg.rank_threshold * sv[:, 0]).any():
            warnings.warn("singular Jacobian at a solution; equilibria may not be isolated",
                          NonIsolatedWarning, stacklevel=2)
    return out


def _valid(pt: EquilibriumPoint, cfg: SolveConfig) -> bool:
    lim = max(cfg.tol, 1e-9)
    return pt.quadric_residual <= lim and pt.minor_residual <= lim


def sample_ci_equilibria(g: Graph, game: Game, count: int, cfg: SolveConfig, markov: str = "auto") -> list[EquilibriumPoint]:
    """Totally mixed CI equilibria from randomly sliced square systems."""
    if not game.binary:
        raise ValueError("only binary games are supported")
    prob = _problem(g, game, markov)
    if prob.expected_slices == 0 and not prob.degenerate:
        # zero-dimensional: the full multistart finds every point without slicing
        return solve_totally_mixed_nash(game, cfg)[:count]
    rng = _seeded(cfg, _TAG_SAMPLE)
    out: list[EquilibriumPoint] = []
    seen: list[np.ndarray] = []
    found: list[np.ndarray] = []
    lo, hi = cfg.start_box

    def accept(y: np.ndarray) -> bool:
        raw = prob.pm.p_values(prob.torus_point(y))
        if not ((raw > 0).all() or (raw < 0).all()):
            return False
        pt = prob.point(y, "positive")
        if not pt.totally_mixed or not _valid(pt, cfg):
            return False
        p = np.array(pt.probabilities)
        if any(np.max(np.abs(p - q)) <= cfg.dedup_radius for q in seen):
            return False
        seen.append(p)
        found.append(np.abs(y))
        out.append(pt)
        return True

    budget = cfg.attempts_per_point * count
    for attempt in range(budget):
        if len(out) >= count:
            break
        if found and attempt % 2:
            # walk along the positive part: perturb a known point multiplicatively
            base = found[int(rng.integers(len(found)))]
            anchor = base * np.exp(rng.normal(0.0, 0.5, size=base.shape))
        elif attempt % 4 >= 2:
            # every other fresh anchor on odds, so ratios above 1 are explored
            anchor = _torus_starts(rng, 1, prob.unknowns, cfg.start_box)[0]
        else:
            anchor = rng.uniform(lo, hi, size=prob.unknowns)
        hit = False
        for y in _sample_slices(prob, cfg, rng, anchor=anchor):
            hit |= accept(y)
            if len(out) >= count:
                break
        if not hit and len(out) < count:
            # slices missed the positive part: project the anchor onto the set instead
            y = _project(prob.F, anchor, cfg)
            if y is not None:
                accept(y)
    return out


def _project(F: CompiledSystem, y0: np.ndarray, cfg: SolveConfig) -> np.ndarray | None:
    """Nearby zero of an underdetermined system by damped minimum-norm Newton steps."""
    y = np.array(y0, dtype=float)
    r = F.evaluate(y)[0]
    for _ in range(cfg.max_iter):
        if np.abs(r).max() < cfg.tol * 1e-3:
            break
        step = np.linalg.lstsq(F.jacobian(y)[0], -r, rcond=None)[0]
        t = 1.0
        while t > 1e-4:
            yn = y + t * step
            rn = F.evaluate(yn)[0]
            if np.linalg.norm(rn) < np.linalg.norm(r):
                break
            t *= 0.5
        else:
            return None
        y, r = yn, rn
    return y if np.isfinite(y).all() and np.abs(r).max() < cfg.tol else None


@dataclass(frozen=True)
class ProbeReport:
    dimension: int
    kind: str
    local_dimensions: tuple[int, ...]
    singular_values: tuple[tuple[float, ...], ...]
    ranks: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "point_kind": self.kind,
            "local_dimensions": list(self.local_dimensions),
            "ranks": list(self.ranks),
            "singular_values": [[float(s) for s in sv] for sv in self.singular_values],
        }


def _probe_points(prob: _Problem, cfg: SolveConfig, g: Graph, game: Game, markov: str) -> tuple[list[np.ndarray], str]:
    want = cfg.probe_points
    pts = [np.array(pt.probabilities) for pt in sample_ci_equilibria(g, game, want, cfg, markov)]
    if pts:
        return pts, "positive"
    for kind, tag, complex_ in (("real", _TAG_PROBE_REAL, False), ("complex", _TAG_PROBE_COMPLEX, True)):
        rng = _seeded(cfg, tag)
        found: list[np.ndarray] = []
        for _ in range(cfg.attempts_per_point * want):
            if len(found) >= want:
                break
            for y in _sample_slices(prob, cfg, rng, complex_=complex_):
                if np.min(np.abs(y)) < 1e-6:
                    continue
                p = prob.pm.p_values(prob.torus_point(y))
                p = p / p.sum() if abs(p.sum()) > 1e-12 else p / np.abs(p).max()
                if not _off_hyperplanes(p, g.n):
                    continue
                q, mi = prob.residuals(p)
                if max(q, mi) > 1e-8:
                    continue
                found.append(p)
                if len(found) >= want:
                    break
        if found:
            return found, kind
    return [], "none"


def _off_hyperplanes(p: np.ndarray, n: int) -> bool:
    if np.min(np.abs(p)) < 1e-10 * np.abs(p).max():
        return False
    shaped = p.reshape((2,) * n)
    for i in range(n):
        marg = np.moveaxis(shaped, i, 0).reshape(2, -1).sum(axis=1)
        if np.min(np.abs(marg)) < 1e-10:
            return False
    return True


def _torus_probe_points(prob: _Problem, cfg: SolveConfig, g: Graph, game: Game, markov: str) -> tuple[list[np.ndarray], str]:
    """Solutions in dehomogenized torus coordinates, preferring positive ones."""
    want = cfg.probe_points
    pts = [np.array(pt.torus)[prob.free] for pt in sample_ci_equilibria(g, game, want, cfg, markov)]
    if pts:
        return pts, "positive"
    for kind, tag, complex_ in (("real", _TAG_PROBE_REAL, False), ("complex", _TAG_PROBE_COMPLEX, True)):
        rng = _seeded(cfg, tag)
        found: list[np.ndarray] = []
        for _ in range(cfg.attempts_per_point * want):
            if len(found) >= want:
                break
            for y in _sample_slices(prob, cfg, rng, complex_=complex_):
                if y.size and np.min(np.abs(y)) < 1e-6:
                    continue
                found.append(y)
                if len(found) >= want:
                    break
        if found:
            return found, kind
    return [], "none"


def _rank(J: np.ndarray, threshold: float) -> tuple[int, np.ndarray]:
    if J.size == 0:
        return 0, np.zeros(0)
    sv = np.linalg.svd(J, compute_uv=False)
    r = int((sv > threshold * sv[0]).sum()) if sv[0] > 0 else 0
    return r, sv


def dimension_probe_report(g: Graph, game: Game, cfg: SolveConfig, markov: str = "auto",
                           space: str = "ambient") -> ProbeReport:
    """Local dimension of the Spohn CI set at sampled points, reported as the modal value.

    ``space="ambient"`` ranks the Jacobian of model quadrics and Spohn minors in
    projective p-coordinates; ``space="torus"`` ranks the Jacobian of the
    dehomogenized F_i in torus coordinates, which also sees solution sets lying
    on a vanishing marginal.
    """
    if space not in ("ambient", "torus"):
        raise ValueError(f"unknown probe space {space!r}")
    prob = _problem(g, game, markov)
    if space == "torus":
        pts, kind = _torus_probe_points(prob, cfg, g, game, markov)
        ambient = prob.unknowns
    else:
        pts, kind = _probe_points(prob, cfg, g, game, markov)
        ambient = (1 << g.n) - 1
    if not pts:
        raise RuntimeError("no equilibrium points could be sampled for the dimension probe")
    dims, svs, ranks = [], [], []
    for x in pts:
        system = prob.F if space == "torus" else prob.validators
        if system is None:
            r, sv = 0, np.zeros(0)
        else:
            r, sv = _rank(system.jacobian(x)[0], cfg.rank_threshold)
        ranks.append(r)
        dims.append(ambient - r)
        svs.append(tuple(float(s) for s in sv))
    counts = Counter(dims)
    top = max(counts.values())
    mode = min(d for d, c in counts.items() if c == top)
    return ProbeReport(mode, kind, tuple(dims), tuple(svs), tuple(ranks))


def dimension_probe(g: Graph, game: Game, cfg: SolveConfig, markov: str = "auto", space: str = "ambient") -> int:
    return dimension_probe_report(g, game, cfg, markov, space).dimension


def payoff_region_sample(g: Graph, game: Game, count: int, cfg: SolveConfig) -> list[list[float]]:
    pts = sample_ci_equilibria(g, game, count, cfg)
    return [[float(v) for v in payoff_map(game, list(pt.probabilities))] for pt in pts]


def pareto_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    if len(a) != len(b):
        raise ValueError("payoff vectors differ in length")
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def with_seed(cfg: SolveConfig, seed: int) -> SolveConfig:
    return replace(cfg, seed=seed)
