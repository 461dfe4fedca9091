"""Hot loops for evaluating polynomial systems and running damped Newton.

Two interchangeable backends:

* numba ``@njit`` kernels (default), parallel over starting points;
* a vectorized numpy fallback, selected with ``SPOHN_LAB_DISABLE_JIT=1`` or
  when numba is not importable.

Systems arrive as flat term arrays (see ``numeric.CompiledSystem``):
``ptr`` delimits the terms of each output, ``coef`` holds the coefficients and
``fptr``/``fvar``/``fpow`` list the variable powers of each term.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

JIT_DISABLED = os.environ.get("SPOHN_LAB_DISABLE_JIT", "") not in ("", "0")
USE_NUMBA = HAVE_NUMBA and not JIT_DISABLED

if HAVE_NUMBA:
    # prefer OpenMP: the bundled TBB is often too old and numba warns on every run
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]
    _threads = os.environ.get("SPOHN_LAB_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# numpy backend

_CHUNK_ELEMS = 1 << 22  # bound on points x terms held in memory at once


def _segment_eval_np(X, E, ptr, coef):
    """Sum the terms ``ptr[k]:ptr[k+1]`` of each output at every row of X."""
    S, T = X.shape[0], E.shape[0]
    out = np.zeros((S, len(ptr) - 1), dtype=X.dtype)
    if T == 0:
        return out
    used = [(v, np.nonzero(E[:, v])[0]) for v in range(E.shape[1])]
    used = [(v, idx, E[idx, v]) for v, idx in used if idx.size]
    starts = ptr[:-1]
    nonempty = ptr[1:] > starts
    step = max(1, _CHUNK_ELEMS // T)
    for a in range(0, S, step):
        Xc = X[a:a + step]
        mono = np.broadcast_to(coef.astype(X.dtype), (Xc.shape[0], T)).copy()
        for v, idx, pw in used:
            mono[:, idx] *= Xc[:, v, None] ** pw
        out[a:a + step, nonempty] = np.add.reduceat(mono, starts[nonempty], axis=1)
    return out


def evaluate_numpy(X, dense):
    E, ptr, coef, _, _, _, _ = dense
    return _segment_eval_np(X, E, ptr, coef)


def jacobian_numpy(X, dense, m, n):
    _, _, _, EJ, jptr, jcoef, jflat = dense
    J = np.zeros((X.shape[0], m * n), dtype=X.dtype)
    J[:, jflat] = _segment_eval_np(X, EJ, jptr, jcoef)
    return J.reshape(X.shape[0], m, n)


def _solve_batch_np(J, F):
    try:
        return np.linalg.solve(J, -F[..., None])[..., 0], np.ones(J.shape[0], dtype=bool)
    except np.linalg.LinAlgError:
        out = np.zeros_like(F)
        ok = np.ones(J.shape[0], dtype=bool)
        for s in range(J.shape[0]):
            try:
                out[s] = np.linalg.solve(J[s], -F[s])
            except np.linalg.LinAlgError:
                ok[s] = False
        return out, ok


def newton_numpy(X0, dense, m, n, tol, max_iter, max_halvings=12, blowup=1e8):
    X = X0.copy()
    S = X.shape[0]
    F = evaluate_numpy(X, dense)
    res = np.abs(F).max(axis=1) if m else np.zeros(S)
    status = np.where(res < tol, 1, 0).astype(np.int64)  # 0 running, 1 converged, 2 failed
    iters = np.zeros(S, dtype=np.int64)
    for _ in range(max_iter):
        act = np.nonzero(status == 0)[0]
        if act.size == 0:
            break
        Xa = X[act]
        Fa = F[act]
        J = jacobian_numpy(Xa, dense, m, n)
        step, ok = _solve_batch_np(J, Fa)
        norm0 = np.sqrt((np.abs(Fa) ** 2).sum(axis=1))
        t = np.ones(act.size)
        Xn = Xa + step
        Fn = evaluate_numpy(Xn, dense)
        normn = np.sqrt((np.abs(Fn) ** 2).sum(axis=1))
        for _h in range(max_halvings):
            bad = ~(normn < norm0) & ok
            if not bad.any():
                break
            t[bad] *= 0.5
            Xn[bad] = Xa[bad] + t[bad, None] * step[bad]
            Fn[bad] = evaluate_numpy(Xn[bad], dense)
            normn[bad] = np.sqrt((np.abs(Fn[bad]) ** 2).sum(axis=1))
        X[act] = np.where(ok[:, None], Xn, Xa)
        F[act] = np.where(ok[:, None], Fn, Fa)
        iters[act] += 1
        r = np.abs(F[act]).max(axis=1)
        big = ~np.isfinite(X[act]).all(axis=1) | (np.abs(X[act]).max(axis=1) > blowup)
        new = np.where(~ok | big, 2, np.where(r < tol, 1, 0))
        status[act] = new
    res = np.abs(F).max(axis=1) if m else np.zeros(S)
    return X, status == 1, res, iters


# ---------------------------------------------------------------------------
# numba backend

if HAVE_NUMBA:

    @njit(cache=True)
    def _eval_one(x, ptr, coef, fptr, fvar, fpow, out):
        m = ptr.shape[0] - 1
        for r in range(m):
            acc = out[r] * 0
            for t in range(ptr[r], ptr[r + 1]):
                v = x[0] * 0 + coef[t]
                for f in range(fptr[t], fptr[t + 1]):
                    base = x[fvar[f]]
                    p = fpow[f]
                    w = base
                    for _ in range(p - 1):
                        w = w * base
                    v = v * w
                acc += v
            out[r] = acc

    @njit(cache=True)
    def _jac_one(x, jrow, jcol, jptr, coef, fptr, fvar, fpow, out):
        for a in range(out.shape[0]):
            for b in range(out.shape[1]):
                out[a, b] = 0
        for e in range(jrow.shape[0]):
            acc = x[0] * 0
            for t in range(jptr[e], jptr[e + 1]):
                v = x[0] * 0 + coef[t]
                for f in range(fptr[t], fptr[t + 1]):
                    base = x[fvar[f]]
                    p = fpow[f]
                    w = base
                    for _ in range(p - 1):
                        w = w * base
                    v = v * w
                acc += v
            out[jrow[e], jcol[e]] = acc

    @njit(cache=True)
    def _lu_solve(A, b):
        """Gaussian elimination with partial pivoting; returns (x, ok)."""
        n = A.shape[0]
        M = A.copy()
        y = b.copy()
        scale = 0.0
        for i in range(n):
            for j in range(n):
                a = abs(M[i, j])
                if a > scale:
                    scale = a
        if scale == 0.0:
            return y, False
        for k in range(n):
            piv = k
            best = abs(M[k, k])
            for i in range(k + 1, n):
                a = abs(M[i, k])
                if a > best:
                    best = a
                    piv = i
            if best <= 1e-14 * scale:
                return y, False
            if piv != k:
                for j in range(n):
                    tmp = M[k, j]
                    M[k, j] = M[piv, j]
                    M[piv, j] = tmp
                tmp2 = y[k]
                y[k] = y[piv]
                y[piv] = tmp2
            for i in range(k + 1, n):
                f = M[i, k] / M[k, k]
                if f != 0:
                    for j in range(k, n):
                        M[i, j] -= f * M[k, j]
                    y[i] -= f * y[k]
        for k in range(n - 1, -1, -1):
            acc = y[k]
            for j in range(k + 1, n):
                acc -= M[k, j] * y[j]
            y[k] = acc / M[k, k]
        return y, True

    @njit(cache=True)
    def _norm2(v):
        s = 0.0
        for i in range(v.shape[0]):
            s += abs(v[i]) ** 2
        return np.sqrt(s)

    @njit(cache=True)
    def _maxabs(v):
        s = 0.0
        for i in range(v.shape[0]):
            a = abs(v[i])
            if a > s:
                s = a
        return s

    @njit(parallel=True, cache=True)
    def evaluate_batch_nb(X, ptr, coef, fptr, fvar, fpow):
        S = X.shape[0]
        m = ptr.shape[0] - 1
        out = np.zeros((S, m), dtype=X.dtype)
        for s in prange(S):
            _eval_one(X[s], ptr, coef, fptr, fvar, fpow, out[s])
        return out

    @njit(parallel=True, cache=True)
    def jacobian_batch_nb(X, m, jrow, jcol, jptr, coef, fptr, fvar, fpow):
        S = X.shape[0]
        n = X.shape[1]
        out = np.zeros((S, m, n), dtype=X.dtype)
        for s in prange(S):
            _jac_one(X[s], jrow, jcol, jptr, coef, fptr, fvar, fpow, out[s])
        return out

    @njit(parallel=True, cache=True)
    def newton_batch_nb(X0, tol, max_iter, max_halvings, blowup,
                        ptr, coef, fptr, fvar, fpow,
                        jrow, jcol, jptr, jcoef, jfptr, jfvar, jfpow):
        S = X0.shape[0]
        n = X0.shape[1]
        m = ptr.shape[0] - 1
        X = X0.copy()
        conv = np.zeros(S, dtype=np.bool_)
        res = np.zeros(S)
        iters = np.zeros(S, dtype=np.int64)
        for s in prange(S):
            x = X[s].copy()
            F = np.zeros(m, dtype=X.dtype)
            Fn = np.zeros(m, dtype=X.dtype)
            J = np.zeros((m, n), dtype=X.dtype)
            _eval_one(x, ptr, coef, fptr, fvar, fpow, F)
            r = _maxabs(F)
            it = 0
            ok = True
            while r >= tol and it < max_iter:
                _jac_one(x, jrow, jcol, jptr, jcoef, jfptr, jfvar, jfpow, J)
                step, solved = _lu_solve(J, -F)
                if not solved:
                    ok = False
                    break
                norm0 = _norm2(F)
                t = 1.0
                xn = x + step
                _eval_one(xn, ptr, coef, fptr, fvar, fpow, Fn)
                h = 0
                while not (_norm2(Fn) < norm0) and h < max_halvings:
                    t *= 0.5
                    xn = x + t * step
                    _eval_one(xn, ptr, coef, fptr, fvar, fpow, Fn)
                    h += 1
                x = xn
                for i in range(m):
                    F[i] = Fn[i]
                it += 1
                r = _maxabs(F)
                if not np.isfinite(r) or _maxabs(x) > blowup:
                    ok = False
                    break
            X[s] = x
            res[s] = r
            iters[s] = it
            conv[s] = ok and r < tol
        return X, conv, res, iters


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
