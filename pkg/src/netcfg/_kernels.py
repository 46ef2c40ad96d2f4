"""Hot loops: hidden-variable enumeration and margin maximisation.

Each kernel has a numba ``@njit`` version and a pure-numpy version.  The
enumeration kernels agree bit for bit (same multiplication and summation
order); the margin kernels agree to a few ulps, because numpy's vectorised
``power`` and numba's scalar ``pow`` may round differently.  Set
``NETCFG_NO_NUMBA=1`` to force the numpy path; it is also used when numba
cannot be imported.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


USE_NUMBA = HAVE_NUMBA and os.environ.get("NETCFG_NO_NUMBA", "") not in ("1", "true", "yes")


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# --- enumeration of source values ----------------------------------------
#
# Layout shared by both paths:
#   sizes   (K,)      alphabet size per source, source 0 most significant
#   probs   (K, Amax) zero-padded probability vectors
#   lstride (n, K)    stride of source k inside party j's response table (0 if not incident)
#   tables  (sum R_j) concatenated flattened response tables
#   offset  (n,)      start of party j's table inside ``tables``
#   ostride (n,)      row-major stride of party j in the output table


@njit(cache=True)
def _enumerate_numba(sizes, probs, lstride, tables, offset, ostride, ncells):
    out = np.zeros(ncells)
    K = sizes.shape[0]
    n = offset.shape[0]
    total = 1
    for k in range(K):
        total *= sizes[k]
    lam = np.zeros(K, dtype=np.int64)
    for _ in range(total):
        w = 1.0
        for k in range(K):
            w = w * probs[k, lam[k]]
        idx = 0
        for j in range(n):
            local = 0
            for k in range(K):
                local += lam[k] * lstride[j, k]
            idx += tables[offset[j] + local] * ostride[j]
        out[idx] += w
        k = K - 1
        while k >= 0:
            lam[k] += 1
            if lam[k] < sizes[k]:
                break
            lam[k] = 0
            k -= 1
    return out


def _enumerate_numpy(sizes, probs, lstride, tables, offset, ostride, ncells):
    K = len(sizes)
    grids = np.indices(tuple(int(s) for s in sizes)).reshape(K, -1) if K else np.zeros((0, 1), np.int64)
    w = np.ones(grids.shape[1])
    for k in range(K):
        w = w * probs[k, grids[k]]
    idx = np.zeros(grids.shape[1], dtype=np.int64)
    for j in range(len(offset)):
        local = lstride[j] @ grids if K else np.zeros(1, dtype=np.int64)
        idx += tables[offset[j] + local] * ostride[j]
    return np.bincount(idx, weights=w, minlength=ncells).astype(np.float64)


def enumerate_joint(sizes, probs, lstride, tables, offset, ostride, ncells, use_numba=None):
    use = USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    fn = _enumerate_numba if use else _enumerate_numpy
    return fn(
        np.ascontiguousarray(sizes, dtype=np.int64),
        np.ascontiguousarray(probs, dtype=np.float64),
        np.ascontiguousarray(lstride, dtype=np.int64).reshape(len(offset), len(sizes)),
        np.ascontiguousarray(tables, dtype=np.int64),
        np.ascontiguousarray(offset, dtype=np.int64),
        np.ascontiguousarray(ostride, dtype=np.int64),
        int(ncells),
    )


# --- margins over an outcome grid -----------------------------------------
#
#   joint   (B, N)        batch of flattened joint tables (row-major)
#   margs   (B, n, Amax)  zero-padded single-party marginals
#   sizes   (n,)          alphabet sizes
#   weights (W, n)        exponent vectors; RHS is the minimum over them
# Returns (B,) best margins and (B,) flat argmax, first occurrence on ties.
# Cells with zero joint probability are skipped when ``support_only``;
# a batch entry with nothing evaluated gets margin -inf and argmax -1.


@njit(cache=True)
def _max_margin_numba(joint, margs, sizes, weights, support_only):
    B, N = joint.shape
    n = sizes.shape[0]
    W = weights.shape[0]
    best = np.full(B, -np.inf)
    arg = np.full(B, -1, dtype=np.int64)
    a = np.zeros(n, dtype=np.int64)
    for b in range(B):
        for j in range(n):
            a[j] = 0
        for i in range(N):
            lhs = joint[b, i]
            if not (support_only and lhs <= 0.0):
                rhs = np.inf
                for w in range(W):
                    r = 1.0
                    for j in range(n):
                        r = r * margs[b, j, a[j]] ** weights[w, j]
                    if r < rhs:
                        rhs = r
                m = lhs - rhs
                if m > best[b]:
                    best[b] = m
                    arg[b] = i
            j = n - 1
            while j >= 0:
                a[j] += 1
                if a[j] < sizes[j]:
                    break
                a[j] = 0
                j -= 1
    return best, arg


def rhs_table(margs_b, sizes, weights):
    """(W, N) right-hand sides for one batch entry, numpy path."""
    sizes = tuple(int(s) for s in sizes)
    grids = np.indices(sizes).reshape(len(sizes), -1)
    out = np.empty((weights.shape[0], grids.shape[1]))
    for w in range(weights.shape[0]):
        r = np.ones(grids.shape[1])
        for j in range(len(sizes)):
            r = r * np.power(margs_b[j, : sizes[j]], weights[w, j])[grids[j]]
        out[w] = r
    return out


def _max_margin_numpy(joint, margs, sizes, weights, support_only):
    B = joint.shape[0]
    best = np.full(B, -np.inf)
    arg = np.full(B, -1, dtype=np.int64)
    for b in range(B):
        margin = joint[b] - rhs_table(margs[b], sizes, weights).min(axis=0)
        if support_only:
            margin = np.where(joint[b] > 0.0, margin, -np.inf)
        i = int(np.argmax(margin))
        if margin[i] > -np.inf:
            best[b], arg[b] = margin[i], i
    return best, arg


def max_margin(joint, margs, sizes, weights, support_only=True, use_numba=None):
    use = USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    fn = _max_margin_numba if use else _max_margin_numpy
    joint = np.ascontiguousarray(joint, dtype=np.float64)
    if joint.ndim == 1:
        joint = joint[None, :]
    margs = np.ascontiguousarray(margs, dtype=np.float64)
    if margs.ndim == 2:
        margs = margs[None, :, :]
    return fn(
        joint,
        margs,
        np.ascontiguousarray(sizes, dtype=np.int64),
        np.ascontiguousarray(np.atleast_2d(weights), dtype=np.float64),
        bool(support_only),
    )


def pad_marginals(marginals) -> np.ndarray:
    amax = max(len(m) for m in marginals)
    out = np.zeros((len(marginals), amax))
    for j, m in enumerate(marginals):
        out[j, : len(m)] = m
    return out
