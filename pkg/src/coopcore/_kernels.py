"""Numeric inner loops.

Each kernel has a numba version and a pure-numpy version with identical
results.  The numba path is used when numba imports cleanly and the
environment variable ``COOPCORE_DISABLE_NUMBA`` is unset (or "0").

All arithmetic is integer: cycle means come back as exact (num, den) pairs.
"""

import os

import numpy as np

INF = np.int64(2**62)

_disabled = os.environ.get("COOPCORE_DISABLE_NUMBA", "0") not in ("", "0")

try:
    if _disabled:
        raise ImportError("numba disabled by COOPCORE_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# -- Karp minimum mean cycle ------------------------------------------------


def karp_min_mean_np(n, root, src, dst, w):
    """Minimum cycle mean over cycles reachable from ``root``.

    ``src``, ``dst``, ``w`` are int64 edge arrays over nodes ``0..n-1``.
    Every node is assumed reachable from ``root``.  Returns ``(num, den)``
    with ``den > 0``; ``den == 0`` means no cycle exists.
    """
    table = np.full((n + 1, n), INF, dtype=np.int64)
    table[0, root] = 0
    for k in range(1, n + 1):
        prev = table[k - 1, src]
        live = prev < INF
        row = table[k]
        np.minimum.at(row, dst[live], prev[live] + w[live])
    best_num, best_den = 0, 0
    for v in range(n):
        dn = table[n, v]
        if dn >= INF:
            continue
        worst_num, worst_den = 0, 0
        for k in range(n):
            dk = table[k, v]
            if dk >= INF:
                continue
            num, den = int(dn - dk), n - k
            if worst_den == 0 or num * worst_den > worst_num * den:
                worst_num, worst_den = num, den
        if worst_den and (best_den == 0 or worst_num * best_den < best_num * worst_den):
            best_num, best_den = worst_num, worst_den
    return best_num, best_den


def _karp_min_mean_loop(n, root, src, dst, w):
    table = np.full((n + 1, n), INF, dtype=np.int64)
    table[0, root] = 0
    m = src.shape[0]
    for k in range(1, n + 1):
        for e in range(m):
            d = table[k - 1, src[e]]
            if d < INF:
                cand = d + w[e]
                if cand < table[k, dst[e]]:
                    table[k, dst[e]] = cand
    best_num = np.int64(0)
    best_den = np.int64(0)
    for v in range(n):
        dn = table[n, v]
        if dn >= INF:
            continue
        worst_num = np.int64(0)
        worst_den = np.int64(0)
        for k in range(n):
            dk = table[k, v]
            if dk >= INF:
                continue
            num = dn - dk
            den = np.int64(n - k)
            if worst_den == 0 or num * worst_den > worst_num * den:
                worst_num = num
                worst_den = den
        if worst_den != 0 and (best_den == 0 or worst_num * best_den < best_num * worst_den):
            best_num = worst_num
            best_den = worst_den
    return best_num, best_den


# -- Until on a lasso ---------------------------------------------------------


def until_on_lasso_np(left, right, stem_len):
    """Positions of a lasso word satisfying ``left U right``.

    Positions ``0..N-1``; position ``N-1`` wraps to ``stem_len``.  The loop
    part is solved with two backward passes: the first assumes the value at
    loop entry is false, the second re-runs with the value the first pass
    produced there.  Then the stem is a single backward pass.
    """
    n = left.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    entry = False
    for _ in range(2):
        nxt = entry
        for i in range(n - 1, stem_len - 1, -1):
            nxt = bool(right[i]) or (bool(left[i]) and nxt)
            out[i] = nxt
        entry = bool(out[stem_len])
    nxt = bool(out[stem_len])
    for i in range(stem_len - 1, -1, -1):
        nxt = bool(right[i]) or (bool(left[i]) and nxt)
        out[i] = nxt
    return out


def _until_on_lasso_loop(left, right, stem_len):
    n = left.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    entry = False
    for _ in range(2):
        nxt = entry
        for i in range(n - 1, stem_len - 1, -1):
            nxt = right[i] or (left[i] and nxt)
            out[i] = nxt
        entry = out[stem_len]
    nxt = out[stem_len]
    for i in range(stem_len - 1, -1, -1):
        nxt = right[i] or (left[i] and nxt)
        out[i] = nxt
    return out


if HAVE_NUMBA:
    karp_min_mean_nb = njit(cache=True, nogil=True)(_karp_min_mean_loop)
    until_on_lasso_nb = njit(cache=True, nogil=True)(_until_on_lasso_loop)
    karp_min_mean = karp_min_mean_nb
    until_on_lasso = until_on_lasso_nb
else:
    karp_min_mean_nb = None
    until_on_lasso_nb = None
    karp_min_mean = karp_min_mean_np
    until_on_lasso = until_on_lasso_np
