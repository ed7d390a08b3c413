"""Dense integer kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from the ``STP_BACKEND`` environment
variable (``numba`` or ``numpy``).  When unset, numba is used if it imports.
Both paths compute identical results; ``benchmarks/bench_kernels.py``
compares their speed.

The int64 SNF kernel refuses to run past ``_LIMIT`` in absolute value and
reports the overflow, so that callers can fall back to exact Python integers.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_LIMIT = 1 << 31


def _select_backend() -> str:
    want = os.environ.get("STP_BACKEND", "").strip().lower()
    if want not in ("", "numba", "numpy"):
        raise ValueError(f"STP_BACKEND must be 'numba' or 'numpy', got {want!r}")
    if want == "numpy" or numba is None:
        return "numpy"
    return "numba"


BACKEND = _select_backend()


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# rank over F_p

@_njit
def _rank_mod_p_numba(a, p):
    m, n = a.shape
    w = np.empty((m, n), dtype=np.int64)
    for i in range(m):
        for j in range(n):
            w[i, j] = a[i, j] % p
    rank = 0
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for i in range(rank, m):
            if w[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(col, n):
                t = w[piv, j]
                w[piv, j] = w[rank, j]
                w[rank, j] = t
        # inverse by Fermat; p is prime
        inv = 1
        base = w[rank, col]
        e = p - 2
        while e > 0:
            if e & 1:
                inv = (inv * base) % p
            base = (base * base) % p
            e >>= 1
        for j in range(col, n):
            w[rank, j] = (w[rank, j] * inv) % p
        for i in range(rank + 1, m):
            f = w[i, col]
            if f != 0:
                for j in range(col, n):
                    w[i, j] = (w[i, j] - f * w[rank, j]) % p
        rank += 1
    return rank


def _rank_mod_p_numpy(a, p):
    w = np.mod(np.asarray(a, dtype=np.int64), p)
    m, n = w.shape
    rank = 0
    for col in range(n):
        if rank == m:
            break
        nz = np.nonzero(w[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            w[[rank, piv]] = w[[piv, rank]]
        inv = pow(int(w[rank, col]), p - 2, p)
        w[rank, col:] = (w[rank, col:] * inv) % p
        below = w[rank + 1:, col].copy()
        rows = np.nonzero(below)[0] + rank + 1
        if rows.size:
            w[rows, col:] = (w[rows, col:] - np.outer(w[rows, col], w[rank, col:])) % p
        rank += 1
    return rank


def rank_mod_p(a, p: int) -> int:
    """Rank of an integer matrix reduced mod the prime ``p`` (p < 2**31)."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2 or a.size == 0:
        return 0
    if BACKEND == "numba":
        return int(_rank_mod_p_numba(np.ascontiguousarray(a), np.int64(p)))
    return _rank_mod_p_numpy(a, p)


# ---------------------------------------------------------------------------
# Smith normal form, diagonal only, int64 with overflow detection

@_njit
def _snf_diag_numba(a, limit):
    w = a.copy()
    m, n = w.shape
    diag = np.zeros(min(m, n), dtype=np.int64)
    t = 0
    while t < m and t < n:
        # smallest nonzero |entry| in the trailing block, row-major tie-break
        best = 0
        bi = -1
        bj = -1
        for i in range(t, m):
            for j in range(t, n):
                v = abs(w[i, j])
                if v != 0 and (best == 0 or v < best):
                    best = v
                    bi = i
                    bj = j
        if bi < 0:
            break
        while True:
            if bi != t:
                for j in range(t, n):
                    x = w[bi, j]
                    w[bi, j] = w[t, j]
                    w[t, j] = x
            if bj != t:
                for i in range(t, m):
                    x = w[i, bj]
                    w[i, bj] = w[i, t]
                    w[i, t] = x
            p = w[t, t]
            dirty = False
            for i in range(t + 1, m):
                if w[i, t] != 0:
                    q = w[i, t] // p
                    for j in range(t, n):
                        w[i, j] -= q * w[t, j]
                        if abs(w[i, j]) > limit:
                            return False, diag
                    if w[i, t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if w[t, j] != 0:
                    q = w[t, j] // p
                    for i in range(t, m):
                        w[i, j] -= q * w[i, t]
                        if abs(w[i, j]) > limit:
                            return False, diag
                    if w[t, j] != 0:
                        dirty = True
            if dirty:
                best = 0
                bi = t
                bj = t
                for i in range(t, m):
                    v = abs(w[i, t])
                    if v != 0 and (best == 0 or v < best):
                        best = v
                        bi = i
                        bj = t
                for j in range(t, n):
                    v = abs(w[t, j])
                    if v != 0 and v < best:
                        best = v
                        bi = t
                        bj = j
                continue
            # divisibility of the trailing block by the pivot
            bad = -1
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if w[i, j] % p != 0:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            for j in range(t, n):
                w[t, j] += w[bad, j]
                if abs(w[t, j]) > limit:
                    return False, diag
            bi = t
            bj = t
        diag[t] = abs(w[t, t])
        t += 1
    return True, diag[:t]


def _snf_diag_numpy(a, limit):
    w = np.array(a, dtype=np.int64)
    m, n = w.shape
    diag = []
    t = 0
    while t < m and t < n:
        block = np.abs(w[t:, t:])
        nz = np.argwhere(block)
        if nz.size == 0:
            break
        vals = block[nz[:, 0], nz[:, 1]]
        k = int(np.argmin(vals))
        bi, bj = int(nz[k, 0]) + t, int(nz[k, 1]) + t
        while True:
            if bi != t:
                w[[t, bi], t:] = w[[bi, t], t:]
            if bj != t:
                w[t:, [t, bj]] = w[t:, [bj, t]]
            p = w[t, t]
            q = w[t + 1:, t] // p
            w[t + 1:, t:] -= np.outer(q, w[t, t:])
            q = w[t, t + 1:] // p
            w[t:, t + 1:] -= np.outer(w[t:, t], q)
            if np.abs(w[t:, t:]).max(initial=0) > limit:
                return False, np.array(diag, dtype=np.int64)
            col = np.abs(w[t:, t])
            row = np.abs(w[t, t:])
            if col[1:].any() or row[1:].any():
                cand = [(v, t + i, t) for i, v in enumerate(col) if v] + \
                       [(v, t, t + j) for j, v in enumerate(row) if v]
                _, bi, bj = min(cand, key=lambda c: c[0])
                continue
            rest = w[t + 1:, t + 1:] % p
            bad = np.argwhere(rest)
            if bad.size == 0:
                break
            w[t, t:] += w[t + 1 + int(bad[0, 0]), t:]
            bi, bj = t, t
        diag.append(abs(int(w[t, t])))
        t += 1
    return True, np.array(diag, dtype=np.int64)


def snf_diagonal_int64(a):
    """Nonzero invariant factors of ``a`` using int64 arithmetic.

    Returns ``(ok, diag)``; ``ok`` is False when an intermediate entry left
    the safe range, in which case ``diag`` must be ignored.
    """
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2 or a.size == 0:
        return True, np.zeros(0, dtype=np.int64)
    if np.abs(a).max() > _LIMIT:
        return False, np.zeros(0, dtype=np.int64)
    if BACKEND == "numba":
        ok, d = _snf_diag_numba(np.ascontiguousarray(a), np.int64(_LIMIT))
        return bool(ok), d
    return _snf_diag_numpy(a, _LIMIT)
