"""Exact integer linear algebra.

Dense matrices are numpy ``object`` arrays holding Python integers, so no
entry can overflow.  Boundary matrices of the larger complexes are stored as
``scipy.sparse`` int64 matrices and reduced by exact unit-pivot elimination
before any dense work happens.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels


def as_int_matrix(a, shape=None) -> np.ndarray:
    """Coerce to a 2-d object array of Python ints."""
    if sp.issparse(a):
        a = a.toarray()
    arr = np.array(a, dtype=object)
    if shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {arr.shape}")
    return np.vectorize(int, otypes=[object])(arr) if arr.size else arr


def identity(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=object)
    for i in range(n):
        m[i, i] = 1
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=object)
    return a.dot(b)


@dataclass(frozen=True)
class SNF:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and inverses kept."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    Uinv: np.ndarray
    Vinv: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.D.shape)
        return [int(self.D[i, i]) for i in range(k) if self.D[i, i] != 0]

    def __iter__(self):
        return iter((self.U, self.D, self.V))


def smith_normal_form(m) -> SNF:
    """Smith normal form by smallest-pivot elimination.

    The pivot is the nonzero entry of least absolute value in the trailing
    block, ties broken by (row, column).  Row operations are accumulated in
    ``U`` (and its inverse), column operations in ``V``.
    """
    D = as_int_matrix(m).copy()
    rows, cols = D.shape
    U, Uinv = identity(rows), identity(rows)
    V, Vinv = identity(cols), identity(cols)

    def swap_rows(i, j):
        if i != j:
            D[[i, j]] = D[[j, i]]
            U[[i, j]] = U[[j, i]]
            Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def swap_cols(i, j):
        if i != j:
            D[:, [i, j]] = D[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]
            Vinv[[i, j]] = Vinv[[j, i]]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] = D[dst] + q * D[src]
        U[dst] = U[dst] + q * U[src]
        Uinv[:, src] = Uinv[:, src] - q * Uinv[:, dst]

    def add_col(dst, src, q):
        D[:, dst] = D[:, dst] + q * D[:, src]
        V[:, dst] = V[:, dst] + q * V[:, src]
        Vinv[src] = Vinv[src] - q * Vinv[dst]

    t = 0
    while t < rows and t < cols:
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = D[i, j]
                if v != 0 and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, bi, bj = best
        while True:
            swap_rows(t, bi)
            swap_cols(t, bj)
            p = D[t, t]
            for i in range(t + 1, rows):
                if D[i, t] != 0:
                    add_row(i, t, -(D[i, t] // p))
            for j in range(t + 1, cols):
                if D[t, j] != 0:
                    add_col(j, t, -(D[t, j] // p))
            cand = [(abs(D[i, t]), i, t) for i in range(t + 1, rows) if D[i, t] != 0]
            cand += [(abs(D[t, j]), t, j) for j in range(t + 1, cols) if D[t, j] != 0]
            if cand:
                _, bi, bj = min(cand)
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if D[i, j] % p != 0), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
            bi, bj = t, t
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
            Uinv[:, t] = -Uinv[:, t]
        t += 1
    return SNF(U, D, V, Uinv, Vinv)


def determinant(m) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [list(map(int, row)) for row in as_int_matrix(m)]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def dense_invariant_factors(m) -> list[int]:
    """Nonzero invariant factors of a dense matrix.

    Tries the int64 kernel first and redoes the computation with Python
    integers if it reports an overflow.
    """
    arr = as_int_matrix(m)
    if arr.size == 0:
        return []
    if max(abs(x) for x in arr.flat) <= kernels._LIMIT:
        ok, diag = kernels.snf_diagonal_int64(arr.astype(np.int64))
        if ok:
            return [int(x) for x in diag]
    return smith_normal_form(arr).diagonal


# ---------------------------------------------------------------------------
# sparse unit-pivot elimination

class _Eliminator:
    """Column-oriented sparse reduction with unit pivots.

    Each step picks an entry equal to +-1, clears its row by column
    operations and deletes the pivot row and column.  The Smith invariants of
    the original matrix are those of the residual plus one unit per pivot,
    and the kernel is carried along when ``track`` is set.
    """

    def __init__(self, mat, track: bool = False):
        mat = sp.csc_matrix(mat)
        self.shape = mat.shape
        self.cols: dict[int, dict[int, int]] = {}
        self.rows: dict[int, set[int]] = {}
        indptr, indices, data = mat.indptr, mat.indices, mat.data
        for j in range(mat.shape[1]):
            col = {}
            for k in range(indptr[j], indptr[j + 1]):
                v = int(data[k])
                if v:
                    i = int(indices[k])
                    col[i] = v
                    self.rows.setdefault(i, set()).add(j)
            self.cols[j] = col
        self.track = track
        # V restricted to columns still alive: V[:, j] = e_j + sum over pivots
        self.V: dict[int, dict[int, int]] = {j: {j: 1} for j in self.cols} if track else {}
        self.pivots = 0

    def run(self):
        heap = [(len(r), i) for i, r in self.rows.items()]
        heapq.heapify(heap)
        while heap:
            nnz, r = heapq.heappop(heap)
            row = self.rows.get(r)
            if row is None or len(row) != nnz:
                continue
            if nnz == 0:
                del self.rows[r]
                continue
            best = None
            for j in row:
                v = self.cols[j][r]
                if v == 1 or v == -1:
                    key = (len(self.cols[j]), j)
                    if best is None or key < best:
                        best = key
            if best is None:
                continue
            touched = self._pivot(r, best[1])
            for i in touched:
                row_i = self.rows.get(i)
                if row_i is not None:
                    heapq.heappush(heap, (len(row_i), i))
        return self

    def _pivot(self, r: int, c: int) -> set[int]:
        cols, rows = self.cols, self.rows
        pcol = cols[c]
        u = pcol[r]
        touched: set[int] = set()
        for j in sorted(rows[r]):
            if j == c:
                continue
            col = cols[j]
            t = col[r] * u
            for i, v in pcol.items():
                nv = col.get(i, 0) - t * v
                if nv:
                    if i not in col:
                        rows[i].add(j)
                    col[i] = nv
                else:
                    col.pop(i, None)
                    rows[i].discard(j)
                touched.add(i)
            if self.track:
                vj = self.V[j]
                for i, v in self.V[c].items():
                    nv = vj.get(i, 0) - t * v
                    if nv:
                        vj[i] = nv
                    else:
                        vj.pop(i, None)
        for i in pcol:
            rows[i].discard(c)
        del cols[c]
        del rows[r]
        if self.track:
            del self.V[c]
        touched.discard(r)
        self.pivots += 1
        return touched

    def residual(self):
        """Dense residual block with its surviving row and column labels."""
        live_cols = sorted(self.cols)
        live_rows = sorted(i for i, r in self.rows.items() if r)
        ridx = {i: k for k, i in enumerate(live_rows)}
        dense = np.zeros((len(live_rows), len(live_cols)), dtype=object)
        for k, j in enumerate(live_cols):
            for i, v in self.cols[j].items():
                dense[ridx[i], k] = v
        return live_rows, live_cols, dense


def invariant_factors(mat) -> list[int]:
    """Nonzero invariant factors of an integer matrix (sparse or dense)."""
    if not sp.issparse(mat):
        mat = sp.csc_matrix(np.asarray(mat, dtype=np.int64))
    if mat.shape[0] == 0 or mat.shape[1] == 0 or mat.nnz == 0:
        return []
    el = _Eliminator(mat).run()
    _, _, dense = el.residual()
    rest = dense_invariant_factors(dense) if dense.size else []
    return [1] * el.pivots + sorted(rest)


def rank(mat) -> int:
    return len(invariant_factors(mat))


@dataclass(frozen=True)
class IntegerKernel:
    """A Z-basis of ker(M) with exact coordinates for kernel elements.

    ``basis`` is an (n x k) sparse matrix.  ``coordinates(v)`` recovers the
    unique integer vector ``z`` with ``basis @ z == v`` for ``v`` in the
    kernel, reading ``v`` on the surviving columns and undoing the residual
    Smith transform.
    """

    n: int
    basis: sp.csc_matrix
    surviving: np.ndarray          # column labels alive after elimination
    residual_inv: np.ndarray       # rows of Vinv of the residual SNF kept for the kernel

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def coordinates(self, v) -> np.ndarray:
        v = np.asarray(v.toarray() if sp.issparse(v) else v, dtype=object)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        local = v[self.surviving, :]
        if self.residual_inv is None:
            return local
        return matmul(self.residual_inv, local)


def integer_kernel(mat) -> IntegerKernel:
    """Z-basis of the kernel of an integer matrix."""
    if not sp.issparse(mat):
        mat = sp.csc_matrix(np.asarray(as_int_matrix(mat), dtype=np.int64))
    n = mat.shape[1]
    el = _Eliminator(mat, track=True).run()
    live_rows, live_cols, dense = el.residual()
    live_cols = np.array(live_cols, dtype=np.int64)
    if dense.shape[0] == 0:
        # every surviving column is already zero
        vecs = [el.V[j] for j in live_cols]
        basis = _columns_to_csc(vecs, n)
        return IntegerKernel(n, basis, live_cols, None)
    snf = smith_normal_form(dense)
    r = len(snf.diagonal)
    keep = list(range(r, dense.shape[1]))
    # kernel of residual: columns of V with zero diagonal
    Vk = snf.V[:, keep]
    vecs = []
    for t in range(Vk.shape[1]):
        acc: dict[int, int] = {}
        for k in range(Vk.shape[0]):
            coef = Vk[k, t]
            if coef:
                for i, v in el.V[int(live_cols[k])].items():
                    nv = acc.get(i, 0) + coef * v
                    if nv:
                        acc[i] = nv
                    else:
                        acc.pop(i, None)
        vecs.append(acc)
    basis = _columns_to_csc(vecs, n)
    return IntegerKernel(n, basis, live_cols, snf.Vinv[keep, :])


def _columns_to_csc(vecs, n) -> sp.csc_matrix:
    indptr = [0]
    indices, data = [], []
    for vec in vecs:
        for i in sorted(vec):
            indices.append(i)
            data.append(vec[i])
        indptr.append(len(indices))
    return sp.csc_matrix((np.array(data, dtype=np.int64), np.array(indices, dtype=np.int64),
                          np.array(indptr, dtype=np.int64)), shape=(n, len(vecs)))
