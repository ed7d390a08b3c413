"""Chain complexes of free abelian groups and their homology."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .abgroup import AbGroup, Z, direct_sum, tensor, tor
from .complexes import SimplicialComplex, SimplicialSet
from .linalg import (IntegerKernel, as_int_matrix, integer_kernel, invariant_factors,
                     matmul, smith_normal_form)


class ChainComplexError(ValueError):
    pass


def _csc(m, shape=None) -> sp.csc_matrix:
    if sp.issparse(m):
        out = sp.csc_matrix(m, dtype=np.int64)
    else:
        arr = np.asarray(m, dtype=np.int64)
        if shape is not None:
            arr = arr.reshape(shape)
        out = sp.csc_matrix(arr)
    out.eliminate_zeros()
    return out


def zero_matrix(rows: int, cols: int) -> sp.csc_matrix:
    return sp.csc_matrix((rows, cols), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """C_0 <- C_1 <- ... <- C_top, each C_k free of rank ``ranks[k]``.

    ``boundaries[k]`` is the matrix of d_k : C_k -> C_{k-1} (shape
    ranks[k-1] x ranks[k]); ``boundaries[0]`` is the empty map out of C_0.
    ``coeff`` is the coefficient group the complex is tensored with.  A
    ``truncated`` complex only knows its chains up to ``top`` and can answer
    homology up to ``top - 1``; an untruncated one is zero above ``top``.
    """

    ranks: tuple[int, ...]
    boundaries: tuple[sp.csc_matrix, ...]
    coeff: AbGroup = Z
    truncated: bool = False

    def __post_init__(self):
        if len(self.boundaries) != len(self.ranks):
            raise ChainComplexError("need one boundary matrix per degree")
        for k, d in enumerate(self.boundaries):
            want = (self.ranks[k - 1] if k else 0, self.ranks[k])
            if d.shape != want:
                raise ChainComplexError(f"boundary {k} has shape {d.shape}, expected {want}")

    @classmethod
    def from_matrices(cls, ranks: Sequence[int], matrices: Sequence, coeff: AbGroup = Z,
                      truncated: bool = False) -> ChainComplex:
        """``matrices[k-1]`` is d_k for k = 1..top (dense or sparse)."""
        ranks = tuple(int(r) for r in ranks)
        bds = [zero_matrix(0, ranks[0] if ranks else 0)]
        for k in range(1, len(ranks)):
            m = matrices[k - 1]
            bds.append(_csc(m, (ranks[k - 1], ranks[k])))
        return cls(ranks, tuple(bds), coeff, truncated)

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, k: int) -> int:
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def boundary(self, k: int) -> sp.csc_matrix:
        """d_k as a sparse matrix, zero outside the stored range."""
        if 1 <= k <= self.top:
            return self.boundaries[k]
        return zero_matrix(self.rank(k - 1), self.rank(k))

    def validate(self) -> None:
        for k in range(2, self.top + 1):
            prod = self.boundaries[k - 1] @ self.boundaries[k]
            if prod.count_nonzero():
                raise ChainComplexError(f"d_{k - 1} d_{k} != 0")

    def with_coeff(self, coeff: AbGroup) -> ChainComplex:
        return ChainComplex(self.ranks, self.boundaries, coeff, self.truncated)

    def truncate(self, top: int) -> ChainComplex:
        top = min(top, self.top)
        return ChainComplex(self.ranks[:top + 1], self.boundaries[:top + 1], self.coeff,
                            self.truncated or top < self.top)

    def max_homology_degree(self) -> int | None:
        """Largest degree whose homology is determined; None if unbounded."""
        return self.top - 1 if self.truncated else None

    @cached_property
    def _factors(self) -> dict[int, list[int]]:
        return {}

    def boundary_factors(self, k: int) -> list[int]:
        """Nonzero invariant factors of d_k (cached)."""
        if k not in self._factors:
            self._factors[k] = invariant_factors(self.boundary(k))
        return self._factors[k]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * r for k, r in enumerate(self.ranks))

    def to_json(self) -> dict:
        return {
            "ranks": list(self.ranks),
            "boundaries": [[int(x) for x in self.boundaries[k].toarray().ravel()]
                           for k in range(1, self.top + 1)],
            "coeff": {"rank": self.coeff.rank, "torsion": list(self.coeff.torsion)},
            "truncated": self.truncated,
        }

    @classmethod
    def from_json(cls, data) -> ChainComplex:
        if isinstance(data, str):
            data = json.loads(data)
        ranks = data["ranks"]
        mats = [np.array(b, dtype=np.int64).reshape(ranks[k], ranks[k + 1])
                for k, b in enumerate(data["boundaries"])]
        c = data.get("coeff", {"rank": 1, "torsion": []})
        cx = cls.from_matrices(ranks, mats, AbGroup.from_cyclic(c["rank"], c["torsion"]),
                               bool(data.get("truncated", False)))
        cx.validate()
        return cx


def direct_sum_complexes(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    top = max(a.top, b.top)
    ranks = [a.rank(k) + b.rank(k) for k in range(top + 1)]
    bds = [zero_matrix(0, ranks[0])]
    for k in range(1, top + 1):
        bds.append(sp.block_diag([a.boundary(k), b.boundary(k)], format="csc", dtype=np.int64)
                   if ranks[k] and ranks[k - 1] else zero_matrix(ranks[k - 1], ranks[k]))
    return ChainComplex(tuple(ranks), tuple(bds), a.coeff, a.truncated or b.truncated)


# ---------------------------------------------------------------------------
# chains of spaces

def reduced_chains(K: SimplicialComplex, top: int | None = None) -> ChainComplex:
    """Reduced simplicial chains: C_0 is spanned by the non-basepoint vertices.

    Simplices are oriented by ascending vertex order.  The complex is exact
    (untruncated) unless ``top`` cuts it below the dimension of K.
    """
    if K.basepoint is None:
        raise ChainComplexError("reduced chains need a pointed complex")
    dim = K.dim
    if top is None:
        top = dim
    gens: list[list[tuple]] = []
    for k in range(top + 1):
        ss = list(K.simplices_of_dim(k))
        if k == 0:
            ss = [s for s in ss if s[0] != K.basepoint]
        gens.append(ss)
    return _simplicial_chain_complex(gens, truncated=top < dim)


def _simplicial_chain_complex(gens, truncated=False) -> ChainComplex:
    index = [{s: i for i, s in enumerate(g)} for g in gens]
    ranks = tuple(len(g) for g in gens)
    bds = [zero_matrix(0, ranks[0])]
    for k in range(1, len(gens)):
        rows, cols, vals = [], [], []
        for j, s in enumerate(gens[k]):
            for i in range(len(s)):
                f = s[:i] + s[i + 1:]
                r = index[k - 1].get(f)
                if r is not None:
                    rows.append(r)
                    cols.append(j)
                    vals.append(-1 if i % 2 else 1)
        bds.append(sp.csc_matrix((np.array(vals, dtype=np.int64), (rows, cols)),
                                 shape=(ranks[k - 1], ranks[k])))
    return ChainComplex(ranks, tuple(bds), Z, truncated)


def unreduced_chains(K: SimplicialComplex, top: int | None = None) -> ChainComplex:
    dim = K.dim
    if top is None:
        top = dim
    gens = [list(K.simplices_of_dim(k)) for k in range(top + 1)]
    return _simplicial_chain_complex(gens, truncated=top < dim)


def normalized_set_chains(X: SimplicialSet, reduced: bool = True, top: int | None = None) -> ChainComplex:
    """Normalized chains of a simplicial set: free on nondegenerate simplices,
    differential the alternating face sum with degenerate faces dropped.

    With ``reduced`` the basepoint vertex is removed from degree 0.
    """
    if top is None:
        top = X.bound
    gens = []
    for k in range(top + 1):
        nd = np.nonzero(X.nondegenerate[k])[0]
        if reduced and k == 0:
            nd = nd[nd != X.basepoint]
        gens.append(nd)
    lookup = []
    for k in range(top + 1):
        arr = np.full(X.counts[k], -1, dtype=np.int64)
        arr[gens[k]] = np.arange(len(gens[k]))
        lookup.append(arr)
    ranks = tuple(len(g) for g in gens)
    bds = [zero_matrix(0, ranks[0])]
    for k in range(1, top + 1):
        fk = X.faces[k][gens[k]]
        rows, cols, vals = [], [], []
        for i in range(k + 1):
            r = lookup[k - 1][fk[:, i]]
            ok = r >= 0
            rows.append(r[ok])
            cols.append(np.nonzero(ok)[0])
            vals.append(np.full(int(ok.sum()), -1 if i % 2 else 1, dtype=np.int64))
        m = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(ranks[k - 1], ranks[k]))
        m.sum_duplicates()
        m.eliminate_zeros()
        bds.append(m)
    return ChainComplex(ranks, tuple(bds), Z, truncated=True)


# ---------------------------------------------------------------------------
# homology

def integral_homology(C: ChainComplex, k: int) -> AbGroup:
    if k < 0:
        return AbGroup()
    out_f = C.boundary_factors(k)
    in_f = C.boundary_factors(k + 1)
    free = C.rank(k) - len(out_f) - len(in_f)
    return AbGroup.from_cyclic(free, [q for q in in_f if q > 1])


def homology(C: ChainComplex, A: AbGroup | None = None, max_degree: int | None = None) -> list[AbGroup]:
    """H_0..H_max_degree of C with coefficients in A.

    Integral homology comes from the Smith invariants of the boundary maps;
    coefficients are applied as (H_i (x) A) + Tor(H_{i-1}, A).
    """
    if A is None:
        A = C.coeff
    limit = C.max_homology_degree()
    if max_degree is None:
        if limit is None:
            max_degree = C.top
        else:
            max_degree = limit
    if max_degree < 0:
        raise ChainComplexError("negative degree requested")
    if limit is not None and max_degree > limit:
        raise ChainComplexError(f"degree {max_degree} out of range; complex is truncated at {C.top}")
    integral = [integral_homology(C, k) for k in range(max_degree + 1)]
    out = []
    for k, h in enumerate(integral):
        g = tensor(h, A)
        if k:
            g = direct_sum(g, tor(integral[k - 1], A))
        out.append(g)
    return out


def homology_mod_p(C: ChainComplex, p: int, max_degree: int | None = None) -> list[int]:
    """dim_{F_p} H_k(C (x) F_p) by direct Gaussian elimination mod p."""
    limit = C.max_homology_degree()
    if max_degree is None:
        max_degree = C.top if limit is None else limit
    ranks = [kernels.rank_mod_p(C.boundary(k).toarray(), p) for k in range(max_degree + 2)]
    return [C.rank(k) - ranks[k] - ranks[k + 1] for k in range(max_degree + 1)]


def rational_betti(C: ChainComplex, max_degree: int | None = None) -> list[int]:
    limit = C.max_homology_degree()
    if max_degree is None:
        max_degree = C.top if limit is None else limit
    r = [len(C.boundary_factors(k)) for k in range(max_degree + 2)]
    return [C.rank(k) - r[k] - r[k + 1] for k in range(max_degree + 1)]


def format_groups(groups: Sequence[AbGroup]) -> str:
    return "(" + ", ".join(str(g) for g in groups) + ")"


# ---------------------------------------------------------------------------
# chain maps

@dataclass(frozen=True, eq=False)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    matrices: tuple[sp.csc_matrix, ...]   # matrices[k]: C_k -> D_k

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(_csc(m) for m in self.matrices))

    def matrix(self, k: int) -> sp.csc_matrix:
        if 0 <= k < len(self.matrices):
            return self.matrices[k]
        return zero_matrix(self.target.rank(k), self.source.rank(k))

    def validate(self) -> None:
        top = min(self.source.top, self.target.top)
        for k in range(top + 1):
            m = self.matrix(k)
            if m.shape != (self.target.rank(k), self.source.rank(k)):
                raise ChainComplexError(f"chain map has wrong shape in degree {k}")
        for k in range(1, top + 1):
            lhs = self.target.boundary(k) @ self.matrix(k)
            rhs = self.matrix(k - 1) @ self.source.boundary(k)
            if (lhs - rhs).count_nonzero():
                raise ChainComplexError(f"not a chain map: fails to commute with d_{k}")

    def compose(self, other: ChainMap) -> ChainMap:
        """``other`` after ``self``."""
        top = min(len(self.matrices), len(other.matrices))
        return ChainMap(self.source, other.target,
                        tuple(_csc(other.matrices[k] @ self.matrices[k]) for k in range(top)))


def identity_chain_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, tuple(sp.identity(r, dtype=np.int64, format="csc") for r in C.ranks))


def mapping_cone(f: ChainMap, top: int | None = None) -> ChainComplex:
    """cone(f)_k = C_{k-1} + D_k with d(c, y) = (-d c, f c + d y)."""
    C, D = f.source, f.target
    if top is None:
        top = min(C.top + 1, D.top)
    ranks = [C.rank(k - 1) + D.rank(k) for k in range(top + 1)]
    bds = [zero_matrix(0, ranks[0])]
    for k in range(1, top + 1):
        blocks = [[-C.boundary(k - 1) if k >= 2 else zero_matrix(C.rank(k - 2), C.rank(k - 1)),
                   zero_matrix(C.rank(k - 2), D.rank(k))],
                  [f.matrix(k - 1), D.boundary(k)]]
        bds.append(_csc(sp.bmat(blocks, format="csc", dtype=np.int64), (ranks[k - 1], ranks[k])))
    cone = ChainComplex(tuple(ranks), tuple(bds), D.coeff, truncated=True)
    return cone


@dataclass(frozen=True)
class QuasiIsoResult:
    is_quasi_iso: bool
    degree: int | None = None
    source_group: AbGroup | None = None
    target_group: AbGroup | None = None

    def __bool__(self) -> bool:
        return self.is_quasi_iso


def is_quasi_iso(f: ChainMap, max_degree: int, A: AbGroup | None = None) -> QuasiIsoResult:
    """Whether f induces isomorphisms H_k(C;A) -> H_k(D;A) for k <= max_degree.

    Cone acyclicity in degrees <= max_degree gives isomorphisms below the top
    degree and a surjection at the top; the top-degree map is then an
    isomorphism exactly when the two groups agree, since a surjection between
    isomorphic finitely generated abelian groups is injective.  The witness is
    the first degree where either test fails.
    """
    f.validate()
    if A is None:
        A = f.target.coeff
    for side in (f.source, f.target):
        if side.truncated and side.top < max_degree + 1:
            raise ChainComplexError(f"complex truncated at {side.top}; need degree {max_degree + 1}")
    hc = homology(f.source.truncate(max_degree + 1), A, max_degree)
    hd = homology(f.target.truncate(max_degree + 1), A, max_degree)
    cone = mapping_cone(f, max_degree + 1)
    hcone = homology(cone, A, max_degree)
    for k in range(max_degree + 1):
        if not hcone[k].is_trivial or hc[k] != hd[k]:
            return QuasiIsoResult(False, k, hc[k], hd[k])
    return QuasiIsoResult(True)


# ---------------------------------------------------------------------------
# explicit homology bases (dense; for small complexes)

@dataclass(frozen=True)
class HomologyBasis:
    """Free part of H_k as explicit cycles.

    ``cycles`` is (rank C_k x r) whose columns represent a basis of H_k/torsion;
    ``project(z)`` returns the coordinates of the class of a cycle z in that
    basis modulo torsion.
    """

    degree: int
    cycles: np.ndarray
    _kernel: IntegerKernel = field(repr=False)
    _U: np.ndarray = field(repr=False)
    _free_rows: tuple[int, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return self.cycles.shape[1]

    def project(self, z) -> np.ndarray:
        coords = self._kernel.coordinates(z)
        return matmul(self._U, coords)[list(self._free_rows), :]


def homology_basis(C: ChainComplex, k: int) -> HomologyBasis:
    Zk = integer_kernel(C.boundary(k))
    B = C.boundary(k + 1)
    bcoords = Zk.coordinates(B.toarray()) if B.shape[1] else np.zeros((Zk.rank, 0), dtype=object)
    snf = smith_normal_form(bcoords) if Zk.rank else None
    if snf is None:
        return HomologyBasis(k, np.zeros((C.rank(k), 0), dtype=object), Zk,
                             np.zeros((0, 0), dtype=object), ())
    r = len(snf.diagonal)
    free = tuple(range(r, Zk.rank))
    gens = matmul(Zk.basis.toarray().astype(object), snf.Uinv[:, list(free)])
    return HomologyBasis(k, gens, Zk, snf.U, free)


def induced_on_homology(f: ChainMap, k: int) -> np.ndarray:
    """Matrix of H_k(f) on free parts, in the bases of :func:`homology_basis`."""
    hs = homology_basis(f.source, k)
    ht = homology_basis(f.target, k)
    if hs.rank == 0 or ht.rank == 0:
        return np.zeros((ht.rank, hs.rank), dtype=object)
    images = as_int_matrix(f.matrix(k).toarray()).dot(hs.cycles)
    return ht.project(images)
