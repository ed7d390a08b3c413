"""Free simplicial modules A[X]/A[*], Moore and normalized chains."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .abgroup import AbGroup, Z
from .complexes import ComplexError, SimplicialMap, SimplicialSet
from .homalg import (ChainComplex, ChainComplexError, ChainMap, _csc, homology,
                     normalized_set_chains, zero_matrix)
from .linalg import IntegerKernel, integer_kernel


@dataclass(frozen=True, eq=False)
class SimplicialModule:
    """Levelwise free module on X_k modulo the basepoint's degeneracies.

    Generators at level k are the simplices of X_k other than ``X.base[k]``,
    in index order.  ``coeff`` is the group A the module is tensored with;
    all matrices are integral and A enters only through homology.
    """

    X: SimplicialSet
    coeff: AbGroup = Z

    @cached_property
    def generators(self) -> tuple[np.ndarray, ...]:
        return tuple(np.setdiff1d(np.arange(n), [self.X.base[k]]) for k, n in enumerate(self.X.counts))

    @cached_property
    def _lookup(self) -> tuple[np.ndarray, ...]:
        out = []
        for k, g in enumerate(self.generators):
            arr = np.full(self.X.counts[k], -1, dtype=np.int64)
            arr[g] = np.arange(len(g))
            out.append(arr)
        return tuple(out)

    def rank(self, k: int) -> int:
        return len(self.generators[k])

    def _table_matrix(self, table: np.ndarray, k_src: int, k_dst: int) -> sp.csc_matrix:
        img = self._lookup[k_dst][table[self.generators[k_src]]]
        ok = img >= 0
        cols = np.nonzero(ok)[0]
        return sp.csc_matrix((np.ones(len(cols), dtype=np.int64), (img[ok], cols)),
                             shape=(self.rank(k_dst), self.rank(k_src)))

    def face_matrix(self, k: int, i: int) -> sp.csc_matrix:
        return self._table_matrix(self.X.faces[k][:, i], k, k - 1)

    def degen_matrix(self, k: int, j: int) -> sp.csc_matrix:
        return self._table_matrix(self.X.degens[k][:, j], k, k + 1)

    def validate(self) -> None:
        """Linearized simplicial identities on generators; the basepoint is zero."""
        X = self.X
        for k in range(X.bound + 1):
            if self._lookup[k][X.base[k]] != -1:
                raise ComplexError("basepoint generator survived")
        for k in range(2, X.bound + 1):
            for j in range(k + 1):
                for i in range(j):
                    lhs = self.face_matrix(k - 1, i) @ self.face_matrix(k, j)
                    rhs = self.face_matrix(k - 1, j - 1) @ self.face_matrix(k, i)
                    if (lhs - rhs).count_nonzero():
                        raise ComplexError(f"linearized d_{i} d_{j} identity fails at level {k}")
        for k in range(1, X.bound):
            for j in range(k + 1):
                for i in range(k + 2):
                    lhs = self.face_matrix(k + 1, i) @ self.degen_matrix(k, j)
                    if i < j:
                        rhs = self.degen_matrix(k - 1, j - 1) @ self.face_matrix(k, i)
                    elif i in (j, j + 1):
                        rhs = sp.identity(self.rank(k), dtype=np.int64, format="csc")
                    else:
                        rhs = self.degen_matrix(k - 1, j) @ self.face_matrix(k, i - 1)
                    if (lhs - rhs).count_nonzero():
                        raise ComplexError(f"linearized d_{i} s_{j} identity fails at level {k}")

    @cached_property
    def _moore_cache(self) -> dict:
        return {}

    def moore(self, top: int) -> MooreData:
        if top not in self._moore_cache:
            self._moore_cache[top] = _build_moore(self, top)
        return self._moore_cache[top]


def free_module(X: SimplicialSet, A: AbGroup = Z) -> SimplicialModule:
    """The simplicial model A[X]/A[*] of the infinite symmetric product."""
    S = SimplicialModule(X, A)
    return S


@dataclass(frozen=True, eq=False)
class MooreData:
    chains: ChainComplex
    kernels: tuple[IntegerKernel | None, ...]   # None in degree 0, where N_0 = C_0

    def basis(self, k: int) -> sp.csc_matrix:
        ker = self.kernels[k]
        if ker is None:
            return sp.identity(self.chains.rank(k), dtype=np.int64, format="csc")
        return ker.basis

    def coordinates(self, k: int, v) -> np.ndarray:
        ker = self.kernels[k]
        if ker is None:
            return np.asarray(v.toarray() if sp.issparse(v) else v, dtype=object)
        return ker.coordinates(v)


def _build_moore(S: SimplicialModule, top: int) -> MooreData:
    if top > S.X.bound:
        raise ComplexError(f"simplicial set stored to level {S.X.bound}, need {top}")
    kernels: list[IntegerKernel | None] = [None]
    for k in range(1, top + 1):
        stacked = sp.vstack([S.face_matrix(k, i) for i in range(1, k + 1)], format="csc")
        kernels.append(integer_kernel(stacked))
    ranks = [S.rank(0)] + [kernels[k].rank for k in range(1, top + 1)]
    bds = [zero_matrix(0, ranks[0])]
    for k in range(1, top + 1):
        basis = kernels[k].basis
        img = (S.face_matrix(k, 0) @ basis).toarray()
        if k == 1:
            coords = img
        else:
            coords = kernels[k - 1].coordinates(img) if img.shape[1] else np.zeros((ranks[k - 1], 0))
        bds.append(_csc(np.asarray(coords, dtype=np.int64).reshape(ranks[k - 1], ranks[k])))
    chains = ChainComplex(tuple(ranks), tuple(bds), S.coeff, truncated=True)
    chains.validate()
    return MooreData(chains, tuple(kernels))


def moore_complex(S: SimplicialModule, max_degree: int) -> ChainComplex:
    """N_k = intersection of ker d_1..d_k with differential d_0, through degree
    max_degree + 1 so that homology is determined up to max_degree."""
    return S.moore(max_degree + 1).chains


def normalized_chains(S: SimplicialModule, max_degree: int) -> ChainComplex:
    """C_k / degenerate simplices, free on nondegenerate non-basepoint simplices."""
    if max_degree + 1 > S.X.bound:
        raise ComplexError(f"simplicial set stored to level {S.X.bound}, need {max_degree + 1}")
    return normalized_set_chains(S.X, reduced=True, top=max_degree + 1).with_coeff(S.coeff)


def homotopy_groups(S: SimplicialModule, max_degree: int) -> list[AbGroup]:
    """pi_i of A[X]/A[*] as the homology of its Moore complex."""
    return homology(moore_complex(S, max_degree), S.coeff, max_degree)


@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: SimplicialModule
    target: SimplicialModule
    matrices: tuple[sp.csc_matrix, ...]   # per level, on generators

    def validate(self) -> None:
        b = min(len(self.matrices) - 1, self.source.X.bound, self.target.X.bound)
        for k in range(1, b + 1):
            for i in range(k + 1):
                lhs = self.target.face_matrix(k, i) @ self.matrices[k]
                rhs = self.matrices[k - 1] @ self.source.face_matrix(k, i)
                if (lhs - rhs).count_nonzero():
                    raise ComplexError(f"module map does not commute with d_{i} at level {k}")
        for k in range(b):
            for j in range(k + 1):
                lhs = self.target.degen_matrix(k, j) @ self.matrices[k]
                rhs = self.matrices[k + 1] @ self.source.degen_matrix(k, j)
                if (lhs - rhs).count_nonzero():
                    raise ComplexError(f"module map does not commute with s_{j} at level {k}")

    def compose(self, other: ModuleMap) -> ModuleMap:
        """``other`` after ``self``."""
        b = min(len(self.matrices), len(other.matrices))
        return ModuleMap(self.source, other.target,
                         tuple(_csc(other.matrices[k] @ self.matrices[k]) for k in range(b)))

    def moore_map(self, max_degree: int) -> ChainMap:
        """Restriction to Moore complexes through degree max_degree + 1."""
        top = max_degree + 1
        ms, mt = self.source.moore(top), self.target.moore(top)
        mats = []
        for k in range(top + 1):
            img = (self.matrices[k] @ ms.basis(k)).toarray()
            if img.shape[1] == 0:
                coords = np.zeros((mt.chains.rank(k), 0), dtype=np.int64)
            else:
                coords = mt.coordinates(k, img)
            mats.append(_csc(np.asarray(coords, dtype=np.int64).reshape(mt.chains.rank(k), ms.chains.rank(k))))
        f = ChainMap(ms.chains, mt.chains, tuple(mats))
        f.validate()
        return f

    def normalized_map(self, max_degree: int) -> ChainMap:
        """Induced map on normalized chains (degenerate images are zero)."""
        top = max_degree + 1
        src = normalized_chains(self.source, max_degree)
        tgt = normalized_chains(self.target, max_degree)
        mats = []
        for k in range(top + 1):
            Xs, Xt = self.source.X, self.target.X
            nd_s = np.nonzero(Xs.nondegenerate[k])[0]
            nd_t = np.nonzero(Xt.nondegenerate[k])[0]
            if k == 0:
                nd_s = nd_s[nd_s != Xs.basepoint]
                nd_t = nd_t[nd_t != Xt.basepoint]
            m = self.matrices[k][self.target._lookup[k][nd_t]][:, self.source._lookup[k][nd_s]]
            mats.append(_csc(m))
        f = ChainMap(src, tgt, tuple(mats))
        f.validate()
        return f


def induced_map(f: SimplicialMap, A: AbGroup = Z, source: SimplicialModule | None = None,
                target: SimplicialModule | None = None) -> ModuleMap:
    """A-linear extension of a pointed simplicial map to A[X]/A[*] -> A[Y]/A[*]."""
    try:
        f.validate(pointed=True)
    except ComplexError as exc:
        raise ComplexError(f"not a pointed simplicial map: {exc}") from exc
    S = source if source is not None else free_module(f.source, A)
    T = target if target is not None else free_module(f.target, A)
    b = min(f.source.bound, f.target.bound)
    mats = []
    for k in range(b + 1):
        mats.append(_pushforward(S, T, f.levels[k], k))
    return ModuleMap(S, T, tuple(mats))


def _pushforward(S: SimplicialModule, T: SimplicialModule, table: np.ndarray, k: int) -> sp.csc_matrix:
    img = T._lookup[k][table[S.generators[k]]]
    ok = img >= 0
    cols = np.nonzero(ok)[0]
    return sp.csc_matrix((np.ones(len(cols), dtype=np.int64), (img[ok], cols)),
                         shape=(T.rank(k), S.rank(k)))
