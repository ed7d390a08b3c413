"""Finite simplicial complexes and finitely generated simplicial sets."""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class ComplexError(ValueError):
    """Raised for malformed complexes, simplicial sets and maps."""


Simplex = tuple[int, ...]


def _canon_key(s: Simplex):
    return (len(s), s)


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite abstract simplicial complex, optionally pointed.

    ``simplices`` is downward closed and sorted by (dimension, lexicographic
    vertex tuple).  Vertex indices live in ``range(vertex_count)``; only
    complexes produced by :func:`build_complex` are required to use all of
    them, subcomplexes keep the ambient labels.
    """

    vertex_count: int
    basepoint: int | None
    simplices: tuple[Simplex, ...]

    def __post_init__(self):
        sims = tuple(sorted(set(tuple(s) for s in self.simplices), key=_canon_key))
        object.__setattr__(self, "simplices", sims)

    @cached_property
    def index(self) -> dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.simplices)}

    @cached_property
    def by_dim(self) -> tuple[tuple[Simplex, ...], ...]:
        if not self.simplices:
            return ()
        out: list[list[Simplex]] = [[] for _ in range(len(self.simplices[-1]))]
        for s in self.simplices:
            out[len(s) - 1].append(s)
        return tuple(tuple(x) for x in out)

    @property
    def dim(self) -> int:
        return len(self.by_dim) - 1

    def simplices_of_dim(self, k: int) -> tuple[Simplex, ...]:
        return self.by_dim[k] if 0 <= k < len(self.by_dim) else ()

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.simplices_of_dim(0))

    @cached_property
    def simplex_set(self) -> frozenset[Simplex]:
        return frozenset(self.simplices)

    def __contains__(self, s) -> bool:
        return tuple(s) in self.simplex_set

    def maximal_simplices(self) -> list[Simplex]:
        top = set(self.simplices)
        for s in self.simplices:
            if len(s) > 1:
                for f in itertools.combinations(s, len(s) - 1):
                    top.discard(f)
        return sorted(top, key=_canon_key)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(ss) for k, ss in enumerate(self.by_dim))

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(ss) for ss in self.by_dim)

    def subcomplex(self, simplices: Iterable[Sequence[int]], basepoint="inherit") -> SimplicialComplex:
        """Downward closure of ``simplices`` inside this complex."""
        closed = closure(simplices)
        missing = closed - self.simplex_set
        if missing:
            raise ComplexError(f"not simplices of the ambient complex: {sorted(missing)[:3]}")
        bp = self.basepoint if basepoint == "inherit" else basepoint
        if bp is not None and (bp,) not in closed:
            bp = None
        return SimplicialComplex(self.vertex_count, bp, tuple(closed))

    def validate(self) -> None:
        ss = self.simplex_set
        for s in self.simplices:
            if not s or len(set(s)) != len(s) or list(s) != sorted(s):
                raise ComplexError(f"bad simplex {s}")
            if s[0] < 0 or s[-1] >= self.vertex_count:
                raise ComplexError(f"vertex out of range in {s}")
            if len(s) > 1:
                for f in itertools.combinations(s, len(s) - 1):
                    if f not in ss:
                        raise ComplexError(f"face {f} of {s} missing")
        if self.basepoint is not None and (self.basepoint,) not in ss:
            raise ComplexError("basepoint is not a vertex of the complex")

    def to_json(self) -> str:
        return json.dumps({"vertices": self.vertex_count, "basepoint": self.basepoint,
                           "maximal_simplices": [list(s) for s in self.maximal_simplices()]})


def closure(simplices: Iterable[Sequence[int]]) -> frozenset[Simplex]:
    out: set[Simplex] = set()
    for s in simplices:
        s = tuple(sorted(s))
        if s in out:
            continue
        for k in range(1, len(s) + 1):
            out.update(itertools.combinations(s, k))
    return frozenset(out)


def build_complex(maximal_simplices: Sequence[Sequence[int]], basepoint: int = 0) -> SimplicialComplex:
    """Downward closure of a list of simplices on dense vertices 0..n-1."""
    if not maximal_simplices:
        raise ComplexError("empty simplex list")
    cleaned = []
    for s in maximal_simplices:
        s = [int(v) for v in s]
        if not s:
            raise ComplexError("empty simplex")
        if len(set(s)) != len(s):
            raise ComplexError(f"duplicate vertex in simplex {s}")
        if min(s) < 0:
            raise ComplexError(f"negative vertex in simplex {s}")
        cleaned.append(tuple(sorted(s)))
    verts = sorted({v for s in cleaned for v in s})
    n = len(verts)
    if verts != list(range(n)):
        raise ComplexError(f"vertex indices are not dense in [0, {n})")
    if not 0 <= basepoint < n:
        raise ComplexError(f"basepoint {basepoint} out of range [0, {n})")
    return SimplicialComplex(n, basepoint, tuple(closure(cleaned)))


def load_complex(path) -> SimplicialComplex:
    with open(path) as fh:
        return parse_complex(json.load(fh))


def parse_complex(data: dict) -> SimplicialComplex:
    try:
        n = int(data["vertices"])
        bp = int(data.get("basepoint", 0))
        tops = data["maximal_simplices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ComplexError(f"malformed complex description: {exc}") from exc
    K = build_complex(tops, bp)
    if K.vertex_count != n:
        raise ComplexError(f"declared {n} vertices but simplices use {K.vertex_count}")
    return K


# ---------------------------------------------------------------------------
# components

@dataclass(frozen=True)
class ComponentPartition:
    labels: tuple[int, ...]       # per ambient vertex; -1 if absent from the complex
    count: int
    basepoint_component: int | None

    def members(self, c: int) -> tuple[int, ...]:
        return tuple(v for v, lab in enumerate(self.labels) if lab == c)


def connected_components(K: SimplicialComplex) -> ComponentPartition:
    """Union-find on the 1-skeleton; ids ordered by least vertex."""
    parent = {v: v for v in K.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in K.simplices_of_dim(1):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots: dict[int, int] = {}
    labels = [-1] * K.vertex_count
    for v in K.vertices:
        r = find(v)
        if r not in roots:
            roots[r] = len(roots)
        labels[v] = roots[r]
    bp = labels[K.basepoint] if K.basepoint is not None else None
    return ComponentPartition(tuple(labels), len(roots), bp)


def component_subcomplexes(K: SimplicialComplex) -> list[frozenset[Simplex]]:
    part = connected_components(K)
    comps: list[set[Simplex]] = [set() for _ in range(part.count)]
    for s in K.simplices:
        comps[part.labels[s[0]]].add(s)
    return [frozenset(c) for c in comps]


# ---------------------------------------------------------------------------
# collapses

@dataclass(frozen=True)
class CollapseResult:
    """Outcome of the greedy collapse search.

    ``steps`` lists (free face, coface) pairs in the order removed.  A False
    result only means the greedy search got stuck.
    """

    collapsible: bool
    steps: tuple[tuple[Simplex, Simplex], ...]
    remaining: tuple[Simplex, ...]

    def __bool__(self) -> bool:
        return self.collapsible


def is_collapsible(K) -> CollapseResult:
    """Greedy elementary collapses, lexicographically least free face first.

    ``K`` may be a :class:`SimplicialComplex` or any iterable of simplices
    (taken to be downward closed).
    """
    sims = set(K.simplices if isinstance(K, SimplicialComplex) else (tuple(s) for s in K))
    if not sims:
        return CollapseResult(False, (), ())
    cofaces: dict[Simplex, set[Simplex]] = {s: set() for s in sims}
    for s in sims:
        if len(s) > 1:
            for f in itertools.combinations(s, len(s) - 1):
                cofaces[f].add(s)
    heap = [_canon_key(s) for s in sims if len(cofaces[s]) == 1]
    heapq.heapify(heap)
    steps = []
    alive = sims
    while heap:
        _, s = heapq.heappop(heap)
        if s not in alive or len(cofaces[s]) != 1:
            continue
        (t,) = cofaces[s]
        if cofaces[t]:
            continue  # coface not maximal yet
        steps.append((s, t))
        alive.discard(s)
        alive.discard(t)
        for x in (s, t):
            if len(x) == 1:
                continue
            for f in itertools.combinations(x, len(x) - 1):
                if f not in alive:
                    continue
                cofaces[f].discard(x)
                if len(cofaces[f]) == 1:
                    heapq.heappush(heap, _canon_key(f))
                elif not cofaces[f] and len(f) > 1:
                    # f became maximal: its faces with a single coface are free now
                    for g in itertools.combinations(f, len(f) - 1):
                        if len(cofaces[g]) == 1:
                            heapq.heappush(heap, _canon_key(g))
    remaining = tuple(sorted(alive, key=_canon_key))
    return CollapseResult(len(remaining) == 1, tuple(steps), remaining)


# ---------------------------------------------------------------------------
# subdivision

def barycentric_subdivision(K: SimplicialComplex) -> SimplicialComplex:
    """Order complex of the face poset; vertex i is the i-th simplex of K."""
    idx = K.index
    chains: list[Simplex] = []
    maximal = K.maximal_simplices()

    def flags(s: Simplex):
        if len(s) == 1:
            yield (s,)
            return
        for f in itertools.combinations(s, len(s) - 1):
            for fl in flags(f):
                yield fl + (s,)

    for m in maximal:
        for fl in flags(m):
            chains.append(tuple(sorted(idx[x] for x in fl)))
    bp = idx[(K.basepoint,)] if K.basepoint is not None else 0
    return build_complex(chains, bp)


# ---------------------------------------------------------------------------
# simplicial sets

@dataclass(frozen=True, eq=False)
class SimplicialSet:
    """A simplicial set stored levelwise up to ``bound``.

    ``faces[k]`` has shape (n_k, k+1) with column i holding d_i (for k = 0 it
    has no columns); ``degens[k]`` has shape (n_k, k+1) with column j holding
    s_j and exists for k < bound.  ``labels[k]`` optionally names simplices.
    """

    bound: int
    faces: tuple[np.ndarray, ...]
    degens: tuple[np.ndarray, ...]
    basepoint: int = 0
    labels: tuple | None = field(default=None, repr=False)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.faces)

    def face(self, k: int, i: int) -> np.ndarray:
        return self.faces[k][:, i]

    def degen(self, k: int, j: int) -> np.ndarray:
        return self.degens[k][:, j]

    @cached_property
    def base(self) -> tuple[int, ...]:
        """Index of the basepoint's total degeneracy at each level."""
        out = [self.basepoint]
        for k in range(self.bound):
            out.append(int(self.degens[k][out[-1], 0]))
        return tuple(out)

    @cached_property
    def degeneracy_sets(self) -> tuple[np.ndarray, ...]:
        """Boolean (n_k, k) arrays: entry j says x lies in the image of s_j."""
        out = [np.zeros((self.counts[0], 0), dtype=bool)]
        for k in range(1, self.bound + 1):
            cols = []
            for j in range(k):
                d = self.faces[k][:, j]
                cols.append(self.degens[k - 1][d, j] == np.arange(self.counts[k]))
            out.append(np.stack(cols, axis=1))
        return tuple(out)

    @cached_property
    def nondegenerate(self) -> tuple[np.ndarray, ...]:
        return tuple(~j.any(axis=1) for j in self.degeneracy_sets)

    @cached_property
    def decomposition(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """Per level, (root dimension, root index) of the unique nondegenerate root."""
        out = []
        for k in range(self.bound + 1):
            n = self.counts[k]
            rdim = np.full(n, k, dtype=np.int64)
            ridx = np.arange(n, dtype=np.int64)
            if k:
                J = self.degeneracy_sets[k]
                deg = J.any(axis=1)
                jmax = np.where(deg, k - 1 - np.argmax(J[:, ::-1], axis=1), 0)
                prev_dim, prev_idx = out[k - 1]
                for j in np.unique(jmax[deg]):
                    sel = deg & (jmax == j)
                    y = self.faces[k][sel, j]
                    rdim[sel] = prev_dim[y]
                    ridx[sel] = prev_idx[y]
            out.append((rdim, ridx))
        return tuple(out)

    def nondegenerate_counts(self) -> tuple[int, ...]:
        return tuple(int(m.sum()) for m in self.nondegenerate)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.nondegenerate_counts()))

    def validate(self) -> None:
        """Exhaustive check of the simplicial identities and the EZ table."""
        b = self.bound
        if len(self.faces) != b + 1 or len(self.degens) != b:
            raise ComplexError("face/degeneracy tables do not match the bound")
        n = self.counts
        for k in range(b + 1):
            if self.faces[k].shape != (n[k], 0 if k == 0 else k + 1):
                raise ComplexError(f"face table shape wrong at level {k}")
            if k and n[k] and (self.faces[k].min() < 0 or self.faces[k].max() >= n[k - 1]):
                raise ComplexError(f"face index out of range at level {k}")
        for k in range(b):
            if self.degens[k].shape != (n[k], k + 1):
                raise ComplexError(f"degeneracy table shape wrong at level {k}")
            if n[k] and (self.degens[k].min() < 0 or self.degens[k].max() >= n[k + 1]):
                raise ComplexError(f"degeneracy index out of range at level {k}")
        if not 0 <= self.basepoint < n[0]:
            raise ComplexError("basepoint out of range")
        F, S = self.faces, self.degens
        for k in range(2, b + 1):
            for j in range(k + 1):
                for i in range(j):
                    if not np.array_equal(F[k - 1][F[k][:, j], i], F[k - 1][F[k][:, i], j - 1]):
                        raise ComplexError(f"d_{i} d_{j} != d_{j - 1} d_{i} at level {k}")
        for k in range(b):
            ident = np.arange(n[k])
            for j in range(k + 1):
                up = S[k][:, j]
                for i in range(k + 2):
                    lhs = F[k + 1][up, i]
                    if i < j:
                        rhs = S[k - 1][F[k][:, i], j - 1]
                    elif i in (j, j + 1):
                        rhs = ident
                    else:
                        rhs = S[k - 1][F[k][:, i - 1], j]
                    if not np.array_equal(lhs, rhs):
                        raise ComplexError(f"d_{i} s_{j} identity fails at level {k}")
            if k + 1 < b:
                for j in range(k + 1):
                    for i in range(j + 1):
                        if not np.array_equal(S[k + 1][S[k][:, j], i], S[k + 1][S[k][:, i], j + 1]):
                            raise ComplexError(f"s_{i} s_{j} identity fails at level {k}")
        # Eilenberg-Zilber: rebuild each simplex from its root
        for k in range(1, b + 1):
            J = self.degeneracy_sets[k]
            rdim, ridx = self.decomposition[k]
            for x in np.nonzero(J.any(axis=1))[0]:
                ops = np.nonzero(J[x])[0]
                y = int(ridx[x])
                level = int(rdim[x])
                if level != k - len(ops) or not self.nondegenerate[level][y]:
                    raise ComplexError(f"bad Eilenberg-Zilber root for simplex {x} at level {k}")
                for j in ops:  # ascending: innermost degeneracy first
                    y = int(S[level][y, j])
                    level += 1
                if y != x:
                    raise ComplexError(f"simplex {x} at level {k} is not s_J of its root")


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    source: SimplicialSet
    target: SimplicialSet
    levels: tuple[np.ndarray, ...]

    def validate(self, pointed: bool = True) -> None:
        X, Y, f = self.source, self.target, self.levels
        b = min(X.bound, Y.bound)
        if len(f) < b + 1:
            raise ComplexError("map is not defined on every level")
        for k in range(b + 1):
            if len(f[k]) != X.counts[k]:
                raise ComplexError(f"map table has wrong length at level {k}")
        for k in range(1, b + 1):
            for i in range(k + 1):
                if not np.array_equal(f[k - 1][X.faces[k][:, i]], Y.faces[k][f[k], i]):
                    raise ComplexError(f"map does not commute with d_{i} at level {k}")
        for k in range(b):
            for j in range(k + 1):
                if not np.array_equal(f[k + 1][X.degens[k][:, j]], Y.degens[k][f[k], j]):
                    raise ComplexError(f"map does not commute with s_{j} at level {k}")
        if pointed and f[0][X.basepoint] != Y.basepoint:
            raise ComplexError("map does not preserve the basepoint")

    def compose(self, other: SimplicialMap) -> SimplicialMap:
        """``other`` after ``self``."""
        b = min(len(self.levels), len(other.levels))
        return SimplicialMap(self.source, other.target,
                             tuple(other.levels[k][self.levels[k]] for k in range(b)))


def identity_map(X: SimplicialSet) -> SimplicialMap:
    return SimplicialMap(X, X, tuple(np.arange(c) for c in X.counts))


def _from_labelled_levels(levels: list[list], face_fn, degen_fn, basepoint_label, bound) -> SimplicialSet:
    index = [{lab: i for i, lab in enumerate(lv)} for lv in levels]
    faces = [np.zeros((len(levels[0]), 0), dtype=np.int64)]
    for k in range(1, bound + 1):
        faces.append(np.array([[index[k - 1][face_fn(x, i)] for i in range(k + 1)] for x in levels[k]],
                              dtype=np.int64).reshape(len(levels[k]), k + 1))
    degens = []
    for k in range(bound):
        degens.append(np.array([[index[k + 1][degen_fn(x, j)] for j in range(k + 1)] for x in levels[k]],
                               dtype=np.int64).reshape(len(levels[k]), k + 1))
    return SimplicialSet(bound, tuple(faces), tuple(degens), index[0][basepoint_label],
                         tuple(tuple(lv) for lv in levels))


def _surjections(m: int, k: int):
    """Non-decreasing surjections [k] -> [m] as tuples of length k+1."""
    for cuts in itertools.combinations(range(1, k + 1), m):
        seq, val, prev = [], 0, 0
        for c in cuts + (k + 1,):
            seq.extend([val] * (c - prev))
            val += 1
            prev = c
        yield tuple(seq)


def to_simplicial_set(K: SimplicialComplex, bound: int) -> SimplicialSet:
    """Ordered simplicial set of K: k-simplices are non-decreasing vertex
    sequences of length k+1 spanning a simplex of K."""
    if K.basepoint is None:
        raise ComplexError("complex must be pointed")
    levels = []
    for k in range(bound + 1):
        seqs = []
        for s in K.simplices:
            m = len(s) - 1
            if m > k:
                continue
            seqs.extend(tuple(s[i] for i in sur) for sur in _surjections(m, k))
        seqs.sort()
        levels.append(seqs)
    return _from_labelled_levels(
        levels,
        lambda x, i: x[:i] + x[i + 1:],
        lambda x, j: x[:j + 1] + x[j:],
        (K.basepoint,),
        bound,
    )


def complex_map(X: SimplicialSet, Y: SimplicialSet, vertex_map: Sequence[int]) -> SimplicialMap:
    """Simplicial map between ordered simplicial sets of complexes induced by a
    vertex map that is weakly monotone on every simplex."""
    if X.labels is None or Y.labels is None:
        raise ComplexError("complex_map needs labelled simplicial sets")
    yidx = [{lab: i for i, lab in enumerate(lv)} for lv in Y.labels]
    levels = []
    for k in range(min(X.bound, Y.bound) + 1):
        arr = np.empty(X.counts[k], dtype=np.int64)
        for i, seq in enumerate(X.labels[k]):
            img = tuple(vertex_map[v] for v in seq)
            if any(img[t] > img[t + 1] for t in range(len(img) - 1)):
                raise ComplexError(f"vertex map is not monotone on {seq}")
            if img not in yidx[k]:
                raise ComplexError(f"image of {seq} is not a simplex of the target")
            arr[i] = yidx[k][img]
        levels.append(arr)
    f = SimplicialMap(X, Y, tuple(levels))
    f.validate()
    return f


def product(X: SimplicialSet, Y: SimplicialSet, bound: int | None = None) -> SimplicialSet:
    """Levelwise product; the pair (x, y) has index x * n_Y + y."""
    if bound is None:
        bound = min(X.bound, Y.bound)
    if bound > X.bound or bound > Y.bound:
        raise ComplexError(f"bound {bound} exceeds the stored bound of a factor")
    ny = Y.counts
    faces = [np.zeros((X.counts[0] * ny[0], 0), dtype=np.int64)]
    for k in range(1, bound + 1):
        fx = np.repeat(X.faces[k], ny[k], axis=0)
        fy = np.tile(Y.faces[k], (X.counts[k], 1))
        faces.append(fx * ny[k - 1] + fy)
    degens = []
    for k in range(bound):
        sx = np.repeat(X.degens[k], ny[k], axis=0)
        sy = np.tile(Y.degens[k], (X.counts[k], 1))
        degens.append(sx * ny[k + 1] + sy)
    return SimplicialSet(bound, tuple(faces), tuple(degens), X.basepoint * ny[0] + Y.basepoint)


def product_power(X: SimplicialSet, d: int, bound: int | None = None) -> SimplicialSet:
    out = X if bound is None else truncate(X, bound)
    for _ in range(d - 1):
        out = product(out, X, bound if bound is not None else None)
    return out


def truncate(X: SimplicialSet, bound: int) -> SimplicialSet:
    if bound > X.bound:
        raise ComplexError("cannot raise the bound of a simplicial set")
    labels = X.labels[:bound + 1] if X.labels is not None else None
    return SimplicialSet(bound, X.faces[:bound + 1], X.degens[:bound], X.basepoint, labels)


def permutation_action(X: SimplicialSet, d: int, bound: int) -> list[SimplicialMap]:
    """Coordinate permutations of the d-fold product of X."""
    P = product_power(X, d, bound)
    maps = []
    for perm in itertools.permutations(range(d)):
        levels = []
        for k in range(bound + 1):
            n = X.counts[k]
            idx = np.arange(P.counts[k])
            digits = []
            for _ in range(d):
                digits.append(idx % n)
                idx = idx // n
            digits = digits[::-1]            # most significant first
            new = np.zeros(P.counts[k], dtype=np.int64)
            for pos in range(d):
                new = new * n + digits[perm[pos]]
            levels.append(new)
        maps.append(SimplicialMap(P, P, tuple(levels)))
    return maps


def quotient_by_group(X: SimplicialSet, action: Sequence[SimplicialMap], bound: int | None = None) -> SimplicialSet:
    """Orbit simplicial set X/G for a finite group of automorphisms.

    Each orbit is represented by its least index.  The action must be closed
    under composition and every element must be a simplicial bijection.
    """
    if bound is None:
        bound = X.bound
    if not action:
        action = [identity_map(X)]
    keys = set()
    for g in action:
        g.validate(pointed=False)
        for k in range(bound + 1):
            if len(np.unique(g.levels[k])) != X.counts[k]:
                raise ComplexError("action element is not a bijection")
        keys.add(tuple(g.levels[k].tobytes() for k in range(bound + 1)))
    for g in action:
        for h in action:
            comp = g.compose(h)
            if tuple(comp.levels[k].tobytes() for k in range(bound + 1)) not in keys:
                raise ComplexError("action is not closed under composition")
    reps, new_index = [], []
    for k in range(bound + 1):
        r = np.min(np.stack([g.levels[k] for g in action]), axis=0)
        u = np.unique(r)
        lookup = np.full(X.counts[k], -1, dtype=np.int64)
        lookup[u] = np.arange(len(u))
        reps.append(u)
        new_index.append(lookup[r])
    faces = [np.zeros((len(reps[0]), 0), dtype=np.int64)]
    for k in range(1, bound + 1):
        faces.append(new_index[k - 1][X.faces[k][reps[k]]])
    degens = [new_index[k + 1][X.degens[k][reps[k]]] for k in range(bound)]
    labels = None
    if X.labels is not None:
        labels = tuple(tuple(X.labels[k][i] for i in reps[k]) for k in range(bound + 1))
    return SimplicialSet(bound, tuple(faces), tuple(degens), int(new_index[0][X.basepoint]), labels)
