"""Labelled configurations on finite pointed sets and symmetric powers.

A configuration on a pointed set is a finite support containing the basepoint
together with labels in an abelian group A.  Two configurations are identified
when they differ by points labelled with the identity, and labels at the
basepoint are discarded.  ``normalize`` picks the representative with no
identity labels, so equality of normal forms is equality of configurations.

Group elements are tuples of integers in the cyclic decomposition of A, see
:class:`stp.abgroup.AbGroup`.  Plain integers are accepted for cyclic A.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .abgroup import AbGroup
from .complexes import ComplexError, SimplicialMap, SimplicialSet

DEFAULT_CELL_LIMIT = 200_000


class ConfigurationError(ValueError):
    pass


def _element(A: AbGroup, x) -> tuple[int, ...]:
    n = A.rank + len(A.torsion)
    if isinstance(x, (int, np.integer)):
        if n != 1:
            raise ConfigurationError(f"integer label needs a cyclic group, got {A}")
        x = (int(x),)
    x = tuple(int(v) for v in x)
    if len(x) != n:
        raise ConfigurationError(f"label {x} has the wrong length for {A}")
    return tuple(A._reduce(i, v) for i, v in enumerate(x))


def _point_key(p):
    return (type(p).__name__, repr(p))


@dataclass(frozen=True)
class Configuration:
    """Normal-form labelled configuration.

    ``labels`` holds (point, element) pairs for the non-basepoint points with
    non-identity labels, sorted by point.  The support is those points plus
    the basepoint.
    """

    basepoint: Hashable
    coeff: AbGroup
    labels: tuple[tuple[Hashable, tuple[int, ...]], ...] = ()

    @property
    def support(self) -> frozenset:
        return frozenset([self.basepoint, *(p for p, _ in self.labels)])

    def label(self, p) -> tuple[int, ...]:
        for q, a in self.labels:
            if q == p:
                return a
        return self.coeff.zero()

    def as_dict(self) -> dict:
        return dict(self.labels)

    def __str__(self) -> str:
        body = ", ".join(f"{p}:{a}" for p, a in self.labels)
        return "{" + body + "}"


def normalize(S: Iterable, labels: Mapping, A: AbGroup, basepoint: Hashable = "*") -> Configuration:
    """Normal form of the configuration (S, labels).

    Points of S without a label carry the identity.  Labels at the basepoint
    and identity labels are dropped.
    """
    S = set(S)
    if basepoint not in S:
        raise ConfigurationError("the support must contain the basepoint")
    extra = set(labels) - S
    if extra:
        raise ConfigurationError(f"labels given outside the support: {sorted(map(repr, extra))}")
    zero = A.zero()
    kept = []
    for p in S:
        if p == basepoint or p not in labels:
            continue
        a = _element(A, labels[p])
        if a != zero:
            kept.append((p, a))
    kept.sort(key=lambda t: _point_key(t[0]))
    return Configuration(basepoint, A, tuple(kept))


@dataclass(frozen=True)
class SymGroup:
    """Normal-form configurations on ``points`` plus a basepoint, labels in A."""

    points: tuple
    coeff: AbGroup
    basepoint: Hashable = "*"

    def __post_init__(self):
        if self.basepoint in self.points:
            raise ConfigurationError("the basepoint must not be listed among the points")
        if len(set(self.points)) != len(self.points):
            raise ConfigurationError("duplicate points")

    @property
    def zero(self) -> Configuration:
        return Configuration(self.basepoint, self.coeff, ())

    def make(self, labels: Mapping) -> Configuration:
        return normalize({self.basepoint, *labels}, labels, self.coeff, self.basepoint)

    def add(self, c: Configuration, d: Configuration) -> Configuration:
        out = dict(c.labels)
        for p, a in d.labels:
            out[p] = self.coeff.add(out.get(p, self.coeff.zero()), a)
        return self.make(out)

    def neg(self, c: Configuration) -> Configuration:
        return self.make({p: self.coeff.neg(a) for p, a in c.labels})

    def elements(self) -> list[Configuration]:
        """All normal forms, enumerated by support then nonzero labels."""
        if not self.coeff.is_finite:
            raise ConfigurationError(f"cannot enumerate configurations with labels in {self.coeff}")
        nonzero = [a for a in self.coeff.elements() if any(a)]
        out = []
        for r in range(len(self.points) + 1):
            for T in itertools.combinations(self.points, r):
                for labs in itertools.product(nonzero, repeat=r):
                    out.append(self.make(dict(zip(T, labs))))
        return out

    def order(self) -> int:
        return self.coeff.order ** len(self.points)

    def check_axioms(self) -> None:
        """Abelian group axioms, exhaustively, on the addition table."""
        els = self.elements()
        index = {c: i for i, c in enumerate(els)}
        if len(index) != len(els):
            raise ConfigurationError("distinct enumerated configurations share a normal form")
        n, z = len(els), index[self.zero]
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(els):
            if self.add(a, self.zero) != a or self.add(a, self.neg(a)) != self.zero:
                raise ConfigurationError(f"unit or inverse fails at {a}")
            for j, b in enumerate(els):
                table[i, j] = index[self.add(a, b)]
        if not (table == table.T).all():
            i, j = map(int, np.argwhere(table != table.T)[0])
            raise ConfigurationError(f"addition not commutative at {els[i]}, {els[j]}")
        # (a + b) + c against a + (b + c) for every triple
        lhs = table[table]                      # [a, b, c] -> (a + b) + c
        rhs = table[:, table]                   # [a, b, c] -> a + (b + c)
        if not np.array_equal(lhs, rhs):
            i, j, k = map(int, np.argwhere(lhs != rhs)[0])
            raise ConfigurationError(f"addition not associative at {els[i]}, {els[j]}, {els[k]}")
        if (table[:, z] != np.arange(n)).any():
            raise ConfigurationError("zero is not neutral")

@dataclass(frozen=True)
class FiniteSym:
    """Configuration group on I_+ with the bijections to the power A^I."""

    group: SymGroup
    elements: tuple[Configuration, ...]

    def f(self, c: Configuration) -> tuple[tuple[int, ...], ...]:
        """i -> l(i) on the support, identity elsewhere."""
        return tuple(c.label(i) for i in self.group.points)

    def g(self, v: Iterable) -> Configuration:
        v = tuple(v)
        if len(v) != len(self.group.points):
            raise ConfigurationError("vector length does not match the index set")
        return self.group.make(dict(zip(self.group.points, v)))

    def power_elements(self) -> list[tuple]:
        A = self.group.coeff
        return list(itertools.product(list(A.elements()), repeat=len(self.group.points)))

    def power_add(self, u, v) -> tuple:
        return tuple(self.group.coeff.add(a, b) for a, b in zip(u, v))

    def verify(self) -> dict:
        """Exhaustive check that f and g are inverse group isomorphisms."""
        power = self.power_elements()
        fg = all(self.f(self.g(v)) == v for v in power)
        gf = all(self.g(self.f(c)) == c for c in self.elements)
        hom = all(self.f(self.group.add(a, b)) == self.power_add(self.f(a), self.f(b))
                  for a in self.elements for b in self.elements)
        count = len(self.elements) == len(power) == self.group.order()
        return {"f_after_g": fg, "g_after_f": gf, "homomorphism": hom, "cardinality": count,
                "order": len(self.elements)}


def sym_finite(I: Iterable, A: AbGroup, basepoint: Hashable = "*") -> FiniteSym:
    """The configuration group on I_+ with the explicit maps to A^I.

    The configurations are enumerated from supports and labels, not as images
    of g, so that the bijection check is not circular.
    """
    if not A.is_finite:
        raise ConfigurationError(f"exhaustive mode needs a finite coefficient group, got {A}")
    G = SymGroup(tuple(I), A, basepoint)
    return FiniteSym(G, tuple(G.elements()))


@dataclass(frozen=True)
class PointedMap:
    """Map of finite pointed sets given by a table."""

    table: Mapping
    source_basepoint: Hashable = "*"
    target_basepoint: Hashable = "*"

    def validate(self) -> None:
        if self.table.get(self.source_basepoint, self.source_basepoint) != self.target_basepoint:
            raise ConfigurationError("map does not preserve the basepoint")

    def __call__(self, p):
        if p == self.source_basepoint:
            return self.target_basepoint
        return self.table[p]

    def compose(self, other: PointedMap) -> PointedMap:
        """``other`` after ``self``."""
        return PointedMap({p: other(q) for p, q in self.table.items()},
                          self.source_basepoint, other.target_basepoint)

    def is_injective(self) -> bool:
        vals = [self(p) for p in self.table]
        return len(set(vals)) == len(vals)


def pushforward(f: PointedMap, c: Configuration) -> Configuration:
    """Sum labels over fibres; whatever lands on the basepoint is dropped."""
    f.validate()
    if c.basepoint != f.source_basepoint:
        raise ConfigurationError("configuration and map have different basepoints")
    A = c.coeff
    out: dict = {}
    for p, a in c.labels:
        q = f(p)
        out[q] = A.add(out.get(q, A.zero()), a)
    out.pop(f.target_basepoint, None)
    return normalize({f.target_basepoint, *out}, out, A, f.target_basepoint)


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    exhaustive: bool
    pairs_checked: int
    collisions: frozenset = field(default_factory=frozenset)

    def witness(self):
        """A deterministic collision, or None."""
        if not self.collisions:
            return None
        return min(self.collisions, key=lambda pr: (str(pr[0]), str(pr[1])))


def check_injectivity(g: PointedMap, sample: Iterable | None = None,
                      group: SymGroup | None = None) -> InjectivityReport:
    """Check that c -> pushforward(g, c) is injective.

    With ``sample`` the given pairs of configurations are compared.  Otherwise
    every pair in ``group`` is compared.  Each collision (c, d) with c != d and
    equal images is recorded.
    """
    g.validate()
    exhaustive = sample is None
    if exhaustive:
        if group is None:
            raise ConfigurationError("exhaustive mode needs the source configuration group")
        els = group.elements()
        images: dict = {}
        for c in els:
            images.setdefault(pushforward(g, c), []).append(c)
        collisions = set()
        for cs in images.values():
            collisions.update(itertools.combinations(cs, 2))
        n = len(els) * len(els)
    else:
        collisions, n = set(), 0
        for c, d in sample:
            n += 1
            if c != d and pushforward(g, c) == pushforward(g, d):
                collisions.add((c, d))
    return InjectivityReport(not collisions, exhaustive, n, frozenset(collisions))


# ---------------------------------------------------------------------------
# symmetric powers of simplicial sets

def cell_limit(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get("STP_CELL_LIMIT")
    return int(env) if env else DEFAULT_CELL_LIMIT


class CellLimitError(ComplexError):
    pass


def symmetric_power_counts(X: SimplicialSet, d: int, bound: int) -> tuple[list[int], list[int]]:
    """Total and nondegenerate simplex counts of SP^d(X) through ``bound``.

    A k-simplex of SP^d is a multiset of d k-simplices of X.  The nondegenerate
    counts follow from T_k = sum_j C(k, j) N_j by inversion.
    """
    total = [math.comb(X.counts[k] + d - 1, d) for k in range(bound + 1)]
    nondeg = [sum((-1) ** (k - j) * math.comb(k, j) * total[j] for j in range(k + 1))
              for k in range(bound + 1)]
    return total, nondeg


def symmetric_power(X: SimplicialSet, d: int, bound: int | None = None,
                    limit: int | None = None) -> SimplicialSet:
    """SP^d(X) = X^d / S_d.

    Simplices are sorted d-tuples of simplices of X in lexicographic order,
    which is the least-index orbit representative of the product ordering.
    Raises CellLimitError when the nondegenerate count exceeds the limit.
    """
    if d < 1:
        raise ComplexError("d must be at least 1")
    if bound is None:
        bound = X.bound
    if bound > X.bound:
        raise ComplexError(f"simplicial set stored to level {X.bound}, need {bound}")
    _, nondeg = symmetric_power_counts(X, d, bound)
    lim = cell_limit(limit)
    if sum(nondeg) > lim:
        raise CellLimitError(f"SP^{d} needs {sum(nondeg)} nondegenerate simplices through level "
                             f"{bound}, over the limit {lim}")
    levels, keys = [], []
    for k in range(bound + 1):
        n = X.counts[k]
        if n ** d >= 1 << 62:
            raise CellLimitError("simplex encoding would overflow int64")
        arr = np.array(list(itertools.combinations_with_replacement(range(n), d)),
                       dtype=np.int64).reshape(-1, d)
        levels.append(arr)
        keys.append(_encode(arr, n))

    def lookup(rows: np.ndarray, k: int) -> np.ndarray:
        rows = np.sort(rows, axis=1)
        return np.searchsorted(keys[k], _encode(rows, X.counts[k]))

    faces = [np.zeros((len(levels[0]), 0), dtype=np.int64)]
    for k in range(1, bound + 1):
        cols = [lookup(X.faces[k][levels[k], i], k - 1) for i in range(k + 1)]
        faces.append(np.stack(cols, axis=1).astype(np.int64))
    degens = []
    for k in range(bound):
        cols = [lookup(X.degens[k][levels[k], j], k + 1) for j in range(k + 1)]
        degens.append(np.stack(cols, axis=1).astype(np.int64))
    bp = int(lookup(np.full((1, d), X.basepoint, dtype=np.int64), 0)[0])
    return SimplicialSet(bound, tuple(faces), tuple(degens), bp)


def _encode(rows: np.ndarray, n: int) -> np.ndarray:
    key = np.zeros(len(rows), dtype=np.int64)
    for c in range(rows.shape[1]):
        key = key * n + rows[:, c]
    return key


def stabilization_map(X: SimplicialSet, d: int, bound: int | None = None,
                      source: SimplicialSet | None = None,
                      target: SimplicialSet | None = None) -> SimplicialMap:
    """SP^d(X) -> SP^{d+1}(X), adding one point at the basepoint."""
    if bound is None:
        bound = X.bound
    S = source if source is not None else symmetric_power(X, d, bound)
    T = target if target is not None else symmetric_power(X, d + 1, bound)
    levels = []
    for k in range(bound + 1):
        src = np.array(list(itertools.combinations_with_replacement(range(X.counts[k]), d)),
                       dtype=np.int64).reshape(-1, d)
        rows = np.concatenate([src, np.full((len(src), 1), X.base[k], dtype=np.int64)], axis=1)
        rows = np.sort(rows, axis=1)
        tkeys = _encode(np.array(list(itertools.combinations_with_replacement(range(X.counts[k]), d + 1)),
                                 dtype=np.int64).reshape(-1, d + 1), X.counts[k])
        levels.append(np.searchsorted(tkeys, _encode(rows, X.counts[k])).astype(np.int64))
    f = SimplicialMap(S, T, tuple(levels))
    f.validate(pointed=True)
    return f
