"""Finite diagram categories, disk posets and homotopy colimits of chains.

The finite stand-in for the category of disks in a pointed space M is the
poset of disk systems: subcomplexes of M whose connected components are
collapsible, one of them containing the basepoint, ordered by inclusion.
Inclusion merges components the way several disks embed into one.

Homotopy colimits of chain-complex diagrams are computed by the normalized
simplicial replacement (bar construction over chains of non-identity
morphisms), truncated in total degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .abgroup import AbGroup, Z
from .complexes import (ComplexError, SimplicialComplex, Simplex, _canon_key, barycentric_subdivision,
                        closure, complex_map, connected_components, component_subcomplexes,
                        is_collapsible, to_simplicial_set)
from .doldkan import free_module, homotopy_groups, normalized_chains
from .homalg import (ChainComplex, ChainMap, _csc, homology, is_quasi_iso, reduced_chains,
                     zero_matrix)

CERTIFIED, REFUTED, INCONCLUSIVE = "certified", "refuted", "inconclusive"

DEFAULT_PIECE_LIMIT = 5000
DEFAULT_NERVE_LIMIT = 40
DEFAULT_AUTO_OBJECT_LIMIT = 200


class HocolimError(ValueError):
    pass


class DiskPosetTooLarge(HocolimError):
    pass


# ---------------------------------------------------------------------------
# finite categories and diagrams

@dataclass(frozen=True, eq=False)
class FiniteCategory:
    """Objects ``0..n-1`` with explicit morphisms.

    ``morphisms[m] = (source, target)``, ``identities[a]`` is the id of a's
    identity.  Composition is ``composition[(g, f)]`` for g after f.  Posets
    set ``leq`` instead of a table; their composite is the unique arrow.
    """

    objects: tuple
    morphisms: tuple[tuple[int, int], ...]
    identities: tuple[int, ...]
    composition: Mapping[tuple[int, int], int] | None = None
    leq: Callable[[int, int], bool] | None = field(default=None, repr=False)

    @classmethod
    def from_poset(cls, objects: Sequence, leq: Callable[[int, int], bool]) -> FiniteCategory:
        n = len(objects)
        mors, ids = [], [0] * n
        for a in range(n):
            for b in range(n):
                if a == b or leq(a, b):
                    if a == b:
                        ids[a] = len(mors)
                    mors.append((a, b))
        return cls(tuple(objects), tuple(mors), tuple(ids), None, leq)

    @property
    def is_poset(self) -> bool:
        return self.leq is not None

    @property
    def size(self) -> int:
        return len(self.objects)

    def __post_init__(self):
        index = {m: i for i, m in enumerate(self.morphisms)} if self.leq is not None else None
        object.__setattr__(self, "_pair_index", index)
        out: list[list[int]] = [[] for _ in self.objects]
        for i, (a, b) in enumerate(self.morphisms):
            if i != self.identities[a]:
                out[a].append(i)
        object.__setattr__(self, "_out", tuple(tuple(o) for o in out))

    def out_morphisms(self, a: int) -> tuple[int, ...]:
        """Non-identity morphisms leaving a."""
        return self._out[a]

    def compose(self, g: int, f: int) -> int:
        """g after f."""
        (a, b), (b2, c) = self.morphisms[f], self.morphisms[g]
        if b != b2:
            raise HocolimError(f"morphisms {f} and {g} are not composable")
        if self.is_poset:
            return self._pair_index[(a, c)]
        return self.composition[(g, f)]

    def is_identity(self, m: int) -> bool:
        return self.identities[self.morphisms[m][0]] == m

    def morphism(self, a: int, b: int) -> int | None:
        """The unique arrow a -> b of a poset, if any."""
        if not self.is_poset:
            raise HocolimError("morphism lookup by endpoints needs a poset")
        return self._pair_index.get((a, b))

    def validate(self) -> None:
        """Unit and associativity laws (partial-order axioms for posets)."""
        n = self.size
        for a in range(n):
            s, t = self.morphisms[self.identities[a]]
            if s != a or t != a:
                raise HocolimError(f"identity of {a} has the wrong endpoints")
        if self.is_poset:
            rel = {(a, b) for a, b in self.morphisms}
            for a, b in rel:
                if a != b and (b, a) in rel:
                    raise HocolimError(f"objects {a} and {b} are isomorphic in a poset")
            for a, b in rel:
                for c in range(n):
                    if (b, c) in rel and (a, c) not in rel:
                        raise HocolimError(f"poset relation not transitive at {a}, {b}, {c}")
            return
        comp = self.composition or {}
        for f, (a, b) in enumerate(self.morphisms):
            if comp.get((f, self.identities[a])) != f or comp.get((self.identities[b], f)) != f:
                raise HocolimError(f"unit law fails for morphism {f}")
        for f, (a, b) in enumerate(self.morphisms):
            for g, (b2, c) in enumerate(self.morphisms):
                if b2 != b:
                    continue
                gf = comp.get((g, f))
                if gf is None or self.morphisms[gf] != (a, c):
                    raise HocolimError(f"composite of {g} after {f} missing or misplaced")
                for h, (c2, _) in enumerate(self.morphisms):
                    if c2 != c:
                        continue
                    hg = comp.get((h, g))
                    if hg is None or comp.get((h, gf)) != comp.get((hg, f)):
                        raise HocolimError(f"associativity fails at {h}, {g}, {f}")

    def chains(self, top: int, normalized: bool = True) -> list[list[tuple[int, tuple[int, ...]]]]:
        """Composable strings (c0, (m1, .., mp)) of length p <= top.

        In normalized mode the m_i are non-identity morphisms.
        """
        out = [[(a, ()) for a in range(self.size)]]
        for _ in range(top):
            nxt = []
            for c0, ms in out[-1]:
                last = self.morphisms[ms[-1]][1] if ms else c0
                cand = self.out_morphisms(last) if normalized else \
                    [i for i, (s, _) in enumerate(self.morphisms) if s == last]
                nxt.extend((c0, ms + (m,)) for m in cand)
            out.append(nxt)
        return out


@dataclass(frozen=True, eq=False)
class Diagram:
    """A functor out of a finite category.

    ``kind`` is "complex" (values SimplicialComplex, arrows vertex maps as
    dicts, None meaning an inclusion) or "chain" (values ChainComplex, arrows
    ChainMap).
    """

    shape: FiniteCategory
    values: tuple
    arrows: tuple
    kind: str = "chain"

    def arrow_map(self, m: int):
        return self.arrows[m]

    def vertex_map(self, m: int) -> Callable[[int], int]:
        a = self.arrows[m]
        if a is None:
            return lambda v: v
        return lambda v: a[v]

    def validate(self) -> None:
        C = self.shape
        if len(self.values) != C.size or len(self.arrows) != len(C.morphisms):
            raise HocolimError("diagram does not match its shape")
        if self.kind == "complex":
            self._validate_complex()
        elif self.kind == "chain":
            self._validate_chain()
        else:
            raise HocolimError(f"unknown diagram kind {self.kind!r}")

    def _validate_complex(self) -> None:
        C = self.shape
        for m, (a, b) in enumerate(C.morphisms):
            phi = self.vertex_map(m)
            U, V = self.values[a], self.values[b]
            for s in U.simplices:
                img = tuple(sorted({phi(v) for v in s}))
                if img not in V:
                    raise HocolimError(f"arrow {m} sends {s} outside its target")
            if U.basepoint is not None and phi(U.basepoint) != V.basepoint:
                raise HocolimError(f"arrow {m} is not pointed")
            if C.is_identity(m) and any(phi(v) != v for v in U.vertices):
                raise HocolimError(f"identity arrow {m} is not the identity")
        for f, g, gf in _composable_triples(C):
            pf, pg, pgf = self.vertex_map(f), self.vertex_map(g), self.vertex_map(gf)
            for v in self.values[C.morphisms[f][0]].vertices:
                if pg(pf(v)) != pgf(v):
                    raise HocolimError(f"diagram not functorial at {g} after {f}")

    def _validate_chain(self) -> None:
        C = self.shape
        for v in self.values:
            v.validate()
        for m, (a, b) in enumerate(C.morphisms):
            fm = self.arrows[m]
            if fm.source is not self.values[a] or fm.target is not self.values[b]:
                raise HocolimError(f"arrow {m} has the wrong endpoints")
            fm.validate()
            if C.is_identity(m):
                for k in range(self.values[a].top + 1):
                    if (fm.matrix(k) - sp.identity(self.values[a].rank(k), dtype=np.int64)).count_nonzero():
                        raise HocolimError(f"identity arrow {m} is not the identity")
        for f, g, gf in _composable_triples(C):
            top = self.values[C.morphisms[f][0]].top
            for k in range(top + 1):
                lhs = self.arrows[g].matrix(k) @ self.arrows[f].matrix(k)
                if (lhs - self.arrows[gf].matrix(k)).count_nonzero():
                    raise HocolimError(f"diagram not functorial at {g} after {f}, degree {k}")


def _composable_triples(C: FiniteCategory):
    for f, (a, b) in enumerate(C.morphisms):
        for g in C.out_morphisms(b):
            yield f, g, C.compose(g, f)
        yield f, C.identities[b], f


# ---------------------------------------------------------------------------
# simplicial replacement

def simplicial_replacement(D: Diagram, max_degree: int, coeff: AbGroup | None = None,
                           normalized: bool = True) -> ChainComplex:
    """Total complex of the bar construction of a chain-complex diagram.

    Bidegree (p, q) is the sum over composable strings c0 -> .. -> cp of
    D(c0)_q; the horizontal differential is the alternating sum of the string
    faces, with the first arrow applied to the value.  Built to total degree
    max_degree + 1 and returned as a truncated complex.
    """
    if D.kind != "chain":
        raise HocolimError("simplicial replacement needs a diagram of chain complexes")
    C = D.shape
    top = max_degree + 1
    for v in D.values:
        if v.truncated and v.top < top:
            raise HocolimError(f"diagram value truncated at {v.top}, need degree {top}")
    if coeff is None:
        coeff = D.values[0].coeff if D.values else Z
    chains = C.chains(top, normalized)
    index = [{ch: i for i, ch in enumerate(level)} for level in chains]
    # offsets[n][(p, chain_idx)] -> start row in total degree n
    offsets: list[dict] = []
    ranks = []
    for n in range(top + 1):
        off, pos = {}, 0
        for p in range(min(n, len(chains) - 1) + 1):
            q = n - p
            for i, (c0, _) in enumerate(chains[p]):
                r = D.values[c0].rank(q)
                if r:
                    off[(p, i)] = pos
                    pos += r
        offsets.append(off)
        ranks.append(pos)

    def face(p: int, ch, j: int):
        """j-th face of a string; returns (new string, matrix or None, ok)."""
        c0, ms = ch
        if j == 0:
            m = ms[0]
            return (C.morphisms[m][1], ms[1:]), m
        if j == p:
            return (c0, ms[:-1]), None
        comp = C.compose(ms[j], ms[j - 1])
        if normalized and C.is_identity(comp):
            return None, None
        return (c0, ms[:j - 1] + (comp,) + ms[j + 1:]), None

    cache: dict = {}

    def coo(key, make):
        if key not in cache:
            m = make().tocoo()
            cache[key] = (m.row.astype(np.int64), m.col.astype(np.int64), m.data.astype(np.int64))
        return cache[key]

    def arange(r):
        if ("a", r) not in cache:
            cache[("a", r)] = np.arange(r, dtype=np.int64)
        return cache[("a", r)]

    def ones(r):
        if ("1", r) not in cache:
            cache[("1", r)] = np.ones(r, dtype=np.int64)
        return cache[("1", r)]

    bds = [zero_matrix(0, ranks[0])]
    for n in range(1, top + 1):
        rows, cols, vals = [], [], []
        for (p, i), start in offsets[n].items():
            ch = chains[p][i]
            c0 = ch[0]
            q = n - p
            val = D.values[c0]
            r = val.rank(q)
            # vertical part, sign (-1)^p
            if q >= 1 and (p, i) in offsets[n - 1]:
                mr, mc, md = coo(("d", c0, q), lambda: val.boundary(q))
                base = offsets[n - 1][(p, i)]
                rows.append(mr + base)
                cols.append(mc + start)
                vals.append(md if p % 2 == 0 else -md)
            # horizontal part
            for j in range(p + 1) if p else ():
                new, mor = face(p, ch, j)
                if new is None:
                    continue
                key = (p - 1, index[p - 1][new])
                if key not in offsets[n - 1]:
                    continue
                base = offsets[n - 1][key]
                sign = -1 if j % 2 else 1
                if mor is None:
                    ar = arange(r)
                    rows.append(ar + base)
                    cols.append(ar + start)
                    vals.append(ones(r) if sign == 1 else -ones(r))
                else:
                    mr, mc, md = coo(("f", mor, q), lambda: D.arrows[mor].matrix(q))
                    rows.append(mr + base)
                    cols.append(mc + start)
                    vals.append(md if sign == 1 else -md)
        if rows:
            mat = sp.csc_matrix((np.concatenate(vals).astype(np.int64),
                                 (np.concatenate(rows), np.concatenate(cols))),
                                shape=(ranks[n - 1], ranks[n]))
            mat.sum_duplicates()
            mat.eliminate_zeros()
        else:
            mat = zero_matrix(ranks[n - 1], ranks[n])
        bds.append(mat)
    total = ChainComplex(tuple(ranks), tuple(bds), coeff, truncated=True)
    total.validate()
    return total


def hocolim_homology(D: Diagram, A: AbGroup, max_degree: int) -> list[AbGroup]:
    return homology(simplicial_replacement(D, max_degree, A), A, max_degree)


# ---------------------------------------------------------------------------
# disk systems

@dataclass(frozen=True)
class DiskSystem:
    """Vertex-disjoint collapsible pieces; component 0 holds the basepoint."""

    components: tuple[frozenset, ...]

    @property
    def union(self) -> frozenset:
        return frozenset().union(*self.components)

    def vertex_lists(self) -> list[list[int]]:
        return [sorted(s[0] for s in c if len(s) == 1) for c in self.components]


@dataclass(frozen=True, eq=False)
class DiskPoset:
    M: SimplicialComplex
    max_components: int
    family: str
    systems: tuple[DiskSystem, ...]
    category: FiniteCategory
    diagram: Diagram
    masks: tuple[int, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.systems)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "max_components": self.max_components,
            "objects": [s.vertex_lists() for s in self.systems],
            "morphisms": [[a, b] for a, b in self.category.morphisms if a != b],
        }


def _vertices_of(piece) -> frozenset:
    return frozenset(v for s in piece for v in s)


def connected_pieces(M: SimplicialComplex, limit: int = DEFAULT_PIECE_LIMIT) -> list[frozenset]:
    """All connected subcomplexes of M, grown from single vertices.

    A step adds either a simplex whose proper faces are present, or a new
    vertex together with an edge to the current piece.  Every connected
    subcomplex is reached, since a spanning tree brings in the vertices and
    the remaining simplices follow in order of dimension.
    """
    sims = M.simplices
    facets = {s: [f for f in itertools.combinations(s, len(s) - 1)] for s in sims if len(s) > 1}
    edges_at: dict[int, list[Simplex]] = {v: [] for v in M.vertices}
    for e in M.simplices_of_dim(1):
        edges_at[e[0]].append(e)
        edges_at[e[1]].append(e)
    seen = set()
    stack = [frozenset([(v,)]) for v in M.vertices]
    seen.update(stack)
    while stack:
        P = stack.pop()
        verts = _vertices_of(P)
        new = []
        for s in sims:
            if len(s) > 1 and s not in P and all(f in P for f in facets[s]):
                new.append(P | {s})
        for v in verts:
            for e in edges_at[v]:
                w = e[0] if e[1] == v else e[1]
                if w not in verts:
                    new.append(P | {e, (w,)})
        for Q in new:
            if Q not in seen:
                seen.add(Q)
                if len(seen) > limit:
                    raise DiskPosetTooLarge(f"more than {limit} connected subcomplexes")
                stack.append(Q)
    return sorted(seen, key=_piece_key)


def _piece_key(piece) -> tuple:
    return tuple(_canon_key(s) for s in sorted(piece, key=_canon_key))


def _pieces(M: SimplicialComplex, family: str, limit: int) -> list[frozenset]:
    if family == "simplex":
        return sorted({closure([s]) for s in M.simplices}, key=_piece_key)
    if family == "collapsible":
        return [P for P in connected_pieces(M, limit) if is_collapsible(P)]
    raise HocolimError(f"unknown disk family {family!r}")


def disk_poset(M: SimplicialComplex, max_components: int, family: str = "collapsible",
               piece_limit: int = DEFAULT_PIECE_LIMIT) -> DiskPoset:
    """Poset of disk systems in M with at most ``max_components`` pieces.

    ``family`` chooses the pieces: "collapsible" takes every connected
    subcomplex certified collapsible by the greedy search; "simplex" takes
    closed simplices only, which stays small on larger triangulations.
    """
    if max_components < 1:
        raise HocolimError("max_components must be at least 1")
    if M.basepoint is None:
        raise HocolimError("the ambient complex must be pointed")
    if connected_components(M).count != 1:
        raise HocolimError("the ambient complex must be connected")
    bp = M.basepoint
    pieces = _pieces(M, family, piece_limit)
    pverts = [_vertices_of(P) for P in pieces]
    based = [i for i, vs in enumerate(pverts) if bp in vs]
    free = [i for i, vs in enumerate(pverts) if bp not in vs]
    systems: dict[frozenset, DiskSystem] = {}

    def extend(comps: list[int], used: frozenset, start: int):
        sys_ = DiskSystem(tuple(pieces[i] for i in comps))
        systems.setdefault(sys_.union, sys_)
        if len(comps) == max_components:
            return
        for t in range(start, len(free)):
            j = free[t]
            if not (pverts[j] & used):
                extend(comps + [j], used | pverts[j], t + 1)

    for i in based:
        extend([i], pverts[i], 0)
    ordered = sorted(systems.values(), key=lambda s: _piece_key(s.union))
    sindex = M.index
    masks = []
    for s in ordered:
        m = 0
        for x in s.union:
            m |= 1 << sindex[x]
        masks.append(m)
    C = FiniteCategory.from_poset(tuple(range(len(ordered))),
                                  lambda a, b: masks[a] & ~masks[b] == 0)
    values = tuple(M.subcomplex(s.union) for s in ordered)
    D = Diagram(C, values, tuple(None for _ in C.morphisms), "complex")
    return DiskPoset(M, max_components, family, tuple(ordered), C, D, tuple(masks))


def auto_disk_poset(M: SimplicialComplex, max_components: int, family: str = "auto",
                    piece_limit: int = DEFAULT_PIECE_LIMIT,
                    object_limit: int = DEFAULT_AUTO_OBJECT_LIMIT) -> DiskPoset:
    """``family="auto"`` uses collapsible pieces unless that poset is larger
    than ``object_limit`` objects, then closed simplices."""
    if family != "auto":
        return disk_poset(M, max_components, family, piece_limit)
    try:
        P = disk_poset(M, max_components, "collapsible", piece_limit)
    except DiskPosetTooLarge:
        return disk_poset(M, max_components, "simplex")
    if P.size > object_limit:
        return disk_poset(M, max_components, "simplex")
    return P


# ---------------------------------------------------------------------------
# contractibility certificates

def _order_complex(C: FiniteCategory, objs: Sequence[int]) -> SimplicialComplex:
    local = {o: i for i, o in enumerate(objs)}
    ups = {o: [p for p in objs if p != o and C.leq(o, p)] for o in objs}
    sims = []

    def grow(chain):
        sims.append(tuple(sorted(local[o] for o in chain)))
        for p in ups[chain[-1]]:
            grow(chain + [p])

    for o in objs:
        grow([o])
    return SimplicialComplex(len(objs), 0 if objs else None, tuple(sims))


def certify_contractible(C: FiniteCategory, objs: Sequence[int],
                         nerve_limit: int = DEFAULT_NERVE_LIMIT) -> tuple[str, str]:
    """Verdict on the nerve of the full subposet on ``objs``, with a reason."""
    if not C.is_poset:
        raise HocolimError("contractibility certificates need a poset")
    objs = list(objs)
    if not objs:
        return REFUTED, "empty"
    for o in objs:
        if all(C.leq(o, p) or p == o for p in objs):
            return CERTIFIED, f"minimum object {o}"
    for o in objs:
        if all(C.leq(p, o) or p == o for p in objs):
            return CERTIFIED, f"maximum object {o}"
    if len(objs) > nerve_limit:
        return INCONCLUSIVE, f"{len(objs)} objects, nerve not built"
    N = _order_complex(C, objs)
    if is_collapsible(N):
        return CERTIFIED, "nerve collapses"
    if connected_components(N).count > 1:
        return REFUTED, "nerve disconnected"
    if any(not g.is_trivial for g in homology(reduced_chains(N), Z)):
        return REFUTED, "nerve has nonzero reduced homology"
    return INCONCLUSIVE, "greedy collapse stuck"


@dataclass(frozen=True)
class CheckReport:
    """Per-item verdicts with reasons; keys are simplices or object ids."""

    verdicts: tuple[tuple[object, str, str], ...]

    def count(self, verdict: str) -> int:
        return sum(1 for _, v, _ in self.verdicts if v == verdict)

    @property
    def certified(self) -> bool:
        return all(v == CERTIFIED for _, v, _ in self.verdicts)

    @property
    def refuted(self) -> bool:
        return any(v == REFUTED for _, v, _ in self.verdicts)

    def first(self, verdict: str):
        for key, v, why in self.verdicts:
            if v == verdict:
                return key, why
        return None

    def summary(self) -> dict:
        return {CERTIFIED: self.count(CERTIFIED), REFUTED: self.count(REFUTED),
                INCONCLUSIVE: self.count(INCONCLUSIVE)}

    @property
    def overall(self) -> str:
        if self.refuted:
            return REFUTED
        return CERTIFIED if self.certified else INCONCLUSIVE


def svk_check(C: FiniteCategory, chi: Diagram, M: SimplicialComplex,
              nerve_limit: int = DEFAULT_NERVE_LIMIT) -> CheckReport:
    """For each simplex x of M, certify the subposet of objects containing x.

    A minimum or maximum object certifies directly; otherwise the order
    complex is collapsed greedily.  A disconnected nerve or one with nonzero
    reduced homology refutes.  Anything else is inconclusive and calls for a
    finer subdivision.
    """
    out = []
    for x in M.simplices:
        objs = [i for i, U in enumerate(chi.values) if x in U]
        verdict, why = certify_contractible(C, objs, nerve_limit)
        out.append((x, verdict, why))
    return CheckReport(tuple(out))


# ---------------------------------------------------------------------------
# chain-level diagrams

def _component_order(U: SimplicialComplex) -> tuple[list[int], dict[int, int]]:
    """Non-basepoint components of U and the label -> position map."""
    part = connected_components(U)
    others = [c for c in range(part.count) if c != part.basepoint_component]
    return others, {c: i for i, c in enumerate(others)}


def h0_diagram(D: Diagram, A: AbGroup = Z) -> Diagram:
    """U -> free module on the non-basepoint components of U, in degree 0."""
    if D.kind != "complex":
        raise HocolimError("h0_diagram needs a diagram of complexes")
    C = D.shape
    vals, info = [], []
    for U in D.values:
        if U.basepoint is None:
            raise HocolimError("diagram values must be pointed")
        part = connected_components(U)
        others, pos = _component_order(U)
        vals.append(ChainComplex((len(others),), (zero_matrix(0, len(others)),), A))
        info.append((part, others, pos))
    arrows = []
    for m, (a, b) in enumerate(C.morphisms):
        pa, oa, _ = info[a]
        pb, _, posb = info[b]
        phi = D.vertex_map(m)
        rows, cols = [], []
        for j, c in enumerate(oa):
            v = pa.members(c)[0]
            tc = pb.labels[phi(v)]
            if tc != pb.basepoint_component:
                rows.append(posb[tc])
                cols.append(j)
        mat = sp.csc_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)),
                            shape=(vals[b].rank(0), vals[a].rank(0)))
        arrows.append(ChainMap(vals[a], vals[b], (mat,)))
    return Diagram(C, tuple(vals), tuple(arrows), "chain")


def _reduced_basis(U: SimplicialComplex, top: int) -> list[list[Simplex]]:
    out = []
    for k in range(top + 1):
        ss = list(U.simplices_of_dim(k))
        if k == 0:
            ss = [s for s in ss if s[0] != U.basepoint]
        out.append(ss)
    return out


def _perm_sign(seq) -> int:
    sign, seq = 1, list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def chains_diagram(D: Diagram, A: AbGroup, top: int) -> Diagram:
    """U -> reduced simplicial chains of U through degree ``top``."""
    if D.kind != "complex":
        raise HocolimError("chains_diagram needs a diagram of complexes")
    C = D.shape
    vals = [reduced_chains(U, top).with_coeff(A) for U in D.values]
    bases = [_reduced_basis(U, top) for U in D.values]
    lookups = [[{s: i for i, s in enumerate(level)} for level in b] for b in bases]
    arrows = []
    for m, (a, b) in enumerate(C.morphisms):
        phi = D.vertex_map(m)
        mats = []
        for k in range(vals[a].top + 1):
            rows, cols, data = [], [], []
            for j, s in enumerate(bases[a][k]):
                img = [phi(v) for v in s]
                if len(set(img)) < len(img):
                    continue
                t = tuple(sorted(img))
                r = lookups[b][k].get(t) if k < len(lookups[b]) else None
                if r is None:
                    continue   # the basepoint vertex is zero in reduced chains
                rows.append(r)
                cols.append(j)
                data.append(_perm_sign(img))
            mats.append(sp.csc_matrix((np.array(data, dtype=np.int64), (rows, cols)),
                                      shape=(vals[b].rank(k), vals[a].rank(k))))
        f = ChainMap(vals[a], vals[b], tuple(mats))
        arrows.append(f)
    return Diagram(C, tuple(vals), tuple(arrows), "chain")


def space_hocolim_chains(D: Diagram, A: AbGroup, max_degree: int) -> ChainComplex:
    """Simplicial replacement of U -> reduced chains of U."""
    return simplicial_replacement(chains_diagram(D, A, max_degree + 1), max_degree, A)


def discrete_diagram(D: Diagram) -> Diagram:
    """U -> its set of components as a 0-dimensional complex."""
    C = D.shape
    vals, parts = [], []
    for U in D.values:
        part = connected_components(U)
        vals.append(SimplicialComplex(part.count, part.basepoint_component,
                                      tuple((i,) for i in range(part.count))))
        parts.append(part)
    arrows = []
    for m, (a, b) in enumerate(C.morphisms):
        phi = D.vertex_map(m)
        pa, pb = parts[a], parts[b]
        arrows.append({c: pb.labels[phi(pa.members(c)[0])] for c in range(pa.count)})
    return Diagram(C, tuple(vals), tuple(arrows), "complex")


def check_pieces_collapsible(D: Diagram) -> None:
    for i, U in enumerate(D.values):
        for comp in component_subcomplexes(U):
            if not is_collapsible(comp):
                raise HocolimError(f"object {i} has a component that is not certified collapsible")


@dataclass(frozen=True)
class ComparisonReport:
    chain_groups: tuple[AbGroup, ...]
    discrete_groups: tuple[AbGroup, ...]
    space_groups: tuple[AbGroup, ...]

    @property
    def agree(self) -> bool:
        return self.chain_groups == self.discrete_groups

    @property
    def space_agree(self) -> bool:
        return self.chain_groups == self.space_groups

    def witness(self):
        for k, (a, b) in enumerate(zip(self.chain_groups, self.discrete_groups)):
            if a != b:
                return k, a, b
        return None


def compare_chain_vs_space(D: Diagram, A: AbGroup, max_degree: int) -> ComparisonReport:
    """Chain-level hocolim of H~_0 against the space-level hocolim of pi_0.

    The space side is also computed on the actual values, which agrees when
    every component is contractible.
    """
    check_pieces_collapsible(D)
    chain = hocolim_homology(h0_diagram(D, A), A, max_degree)
    disc = homology(space_hocolim_chains(discrete_diagram(D), A, max_degree), A, max_degree)
    space = homology(space_hocolim_chains(D, A, max_degree), A, max_degree)
    return ComparisonReport(tuple(chain), tuple(disc), tuple(space))


# ---------------------------------------------------------------------------
# the star category and the <= 2 component restriction

@dataclass(frozen=True, eq=False)
class StarSetup:
    """An m-piece disk system in a path and the categories over it.

    ``M`` is the path on 2m vertices, ``pieces[i]`` the edge (2i, 2i+1).
    ``ambient`` is the poset of disk systems with at most two pieces lying in
    the union of all pieces; ``star`` has the source piece 0 and one arrow to
    each union of piece 0 with piece i.  ``embedding[s]`` is the ambient
    object of star object s.
    """

    m: int
    M: SimplicialComplex
    star: FiniteCategory
    star_diagram: Diagram
    ambient: FiniteCategory
    ambient_diagram: Diagram
    embedding: tuple[int, ...]


def star_setup(m: int) -> StarSetup:
    if m < 1:
        raise HocolimError("m must be at least 1")
    M = SimplicialComplex(2 * m, 0, tuple(closure([(v, v + 1) for v in range(2 * m - 1)])))
    pieces = [closure([(2 * i, 2 * i + 1)]) for i in range(m)]
    full = frozenset().union(*pieces)
    P = disk_poset(M, 2)
    inside = [i for i, U in enumerate(P.diagram.values) if U.simplex_set <= full]
    amb = FiniteCategory.from_poset(tuple(inside), lambda a, b: P.category.leq(inside[a], inside[b]))
    amb_vals = tuple(P.diagram.values[i] for i in inside)
    amb_diag = Diagram(amb, amb_vals, tuple(None for _ in amb.morphisms), "complex")
    star_sets = [pieces[0]] + [pieces[0] | pieces[i] for i in range(1, m)]
    pos = {U.simplex_set: j for j, U in enumerate(amb_vals)}
    embedding = tuple(pos[s] for s in star_sets)
    star = FiniteCategory.from_poset(tuple(range(m)), lambda a, b: a == 0 and b != 0)
    star_vals = tuple(M.subcomplex(s) for s in star_sets)
    star_diag = Diagram(star, star_vals, tuple(None for _ in star.morphisms), "complex")
    return StarSetup(m, M, star, star_diag, amb, amb_diag, embedding)


@dataclass(frozen=True)
class KanReport:
    m: int
    groups: tuple[AbGroup, ...]
    expected: tuple[AbGroup, ...]

    @property
    def passed(self) -> bool:
        return self.groups == self.expected


def kan_extension_check(m: int, A: AbGroup = Z, max_degree: int = 2) -> KanReport:
    """Hocolim of H~_0 over the star category against H~_0 of m pieces."""
    if m < 1:
        raise HocolimError("m must be at least 1")
    S = star_setup(m)
    S.star_diagram.validate()
    groups = hocolim_homology(h0_diagram(S.star_diagram, A), A, max_degree)
    h0_full = AbGroup.from_cyclic(A.rank * (m - 1), list(A.torsion) * (m - 1))
    expected = (h0_full,) + (AbGroup(),) * max_degree
    return KanReport(m, tuple(groups), expected)


def finality_check(C_sub: FiniteCategory, C: FiniteCategory, embedding: Sequence[int],
                   nerve_limit: int = DEFAULT_NERVE_LIMIT) -> CheckReport:
    """Per object x of C, certify the undercategory x / embedding.

    For posets the undercategory is the subposet of C_sub on the objects s
    with x <= embedding(s).
    """
    if not (C_sub.is_poset and C.is_poset):
        raise HocolimError("finality checks are implemented for posets")
    emb = list(embedding)
    if len(set(emb)) != len(emb):
        raise HocolimError("embedding is not injective on objects")
    for a, b in C_sub.morphisms:
        if a != b and not C.leq(emb[a], emb[b]):
            raise HocolimError("embedding does not preserve the order")
    out = []
    for x in range(C.size):
        objs = [s for s in range(C_sub.size) if emb[s] == x or C.leq(x, emb[s])]
        verdict, why = certify_contractible(C_sub, objs, nerve_limit)
        out.append((x, verdict, why))
    return CheckReport(tuple(out))


# ---------------------------------------------------------------------------
# end to end

@dataclass(frozen=True)
class DoldThomReport:
    coeff: AbGroup
    max_degree: int
    family: str
    subdivisions: int
    poset_size: int
    homotopy: tuple[AbGroup, ...]
    hocolim: tuple[AbGroup, ...]
    reduced: tuple[AbGroup, ...]
    normalized_quasi_iso: bool
    svk: CheckReport

    @property
    def agree(self) -> bool:
        return self.homotopy == self.hocolim == self.reduced and self.normalized_quasi_iso

    def mismatch(self):
        """(degree, name, group, name, group) for the first disagreement."""
        names = (("homotopy", self.homotopy), ("hocolim", self.hocolim), ("reduced", self.reduced))
        for k in range(self.max_degree + 1):
            for (n1, g1), (n2, g2) in itertools.combinations(names, 2):
                if g1[k] != g2[k]:
                    return k, n1, g1[k], n2, g2[k]
        return None


def dold_thom_verify(M: SimplicialComplex, A: AbGroup, max_degree: int, family: str = "auto",
                     subdivisions: int = 0, piece_limit: int = DEFAULT_PIECE_LIMIT) -> DoldThomReport:
    """Compute pi_*(A[M]/A[*]), the H~_0 hocolim over disk systems with at
    most two pieces, and H~_*(M; A), and check the normalized chains of the
    simplicial model against reduced simplicial chains."""
    if M.basepoint is None:
        raise HocolimError("the complex must be pointed")
    if connected_components(M).count != 1:
        raise HocolimError("the complex must be connected")
    X = to_simplicial_set(M, max_degree + 1)
    S = free_module(X, A)
    pi = homotopy_groups(S, max_degree)
    red = homology(reduced_chains(M), A, max_degree)
    qi = bool(is_quasi_iso(_normalized_to_reduced(S, M, max_degree), max_degree, A))

    K = M
    for _ in range(subdivisions):
        K = barycentric_subdivision(K)
    P = auto_disk_poset(K, 2, family, piece_limit)
    svk = svk_check(P.category, P.diagram, K)
    hc = hocolim_homology(h0_diagram(P.diagram, A), A, max_degree)
    return DoldThomReport(A, max_degree, P.family, subdivisions, P.size, tuple(pi), tuple(hc),
                          tuple(red), qi, svk)


def _normalized_to_reduced(S, M: SimplicialComplex, max_degree: int) -> ChainMap:
    """Nondegenerate simplices of the ordered model are the simplices of M."""
    N = normalized_chains(S, max_degree)
    R = reduced_chains(M, max_degree + 1).with_coeff(S.coeff)
    X = S.X
    basis = _reduced_basis(M, max_degree + 1)
    mats = []
    for k in range(max_degree + 2):
        nd = np.nonzero(X.nondegenerate[k])[0]
        if k == 0:
            nd = nd[nd != X.basepoint]
        look = {s: i for i, s in enumerate(basis[k])} if k < len(basis) else {}
        rows, cols = [], []
        for j, x in enumerate(nd):
            rows.append(look[tuple(X.labels[k][x])])
            cols.append(j)
        mats.append(sp.csc_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)),
                                  shape=(R.rank(k), N.rank(k))))
    f = ChainMap(N, R, tuple(mats))
    f.validate()
    return f
