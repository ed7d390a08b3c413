import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stp.abgroup import AbGroup, Z, cyclic
from stp.complexes import build_complex, to_simplicial_set
from stp.doldkan import induced_map
from stp.homalg import homology, induced_on_homology, is_quasi_iso, normalized_set_chains
from stp.library import get_space
from stp.symprod import (
    CellLimitError, ConfigurationError, PointedMap, SymGroup, cell_limit, check_injectivity,
    normalize, pushforward, stabilization_map, sym_finite, symmetric_power, symmetric_power_counts,
)

Z2, Z3 = cyclic(2), cyclic(3)


def test_normalize_examples():
    assert normalize({"*", "x"}, {"x": 0}, Z2) == normalize({"*"}, {}, Z2)
    empty = normalize({"*"}, {}, Z2)
    assert empty.labels == () and empty.support == frozenset({"*"})
    c = normalize({"*", "x", "y"}, {"x": 1, "y": 0}, Z2)
    assert c.as_dict() == {"x": (1,)} and c.support == frozenset({"*", "x"})


def test_normalize_drops_basepoint_label_and_reduces():
    c = normalize({"*", "x"}, {"*": 1, "x": 5}, Z3)
    assert c.as_dict() == {"x": (2,)}


@pytest.mark.parametrize("S, labels", [
    ({"x"}, {}),                       # no basepoint
    ({"*"}, {"x": 1}),                 # label outside the support
    ({"*", "x"}, {"x": (1, 1)}),       # wrong element length
])
def test_normalize_rejects(S, labels):
    with pytest.raises(ConfigurationError):
        normalize(S, labels, Z2)


@given(st.dictionaries(st.sampled_from("abcd"), st.integers(-5, 5)))
def test_normalize_idempotent(labels):
    c = normalize({"*", *labels}, labels, cyclic(4))
    assert normalize(c.support, c.as_dict(), cyclic(4)) == c


@pytest.mark.parametrize("I, A, order", [
    (("x", "y"), Z2, 4),
    ((), Z2, 1),
    (("x",), Z3, 3),
])
def test_sym_finite_examples(I, A, order):
    F = sym_finite(I, A)
    r = F.verify()
    assert r["order"] == order
    assert r["f_after_g"] and r["g_after_f"] and r["homomorphism"] and r["cardinality"]


def test_sym_finite_needs_finite_group():
    with pytest.raises(ConfigurationError):
        sym_finite(("x",), Z)


@pytest.mark.parametrize("A", [Z2, Z3, cyclic(4), AbGroup.parse("Z/2 + Z/2")])
def test_group_axioms_exhaustive(A):
    SymGroup(("x", "y"), A).check_axioms()


def test_basepoint_among_points_rejected():
    with pytest.raises(ConfigurationError):
        SymGroup(("*", "x"), Z2)


def test_pushforward_examples():
    G = SymGroup(("x", "y"), Z3)
    c = G.make({"x": 1, "y": 2})
    assert pushforward(PointedMap({"x": "x", "y": "y"}), c) == c
    merged = pushforward(PointedMap({"x": "z", "y": "z"}), c)
    assert merged.labels == ()                    # 1 + 2 = 0 in Z/3
    d = G.make({"x": 1, "y": 1})
    assert pushforward(PointedMap({"x": "z", "y": "z"}), d).as_dict() == {"z": (2,)}
    assert pushforward(PointedMap({"x": "*", "y": "y"}), d).as_dict() == {"y": (1,)}


def test_pushforward_functorial_exhaustive():
    src = SymGroup(("a", "b", "c"), Z3)
    maps1 = [dict(zip("abc", img)) for img in itertools.product(["p", "q", "*"], repeat=3)]
    maps2 = [dict(zip("pq", img)) for img in itertools.product(["u", "*"], repeat=2)]
    els = src.elements()
    for t1 in maps1[::4]:
        f = PointedMap(t1)
        for t2 in maps2:
            g = PointedMap(t2)
            gf = f.compose(g)
            for c in els:
                assert pushforward(gf, c) == pushforward(g, pushforward(f, c))


def test_pushforward_checks_basepoint():
    with pytest.raises(ConfigurationError):
        pushforward(PointedMap({"x": "*"}, "*", "o"), SymGroup(("x",), Z2).zero)


def test_injectivity_examples():
    G = SymGroup(("x", "y"), Z2)
    inc = check_injectivity(PointedMap({"x": "x", "y": "y"}), group=G)
    assert inc.injective and inc.exhaustive and inc.pairs_checked == 16
    assert check_injectivity(PointedMap({"x": "x", "y": "y"}), group=G).witness() is None
    col = check_injectivity(PointedMap({"x": "z", "y": "z"}), group=G)
    assert not col.injective
    collapse = PointedMap({"x": "z", "y": "z"})
    c, d = col.witness()
    assert c != d and pushforward(collapse, c) == pushforward(collapse, d)
    # {x:1, y:1} lands on z:1+1 = 0, the same as the empty configuration
    pair = (G.zero, G.make({"x": 1, "y": 1}))
    assert pair in col.collisions or pair[::-1] in col.collisions


def test_injectivity_sample_mode():
    G = SymGroup(("x", "y"), Z2)
    pairs = list(itertools.combinations(G.elements(), 2))
    rep = check_injectivity(PointedMap({"x": "a", "y": "b"}), sample=pairs)
    assert rep.injective and not rep.exhaustive and rep.pairs_checked == len(pairs)


def test_sp1_is_identity():
    X = to_simplicial_set(get_space("circle3"), 3)
    S = symmetric_power(X, 1)
    assert S.counts == X.counts
    assert all(np.array_equal(a, b) for a, b in zip(S.faces, X.faces))


def test_nondegenerate_counts_formula():
    X = to_simplicial_set(get_space("sphere_min"), 3)
    S = symmetric_power(X, 2)
    total, nondeg = symmetric_power_counts(X, 2, 3)
    assert list(S.counts) == total
    assert list(S.nondegenerate_counts()) == nondeg


@pytest.mark.parametrize("name, d, groups", [
    ("circle3", 2, ["Z", "Z", "0"]),
    ("point", 3, ["Z", "0"]),
])
def test_symmetric_power_homology(name, d, groups):
    top = len(groups) - 1
    S = symmetric_power(to_simplicial_set(get_space(name), top + 1), d)
    S.validate()
    got = homology(normalized_set_chains(S, reduced=False, top=top + 1), Z, top)
    assert got == [AbGroup.parse(g) for g in groups]


def test_cell_limit(monkeypatch):
    X = to_simplicial_set(get_space("sphere_min"), 3)
    with pytest.raises(CellLimitError):
        symmetric_power(X, 3, limit=100)
    monkeypatch.setenv("STP_CELL_LIMIT", "77")
    assert cell_limit() == 77
    assert cell_limit(5) == 5


def test_stabilization_point():
    X = to_simplicial_set(get_space("point"), 2)
    f = stabilization_map(X, 1)
    assert all(len(l) == 1 for l in f.levels)


def test_stabilization_circle_matrix():
    X = to_simplicial_set(get_space("circle3"), 2)
    cm = induced_map(stabilization_map(X, 1)).normalized_map(1)
    assert is_quasi_iso(cm, 1)
    m = induced_on_homology(cm, 1)
    assert m.shape == (1, 1) and abs(int(m[0, 0])) == 1


@pytest.mark.parametrize("d", [1, 2])
def test_stabilization_sphere(d):
    X = to_simplicial_set(get_space("sphere_min"), 3)
    cm = induced_map(stabilization_map(X, d)).normalized_map(2)
    assert is_quasi_iso(cm, 2)
