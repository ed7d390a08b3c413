import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strategies import complexes, connected_complexes
from stp.complexes import (
    ComplexError, barycentric_subdivision, build_complex, complex_map, connected_components,
    is_collapsible, parse_complex, permutation_action, product, product_power, quotient_by_group,
    to_simplicial_set,
)
from stp.library import get_space
from stp.symprod import symmetric_power


def test_closure_and_f_vector():
    K = build_complex([(0, 1, 2), (2, 3)])
    assert K.f_vector() == (4, 4, 1)
    assert K.euler_characteristic() == 1
    assert sorted(K.maximal_simplices()) == [(0, 1, 2), (2, 3)]


@pytest.mark.parametrize("tops", [[], [()], [(0, 0)], [(0, 2)], [(-1, 0)]])
def test_build_rejects(tops):
    with pytest.raises(ComplexError):
        build_complex(tops)


def test_basepoint_range():
    with pytest.raises(ComplexError):
        build_complex([(0, 1)], basepoint=5)


@given(complexes())
def test_json_round_trip(K):
    import json
    L = parse_complex(json.loads(K.to_json()))
    assert L.simplex_set == K.simplex_set and L.basepoint == K.basepoint


def test_parse_checks_vertex_count():
    with pytest.raises(ComplexError):
        parse_complex({"vertices": 4, "maximal_simplices": [[0, 1]]})
    with pytest.raises(ComplexError):
        parse_complex({"maximal_simplices": [[0, 1]]})


def test_components():
    K = build_complex([(0, 1), (2, 3), (4,)], basepoint=3)
    part = connected_components(K)
    assert part.count == 3
    assert part.members(part.basepoint_component) == (2, 3)


@pytest.mark.parametrize("tops, expected", [
    ([(0, 1, 2)], True),
    ([(0, 1), (1, 2)], True),
    ([(0, 1), (1, 2), (0, 2)], False),
    ([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], False),
    ([(0,)], True),
    ([(0,), (1,)], False),
])
def test_collapsibility_examples(tops, expected):
    assert bool(is_collapsible(build_complex(tops))) is expected


@given(complexes(max_dim=1))
def test_graph_collapsible_iff_tree(K):
    # a graph collapses to a point exactly when it is a tree
    part = connected_components(K)
    tree = part.count == 1 and K.f_vector()[0] - (K.f_vector() + (0,))[1] == 1
    assert bool(is_collapsible(K)) is tree


@given(complexes(max_vertices=5, max_simplices=3))
@settings(max_examples=20)
def test_subdivision_preserves_euler_characteristic(K):
    B = barycentric_subdivision(K)
    B.validate()
    assert B.euler_characteristic() == K.euler_characteristic()
    assert B.f_vector()[0] == len(K.simplices)


@given(complexes(max_vertices=5, max_simplices=4))
@settings(max_examples=25)
def test_ordered_simplicial_set(K):
    X = to_simplicial_set(K, 3)
    X.validate()
    assert X.nondegenerate_counts()[: K.dim + 1] == K.f_vector()
    assert X.euler_characteristic() == K.euler_characteristic()


def test_simplicial_set_counts_circle():
    X = to_simplicial_set(get_space("circle3"), 3)
    # each vertex gives one sequence per level, each edge gives k
    assert X.counts == (3, 6, 9, 12)
    assert X.nondegenerate_counts() == (3, 3, 0, 0)


def test_product_counts_and_validity():
    X = to_simplicial_set(build_complex([(0, 1)]), 3)
    P = product(X, X)
    P.validate()
    assert P.counts == tuple(c * c for c in X.counts)
    # the square triangulates into two 2-simplices
    assert P.nondegenerate_counts() == (4, 5, 2, 0)
    assert P.euler_characteristic() == 1


def test_complex_map_rejects_non_monotone():
    X = to_simplicial_set(build_complex([(0, 1)]), 2)
    with pytest.raises(ComplexError):
        complex_map(X, X, [1, 0])


def test_quotient_equals_symmetric_power():
    # SP^2 built from sorted pairs matches the orbit construction
    for name, d in (("circle3", 2), ("point", 3)):
        X = to_simplicial_set(get_space(name), 2)
        Q = quotient_by_group(product_power(X, d, 2), permutation_action(X, d, 2))
        S = symmetric_power(X, d, 2)
        Q.validate()
        assert Q.counts == S.counts
        assert Q.nondegenerate_counts() == S.nondegenerate_counts()
