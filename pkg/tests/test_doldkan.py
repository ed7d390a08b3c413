import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strategies import connected_complexes
from stp.abgroup import AbGroup, Z, cyclic, direct_sum
from stp.complexes import ComplexError, SimplicialMap, build_complex, complex_map, product, to_simplicial_set
from stp.doldkan import free_module, homotopy_groups, induced_map, moore_complex, normalized_chains
from stp.homalg import homology, induced_on_homology, reduced_chains
from stp.library import get_space

coeffs = st.sampled_from([Z, cyclic(2), cyclic(3), cyclic(4), AbGroup.parse("Z + Z/2")])


def model(name_or_K, bound=3):
    K = get_space(name_or_K) if isinstance(name_or_K, str) else name_or_K
    return to_simplicial_set(K, bound)


def test_generator_ranks_circle():
    S = free_module(model("circle3"))
    S.validate()
    # every simplex except the basepoint's degeneracies
    assert [S.rank(k) for k in range(4)] == [2, 5, 8, 11]


@pytest.mark.parametrize("name, A, groups", [
    ("point", Z, ["0", "0"]),
    ("circle3", Z, ["0", "Z", "0"]),
    ("sphere_min", Z, ["0", "0", "Z"]),
    ("rp2_6", cyclic(2), ["0", "Z/2", "Z/2"]),
    ("rp2_6", Z, ["0", "Z/2", "0"]),
])
def test_homotopy_examples(name, A, groups):
    S = free_module(model(name), A)
    assert homotopy_groups(S, len(groups) - 1) == [AbGroup.parse(g) for g in groups]


def test_moore_complex_is_a_complex():
    S = free_module(model("torus9"))
    C = moore_complex(S, 2)
    C.validate()
    assert C.truncated


@given(connected_complexes(max_vertices=5, max_simplices=4), coeffs)
@settings(max_examples=20)
def test_normalization_theorem(K, A):
    S = free_module(to_simplicial_set(K, 3), A)
    moore = homology(moore_complex(S, 2), A, 2)
    norm = homology(normalized_chains(S, 2), A, 2)
    red = homology(reduced_chains(K), A, 2) + [AbGroup()] * 3
    assert moore == norm == red[:3]


@given(connected_complexes(max_vertices=5, max_simplices=4),
       st.sampled_from([Z, cyclic(2), cyclic(3)]), st.sampled_from([cyclic(2), cyclic(5), Z]))
@settings(max_examples=15)
def test_additivity(K, A, B):
    X = to_simplicial_set(K, 3)
    both = homotopy_groups(free_module(X, direct_sum(A, B)), 2)
    split = [direct_sum(a, b) for a, b in zip(homotopy_groups(free_module(X, A), 2),
                                               homotopy_groups(free_module(X, B), 2))]
    assert both == split


def test_functoriality():
    # a degree one map from the hexagon onto the triangle, then into the sphere
    hexagon, tri, sph = model("circle6"), model("circle3"), model("sphere_min")
    f = complex_map(hexagon, tri, [0, 1, 1, 2, 2, 2])
    g = complex_map(tri, sph, [0, 1, 2])
    Fa, Fb = induced_map(f), induced_map(g)
    Fab = induced_map(f.compose(g), source=Fa.source, target=Fb.target)
    Fa.validate()
    Fb.validate()
    for k in range(4):
        assert (Fa.compose(Fb).matrices[k] != Fab.matrices[k]).nnz == 0
    assert abs(int(induced_on_homology(Fa.moore_map(1), 1)[0, 0])) == 1


def test_double_cover_multiplies_by_two():
    # hexagon labelled so that v -> v // 2 is monotone on every edge
    hexagon = build_complex([(0, 2), (2, 4), (1, 4), (1, 3), (3, 5), (0, 5)])
    f = complex_map(model(hexagon), model("circle3"), [v // 2 for v in range(6)])
    F = induced_map(f)
    assert abs(int(induced_on_homology(F.moore_map(1), 1)[0, 0])) == 2
    assert abs(int(induced_on_homology(F.normalized_map(1), 1)[0, 0])) == 2


def test_unpointed_map_rejected():
    X = model("circle3")
    f = SimplicialMap(X, X, tuple(np.roll(np.arange(c), 1) for c in X.counts))
    with pytest.raises(ComplexError):
        induced_map(f)


def _homotopy(X, Y, I, f_verts, g_verts):
    """H(x, t) = f(x_i) where t_i = 0 and g(x_i) where t_i = 1."""
    XI = product(X, I)
    yidx = [{lab: i for i, lab in enumerate(lv)} for lv in Y.labels]
    levels = []
    for k in range(XI.bound + 1):
        arr = np.empty(XI.counts[k], dtype=np.int64)
        for x, xs in enumerate(X.labels[k]):
            for t, ts in enumerate(I.labels[k]):
                img = tuple(g_verts[v] if s else f_verts[v] for v, s in zip(xs, ts))
                arr[x * I.counts[k] + t] = yidx[k][img]
        levels.append(arr)
    return XI, SimplicialMap(XI, Y, tuple(levels))


def test_homotopic_maps_agree_on_moore_homology():
    # the hexagon maps into the hexagon with the triangle 345 filled in; g
    # pushes vertex 4 to 5 across that triangle
    X = model("circle6")
    Y = model(build_complex([(0, 1), (1, 2), (2, 3), (3, 4, 5), (0, 5)]))
    I = model(build_complex([(0, 1)]))
    fv, gv = list(range(6)), [0, 1, 2, 3, 5, 5]
    XI, H = _homotopy(X, Y, I, fv, gv)
    H.validate(pointed=True)
    f, g = complex_map(X, Y, fv), complex_map(X, Y, gv)
    for end, h in ((0, f), (1, g)):
        const = [I.labels[k].index((end,) * (k + 1)) for k in range(X.bound + 1)]
        incl = [np.arange(X.counts[k]) * I.counts[k] + const[k] for k in range(X.bound + 1)]
        assert all(np.array_equal(H.levels[k][incl[k]], h.levels[k]) for k in range(X.bound + 1))
    S, T = free_module(X), free_module(Y)
    mf = induced_on_homology(induced_map(f, source=S, target=T).moore_map(1), 1)
    mg = induced_on_homology(induced_map(g, source=S, target=T).moore_map(1), 1)
    assert mf.shape == (1, 1) and (mf == mg).all() and abs(int(mf[0, 0])) == 1
