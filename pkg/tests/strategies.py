"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from stp.complexes import build_complex


def _dense(tops):
    verts = sorted({v for s in tops for v in s})
    relabel = {v: i for i, v in enumerate(verts)}
    return [tuple(relabel[v] for v in s) for s in tops]


@st.composite
def complexes(draw, max_vertices=6, max_dim=2, max_simplices=6):
    n = draw(st.integers(1, max_vertices))
    tops = draw(st.lists(
        st.sets(st.integers(0, n - 1), min_size=1, max_size=max_dim + 1).map(lambda s: tuple(sorted(s))),
        min_size=1, max_size=max_simplices))
    return build_complex(_dense(tops))


@st.composite
def connected_complexes(draw, max_vertices=6, max_dim=2, max_simplices=6):
    """A random complex made connected by a path through all vertices."""
    K = draw(complexes(max_vertices, max_dim, max_simplices))
    tops = list(K.maximal_simplices()) + [(v, v + 1) for v in range(K.vertex_count - 1)]
    return build_complex(tops)
