"""Built-in triangulations, each checked by Euler characteristic and homology."""

from __future__ import annotations

import re
from functools import lru_cache

from .abgroup import AbGroup, Z, cyclic
from .complexes import ComplexError, SimplicialComplex, build_complex
from .homalg import homology, reduced_chains

NAMES = ("point", "s0", "circle3", "circle6", "sphere_min", "sphere_oct", "torus9", "rp2_6",
         "klein", "wedge_circles(k)")


def _torus9() -> list[tuple[int, ...]]:
    tris = []
    for i in range(3):
        for j in range(3):
            v = lambda a, b: 3 * (a % 3) + (b % 3)
            tris.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            tris.append((v(i, j), v(i, j + 1), v(i + 1, j + 1)))
    return tris


def _octahedron() -> list[tuple[int, ...]]:
    # antipodal pairs (0,1), (2,3), (4,5)
    return [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]


def _wedge_circles(k: int) -> list[tuple[int, ...]]:
    # circle i uses the basepoint 0 and vertices 2i+1, 2i+2
    out = []
    for i in range(k):
        a, b = 2 * i + 1, 2 * i + 2
        out += [(0, a), (a, b), (0, b)]
    return out


_SPACES = {
    "point": ([(0,)], 1),
    "s0": ([(0,), (1,)], 2),
    "circle3": ([(0, 1), (1, 2), (0, 2)], 0),
    "circle6": ([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)], 0),
    "sphere_min": ([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], 2),
    "sphere_oct": (_octahedron(), 2),
    "torus9": (_torus9(), 0),
    "rp2_6": ([(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5), (1, 2, 4), (2, 3, 5),
               (1, 3, 4), (2, 4, 5), (1, 3, 5)], 1),
    "klein": ([(2, 6, 7), (2, 4, 6), (0, 2, 4), (0, 3, 4), (2, 3, 7), (0, 1, 3), (3, 5, 6),
               (4, 5, 7), (1, 4, 6), (2, 3, 5), (5, 6, 7), (1, 2, 5), (0, 1, 2), (1, 3, 6),
               (1, 4, 5), (3, 4, 7)], 0),
}

# reduced integral homology in degrees 0.. dim
_EXPECTED = {
    "point": [AbGroup()],
    "s0": [Z],
    "circle3": [AbGroup(), Z],
    "circle6": [AbGroup(), Z],
    "sphere_min": [AbGroup(), AbGroup(), Z],
    "sphere_oct": [AbGroup(), AbGroup(), Z],
    "torus9": [AbGroup(), AbGroup(2), Z],
    "rp2_6": [AbGroup(), cyclic(2), AbGroup()],
    "klein": [AbGroup(), Z + cyclic(2), AbGroup()],
}

_WEDGE = re.compile(r"^wedge_circles(?:\((\d+)\)|_?(\d+))$")


def _check(name: str, K: SimplicialComplex, chi: int, expected: list[AbGroup]) -> SimplicialComplex:
    K.validate()
    if K.euler_characteristic() != chi:
        raise ComplexError(f"library space {name}: Euler characteristic {K.euler_characteristic()}, "
                           f"expected {chi}")
    if homology(reduced_chains(K), Z) != expected:
        raise ComplexError(f"library space {name} fails its homology self-check")
    return K


@lru_cache(maxsize=None)
def get_space(name: str) -> SimplicialComplex:
    """Look up a built-in complex by name.

    ``wedge_circles(k)`` (also spelled ``wedge_circles_k``) takes k >= 1.
    """
    m = _WEDGE.match(name.strip())
    if m:
        k = int(m.group(1) or m.group(2))
        if k < 1:
            raise ComplexError("wedge_circles needs k >= 1")
        return _check(name, build_complex(_wedge_circles(k)), 1 - k, [AbGroup(), AbGroup(k)])
    if name not in _SPACES:
        raise ComplexError(f"unknown space {name!r}; known: {', '.join(NAMES)}")
    tops, chi = _SPACES[name]
    return _check(name, build_complex(tops), chi, _EXPECTED[name])


def is_library_name(name: str) -> bool:
    return name in _SPACES or bool(_WEDGE.match(name.strip()))


def self_check() -> None:
    """Validate every fixed library entry and a few wedges."""
    for name in _SPACES:
        get_space(name)
    for k in (1, 2, 3):
        get_space(f"wedge_circles({k})")
