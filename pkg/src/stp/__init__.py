"""Finite simplicial models for checking the Dold-Thom isomorphism.

Submodules:
    complexes  simplicial complexes and simplicial sets
    homalg     integer chain complexes, homology, quasi-isomorphisms
    doldkan    free simplicial modules, Moore and normalized chains
    symprod    labelled configurations and symmetric powers
    hocolim    disk posets, homotopy colimits and the pipeline checks
    library    named example spaces
    cli        the ``stp`` command
"""

from .abgroup import AbGroup, Z, cyclic
from .complexes import SimplicialComplex, SimplicialSet, build_complex, to_simplicial_set
from .homalg import ChainComplex, homology, reduced_chains

__version__ = "0.1.0"

__all__ = [
    "AbGroup", "Z", "cyclic", "SimplicialComplex", "SimplicialSet", "build_complex",
    "to_simplicial_set", "ChainComplex", "homology", "reduced_chains", "__version__",
]
