"""Random simplicial complexes: generators, homology and Monte Carlo experiments."""

from rsclab.complex import (
    CapacityError,
    ComplexError,
    Filtration,
    SimplicialComplex,
    euler_characteristic,
    flag_completion,
    generalized_degree,
    k_shells,
)
from rsclab.homology import (
    BettiVector,
    PersistenceDiagram,
    betti_numbers,
    max_persistence_ratio,
    persistent_betti,
    persistent_homology,
    shadow,
    winding_rank,
)
from rsclab.rng import RandomSource

__version__ = "0.1.0"

__all__ = [
    "BettiVector",
    "CapacityError",
    "ComplexError",
    "Filtration",
    "PersistenceDiagram",
    "RandomSource",
    "SimplicialComplex",
    "betti_numbers",
    "euler_characteristic",
    "flag_completion",
    "generalized_degree",
    "k_shells",
    "max_persistence_ratio",
    "persistent_betti",
    "persistent_homology",
    "shadow",
    "winding_rank",
]
