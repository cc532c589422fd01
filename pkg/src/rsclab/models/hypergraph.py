"""Random hypergraphs and their lower and upper simplicial envelopes."""

from __future__ import annotations

from math import comb

import numpy as np

from rsclab.combinatorics import all_subsets, bernoulli_slots, lex_unrank
from rsclab.complex import SimplicialComplex, facets_of, format_simplices, parse_simplices, unique_rows
from rsclab.models.inhomogeneous import ProbabilityTensor
from rsclab.rng import as_generator


class Hypergraph:
    """Hyperedges of any size on vertices ``0..n-1``; all vertices are present.

    ``edges[k]`` holds the hyperedges with ``k + 1`` vertices, sorted and
    distinct. No closure under subsets is implied.
    """

    def __init__(self, n: int, edges: dict[int, np.ndarray] | None = None):
        self.n = int(n)
        self.edges: dict[int, np.ndarray] = {}
        for k, rows in (edges or {}).items():
            k = int(k)
            rows = np.sort(np.asarray(rows, dtype=np.int64).reshape(-1, k + 1), axis=1)
            if k < 1 or rows.shape[0] == 0:
                continue
            if rows.min() < 0 or rows.max() >= self.n:
                raise ValueError(f"hyperedge vertex out of range for n={self.n}")
            if np.any(np.diff(rows, axis=1) == 0):
                raise ValueError("hyperedges must not repeat vertices")
            self.edges[k] = unique_rows(rows, self.n)

    @property
    def max_level(self) -> int:
        return max(self.edges, default=0)

    def level(self, k: int) -> np.ndarray:
        if k == 0:
            return np.arange(self.n, dtype=np.int64)[:, None]
        return self.edges.get(k, np.empty((0, k + 1), dtype=np.int64))

    def __len__(self) -> int:
        return self.n + sum(r.shape[0] for r in self.edges.values())

    def __iter__(self):
        for k in range(self.max_level + 1):
            for row in self.level(k):
                yield tuple(int(v) for v in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n == other.n and sorted(self) == sorted(other)

    def issubset(self, other) -> bool:
        """Containment as set systems; ``other`` may be a complex or hypergraph."""
        for k in range(1, self.max_level + 1):
            rows = self.level(k)
            if rows.shape[0] == 0:
                continue
            if isinstance(other, SimplicialComplex):
                if not other.contains_rows(k, rows).all():
                    return False
            elif not set(map(tuple, rows.tolist())) <= set(map(tuple, other.level(k).tolist())):
                return False
        return True

    @classmethod
    def from_complex(cls, X: SimplicialComplex) -> "Hypergraph":
        return cls(X.n, {k: X.level(k) for k in range(1, X.dim + 1)})

    def to_text(self) -> str:
        return format_simplices(self.n, self, header=f"n={self.n} closure=false")

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        n, _, rows = parse_simplices(text)
        by_dim: dict[int, list] = {}
        for r in rows:
            by_dim.setdefault(len(r) - 1, []).append(r)
        return cls(n, {k: np.array(v) for k, v in by_dim.items() if k >= 1})


def gen_hypergraph(n: int, probabilities, rng=None) -> Hypergraph:
    """Each subset slot present independently.

    ``probabilities`` is either a per-level list (entry ``k - 1`` for the
    (k+1)-vertex slots) or a :class:`ProbabilityTensor`.
    """
    g = as_generator(rng)
    edges: dict[int, np.ndarray] = {}
    if isinstance(probabilities, ProbabilityTensor):
        for k in range(1, min(probabilities.max_level, n - 1) + 1):
            slots = all_subsets(n, k + 1)
            p = probabilities.values(k, slots)
            edges[k] = slots[g.random(slots.shape[0]) < p]
    else:
        for k, p in enumerate(probabilities, start=1):
            if k > n - 1:
                break
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
            edges[k] = lex_unrank(bernoulli_slots(comb(n, k + 1), float(p), g), n, k + 1)
    return Hypergraph(n, edges)


def lower_complex(H: Hypergraph) -> SimplicialComplex:
    """Largest complex contained in ``H``: a set survives iff it and all its
    faces are hyperedges, checked level by level upward."""
    levels: dict[int, np.ndarray] = {}
    X = SimplicialComplex.from_levels(H.n, levels, closed=True)
    for k in range(1, H.max_level + 1):
        rows = H.level(k)
        if rows.shape[0] == 0:
            break
        if k >= 2:
            faces = facets_of(rows).reshape(-1, k)
            ok = X.contains_rows(k - 1, faces).reshape(rows.shape[0], k + 1).all(axis=1)
            rows = rows[ok]
        if rows.shape[0] == 0:
            break
        levels[k] = rows
        X = SimplicialComplex.from_levels(H.n, levels, closed=True)
    return X


def upper_complex(H: Hypergraph) -> SimplicialComplex:
    """Smallest complex containing ``H``: its downward closure."""
    return SimplicialComplex.from_levels(H.n, dict(H.edges))
