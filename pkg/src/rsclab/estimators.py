"""scikit-learn style adapters.

Only the parts of the estimator protocol that fit naturally are provided:
the configuration models ``fit`` multipliers to an observed complex (or to a
degree vector) and ``sample`` from the fitted model; the topology stages are
stateless transformers usable inside a :class:`sklearn.pipeline.Pipeline`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from rsclab import homology, stats
from rsclab.complex import SimplicialComplex, degree_sequence, vertex_degrees
from rsclab.models import geometric, inhomogeneous
from rsclab.rng import as_generator


class _ConfigurationBase(BaseEstimator):
    per_vertex = False

    def __init__(self, d: int = 1, tol: float = 1e-8, max_iter: int = 10_000):
        self.d = d
        self.tol = tol
        self.max_iter = max_iter

    def _targets(self, X, n):
        if isinstance(X, SimplicialComplex):
            deg = vertex_degrees(X, self.d) if self.per_vertex else degree_sequence(X, self.d)
            return X.n, np.asarray(deg, dtype=float)
        if n is None:
            raise ValueError("pass n when fitting to a raw degree vector")
        return int(n), np.asarray(X, dtype=float)

    def fit(self, X, y=None, n: int | None = None):
        """``X`` is an observed complex or a target degree vector."""
        self.n_, targets = self._targets(X, n)
        solver = inhomogeneous.solve_zscm_multipliers if self.per_vertex else inhomogeneous.solve_scm_multipliers
        self.solution_ = solver(self.n_, self.d, targets, tol=self.tol, max_iter=self.max_iter)
        self.multipliers_ = self.solution_.multipliers
        self.residual_ = self.solution_.residual
        self.targets_ = targets
        return self

    def expected_degrees(self) -> np.ndarray:
        check_is_fitted(self, "solution_")
        return inhomogeneous.expected_degrees(self.solution_)

    def sample(self, n_samples: int = 1, random_state=None) -> list[SimplicialComplex]:
        check_is_fitted(self, "solution_")
        g = as_generator(random_state)
        gen = inhomogeneous.gen_zscm_d if self.per_vertex else inhomogeneous.gen_scm_d
        return [gen(self.n_, self.d, rng=g, solution=self.solution_) for _ in range(int(n_samples))]

    def score(self, X, y=None) -> float:
        """Log-probability of ``X`` under the fitted model."""
        check_is_fitted(self, "solution_")
        family = "zscm" if self.per_vertex else "scm"
        return stats.log_probability(X, {"family": family, "n": self.n_, "d": self.d, "solution": self.solution_})


class SoftConfigurationModel(_ConfigurationBase):
    """Maximum-entropy complex with expected (d-1)-face degrees."""


class ZSoftConfigurationModel(_ConfigurationBase):
    """Maximum-entropy complex with expected vertex d-degrees."""

    per_vertex = True


class PersistenceTransformer(TransformerMixin, BaseEstimator):
    """Point clouds to persistence diagrams of their Cech or Rips filtration."""

    def __init__(self, complex: str = "cech", r: float = 0.2, max_dim: int = 1, periodic: bool = True):
        self.complex = complex
        self.r = r
        self.max_dim = max_dim
        self.periodic = periodic

    def fit(self, X, y=None):
        if self.complex not in ("cech", "rips"):
            raise ValueError(f"complex must be 'cech' or 'rips', got {self.complex!r}")
        return self

    def transform(self, X) -> list[homology.PersistenceDiagram]:
        build = geometric.cech_complex if self.complex == "cech" else geometric.rips_complex
        out = []
        for pts in X:
            F = build(np.asarray(pts, dtype=float), self.r, self.max_dim + 1, filtration=True, periodic=self.periodic)
            out.append(homology.persistent_homology(F, self.max_dim))
        return out


class BettiVectorizer(TransformerMixin, BaseEstimator):
    """Complexes (or diagrams at a fixed ``radius``) to rows of Betti numbers."""

    def __init__(self, max_dim: int = 1, radius: float | None = None):
        self.max_dim = max_dim
        self.radius = radius

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        rows = []
        for item in X:
            if isinstance(item, homology.PersistenceDiagram):
                if self.radius is None:
                    raise ValueError("diagrams need a radius to read Betti numbers at")
                rows.append([homology.persistent_betti(item, k, self.radius, self.radius) for k in range(self.max_dim + 1)])
            else:
                b = homology.betti_numbers(item, self.max_dim)
                rows.append(list(b) + [0] * (self.max_dim + 1 - len(b)))
        return np.asarray(rows, dtype=np.int64).reshape(-1, self.max_dim + 1)
