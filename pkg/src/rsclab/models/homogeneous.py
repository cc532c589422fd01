"""Erdős–Rényi graphs and their homogeneous higher-dimensional relatives.

All generators draw slot numbers in lexicographic slot order and unrank them,
so output is a deterministic function of the random stream.
"""

from __future__ import annotations

from collections import Counter
from math import comb, lgamma
from typing import Sequence

import numpy as np

from rsclab.combinatorics import all_subsets, bernoulli_slots, lex_unrank, uniform_slots
from rsclab.complex import SimplicialComplex, shell_candidates
from rsclab.rng import as_generator

DEFAULT_REJECTION_BUDGET = 100_000


class RejectionError(RuntimeError):
    """Rejection sampler ran out of attempts; ``diagnostics`` says why."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


def complete_levels(n: int, top: int) -> dict[int, np.ndarray]:
    """Rows of the complete ``top``-skeleton, dimensions ``1..top``."""
    return {k: all_subsets(n, k + 1) for k in range(1, top + 1)}


def gen_gnp(n: int, p: float, rng=None) -> SimplicialComplex:
    g = as_generator(rng)
    slots = bernoulli_slots(comb(n, 2), _check_p(p), g)
    return SimplicialComplex.from_levels(n, {1: lex_unrank(slots, n, 2)}, closed=True)


def gen_gnm(n: int, M: int, rng=None) -> SimplicialComplex:
    total = comb(n, 2)
    if not 0 <= M <= total:
        raise ValueError(f"M={M} outside 0..{total}")
    g = as_generator(rng)
    slots = uniform_slots(total, int(M), g)
    return SimplicialComplex.from_levels(n, {1: lex_unrank(slots, n, 2)}, closed=True)


def _check_d(n: int, d: int) -> None:
    if not 1 <= d <= n - 1:
        raise ValueError(f"dimension {d} outside 1..{n - 1}")


def gen_linial_meshulam(n: int, d: int, p: float, rng=None) -> SimplicialComplex:
    """Complete (d-1)-skeleton plus each d-slot independently with probability p."""
    _check_d(n, d)
    g = as_generator(rng)
    levels = complete_levels(n, d - 1)
    slots = bernoulli_slots(comb(n, d + 1), _check_p(p), g)
    levels[d] = lex_unrank(slots, n, d + 1)
    return SimplicialComplex.from_levels(n, levels, closed=True)


def gen_ydnm(n: int, d: int, M: int, rng=None) -> SimplicialComplex:
    """Complete (d-1)-skeleton plus a uniform M-subset of d-slots."""
    _check_d(n, d)
    total = comb(n, d + 1)
    if not 0 <= M <= total:
        raise ValueError(f"M={M} outside 0..{total}")
    g = as_generator(rng)
    levels = complete_levels(n, d - 1)
    levels[d] = lex_unrank(uniform_slots(total, int(M), g), n, d + 1)
    return SimplicialComplex.from_levels(n, levels, closed=True)


def _fill(cand: np.ndarray, p: float, g: np.random.Generator) -> np.ndarray:
    return cand[bernoulli_slots(cand.shape[0], p, g)]


def gen_multiparameter(n: int, pvec: Sequence[float], max_dim: int | None = None, rng=None) -> SimplicialComplex:
    """Fill k-shells level by level, each with probability ``pvec[k-1]``.

    ``pvec[0]`` is the edge probability; levels beyond ``len(pvec)`` get
    probability 0.
    """
    pvec = [_check_p(p) for p in pvec]
    if max_dim is None:
        max_dim = len(pvec)
    g = as_generator(rng)
    levels: dict[int, np.ndarray] = {}
    X = SimplicialComplex.from_levels(n, levels, closed=True)
    for k in range(1, max_dim + 1):
        p = pvec[k - 1] if k <= len(pvec) else 0.0
        cand = shell_candidates(X, k)
        rows = _fill(cand, p, g)
        if rows.shape[0] == 0:
            break
        levels[k] = rows
        X = SimplicialComplex.from_levels(n, levels, closed=True)
    return X


def gen_multiparameter_micro(
    n: int,
    targets: Sequence[tuple[int, int]],
    rng=None,
    budget: int = DEFAULT_REJECTION_BUDGET,
) -> SimplicialComplex:
    """Uniform complex with prescribed shell and simplex counts per level.

    ``targets[k-1] = (shells, simplexes)`` for level k. Each level picks the
    simplexes uniformly among the realized shells; the whole sample is
    rejected when a realized shell count misses its target.
    """
    targets = [(int(c), int(s)) for c, s in targets]
    if not targets:
        return SimplicialComplex(n)
    if targets[0][0] != comb(n, 2):
        raise ValueError(f"level-1 shell count must be C(n,2) = {comb(n, 2)}")
    for k, (c, s) in enumerate(targets, start=1):
        if not 0 <= s <= c:
            raise ValueError(f"level {k}: need 0 <= simplexes <= shells, got ({c}, {s})")
    g = as_generator(rng)
    realized: dict[int, Counter] = {}
    for _ in range(int(budget)):
        levels: dict[int, np.ndarray] = {}
        X = SimplicialComplex.from_levels(n, levels, closed=True)
        ok = True
        for k, (c, s) in enumerate(targets, start=1):
            cand = shell_candidates(X, k)
            if cand.shape[0] != c:
                realized.setdefault(k, Counter())[cand.shape[0]] += 1
                ok = False
                break
            rows = cand[uniform_slots(c, s, g)]
            if rows.shape[0]:
                levels[k] = rows
                X = SimplicialComplex.from_levels(n, levels, closed=True)
        if ok:
            return X
    diagnostics = {
        "attempts": int(budget),
        "targets": targets,
        "realized_shell_counts": {k: dict(sorted(v.items())) for k, v in realized.items()},
    }
    raise RejectionError(f"no sample matched the shell counts in {budget} attempts", diagnostics)


def microcanonical_log_count(targets: Sequence[tuple[int, int]]) -> float:
    """``log prod_k C(shells_k, simplexes_k)``: minus the log-mass of one sample."""
    return float(sum(lgamma(c + 1) - lgamma(s + 1) - lgamma(c - s + 1) for c, s in targets))

