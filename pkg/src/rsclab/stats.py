"""Sufficient statistics, exact log-probabilities and entropies of the
canonical and microcanonical model families.

Log-probabilities replay the level-wise construction: every realized shell
contributes ``log p`` when filled and ``log(1 - p)`` when empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, lgamma, log

import numpy as np

from rsclab.combinatorics import all_subsets
from rsclab.complex import SimplicialComplex, degree_sequence, shell_candidates, vertex_degrees
from rsclab.models import inhomogeneous
from rsclab.models.registry import ModelSpec
from rsclab.rng import as_generator

GRAPH_FAMILIES = ("gnp", "gnm", "gnphat")
SKELETON_FAMILIES = ("lm", "ydnm")
SHELL_FAMILIES = ("multi", "multi_micro", "xphat")
DEGREE_FAMILIES = ("scm", "cm", "cm_d", "hscm")
VERTEX_FAMILIES = ("zscm", "zcm")


class OutsideSpace(ValueError):
    """The complex violates the family's space predicate."""


class ImpossibleComplex(ValueError):
    """The complex cannot be produced by the model's construction."""


@dataclass(frozen=True)
class SufficientStats:
    """``levels[k-1] = (shells, simplexes)`` for level k, plus degree data."""

    family: str
    levels: tuple[tuple[int, int], ...]
    degrees: tuple[int, ...] | None = None

    def __post_init__(self):
        for c, s in self.levels:
            if s > c:
                raise ValueError("simplex count exceeds shell count")

    def as_dict(self) -> dict:
        out = {"family": self.family, "levels": [list(x) for x in self.levels]}
        if self.degrees is not None:
            out["degrees"] = list(self.degrees)
        return out


def _complete_skeleton(X: SimplicialComplex, d: int) -> bool:
    return all(X.count(k) == comb(X.n, k + 1) for k in range(1, d))


def _level_count(X: SimplicialComplex, family: str, d: int | None) -> int:
    if d is None:
        raise ValueError(f"family {family!r} needs the dimension d")
    return int(d)


def sufficient_statistics(X: SimplicialComplex, family: str, d: int | None = None, levels: int | None = None) -> SufficientStats:
    """Statistic vector of ``X`` for a model family.

    Graph families report the edge count, Linial-Meshulam families the
    d-simplex count, multi-parameter families shell/simplex counts per level,
    configuration families the (d-1)-face degrees and Z-families the vertex
    d-degrees.
    """
    n = X.n
    if family in GRAPH_FAMILIES:
        if X.dim > 1:
            raise OutsideSpace("graph families need a complex of dimension at most 1")
        return SufficientStats(family, ((comb(n, 2), X.count(1)),))
    if family in SKELETON_FAMILIES or family in DEGREE_FAMILIES:
        d = _level_count(X, family, d)
        if not _complete_skeleton(X, d):
            raise OutsideSpace(f"the (d-1)-skeleton is incomplete for d={d}")
        if X.dim > d:
            raise OutsideSpace(f"complex has simplexes above dimension {d}")
        stats = ((comb(n, d + 1), X.count(d)),)
        if family in SKELETON_FAMILIES:
            return SufficientStats(family, stats)
        return SufficientStats(family, stats, tuple(int(v) for v in degree_sequence(X, d)))
    if family in SHELL_FAMILIES:
        top = levels if levels is not None else max(X.dim, 1)
        out = []
        for k in range(1, top + 1):
            cand = shell_candidates(X, k)
            out.append((int(cand.shape[0]), X.count(k)))
        return SufficientStats(family, tuple(out))
    if family in VERTEX_FAMILIES:
        d = _level_count(X, family, d)
        if not inhomogeneous.in_z_space(X, d):
            raise OutsideSpace(f"some simplex below dimension {d} lies in no {d}-simplex")
        return SufficientStats(
            family, ((comb(n, d + 1), X.count(d)),), tuple(int(v) for v in vertex_degrees(X, d))
        )
    raise ValueError(f"unknown family {family!r}")


def _bernoulli_logmass(p: np.ndarray, present: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    present = np.asarray(present, dtype=bool)
    if np.any(present & (p <= 0.0)) or np.any(~present & (p >= 1.0)):
        return -np.inf
    on = p[present]
    off = p[~present]
    return float(np.sum(np.log(on[on < 1.0])) + np.sum(np.log1p(-off[off > 0.0])))


def _const_logmass(filled: int, empty: int, p: float) -> float:
    if (filled and p <= 0.0) or (empty and p >= 1.0):
        return -np.inf
    out = 0.0
    if filled:
        out += filled * log(p)
    if empty:
        out += empty * np.log1p(-p)
    return float(out)


def _log_binom(a: int, b: int) -> float:
    return lgamma(a + 1) - lgamma(b + 1) - lgamma(a - b + 1)


def _micro_log_count(n: int, targets) -> float:
    """log of the number of complexes with the given shell and simplex counts.

    Closed form only when every shell count is forced by the level below
    (that level empty or complete); otherwise the count depends on how the
    simplexes overlap and no formula is offered.
    """
    for k in range(1, len(targets)):
        c_prev, s_prev = targets[k - 1]
        forced = s_prev == 0 or (c_prev == comb(n, k + 1) and s_prev == c_prev)
        if not forced:
            raise ValueError(
                f"level {k + 1} shell count depends on which level-{k} simplexes are present; "
                "the microcanonical count has no closed form here"
            )
    return float(sum(_log_binom(c, s) for c, s in targets))


def _slot_mask(X: SimplicialComplex, d: int) -> np.ndarray:
    return X.contains_rows(d, all_subsets(X.n, d + 1))


def log_probability(X: SimplicialComplex, spec: ModelSpec | dict) -> float:
    """Natural log of the probability of ``X`` under the model.

    ``spec`` is a :class:`ModelSpec` or a dict with a ``family`` key. Extra
    families accepted here: ``gnphat`` (``P``: edge-probability matrix or
    :class:`ProbabilityTensor`) and ``xphat`` (``P``: tensor). ``scm`` and
    ``zscm`` take a solved ``solution`` or ``targets``.
    """
    if isinstance(spec, ModelSpec):
        family, p = spec.family, spec.resolved()
    else:
        p = dict(spec)
        family = p.pop("family")
    n = X.n
    if "n" in p and int(p["n"]) != n:
        raise ImpossibleComplex(f"complex has {n} vertices, model has {p['n']}")
    if family == "gnp":
        sufficient_statistics(X, family)
        M = X.count(1)
        return _const_logmass(M, comb(n, 2) - M, float(p["p"]))
    if family == "gnm":
        sufficient_statistics(X, family)
        return -_log_binom(comb(n, 2), int(p["M"])) if X.count(1) == int(p["M"]) else -np.inf
    if family == "gnphat":
        sufficient_statistics(X, family)
        pairs = all_subsets(n, 2)
        P = p["P"]
        if isinstance(P, inhomogeneous.ProbabilityTensor):
            probs = P.values(1, pairs)
        else:
            probs = np.asarray(P, dtype=float)[pairs[:, 0], pairs[:, 1]]
        return _bernoulli_logmass(probs, X.contains_rows(1, pairs))
    if family in ("lm", "ydnm"):
        d = int(p["d"])
        sufficient_statistics(X, family, d)
        M = X.count(d)
        if family == "ydnm":
            return -_log_binom(comb(n, d + 1), int(p["M"])) if M == int(p["M"]) else -np.inf
        return _const_logmass(M, comb(n, d + 1) - M, float(p["p"]))
    if family in ("multi", "xphat"):
        if family == "multi":
            pvec = list(p["pvec"])
            top = max(len(pvec), X.dim)
        else:
            P = p["P"]
            top = max(P.max_level, X.dim)
        total = 0.0
        for k in range(1, top + 1):
            cand = shell_candidates(X, k)
            filled = X.contains_rows(k, cand)
            if family == "multi":
                pk = pvec[k - 1] if k <= len(pvec) else 0.0
                total += _const_logmass(int(filled.sum()), int((~filled).sum()), pk)
            else:
                total += _bernoulli_logmass(P.values(k, cand), filled)
        return float(total)
    if family == "multi_micro":
        stats = sufficient_statistics(X, family, levels=len(p["targets"]))
        targets = tuple((int(c), int(s)) for c, s in p["targets"])
        if stats.levels != targets or X.dim > len(targets):
            return -np.inf
        return -_micro_log_count(n, targets)
    if family in ("scm", "zscm"):
        d = int(p["d"])
        sufficient_statistics(X, family, d)
        sol = p.get("solution")
        if sol is None:
            solver = inhomogeneous.solve_scm_multipliers if family == "scm" else inhomogeneous.solve_zscm_multipliers
            sol = solver(n, d, p["targets"])
        return _bernoulli_logmass(sol.probabilities(), _slot_mask(X, d))
    raise ValueError(f"log-probability not available for family {family!r}")


def sufficient_statistic_identity_check(X: SimplicialComplex, Y: SimplicialComplex, spec, family: str | None = None, d: int | None = None) -> bool:
    """False only when equal statistics come with different log-probabilities."""
    if isinstance(spec, ModelSpec):
        fam = family or spec.family
        params = spec.resolved()
    else:
        fam = family or spec["family"]
        params = spec
    d = d if d is not None else params.get("d")
    levels = len(params["pvec"]) if "pvec" in params else None
    sx = sufficient_statistics(X, fam, d, levels)
    sy = sufficient_statistics(Y, fam, d, levels)
    if sx.levels != sy.levels or sx.degrees != sy.degrees:
        return True
    a, b = log_probability(X, spec), log_probability(Y, spec)
    if np.isinf(a) or np.isinf(b):
        return a == b
    return abs(a - b) <= 1e-12


def _binary_entropy(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    q = p[(p > 0) & (p < 1)]
    return float(-np.sum(q * np.log(q) + (1 - q) * np.log1p(-q)))


def entropy(spec: ModelSpec | dict, samples: int = 2000, rng=None) -> tuple[float, float]:
    """Entropy in nats and its standard error (zero for closed forms).

    Single-level models use binary-entropy sums; multi-level models average
    ``-log P`` over samples.
    """
    if isinstance(spec, ModelSpec):
        family, p = spec.family, spec.resolved()
        ms = spec
    else:
        p = dict(spec)
        family = p.pop("family")
        ms = None
    n = int(p["n"])
    if family == "gnp":
        return _binary_entropy(np.full(comb(n, 2), float(p["p"]))), 0.0
    if family == "gnm":
        return _log_binom(comb(n, 2), int(p["M"])), 0.0
    if family == "lm":
        d = int(p["d"])
        return _binary_entropy(np.full(comb(n, d + 1), float(p["p"]))), 0.0
    if family == "ydnm":
        d = int(p["d"])
        return _log_binom(comb(n, d + 1), int(p["M"])), 0.0
    if family in ("scm", "zscm") and "solution" in p:
        return _binary_entropy(p["solution"].probabilities()), 0.0
    if family == "multi_micro":
        return _micro_log_count(n, [(int(c), int(s)) for c, s in p["targets"]]), 0.0
    if ms is None:
        ms = ModelSpec(family, {k: v for k, v in p.items()})
    g = as_generator(rng)
    vals = np.array([-log_probability(ms.generate(g).complex, ms) for _ in range(int(samples))])
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(vals.size))
