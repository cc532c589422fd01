"""Statistical tests and threshold estimation for Monte Carlo experiments."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np
from scipy import stats


class InsufficientData(ValueError):
    pass


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * np.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return float(lo), float(hi)


def poisson_gof(samples: Sequence[int], mu: float, min_expected: float = 5.0) -> float:
    """Chi-square goodness of fit of integer samples against Poisson(mu).

    Bins ``0, 1, ...`` are merged from both tails until every bin expects at
    least ``min_expected`` observations.
    """
    if mu <= 0:
        raise ValueError("Poisson mean must be positive")
    x = np.asarray(samples, dtype=np.int64)
    if x.size < 2 * min_expected:
        raise InsufficientData(f"need at least {int(2 * min_expected)} samples, got {x.size}")
    if np.any(x < 0):
        return 0.0
    N = x.size
    top = int(max(x.max(), stats.poisson.ppf(1 - 1e-12, mu))) + 1
    probs = stats.poisson.pmf(np.arange(top), mu)
    probs[-1] += stats.poisson.sf(top - 1, mu)
    counts = np.bincount(np.minimum(x, top - 1), minlength=top).astype(float)
    exp_bins, obs_bins = [], []
    e_acc = o_acc = 0.0
    for e, o in zip(probs * N, counts):
        e_acc += e
        o_acc += o
        if e_acc >= min_expected:
            exp_bins.append(e_acc)
            obs_bins.append(o_acc)
            e_acc = o_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if exp_bins:
            exp_bins[-1] += e_acc
            obs_bins[-1] += o_acc
        else:
            exp_bins.append(e_acc)
            obs_bins.append(o_acc)
    if len(exp_bins) < 2:
        # a single bin carries no information beyond the sample size
        raise InsufficientData("too few samples for two bins of expected count >= 5")
    chi2 = float(np.sum((np.array(obs_bins) - np.array(exp_bins)) ** 2 / np.array(exp_bins)))
    return float(stats.chi2.sf(chi2, len(exp_bins) - 1))


@dataclass(frozen=True)
class NormalityReport:
    p_value: float
    skewness: float
    excess_kurtosis: float

    def __iter__(self):
        return iter((self.p_value, self.skewness, self.excess_kurtosis))


def normality_check(samples: Sequence[float], min_samples: int = 200) -> NormalityReport:
    """Kolmogorov-Smirnov test against the normal law with fitted moments."""
    x = np.asarray(samples, dtype=float)
    if x.size < min_samples:
        raise InsufficientData(f"need at least {min_samples} samples, got {x.size}")
    sd = x.std(ddof=1)
    if sd == 0:
        return NormalityReport(0.0, 0.0, 0.0)
    p = stats.kstest(x, "norm", args=(x.mean(), sd)).pvalue
    return NormalityReport(float(p), float(stats.skew(x)), float(stats.kurtosis(x)))


# ---------------------------------------------------------------------------
# thresholds


@dataclass
class ThresholdEstimate:
    value: float
    interval: tuple[float, float]
    monotone: bool
    bracketed: bool
    profile: list[tuple[float, float, int]] = field(default_factory=list)


def threshold_estimate(
    event_probability: Callable[[float, int], tuple[int, int]],
    lo: float,
    hi: float,
    budget: int = 4000,
    trials_per_step: int = 200,
    tol: float | None = None,
) -> ThresholdEstimate:
    """Bisection for the parameter where an increasing event probability crosses 1/2.

    ``event_probability(x, step)`` returns ``(successes, trials)`` at ``x``;
    ``step`` indexes the evaluation so callers can derive distinct seeds.
    Both ends are evaluated first: ``bracketed`` says whether they straddle
    1/2. The interval is the final bracket; the profile is flagged
    non-monotone when two evaluated points are inverted beyond their Wilson
    intervals.
    """
    profile: list[tuple[float, float, int]] = []
    step = 0

    def probe(x: float) -> float:
        nonlocal step
        s, t = event_probability(x, step)
        step += 1
        profile.append((x, s / t, t))
        return s / t

    a, b = float(lo), float(hi)
    bracketed = probe(a) < 0.5 <= probe(b)
    spent = sum(t for _, _, t in profile)
    while spent + trials_per_step <= budget:
        mid = 0.5 * (a + b)
        if probe(mid) < 0.5:
            a = mid
        else:
            b = mid
        spent += profile[-1][2]
        if tol is not None and b - a < tol:
            break
    monotone = True
    pts = sorted(profile)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            lo_i, _ = wilson_interval(round(pts[i][1] * pts[i][2]), pts[i][2])
            _, hi_j = wilson_interval(round(pts[j][1] * pts[j][2]), pts[j][2])
            if lo_i > hi_j:
                monotone = False
    return ThresholdEstimate(0.5 * (a + b), (a, b), monotone, bracketed, profile)


# ---------------------------------------------------------------------------
# multi-parameter domains


@dataclass(frozen=True)
class DominanceResult:
    """``domain`` is the dominant homology degree (None on a boundary);
    ``exponents[k]`` is the decay exponent of the k-face probability, so a
    k-face has expected count of order ``n ** (k + 1 - exponents[k])``."""

    domain: int | None
    exponents: tuple[float, ...]
    total_margin: float | None
    min_margin: float


def dominance_domain(alpha: Sequence[float]) -> DominanceResult:
    """Locate ``alpha`` among the dominance domains of the multi-parameter complex.

    With level probabilities ``n ** -alpha[i]``, ``exponents[k] = sum_i C(k, i)
    alpha_i`` for ``k = 0..d``. The domain is the k with ``exponents[k] < 1 <
    exponents[k+1]`` (or ``exponents[d] < 1`` for k = d); ``total_margin`` sums
    ``1 - exponents[i]`` over ``i = 1..k`` and ``min_margin`` is the smallest
    ``1 - exponents[i]``. Returns ``domain=None`` when some exponent equals 1.
    """
    a = np.asarray(alpha, dtype=float)
    if a.ndim != 1 or a.size == 0 or np.any(a <= 0):
        raise ValueError("alpha must be a nonempty vector of positive entries")
    d = a.size
    exps = tuple(float(sum(comb(k, i) * a[i - 1] for i in range(1, d + 1))) for k in range(d + 1))
    min_margin = float(min(1.0 - v for v in exps))
    if any(np.isclose(v, 1.0, rtol=0, atol=1e-12) for v in exps[1:]):
        return DominanceResult(None, exps, None, min_margin)
    k = max(j for j in range(d + 1) if exps[j] < 1.0)
    total = float(sum(1.0 - exps[i] for i in range(1, k + 1)))
    return DominanceResult(k, exps, total, min_margin)
