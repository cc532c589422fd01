"""Ranking of k-subsets in lexicographic order and Bernoulli slot sampling.

Slots are the ``C(n, k)`` potential simplexes of a level, numbered in the
lexicographic order produced by :func:`itertools.combinations`. Generators
draw slot numbers and unrank them, so their output is tied to this ordering.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

_INT64_MAX = np.iinfo(np.int64).max


@lru_cache(maxsize=256)
def binom_table(n: int, k: int) -> np.ndarray:
    """``C(c, k)`` for ``c = 0..n-1`` as read-only int64."""
    if comb(max(n - 1, 0), k) > _INT64_MAX:
        raise OverflowError(f"C({n - 1},{k}) does not fit in int64")
    out = np.array([comb(c, k) for c in range(n)], dtype=np.int64)
    out.setflags(write=False)
    return out


def lex_rank(rows: np.ndarray, n: int) -> np.ndarray:
    """Lexicographic ranks of sorted k-subsets given as rows of ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    m, k = rows.shape
    total = comb(n, k)
    if total > _INT64_MAX:
        raise OverflowError(f"C({n},{k}) does not fit in int64")
    # lex order on A is reversed colex order on the reflected set n-1-A
    b = (n - 1 - rows)[:, ::-1]
    colex = np.zeros(m, dtype=np.int64)
    for i in range(k):
        colex += binom_table(n, i + 1)[b[:, i]]
    return total - 1 - colex


def lex_unrank(ranks, n: int, k: int) -> np.ndarray:
    """Inverse of :func:`lex_rank`: rows of sorted k-subsets."""
    ranks = np.asarray(ranks, dtype=np.int64)
    total = comb(n, k)
    if ranks.size and (ranks.min() < 0 or ranks.max() >= total):
        raise ValueError("rank out of range")
    s = total - 1 - ranks
    b = np.empty((ranks.size, k), dtype=np.int64)
    for i in range(k, 1, -1):
        table = binom_table(n, i)
        c = np.searchsorted(table, s, side="right") - 1
        b[:, i - 1] = c
        s = s - table[c]
    if k:
        b[:, 0] = s  # C(c, 1) = c
    return (n - 1 - b)[:, ::-1].copy()


def all_subsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of ``range(n)`` in lexicographic order."""
    if k > n:
        return np.empty((0, k), dtype=np.int64)
    total = comb(n, k)
    if total <= 4_000_000:
        return lex_unrank(np.arange(total, dtype=np.int64), n, k)
    return np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def bernoulli_slots(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices in ``range(total)`` kept independently with probability ``p``.

    Uses geometric skipping along the slot order, so the cost is proportional
    to the number of kept slots rather than to ``total``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if total <= 0 or p == 0.0:
        return np.empty(0, dtype=np.int64)
    if p == 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    last = -1
    expected = total * p
    batch = int(expected + 6.0 * np.sqrt(expected * (1.0 - p)) + 16)
    while True:
        gaps = rng.geometric(p, size=batch).astype(np.int64)
        pos = last + np.cumsum(gaps)
        if pos[-1] >= total:
            chunks.append(pos[pos < total])
            break
        chunks.append(pos)
        last = int(pos[-1])
        batch = max(16, int((total - last) * p * 1.2) + 16)
    return np.concatenate(chunks)


def uniform_slots(total: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """A uniformly random m-subset of ``range(total)``, sorted."""
    if not 0 <= m <= total:
        raise ValueError(f"cannot choose {m} of {total} slots")
    if m == 0:
        return np.empty(0, dtype=np.int64)
    return np.sort(rng.choice(total, size=m, replace=False).astype(np.int64))
