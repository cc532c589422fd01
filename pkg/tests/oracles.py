"""Independent brute-force references used by the test suite.

Nothing here imports the package under test; simplex sets are plain Python
tuples and ranks use integer bitmasks.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def closure(simplices) -> set[tuple[int, ...]]:
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


def complex_set(n: int, simplices) -> set[tuple[int, ...]]:
    return closure(simplices) | {(v,) for v in range(n)}


def gf2_rank(masks) -> int:
    basis: dict[int, int] = {}
    for x in masks:
        while x:
            hb = x.bit_length() - 1
            if hb in basis:
                x ^= basis[hb]
            else:
                basis[hb] = x
                break
    return len(basis)


def boundary_masks(faces_k, faces_km1) -> list[int]:
    index = {f: i for i, f in enumerate(sorted(faces_km1))}
    out = []
    for s in faces_k:
        m = 0
        for j in range(len(s)):
            m |= 1 << index[s[:j] + s[j + 1:]]
        out.append(m)
    return out


def betti(n: int, simplices, max_dim: int | None = None) -> list[int]:
    S = complex_set(n, simplices)
    by_dim: dict[int, list] = {}
    for s in S:
        by_dim.setdefault(len(s) - 1, []).append(s)
    top = max(by_dim) if by_dim else -1
    if max_dim is None:
        max_dim = top
    ranks = {}
    for k in range(1, top + 2):
        if k in by_dim and k - 1 in by_dim:
            ranks[k] = gf2_rank(boundary_masks(by_dim[k], by_dim[k - 1]))
        else:
            ranks[k] = 0
    return [len(by_dim.get(k, ())) - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in range(max_dim + 1)]


def random_simplices(rng: np.random.Generator, n: int, max_size: int = 4, count: int | None = None):
    if n < 2:
        return []
    count = int(rng.integers(0, 3 * n)) if count is None else count
    out = []
    for _ in range(count):
        size = int(rng.integers(2, min(max_size, n) + 1))
        out.append(tuple(sorted(rng.choice(n, size=size, replace=False).tolist())))
    return out


def union_find_merge_heights(n: int, weighted_edges) -> list[float]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    heights = []
    for w, (a, b) in sorted(weighted_edges):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            heights.append(w)
    return heights


def torus_distance(x, y) -> float:
    d = np.abs(np.asarray(x, float) - np.asarray(y, float))
    d = np.minimum(d, 1.0 - d)
    return float(np.sqrt(np.sum(d * d)))
