"""Per-trial observables, keyed by name.

Each observable maps a generated sample to a flat dict of numbers. Binary
events are reported as 0/1 so aggregation can attach Wilson intervals.
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from rsclab import homology
from rsclab.complex import k_shells
from rsclab.models.registry import Sample

#: above this many simplexes Betti numbers are restricted to dimensions 0 and 1
BETTI_CAP = 1_500_000

BINARY = {"connected", "has_cycle", "h_vanish", "h_nonzero", "giant_any", "giant_full"}


def _betti(sample: Sample, max_dim: int = 1, **_) -> dict[str, Any]:
    X = sample.complex
    out: dict[str, Any] = {}
    top = max_dim
    if len(X) > BETTI_CAP and max_dim > 1:
        top = 1
        out["downgraded"] = 1
    b = homology.betti_numbers(X, top)
    for k, v in enumerate(b):
        out[f"betti_{k}"] = v
    return out


def _connected(sample: Sample, **_) -> dict[str, Any]:
    return {"connected": int(homology.n_components(sample.complex) == 1)}


def _components(sample: Sample, **_) -> dict[str, Any]:
    return {"n_components": homology.n_components(sample.complex)}


def _has_cycle(sample: Sample, **_) -> dict[str, Any]:
    X = sample.complex
    return {"has_cycle": int(X.count(1) > X.n - homology.n_components(X))}


def _h_vanish(sample: Sample, k: int = 1, **_) -> dict[str, Any]:
    b = homology.betti_numbers(sample.complex, k)[k]
    return {"h_vanish": int(b == 0), f"betti_{k}": b}


def _h_nonzero(sample: Sample, k: int = 1, **_) -> dict[str, Any]:
    b = homology.betti_numbers(sample.complex, k)[k]
    return {"h_nonzero": int(b > 0), f"betti_{k}": b}


def _shadow(sample: Sample, d: int = 2, **_) -> dict[str, Any]:
    rep = homology.shadow(sample.complex, d)
    return {"shadow_size": len(rep), "shadow_density": rep.density}


def _winding(sample: Sample, **_) -> dict[str, Any]:
    if sample.points is None:
        raise ValueError("winding rank needs a point cloud")
    rank = homology.winding_rank(sample.complex, sample.points)
    d = sample.points.shape[1]
    return {"winding_rank": rank, "giant_any": int(rank >= 1), "giant_full": int(rank == d)}


def _diagram(sample: Sample, max_dim: int = 1, **_) -> dict[str, Any]:
    if sample.filtration is None:
        raise ValueError("diagram summaries need a filtration")
    D = homology.persistent_homology(sample.filtration, max_dim)
    out: dict[str, Any] = {}
    for k in range(max_dim + 1):
        pts = D.points(k)
        finite = pts[np.isfinite(pts[:, 1])]
        out[f"finite_points_{k}"] = int(finite.shape[0])
        out[f"infinite_points_{k}"] = int(pts.shape[0] - finite.shape[0])
        out[f"total_persistence_{k}"] = float(np.sum(finite[:, 1] - finite[:, 0]))
    return out


def _max_persistence(sample: Sample, k: int = 1, **_) -> dict[str, Any]:
    if sample.filtration is None:
        raise ValueError("maximal persistence needs a filtration")
    D = homology.persistent_homology(sample.filtration, k)
    try:
        val = homology.max_persistence_ratio(D, k)
    except homology.EmptyMaximumError:
        val = float("nan")
    return {f"max_persistence_{k}": val, f"infinite_points_{k}": int(np.sum(np.isinf(D.deaths[D.dims == k])))}


def _f_vector(sample: Sample, max_dim: int = 3, **_) -> dict[str, Any]:
    return {f"f_{k}": sample.complex.count(k) for k in range(max_dim + 1)}


def _empty_shells(sample: Sample, k: int = 3, **_) -> dict[str, Any]:
    filled, empty = k_shells(sample.complex, k)
    return {f"empty_shells_{k}": int(empty.shape[0]), f"filled_shells_{k}": int(filled.shape[0])}


def _edge_count(sample: Sample, **_) -> dict[str, Any]:
    X = sample.complex
    return {"edges": X.count(1), "mean_degree": 2.0 * X.count(1) / max(X.n, 1)}


REGISTRY: dict[str, Callable[..., dict[str, Any]]] = {
    "betti": _betti,
    "connected": _connected,
    "n_components": _components,
    "has_cycle": _has_cycle,
    "h_vanish": _h_vanish,
    "h_nonzero": _h_nonzero,
    "shadow": _shadow,
    "winding_rank": _winding,
    "diagram": _diagram,
    "max_persistence": _max_persistence,
    "f_vector": _f_vector,
    "empty_shells": _empty_shells,
    "edges": _edge_count,
}


def parse(entry) -> tuple[str, dict[str, Any]]:
    """``"name"`` or ``{"name": ..., **options}``."""
    if isinstance(entry, str):
        name, opts = entry, {}
    else:
        opts = dict(entry)
        name = opts.pop("name")
    if name not in REGISTRY:
        raise ValueError(f"unknown observable {name!r}; known: {', '.join(sorted(REGISTRY))}")
    return name, opts


def compute(sample: Sample, observables) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for entry in observables:
        name, opts = parse(entry)
        out.update(REGISTRY[name](sample, **opts))
    return out


def is_binary(column: str) -> bool:
    return column in BINARY

