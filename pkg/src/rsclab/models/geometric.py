"""Point processes on the flat torus and the complexes built over them.

Distances on the torus use per-coordinate minimal images. Čech simplexes are
decided by the smallest enclosing ball of the vertex positions lifted into
one chart around the simplex's first vertex; the lift is exact for ``r < 1/4``
since Rips candidates have diameter at most ``r``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from rsclab.complex import ComplexError, Filtration, SimplicialComplex, flag_completion
from rsclab.rng import as_generator


@dataclass(frozen=True)
class TorusPointCloud:
    """``points`` is an ``(N, d)`` array with coordinates in ``[0, 1)``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array")
        if pts.size and (pts.min() < 0.0 or pts.max() >= 1.0):
            raise ValueError("coordinates must lie in [0, 1)")
        object.__setattr__(self, "points", pts)

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def shifted(self, v) -> "TorusPointCloud":
        pts = np.mod(self.points + np.asarray(v, dtype=float), 1.0)
        pts[pts >= 1.0] = 0.0
        return TorusPointCloud(pts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.points:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TorusPointCloud":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        return cls(np.array([[float(x) for x in r] for r in rows], dtype=float))


def sample_binomial_process(n: int, d: int, rng=None) -> TorusPointCloud:
    g = as_generator(rng)
    return TorusPointCloud(g.random((int(n), int(d))))


def sample_poisson_process(n: float, d: int, rng=None) -> TorusPointCloud:
    """Poisson(n) many i.i.d. uniform points."""
    g = as_generator(rng)
    count = int(g.poisson(n)) if n > 0 else 0
    return TorusPointCloud(g.random((count, int(d))))


def minimal_image(delta):
    return delta - np.floor(np.asarray(delta) + 0.5)


def toroidal_distance(x, y) -> float:
    delta = minimal_image(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
    return float(np.sqrt(np.sum(delta * delta)))


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in ``R^d``."""
    return pi ** (d / 2) / gamma(d / 2 + 1)


def expected_degree(n: float, r: float, d: int) -> float:
    return unit_ball_volume(d) * n * r**d


def radius_for_degree(n: float, degree: float, d: int) -> float:
    """Radius ``r`` whose expected degree ``omega_d n r^d`` equals ``degree``."""
    return (degree / (unit_ball_volume(d) * n)) ** (1.0 / d)


@dataclass(frozen=True)
class GeometricParams:
    n: float
    r: float
    d: int

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius must be positive")

    @property
    def degree(self) -> float:
        return expected_degree(self.n, self.r, self.d)


def _points(P) -> np.ndarray:
    return P.points if isinstance(P, TorusPointCloud) else np.asarray(P, dtype=float)


def neighbor_pairs(P, r: float, periodic: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographically sorted pairs at distance ``<= r`` and their distances."""
    pts = _points(P)
    if pts.shape[0] < 2:
        return np.empty((0, 2), dtype=np.int64), np.empty(0)
    tree = cKDTree(pts, boxsize=1.0 if periodic else None)
    pairs = tree.query_pairs(r, output_type="ndarray").astype(np.int64)
    if pairs.shape[0] == 0:
        return np.empty((0, 2), dtype=np.int64), np.empty(0)
    pairs.sort(axis=1)
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    delta = pts[pairs[:, 1]] - pts[pairs[:, 0]]
    if periodic:
        delta = minimal_image(delta)
    dist = np.sqrt(np.sum(delta * delta, axis=1))
    keep = dist <= r
    return pairs[keep], dist[keep]


def _check_radius(r: float, limit: float, periodic: bool) -> None:
    if r <= 0:
        raise ComplexError("radius must be positive")
    if periodic and r >= limit:
        raise ComplexError(f"radius {r} must be below {limit} on the unit torus")


def geometric_graph(P, r: float, periodic: bool = True) -> SimplicialComplex:
    """Edges between points at toroidal distance at most ``r``."""
    _check_radius(r, 0.5, periodic)
    pairs, _ = neighbor_pairs(P, r, periodic)
    return SimplicialComplex.from_levels(len(_points(P)), {1: pairs}, closed=True)


def _monotone_births(X: SimplicialComplex, births: dict[int, np.ndarray]) -> dict[int, np.ndarray]:
    # guard against last-bit rounding so faces never postdate cofaces
    for k in range(2, X.dim + 1):
        if X.count(k):
            births[k] = np.maximum(births[k], births[k - 1][X.boundary_index(k)].max(axis=1))
    return births


def rips_complex(P, r: float, max_dim: int, *, filtration: bool = False, periodic: bool = True):
    """Flag complex of the geometric graph, optionally with diameter births."""
    _check_radius(r, 0.5, periodic)
    pts = _points(P)
    pairs, dist = neighbor_pairs(pts, r, periodic)
    G = SimplicialComplex.from_levels(pts.shape[0], {1: pairs}, closed=True)
    X = flag_completion(G, max_dim)
    if not filtration:
        return X
    births = {0: np.zeros(X.n)}
    if X.dim >= 1:
        births[1] = dist
    for k in range(2, X.dim + 1):
        births[k] = births[k - 1][X.boundary_index(k)].max(axis=1)
    return Filtration(X, births)


# ---------------------------------------------------------------------------
# smallest enclosing balls


def _circumball(pts: np.ndarray):
    """Ball through all given points, centred in their affine hull."""
    base = pts[0]
    if pts.shape[0] == 1:
        return base.copy(), 0.0
    V = pts[1:] - base
    G = V @ V.T
    b = 0.5 * np.sum(V * V, axis=1)
    try:
        c = np.linalg.solve(G, b)
    except np.linalg.LinAlgError:
        return None
    center = base + c @ V
    return center, float(np.linalg.norm(pts[0] - center))


def welzl_miniball(points) -> tuple[np.ndarray, float]:
    """Smallest enclosing ball by Welzl's randomized recursion (reference)."""
    pts = np.asarray(points, dtype=float)
    eps = 1e-12

    def inside(ball, p):
        return ball is not None and np.linalg.norm(p - ball[0]) <= ball[1] * (1 + eps) + eps

    def mb(idx: list[int], support: list[int]):
        if not idx or len(support) == pts.shape[1] + 1:
            if not support:
                return None
            return _circumball(pts[support])
        p, rest = idx[-1], idx[:-1]
        ball = mb(rest, support)
        if inside(ball, pts[p]):
            return ball
        return mb(rest, support + [p])

    ball = mb(list(range(pts.shape[0])), [])
    return ball[0], ball[1]


@njit(cache=True)
def _solve_small(G, b):
    m = G.shape[0]
    A = G.copy()
    x = b.copy()
    scale = 0.0
    for a in range(m):
        scale = max(scale, abs(G[a, a]))
    for col in range(m):
        piv = col
        for r in range(col + 1, m):
            if abs(A[r, col]) > abs(A[piv, col]):
                piv = r
        if abs(A[piv, col]) <= 1e-13 * scale:
            return x, False
        if piv != col:
            for c in range(m):
                A[col, c], A[piv, c] = A[piv, c], A[col, c]
            x[col], x[piv] = x[piv], x[col]
        for r in range(col + 1, m):
            f = A[r, col] / A[col, col]
            for c in range(col, m):
                A[r, c] -= f * A[col, c]
            x[r] -= f * x[col]
    for col in range(m - 1, -1, -1):
        s = x[col]
        for c in range(col + 1, m):
            s -= A[col, c] * x[c]
        x[col] = s / A[col, col]
    return x, True


@njit(cache=True)
def miniball_radii(pts):
    """Smallest enclosing ball radius of each point set, ``pts`` of shape ``(m, k, d)``.

    Exact by enumeration: the answer is the smallest circumball of a subset
    of at most ``d + 1`` points that contains every point. Each set is
    shifted so its first point is the origin, which keeps the containment
    test relative to the set's own size.
    """
    m, k, d = pts.shape
    out = np.empty(m)
    maxs = min(k, d + 1)
    center = np.empty(d)
    local = np.empty((k, d))
    for i in range(m):
        for j in range(k):
            for c in range(d):
                local[j, c] = pts[i, j, c] - pts[i, 0, c]
        best = np.inf
        for mask in range(1, 1 << k):
            s = 0
            for j in range(k):
                if (mask >> j) & 1:
                    s += 1
            if s > maxs:
                continue
            idx = np.empty(s, dtype=np.int64)
            t = 0
            for j in range(k):
                if (mask >> j) & 1:
                    idx[t] = j
                    t += 1
            base = local[idx[0]]
            if s == 1:
                for c in range(d):
                    center[c] = base[c]
            else:
                V = np.empty((s - 1, d))
                for a in range(1, s):
                    for c in range(d):
                        V[a - 1, c] = local[idx[a], c] - base[c]
                G = V @ V.T
                b = np.empty(s - 1)
                for a in range(s - 1):
                    b[a] = 0.5 * G[a, a]
                coef, ok = _solve_small(G, b)
                if not ok:
                    continue
                for c in range(d):
                    center[c] = base[c]
                    for a in range(s - 1):
                        center[c] += coef[a] * V[a, c]
            rad2 = 0.0
            for c in range(d):
                rad2 += (local[idx[0], c] - center[c]) ** 2
            if rad2 >= best * best:
                continue
            ok = True
            tol = rad2 * (1.0 + 1e-10)
            for j in range(k):
                dist2 = 0.0
                for c in range(d):
                    dist2 += (local[j, c] - center[c]) ** 2
                if dist2 > tol:
                    ok = False
                    break
            if ok:
                best = np.sqrt(rad2)
        out[i] = best
    return out


def lifted_positions(pts: np.ndarray, rows: np.ndarray, periodic: bool = True) -> np.ndarray:
    """Coordinates of each simplex's vertices in a chart around its first vertex."""
    X = pts[rows]
    if periodic and rows.shape[1] > 1:
        X = X[:, :1, :] + minimal_image(X - X[:, :1, :])
    return X


def cech_complex(P, r: float, max_dim: int, *, filtration: bool = False, periodic: bool = True):
    """Čech complex of radius-``r/2`` balls: a simplex is kept iff the smallest
    ball enclosing its vertices has radius at most ``r/2``.

    Candidates come from the Rips complex at ``r``; births are twice the
    enclosing radius.
    """
    _check_radius(r, 0.25, periodic)
    pts = _points(P)
    R = rips_complex(pts, r, max_dim, filtration=True, periodic=periodic)
    X = R.complex
    births = {0: np.zeros(X.n)}
    if X.dim >= 1:
        births[1] = R.births[1]
    for k in range(2, X.dim + 1):
        births[k] = 2.0 * miniball_radii(lifted_positions(pts, X.level(k), periodic))
    births = _monotone_births(X, births)
    keep = {k: births[k] <= r for k in range(1, X.dim + 1)}
    C = X.restrict(keep)
    if not filtration:
        return C
    return Filtration(C, {k: births[k][keep[k]] if k else births[0] for k in range(C.dim + 1)})
