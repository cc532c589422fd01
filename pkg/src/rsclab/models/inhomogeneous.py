"""Inhomogeneous complexes and configuration models.

Soft configuration models put independent d-simplexes on the complete
(d-1)-skeleton with logistic probabilities ``1 / (exp(sum of face multipliers) + 1)``;
the multipliers are fitted so that every constrained face has the requested
expected degree. The Z-variants constrain vertices instead of (d-1)-faces.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from math import comb

import numpy as np
from numba import njit
from scipy import linalg, sparse
from scipy.special import expit

from rsclab.combinatorics import all_subsets, lex_rank, lex_unrank
from rsclab.complex import SimplicialComplex, degree_sequence, facets_of, shell_candidates
from rsclab.models.homogeneous import RejectionError, complete_levels
from rsclab.rng import as_generator

NEWTON_MAX_CONSTRAINTS = 2000


class SolverError(RuntimeError):
    """Multiplier fit failed; carries the last residual."""

    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InfeasibleTargets(ValueError):
    pass


# ---------------------------------------------------------------------------
# probability tensors


class ProbabilityTensor:
    """Per-slot existence probabilities, level by level.

    Each level holds a default value plus sparse per-slot overrides keyed by
    lexicographic slot rank; a dense array may be given instead.
    """

    def __init__(self, n: int, defaults: dict[int, float] | None = None):
        self.n = int(n)
        self.defaults = {int(k): _prob(v) for k, v in (defaults or {}).items()}
        self._overrides: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._dense: dict[int, np.ndarray] = {}

    @classmethod
    def constant(cls, n: int, pvec) -> "ProbabilityTensor":
        return cls(n, {k: p for k, p in enumerate(pvec, start=1)})

    def set_dense(self, k: int, values) -> "ProbabilityTensor":
        values = np.asarray(values, dtype=float)
        if values.shape != (comb(self.n, k + 1),):
            raise ValueError(f"level {k} needs {comb(self.n, k + 1)} values")
        _check_unit(values)
        self._dense[k] = values
        return self

    def set(self, k: int, rows, values) -> "ProbabilityTensor":
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, k + 1)
        values = np.broadcast_to(np.asarray(values, dtype=float), (rows.shape[0],))
        _check_unit(values)
        ranks = lex_rank(np.sort(rows, axis=1), self.n)
        if k in self._overrides:
            old_r, old_v = self._overrides[k]
            ranks = np.concatenate([old_r, ranks])
            values = np.concatenate([old_v, values])
        # later assignments win
        _, last = np.unique(ranks[::-1], return_index=True)
        keep = ranks.shape[0] - 1 - last
        order = np.argsort(ranks[keep])
        self._overrides[k] = (ranks[keep][order], values[keep][order])
        return self

    def values(self, k: int, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, k + 1)
        if rows.shape[0] == 0:
            return np.zeros(0)
        if k in self._dense:
            return self._dense[k][lex_rank(rows, self.n)]
        out = np.full(rows.shape[0], self.defaults.get(k, 0.0))
        if k in self._overrides:
            ranks, vals = self._overrides[k]
            q = lex_rank(rows, self.n)
            pos = np.minimum(np.searchsorted(ranks, q), ranks.shape[0] - 1)
            hit = ranks[pos] == q
            out[hit] = vals[pos[hit]]
        return out

    @property
    def max_level(self) -> int:
        return max([0, *self.defaults, *self._overrides, *self._dense])


def _prob(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


def _check_unit(values: np.ndarray) -> None:
    if values.size and (np.nanmin(values) < 0 or np.nanmax(values) > 1 or np.isnan(values).any()):
        raise ValueError("probabilities must lie in [0, 1]")


def gen_x_phat(n: int, P: ProbabilityTensor, max_dim: int | None = None, rng=None) -> SimplicialComplex:
    """Fill each realized k-shell independently with its own probability."""
    if max_dim is None:
        max_dim = P.max_level
    g = as_generator(rng)
    levels: dict[int, np.ndarray] = {}
    X = SimplicialComplex.from_levels(n, levels, closed=True)
    for k in range(1, max_dim + 1):
        cand = shell_candidates(X, k)
        p = P.values(k, cand)
        rows = cand[g.random(cand.shape[0]) < p]
        if rows.shape[0] == 0:
            break
        levels[k] = rows
        X = SimplicialComplex.from_levels(n, levels, closed=True)
    return X


# ---------------------------------------------------------------------------
# degree targets


@dataclass
class DegreeTargets:
    """Target degree per constrained face, in lexicographic face order.

    ``level=d`` constrains the (d-1)-faces; ``per_vertex=True`` constrains
    the d-degree of each vertex instead.
    """

    n: int
    level: int
    values: np.ndarray
    per_vertex: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        width = 1 if self.per_vertex else self.level
        if self.values.shape != (comb(self.n, width),):
            raise ValueError(f"expected {comb(self.n, width)} targets, got {self.values.shape}")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("targets must be finite and non-negative")

    @property
    def faces(self) -> np.ndarray:
        return all_subsets(self.n, 1 if self.per_vertex else self.level)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tau_vertices", "k"])
        for row, k in zip(self.faces, self.values):
            writer.writerow([" ".join(map(str, row)), repr(float(k))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n: int, level: int | None = None, *, per_vertex: bool = False) -> "DegreeTargets":
        rows = list(csv.DictReader(io.StringIO(text)))
        faces = np.array([[int(v) for v in r["tau_vertices"].split()] for r in rows], dtype=np.int64)
        width = faces.shape[1]
        values = np.zeros(comb(n, width))
        values[lex_rank(np.sort(faces, axis=1), n)] = [float(r["k"]) for r in rows]
        if per_vertex and level is None:
            raise ValueError("vertex targets need an explicit level")
        level = level if per_vertex else width
        return cls(n, level, values, per_vertex)


@dataclass(frozen=True)
class MultiplierSolution:
    n: int
    d: int
    multipliers: np.ndarray
    residual: float
    iterations: int
    converged: bool
    per_vertex: bool = False
    history: dict = field(default_factory=dict, compare=False)

    def probabilities(self) -> np.ndarray:
        """Existence probability of every d-slot, lexicographic slot order."""
        return slot_probabilities(self.multipliers, _incidence(self.n, self.d, self.per_vertex))

    def diagnostics_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "d": self.d,
                "per_vertex": self.per_vertex,
                "residual": self.residual,
                "iterations": self.iterations,
                "converged": self.converged,
                **self.history,
            },
            sort_keys=True,
        )


def _incidence(n: int, d: int, per_vertex: bool) -> np.ndarray:
    """Constraint index of each constrained face of every d-slot, ``(slots, d+1)``."""
    slots = all_subsets(n, d + 1)
    if per_vertex:
        return slots
    return lex_rank(facets_of(slots).reshape(-1, d), n).reshape(slots.shape[0], d + 1)


def slot_probabilities(lam: np.ndarray, inc: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    face = lam[inc]
    blocked = np.isposinf(face).any(axis=1)
    forced = np.isneginf(face).any(axis=1) & ~blocked
    free = ~(blocked | forced)
    p = np.zeros(inc.shape[0])
    p[forced] = 1.0
    p[free] = expit(-face[free].sum(axis=1))
    return p


def _solve(inc: np.ndarray, m: int, k: np.ndarray, cap: float, tol: float, max_iter: int, eta: float):
    """Fit multipliers for ``sum_{slot > face} p = k``; returns (lam, residual, iters, info)."""
    if np.any(k > cap + 1e-12):
        bad = int(np.flatnonzero(k > cap + 1e-12)[0])
        raise InfeasibleTargets(f"target {k[bad]} at constraint {bad} exceeds the {cap} available slots")
    lam = np.zeros(m)
    lam[k <= 0] = np.inf
    lam[k >= cap] = -np.inf
    face = lam[inc]
    blocked = np.isposinf(face).any(axis=1)
    forced = np.isneginf(face).any(axis=1) & ~blocked
    # a saturating constraint cannot coexist with a blocked slot
    sat = np.flatnonzero(np.isneginf(lam))
    if sat.size:
        bad_slots = blocked & np.isneginf(face).any(axis=1)
        if bad_slots.any():
            raise InfeasibleTargets("a zero target and a saturated target share a slot")
    free_c = np.isfinite(lam)
    free_s = ~(blocked | forced)
    forced_deg = np.bincount(inc[forced].ravel(), minlength=m).astype(float)
    info = {"fixed_point_iterations": 0, "newton_iterations": 0}
    if not free_c.any():
        return lam, 0.0, 0, info
    # reduced system over free slots and free constraints
    cidx = np.full(m, -1, dtype=np.int64)
    cidx[free_c] = np.arange(int(free_c.sum()))
    sub = cidx[inc[free_s]]
    if np.any(sub < 0):
        raise InfeasibleTargets("inconsistent boundary targets")
    mf = int(free_c.sum())
    target = k[free_c] - forced_deg[free_c]
    avail = np.bincount(sub.ravel(), minlength=mf).astype(float)
    if np.any(target <= 0) or np.any(target >= avail):
        raise InfeasibleTargets("targets outside the interior after removing forced slots")
    width = inc.shape[1]
    x = np.log(avail / target - 1.0) / width

    def degrees(x):
        p = expit(-x[sub].sum(axis=1))
        return p, np.bincount(sub.ravel(), weights=np.repeat(p, width), minlength=mf)

    def objective(x):
        return float(np.logaddexp(0.0, -x[sub].sum(axis=1)).sum() + x @ target)

    p, deg = degrees(x)
    res = float(np.max(np.abs(deg - target)))
    it = 0
    newton = mf <= NEWTON_MAX_CONSTRAINTS
    A = None
    if newton:
        rows = np.repeat(np.arange(sub.shape[0]), width)
        A = sparse.csr_matrix((np.ones(sub.size), (rows, sub.ravel())), shape=(sub.shape[0], mf))
    while res > tol and it < max_iter:
        it += 1
        if newton and (res < 1e-2 or info["fixed_point_iterations"] >= 50):
            w = p * (1.0 - p)
            H = (A.T @ sparse.diags(w) @ A).toarray()
            grad = target - deg
            H[np.diag_indices_from(H)] += 1e-14 * max(float(np.trace(H)) / mf, 1.0)
            try:
                step = linalg.solve(H, -grad, assume_a="pos")
            except (linalg.LinAlgError, ValueError):
                step = linalg.lstsq(H, -grad)[0]
            f0 = objective(x)
            slope = float(grad @ step)
            t = 1.0
            while t > 1e-10:
                xn = x + t * step
                # near the optimum objective changes drown in rounding; a smaller residual also counts
                if objective(xn) <= f0 + 1e-4 * t * slope:
                    break
                if np.max(np.abs(degrees(xn)[1] - target)) < (1.0 - 1e-4 * t) * res:
                    break
                t *= 0.5
            # no acceptable step: fall back to one damped fixed-point update
            x = xn if t > 1e-10 else x + eta * np.log(deg / target)
            info["newton_iterations"] += 1
        else:
            x = x + eta * np.log(deg / target)
            info["fixed_point_iterations"] += 1
        p, deg = degrees(x)
        res = float(np.max(np.abs(deg - target)))
    lam[free_c] = x
    return lam, res, it, info


def solve_scm_multipliers(
    n: int,
    d: int,
    targets,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    eta: float = 0.5,
) -> MultiplierSolution:
    """Multipliers of the soft configuration model with (d-1)-face degree targets.

    Damped fixed-point iteration, then Newton with backtracking on the convex
    dual when the system is small enough. Zero targets and targets equal to
    ``n - d`` pin their multiplier at ``+inf``/``-inf`` and are removed.
    """
    k = targets.values if isinstance(targets, DegreeTargets) else np.asarray(targets, dtype=float)
    if k.shape != (comb(n, d),):
        raise ValueError(f"expected {comb(n, d)} targets for n={n}, d={d}")
    if np.any(k < 0):
        raise InfeasibleTargets("targets must be non-negative")
    inc = _incidence(n, d, False)
    lam, res, it, info = _solve(inc, comb(n, d), k, float(n - d), tol, max_iter, eta)
    if res > tol:
        raise SolverError(f"no convergence after {it} iterations (residual {res:.3e})", res, it)
    return MultiplierSolution(n, d, lam, res, it, True, False, info)


def solve_zscm_multipliers(
    n: int,
    d: int,
    targets,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    eta: float = 0.5,
) -> MultiplierSolution:
    """Per-vertex multipliers for vertex d-degree targets."""
    k = targets.values if isinstance(targets, DegreeTargets) else np.asarray(targets, dtype=float)
    if k.shape != (n,):
        raise ValueError(f"expected {n} vertex targets")
    if np.any(k < 0):
        raise InfeasibleTargets("targets must be non-negative")
    inc = _incidence(n, d, True)
    lam, res, it, info = _solve(inc, n, k, float(comb(n - 1, d)), tol, max_iter, eta)
    if res > tol:
        raise SolverError(f"no convergence after {it} iterations (residual {res:.3e})", res, it)
    return MultiplierSolution(n, d, lam, res, it, True, True, info)


def random_feasible_targets(n: int, d: int, rng=None, spread: float = 1.0, per_vertex: bool = False) -> np.ndarray:
    """Expected degrees of a random multiplier vector (always feasible)."""
    g = as_generator(rng)
    m = n if per_vertex else comb(n, d)
    inc = _incidence(n, d, per_vertex)
    width = d + 1
    base = g.uniform(-1.0, 1.0) * 2.0 / width
    lam = base + spread * g.standard_normal(m) / width
    p = slot_probabilities(lam, inc)
    return np.bincount(inc.ravel(), weights=np.repeat(p, width), minlength=m)


def expected_degrees(solution: MultiplierSolution) -> np.ndarray:
    inc = _incidence(solution.n, solution.d, solution.per_vertex)
    p = slot_probabilities(solution.multipliers, inc)
    m = solution.n if solution.per_vertex else comb(solution.n, solution.d)
    return np.bincount(inc.ravel(), weights=np.repeat(p, inc.shape[1]), minlength=m)


def gen_scm_d(n: int, d: int, targets=None, rng=None, *, solution: MultiplierSolution | None = None) -> SimplicialComplex:
    """Soft configuration model: complete (d-1)-skeleton plus logistic d-simplexes."""
    if solution is None:
        solution = solve_scm_multipliers(n, d, targets)
    g = as_generator(rng)
    p = solution.probabilities()
    keep = np.flatnonzero(g.random(p.shape[0]) < p)
    levels = complete_levels(n, d - 1)
    levels[d] = lex_unrank(keep, n, d + 1)
    return SimplicialComplex.from_levels(n, levels, closed=True)


def gen_zscm_d(n: int, d: int, targets=None, rng=None, *, solution: MultiplierSolution | None = None) -> SimplicialComplex:
    """Z-soft configuration model: logistic d-simplexes, then their faces only."""
    if solution is None:
        solution = solve_zscm_multipliers(n, d, targets)
    g = as_generator(rng)
    p = solution.probabilities()
    keep = np.flatnonzero(g.random(p.shape[0]) < p)
    return SimplicialComplex.from_levels(n, {d: lex_unrank(keep, n, d + 1)})


def in_z_space(X: SimplicialComplex, d: int) -> bool:
    """Every simplex of dimension ``1..d-1`` lies in some d-simplex, none above d."""
    if X.dim > d:
        return False
    if X.count(d) == 0:
        return X.dim <= 0
    closure = SimplicialComplex.from_levels(X.n, {d: X.level(d).copy()})
    return closure == X


# ---------------------------------------------------------------------------
# hard-constraint configuration models


def is_graphical(degrees) -> bool:
    """Erdős–Gallai test."""
    deg = np.sort(np.asarray(degrees, dtype=np.int64))[::-1]
    if deg.size == 0:
        return True
    if deg[-1] < 0 or deg.sum() % 2:
        return False
    n = deg.size
    if deg[0] > n - 1:
        return False
    csum = np.cumsum(deg)
    for k in range(1, n + 1):
        rhs = k * (k - 1) + np.minimum(deg[k:], k).sum()
        if csum[k - 1] > rhs:
            return False
    return True


def gen_cm(n: int, degrees, mode: str = "reject", rng=None, budget: int = 100_000) -> SimplicialComplex:
    """Stub matching. ``reject`` resamples until simple (uniform over simple
    graphs); ``erased`` drops loops and merges multi-edges."""
    deg = np.asarray(degrees, dtype=np.int64)
    if deg.shape != (n,):
        raise ValueError(f"expected {n} degrees")
    if not is_graphical(deg):
        raise ValueError("degree sequence is not graphical")
    if mode not in ("reject", "erased"):
        raise ValueError(f"unknown mode {mode!r}")
    g = as_generator(rng)
    stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
    for _ in range(int(budget) if mode == "reject" else 1):
        pairs = g.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        loops = pairs[:, 0] == pairs[:, 1]
        keys = pairs[:, 0] * n + pairs[:, 1]
        if mode == "erased":
            keys = np.unique(keys[~loops])
            return SimplicialComplex.from_levels(n, {1: np.column_stack([keys // n, keys % n])}, closed=True)
        if not loops.any() and np.unique(keys).shape[0] == keys.shape[0]:
            keys = np.sort(keys)
            return SimplicialComplex.from_levels(n, {1: np.column_stack([keys // n, keys % n])}, closed=True)
    raise RejectionError(f"no simple matching in {budget} attempts", {"attempts": int(budget), "degrees": deg.tolist()})


@njit(cache=True)
def _cm_d_search(faces, cofaces, deficit, seed, budget):
    np.random.seed(seed)
    S = faces.shape[0]
    w = faces.shape[1]
    T, c = cofaces.shape
    present = np.zeros(S, dtype=np.bool_)
    # owner lists: blocks currently containing each face (bounded by c)
    owners = np.full((T, c), -1, dtype=np.int64)
    nown = np.zeros(T, dtype=np.int64)
    order = np.random.permutation(S)
    for s in order:
        ok = True
        for t in range(w):
            if deficit[faces[s, t]] <= 0:
                ok = False
                break
        if ok:
            present[s] = True
            for t in range(w):
                f = faces[s, t]
                deficit[f] -= 1
                owners[f, nown[f]] = s
                nown[f] += 1
    live = np.empty(T, dtype=np.int64)
    cand = np.empty(c, dtype=np.int64)
    steps = 0
    while steps < budget:
        nl = 0
        for f in range(T):
            if deficit[f] > 0:
                live[nl] = f
                nl += 1
        if nl == 0:
            return present, steps
        steps += 1
        tau = live[np.random.randint(nl)]
        # slots through tau that are absent and have at most one saturated face
        nc = 0
        for j in range(c):
            s = cofaces[tau, j]
            if present[s]:
                continue
            sat = 0
            for t in range(w):
                f = faces[s, t]
                if deficit[f] <= 0:
                    sat += 1 if nown[f] > 0 else 2
            if sat <= 1:
                cand[nc] = s
                nc += 1
        if nc == 0:
            # kick: drop a random block on a random face of tau's cofaces
            s = cofaces[tau, np.random.randint(c)]
            f = -1
            for t in range(w):
                if deficit[faces[s, t]] <= 0 and nown[faces[s, t]] > 0:
                    f = faces[s, t]
                    break
            if f < 0:
                continue
            victim = owners[f, np.random.randint(nown[f])]
        else:
            s = cand[np.random.randint(nc)]
            victim = -1
            for t in range(w):
                f = faces[s, t]
                if deficit[f] <= 0:
                    victim = owners[f, np.random.randint(nown[f])]
        if victim >= 0:
            present[victim] = False
            for t in range(w):
                f = faces[victim, t]
                deficit[f] += 1
                for q in range(nown[f]):
                    if owners[f, q] == victim:
                        owners[f, q] = owners[f, nown[f] - 1]
                        nown[f] -= 1
                        break
        if nc > 0:
            present[s] = True
            for t in range(w):
                f = faces[s, t]
                deficit[f] -= 1
                owners[f, nown[f]] = s
                nown[f] += 1
    return present, steps


def gen_cm_d(n: int, d: int, degrees, rng=None, budget: int = 2_000_000) -> SimplicialComplex:
    """A complex with complete (d-1)-skeleton meeting integer (d-1)-face degrees.

    Random greedy fill followed by a hill-climbing repair: a slot through a
    deficient face is inserted after evicting at most one block on a saturated
    face. The output meets every degree exactly; it is not a uniform sample.
    """
    k = np.asarray(degrees, dtype=np.int64)
    if k.shape != (comb(n, d),):
        raise ValueError(f"expected {comb(n, d)} degrees")
    if np.any(k < 0) or np.any(k > n - d):
        raise ValueError(f"degrees must lie in 0..{n - d}")
    if k.sum() % (d + 1):
        raise ValueError(f"degree sum {int(k.sum())} is not divisible by {d + 1}")
    g = as_generator(rng)
    faces = _incidence(n, d, False)
    cofaces = np.argsort(faces.ravel(), kind="stable").reshape(comb(n, d), n - d) // (d + 1)
    present, steps = _cm_d_search(faces, cofaces, k.copy(), int(g.integers(2**31)), int(budget))
    levels = complete_levels(n, d - 1)
    levels[d] = lex_unrank(np.flatnonzero(present), n, d + 1)
    X = SimplicialComplex.from_levels(n, levels, closed=True)

    realized = degree_sequence(X, d)
    if not np.array_equal(realized, k):
        raise RejectionError(
            f"repair did not reach the degree sequence in {steps} steps",
            {"steps": int(steps), "total_deficit": int((k - realized).sum()), "uniform": False},
        )
    return X


CM_D_METADATA = {"sampler": "greedy+hill-climbing repair", "uniform": False}


# ---------------------------------------------------------------------------
# hypersoft configuration model


@dataclass(frozen=True)
class DegreeDistribution:
    """Named expected-degree law: ``constant(value)``, ``exponential(mean)`` or
    ``pareto(alpha, kmin)`` with ``alpha > 1``."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "exponential", "pareto"):
            raise ValueError(f"unknown degree distribution {self.kind!r}")
        if self.kind == "pareto" and not self.params[0] > 1:
            raise ValueError("Pareto needs alpha > 1 for a finite mean")
        if any(v <= 0 for v in self.params):
            raise ValueError("parameters must be positive")

    @property
    def mean(self) -> float:
        if self.kind == "pareto":
            alpha, kmin = self.params
            return alpha * kmin / (alpha - 1)
        return float(self.params[0])

    def sample(self, size: int, rng=None) -> np.ndarray:
        g = as_generator(rng)
        if self.kind == "constant":
            return np.full(size, float(self.params[0]))
        if self.kind == "exponential":
            return g.exponential(self.params[0], size)
        alpha, kmin = self.params
        return kmin * (1.0 + g.pareto(alpha, size))


def gen_hscm_d(n: int, d: int, rho: DegreeDistribution, mode: str = "exact", rng=None, diagnostics: dict | None = None) -> SimplicialComplex:
    """Soft configuration model with i.i.d. random targets drawn from ``rho``.

    ``exact`` solves for the multipliers; ``classical_limit`` (graphs only)
    uses ``p_ij = min(1, k_i k_j / (mean * n))``. Exact targets are clipped
    into the open feasible interval; the clipped count goes to ``diagnostics``.
    """
    g = as_generator(rng)
    if mode == "classical_limit":
        if d != 1:
            raise ValueError("the classical limit is defined for graphs (d=1) only")
        k = rho.sample(n, g)
        pairs = all_subsets(n, 2)
        p = np.minimum(1.0, k[pairs[:, 0]] * k[pairs[:, 1]] / (rho.mean * n))
        keep = g.random(p.shape[0]) < p
        if diagnostics is not None:
            diagnostics["targets"] = k
        return SimplicialComplex.from_levels(n, {1: pairs[keep]}, closed=True)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    m = comb(n, d)
    k = rho.sample(m, g)
    hi = (n - d) * (1.0 - 1e-6)
    clipped = int(np.count_nonzero(k > hi))
    k = np.minimum(k, hi)
    sol = solve_scm_multipliers(n, d, k)
    if diagnostics is not None:
        diagnostics.update(targets=k, clipped=clipped, residual=sol.residual, iterations=sol.iterations)
    return gen_scm_d(n, d, rng=g, solution=sol)
