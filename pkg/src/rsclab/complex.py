"""Finite abstract simplicial complexes on vertices ``0..n-1``.

A complex stores one lexicographically sorted integer array per dimension;
row ``i`` of ``level(k)`` is a k-simplex given by its ``k + 1`` increasing
vertex indices. Vertices are always present. Complexes are immutable: every
operation that adds simplexes returns a new object.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from rsclab.combinatorics import all_subsets, lex_rank

MAX_SIMPLICES = 3_000_000


class ComplexError(ValueError):
    """Malformed simplex or complex."""


class CapacityError(RuntimeError):
    """The complex would exceed :data:`MAX_SIMPLICES` stored simplexes."""


def simplex(vertices: Iterable[int]) -> tuple[int, ...]:
    """Canonical form of a simplex: strictly increasing tuple of vertex indices."""
    verts = sorted(int(v) for v in vertices)
    if not verts:
        raise ComplexError("a simplex needs at least one vertex")
    if verts[0] < 0:
        raise ComplexError(f"negative vertex index in {verts}")
    if any(a == b for a, b in zip(verts, verts[1:])):
        raise ComplexError(f"repeated vertex in {verts}")
    return tuple(verts)


def _empty(k: int) -> np.ndarray:
    return np.empty((0, k + 1), dtype=np.int64)


def row_keys(rows: np.ndarray, n: int) -> np.ndarray:
    """Order-preserving scalar keys for rows of vertex indices below ``n``.

    Mixed-radix int64 keys when ``n ** width`` fits, otherwise a structured
    view comparing field by field. Both sort lexicographically.
    """
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    width = rows.shape[1]
    if max(n, 2) ** width < 2**62:
        keys = np.zeros(rows.shape[0], dtype=np.int64)
        for j in range(width):
            keys = keys * max(n, 1) + rows[:, j]
        return keys
    dtype = np.dtype([(f"v{j}", np.int64) for j in range(width)])
    return rows.view(dtype).ravel()


def unique_rows(rows: np.ndarray, n: int) -> np.ndarray:
    """Distinct rows in lexicographic order."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[1])
    _, idx = np.unique(row_keys(rows, n), return_index=True)
    return rows[idx]


def facets_of(rows: np.ndarray) -> np.ndarray:
    """All codimension-1 faces, shape ``(m, k + 1, k)``; face j drops vertex j."""
    m, width = rows.shape
    out = np.empty((m, width, width - 1), dtype=np.int64)
    for j in range(width):
        out[:, j, :] = np.delete(rows, j, axis=1)
    return out


class SimplicialComplex:
    """Downward-closed family of simplexes on ``n`` vertices.

    Parameters
    ----------
    n : int
        Number of vertices; ``0..n-1`` are always 0-simplexes.
    simplices : iterable of vertex collections
        Simplexes to insert; all their faces are inserted too.
    """

    __slots__ = ("n", "_levels", "_cache")

    def __init__(self, n: int, simplices: Iterable[Iterable[int]] = ()):
        self.n = int(n)
        if self.n < 0:
            raise ComplexError("vertex count must be non-negative")
        by_dim: dict[int, list[tuple[int, ...]]] = {}
        for s in simplices:
            s = simplex(s)
            by_dim.setdefault(len(s) - 1, []).append(s)
        tops = {k: np.array(v, dtype=np.int64) for k, v in by_dim.items() if k >= 1}
        self._levels = _close_levels(self.n, tops)
        self._cache: dict = {}
        for s in by_dim.get(0, ()):
            self._check_range(np.array([s]))
        self._check_capacity()

    @classmethod
    def from_levels(
        cls, n: int, levels: dict[int, np.ndarray] | Sequence[np.ndarray], *, closed: bool = False
    ) -> "SimplicialComplex":
        """Build from per-dimension row arrays.

        With ``closed=True`` the caller guarantees downward closure and sorted,
        distinct rows (generators use this fast path); the guarantee is still
        verified. Otherwise closure is computed.
        """
        if not isinstance(levels, dict):
            levels = {k: rows for k, rows in enumerate(levels) if k >= 1}
        obj = cls.__new__(cls)
        obj.n = int(n)
        obj._cache = {}
        clean = {
            int(k): np.asarray(rows, dtype=np.int64).reshape(-1, int(k) + 1)
            for k, rows in levels.items()
            if int(k) >= 1
        }
        if closed:
            top = max((k for k, r in clean.items() if len(r)), default=0)
            obj._levels = [np.arange(obj.n, dtype=np.int64)[:, None]] + [
                clean.get(k, _empty(k)) for k in range(1, top + 1)
            ]
            obj._validate()
        else:
            obj._levels = _close_levels(obj.n, clean)
        obj._check_capacity()
        return obj

    # ------------------------------------------------------------------ basics
    @property
    def dim(self) -> int:
        return len(self._levels) - 1 if self.n else -1

    def level(self, k: int) -> np.ndarray:
        """Rows of all k-simplexes, lexicographically sorted (read-only view)."""
        if k < 0:
            raise ComplexError("negative dimension")
        if k >= len(self._levels):
            return _empty(k)
        view = self._levels[k].view()
        view.flags.writeable = False
        return view

    def count(self, k: int) -> int:
        return 0 if k >= len(self._levels) else int(self._levels[k].shape[0])

    def f_vector(self) -> tuple[int, ...]:
        return tuple(int(lv.shape[0]) for lv in self._levels) if self.n else ()

    def __len__(self) -> int:
        return sum(self.f_vector())

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for lv in self._levels:
            for row in lv:
                yield tuple(int(v) for v in row)

    def __contains__(self, s) -> bool:
        s = simplex(s)
        k = len(s) - 1
        return bool(self.index(k, np.array([s]))[0] >= 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        if self.n != other.n or self.f_vector() != other.f_vector():
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._levels, other._levels))

    def __hash__(self):
        return hash((self.n, self.f_vector()))

    def __repr__(self) -> str:
        return f"SimplicialComplex(n={self.n}, f={self.f_vector()})"

    # ----------------------------------------------------------------- lookups
    def keys(self, k: int) -> np.ndarray:
        cache = self._cache.setdefault("keys", {})
        if k not in cache:
            cache[k] = row_keys(self.level(k), self.n)
        return cache[k]

    def index(self, k: int, rows: np.ndarray) -> np.ndarray:
        """Row index in ``level(k)`` of each query row, ``-1`` when absent."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, k + 1)
        out = np.full(rows.shape[0], -1, dtype=np.int64)
        if rows.shape[0] == 0 or self.count(k) == 0:
            return out
        ok = (rows.min(axis=1) >= 0) & (rows.max(axis=1) < self.n)
        if k >= 1:
            ok &= np.all(np.diff(rows, axis=1) > 0, axis=1)
        if not ok.any():
            return out
        table = self.keys(k)
        q = row_keys(rows[ok], self.n)
        pos = np.searchsorted(table, q)
        pos_c = np.minimum(pos, table.shape[0] - 1)
        hit = table[pos_c] == q
        sub = np.where(hit, pos_c, -1)
        out[np.flatnonzero(ok)] = sub
        return out

    def contains_rows(self, k: int, rows: np.ndarray) -> np.ndarray:
        return self.index(k, rows) >= 0

    def boundary_index(self, k: int) -> np.ndarray:
        """For each k-simplex, indices of its ``k+1`` facets in ``level(k-1)``."""
        if k < 1:
            raise ComplexError("0-simplexes have no facets")
        cache = self._cache.setdefault("bnd", {})
        if k not in cache:
            rows = self.level(k)
            faces = facets_of(rows).reshape(-1, k)
            cache[k] = self.index(k - 1, faces).reshape(rows.shape[0], k + 1)
        return cache[k]

    # --------------------------------------------------------------- builders
    def add_with_closure(self, s: Iterable[int]) -> "SimplicialComplex":
        """New complex containing ``s`` and all its faces."""
        s = simplex(s)
        if s[-1] >= self.n:
            raise ComplexError(f"vertex {s[-1]} out of range for n={self.n}")
        if s in self:
            return self
        levels = {k: self._levels[k] for k in range(1, len(self._levels))}
        k = len(s) - 1
        if k >= 1:
            levels[k] = np.vstack([levels.get(k, _empty(k)), np.array([s])])
        return SimplicialComplex.from_levels(self.n, levels)

    def with_simplices(self, k: int, rows: np.ndarray) -> "SimplicialComplex":
        """New complex with the k-simplex rows (and their faces) added."""
        levels = {j: self._levels[j] for j in range(1, len(self._levels))}
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, k + 1)
        if k >= 1 and rows.shape[0]:
            levels[k] = np.vstack([levels.get(k, _empty(k)), rows])
        return SimplicialComplex.from_levels(self.n, levels)

    def skeleton(self, k: int) -> "SimplicialComplex":
        levels = {j: self._levels[j] for j in range(1, min(k, self.dim) + 1)}
        return SimplicialComplex.from_levels(self.n, levels, closed=True)

    def restrict(self, keep: dict[int, np.ndarray]) -> "SimplicialComplex":
        """Subcomplex keeping, per dimension, the rows selected by a boolean mask.

        The masks must describe a downward-closed family.
        """
        levels = {k: self._levels[k][np.asarray(m, dtype=bool)] for k, m in keep.items() if k >= 1}
        return SimplicialComplex.from_levels(self.n, levels, closed=True)

    # ------------------------------------------------------------- validation
    def _check_range(self, rows: np.ndarray) -> None:
        if rows.size and (rows.min() < 0 or rows.max() >= self.n):
            raise ComplexError(f"vertex index out of range for n={self.n}")

    def _check_capacity(self) -> None:
        total = len(self)
        if total > MAX_SIMPLICES:
            raise CapacityError(f"{total} simplexes exceed the cap of {MAX_SIMPLICES}")

    def _validate(self) -> None:
        while len(self._levels) > 1 and self._levels[-1].shape[0] == 0:
            self._levels.pop()
        for k in range(1, len(self._levels)):
            rows = self._levels[k]
            if rows.shape[0] == 0:
                continue
            self._check_range(rows)
            if np.any(np.diff(rows, axis=1) <= 0):
                raise ComplexError(f"level {k} has rows that are not strictly increasing")
            if rows.shape[0] > 1 and not _strictly_sorted(rows, self.n):
                raise ComplexError(f"level {k} is not sorted and duplicate-free")
            if k >= 2 and np.any(self.boundary_index(k) < 0):
                raise ComplexError(f"level {k} is not downward closed")

    # ---------------------------------------------------------------- text io
    def to_text(self) -> str:
        return format_simplices(self.n, self, header=f"n={self.n}")

    @classmethod
    def from_text(cls, text: str) -> "SimplicialComplex":
        n, flags, rows = parse_simplices(text)
        return cls(n, rows)


def _strictly_sorted(rows: np.ndarray, n: int) -> bool:
    keys = row_keys(rows, n)
    if keys.dtype.kind == "V":
        order = np.lexsort(rows.T[::-1])
        return bool(np.array_equal(order, np.arange(rows.shape[0]))) and np.unique(keys).shape[0] == rows.shape[0]
    return bool(np.all(keys[1:] > keys[:-1]))


def _close_levels(n: int, tops: dict[int, np.ndarray]) -> list[np.ndarray]:
    top = max((k for k, r in tops.items() if len(r)), default=0)
    levels: list[np.ndarray] = [np.arange(n, dtype=np.int64)[:, None]]
    work = {k: [np.asarray(r, dtype=np.int64).reshape(-1, k + 1)] for k, r in tops.items() if len(r)}
    closed: dict[int, np.ndarray] = {}
    for k in range(top, 0, -1):
        parts = work.get(k, [])
        if not parts:
            closed[k] = _empty(k)
            continue
        rows = np.vstack(parts)
        if rows.size and (rows.min() < 0 or rows.max() >= n):
            raise ComplexError(f"vertex index out of range for n={n}")
        if np.any(np.diff(rows, axis=1) <= 0):
            raise ComplexError("simplex rows must be strictly increasing")
        rows = unique_rows(rows, n)
        closed[k] = rows
        if k >= 2:
            work.setdefault(k - 1, []).append(facets_of(rows).reshape(-1, k))
    levels.extend(closed[k] for k in range(1, top + 1))
    return levels


# ---------------------------------------------------------------------------
# face / shell enumeration


def _group_pairs(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs ``(i, j)``, ``i < j``, of rows sharing all but their last vertex."""
    m, width = rows.shape
    if m < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if width == 1:
        starts = np.zeros(1, dtype=np.int64)
        ends = np.array([m], dtype=np.int64)
        group_of = np.zeros(m, dtype=np.int64)
    else:
        prefix = rows[:, :-1]
        new = np.ones(m, dtype=bool)
        new[1:] = np.any(prefix[1:] != prefix[:-1], axis=1)
        starts = np.flatnonzero(new)
        ends = np.append(starts[1:], m)
        group_of = np.cumsum(new) - 1
    end_of_row = ends[group_of]
    counts = end_of_row - np.arange(m) - 1
    total = int(counts.sum())
    first = np.repeat(np.arange(m, dtype=np.int64), counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    return first, first + offsets + 1


def shell_candidates(X: SimplicialComplex, k: int) -> np.ndarray:
    """All (k+1)-vertex sets whose complete (k-1)-boundary lies in ``X``."""
    if k < 1:
        raise ComplexError("shells start at k=1")
    if k == 1:
        return all_subsets(X.n, 2)
    lower = X.level(k - 1)
    i, j = _group_pairs(lower)
    if i.size == 0:
        return _empty(k)
    cand = np.hstack([lower[i], lower[j][:, -1:]])
    # faces dropping the last or second-to-last vertex are lower[j], lower[i]
    ok = np.ones(cand.shape[0], dtype=bool)
    for drop in range(k - 1):
        face = np.delete(cand, drop, axis=1)
        ok &= X.contains_rows(k - 1, face)
    return cand[ok]


def k_shells(X: SimplicialComplex, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Split the k-shells of ``X`` into ``(filled, empty)`` row arrays.

    ``len(filled) + len(empty)`` is the shell count and ``len(filled)`` the
    number of k-simplexes.
    """
    if not 1 <= k < max(X.n, 1):
        raise ComplexError(f"shell dimension {k} outside 1..n-1")
    cand = shell_candidates(X, k)
    filled = X.contains_rows(k, cand)
    return cand[filled], cand[~filled]


def flag_completion(G: SimplicialComplex, max_dim: int) -> SimplicialComplex:
    """Clique complex of the 1-skeleton of ``G`` up to dimension ``max_dim``."""
    levels = {1: G.level(1).copy()} if G.dim >= 1 else {}
    X = SimplicialComplex.from_levels(G.n, levels, closed=True)
    for k in range(2, max_dim + 1):
        cand = shell_candidates(X, k)
        if cand.shape[0] == 0:
            break
        levels[k] = cand
        X = SimplicialComplex.from_levels(G.n, levels, closed=True)
    return X


def generalized_degree(X: SimplicialComplex, tau: Iterable[int], d: int) -> int:
    """Number of d-simplexes of ``X`` that contain ``tau``."""
    tau = simplex(tau)
    if tau not in X:
        raise ComplexError(f"{tau} is not a simplex of the complex")
    if d <= len(tau) - 1:
        raise ComplexError("target dimension must exceed the simplex dimension")
    rows = X.level(d)
    if rows.shape[0] == 0:
        return 0
    mask = np.ones(rows.shape[0], dtype=bool)
    for v in tau:
        mask &= np.any(rows == v, axis=1)
    return int(mask.sum())


def degree_sequence(X: SimplicialComplex, d: int) -> np.ndarray:
    """d-degrees of all (d-1)-slots: count of d-simplexes on each (d-1)-subset.

    Returned in lexicographic slot order over all ``C(n, d)`` subsets.
    """
    counts = np.zeros(comb(X.n, d), dtype=np.int64)
    rows = X.level(d)
    if rows.shape[0]:
        faces = facets_of(rows).reshape(-1, d)
        np.add.at(counts, lex_rank(faces, X.n), 1)
    return counts


def vertex_degrees(X: SimplicialComplex, d: int) -> np.ndarray:
    """Per-vertex d-degrees: number of d-simplexes containing each vertex."""
    return np.bincount(X.level(d).ravel(), minlength=X.n).astype(np.int64)


def euler_characteristic(X: SimplicialComplex) -> int:
    return int(sum((-1) ** k * f for k, f in enumerate(X.f_vector())))


# ---------------------------------------------------------------------------
# text format


def _sorted_tuples(simplices: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    return sorted(tuple(int(v) for v in s) for s in simplices)


def format_simplices(n: int, simplices: Iterable[Sequence[int]], header: str) -> str:
    lines = [header]
    lines.extend(",".join(map(str, s)) for s in _sorted_tuples(simplices))
    return "\n".join(lines) + "\n"


def parse_simplices(text: str) -> tuple[int, dict[str, str], list[tuple[int, ...]]]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise ComplexError("missing 'n=<int>' header line")
    flags = dict(tok.split("=", 1) for tok in lines[0].split())
    n = int(flags.pop("n"))
    rows = [tuple(int(v) for v in ln.split(",")) for ln in lines[1:]]
    return n, flags, rows


def write_complex(X: SimplicialComplex, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(X.to_text())


def read_complex(path) -> SimplicialComplex:
    with open(path, encoding="ascii") as fh:
        return SimplicialComplex.from_text(fh.read())


# ---------------------------------------------------------------------------
# filtrations


class Filtration:
    """A complex with a birth value per simplex, monotone along faces.

    ``births[k]`` is aligned with ``complex.level(k)``.
    """

    def __init__(self, complex: SimplicialComplex, births: dict[int, np.ndarray]):
        self.complex = complex
        self.births = {}
        for k in range(complex.dim + 1):
            b = np.asarray(births.get(k, np.zeros(complex.count(k))), dtype=float)
            if b.shape != (complex.count(k),):
                raise ComplexError(f"births for level {k} have wrong length")
            if np.any(b < 0) or np.any(np.isnan(b)):
                raise ComplexError("births must be non-negative reals")
            self.births[k] = b
        for k in range(1, complex.dim + 1):
            if complex.count(k) == 0:
                continue
            face_b = self.births[k - 1][complex.boundary_index(k)].max(axis=1)
            if np.any(face_b > self.births[k]):
                raise ComplexError(f"non-monotone filtration at dimension {k}")

    def sublevel(self, r: float) -> SimplicialComplex:
        keep = {k: self.births[k] <= r for k in range(1, self.complex.dim + 1)}
        return self.complex.restrict(keep)

    def order(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Filtration order as ``(dims, rows_within_level, births)``.

        Sorted by birth, then dimension, then lexicographic vertex order.
        """
        dims, idx, births = [], [], []
        for k in range(self.complex.dim + 1):
            m = self.complex.count(k)
            dims.append(np.full(m, k, dtype=np.int64))
            idx.append(np.arange(m, dtype=np.int64))
            births.append(self.births[k])
        dims = np.concatenate(dims)
        idx = np.concatenate(idx)
        births = np.concatenate(births)
        # rows within a level are already lexicographic, so (dim, idx) breaks ties
        order = np.lexsort((idx, dims, births))
        return dims[order], idx[order], births[order]
