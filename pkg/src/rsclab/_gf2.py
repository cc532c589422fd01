"""Compiled linear algebra over the two-element field.

Two kernels: a dense bit-packed echelon basis (fast for the dense random
complexes of the combinatorial models) and a sparse column reduction with
sorted index lists (the standard persistence kernel). Plus a union-find.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from numba.typed import List

_ONE = np.uint64(1)


@njit(cache=True)
def _highest_bit(x):
    hb = 63
    while ((x >> np.uint64(hb)) & _ONE) == 0:
        hb -= 1
    return hb


@njit(cache=True)
def echelon_insert(col_ptr, col_idx, nrows, bound):
    """Insert sparse columns into an echelon basis keyed by highest set row.

    Stops early once ``bound`` independent columns were found. Returns
    ``(rank, basis, pivots, slot_of_row, independent)`` where ``basis[s]`` is
    the packed vector stored in slot ``s`` with highest row ``pivots[s]`` and
    ``independent[j]`` tells whether column ``j`` raised the rank.
    """
    ncols = col_ptr.shape[0] - 1
    nw = (nrows + 63) // 64
    cap = min(nrows, ncols)
    basis = np.zeros((max(cap, 1), max(nw, 1)), dtype=np.uint64)
    pivots = np.full(max(cap, 1), -1, dtype=np.int64)
    slot_of_row = np.full(max(nrows, 1), -1, dtype=np.int64)
    independent = np.zeros(ncols, dtype=np.bool_)
    v = np.zeros(max(nw, 1), dtype=np.uint64)
    rank = 0
    if bound <= 0:
        return rank, basis, pivots, slot_of_row, independent
    for j in range(ncols):
        top = -1
        for t in range(col_ptr[j], col_ptr[j + 1]):
            r = col_idx[t]
            v[r >> 6] ^= _ONE << np.uint64(r & 63)
            if r > top:
                top = r
        tw = top >> 6
        while True:
            while tw >= 0 and v[tw] == 0:
                tw -= 1
            if tw < 0:
                break
            piv = tw * 64 + _highest_bit(v[tw])
            s = slot_of_row[piv]
            if s >= 0:
                for w in range(tw + 1):
                    v[w] ^= basis[s, w]
            else:
                for w in range(tw + 1):
                    basis[rank, w] = v[w]
                    v[w] = 0
                pivots[rank] = piv
                slot_of_row[piv] = rank
                independent[j] = True
                rank += 1
                break
        if rank >= bound:
            break
    return rank, basis, pivots, slot_of_row, independent


@njit(cache=True)
def reduce_to_rref(basis, pivots, rank):
    """Clear every pivot row from all other basis vectors, in place."""
    order = np.argsort(pivots[:rank])
    for a in range(rank):
        s = order[a]
        p = pivots[s]
        pw = p >> 6
        mask = _ONE << np.uint64(p & 63)
        for b in range(a + 1, rank):
            t = order[b]
            if basis[t, pw] & mask:
                tw = pivots[t] >> 6
                for w in range(tw + 1):
                    basis[t, w] ^= basis[s, w]


@njit(cache=True)
def rref_contains(basis, slot_of_row, q_ptr, q_idx, nrows):
    """Membership of sparse query vectors in the span of an RREF basis."""
    nq = q_ptr.shape[0] - 1
    nw = basis.shape[1]
    out = np.zeros(nq, dtype=np.bool_)
    acc = np.zeros(nw, dtype=np.uint64)
    tgt = np.zeros(nw, dtype=np.uint64)
    for j in range(nq):
        for w in range(nw):
            acc[w] = 0
            tgt[w] = 0
        ok = True
        for t in range(q_ptr[j], q_ptr[j + 1]):
            r = q_idx[t]
            tgt[r >> 6] ^= _ONE << np.uint64(r & 63)
        for t in range(q_ptr[j], q_ptr[j + 1]):
            r = q_idx[t]
            if (tgt[r >> 6] >> np.uint64(r & 63)) & _ONE:
                s = slot_of_row[r]
                if s < 0:
                    continue
                for w in range(nw):
                    acc[w] ^= basis[s, w]
        for w in range(nw):
            if acc[w] != tgt[w]:
                ok = False
                break
        out[j] = ok
    return out


@njit(cache=True)
def _symdiff(a, b):
    out = np.empty(a.shape[0] + b.shape[0], dtype=np.int64)
    i = 0
    j = 0
    k = 0
    while i < a.shape[0] and j < b.shape[0]:
        if a[i] < b[j]:
            out[k] = a[i]
            i += 1
            k += 1
        elif a[i] > b[j]:
            out[k] = b[j]
            j += 1
            k += 1
        else:
            i += 1
            j += 1
    while i < a.shape[0]:
        out[k] = a[i]
        i += 1
        k += 1
    while j < b.shape[0]:
        out[k] = b[j]
        j += 1
        k += 1
    return out[:k]


@njit(cache=True)
def sparse_reduce(col_ptr, col_idx, nrows, skip):
    """Standard column reduction; columns hold sorted row indices.

    Columns flagged in ``skip`` are treated as zero (clearing). Returns
    ``low`` per column (``-1`` for zero columns).
    """
    ncols = col_ptr.shape[0] - 1
    owner = np.full(max(nrows, 1), -1, dtype=np.int64)
    low = np.full(ncols, -1, dtype=np.int64)
    store = List()
    empty = np.empty(0, dtype=np.int64)
    for j in range(ncols):
        store.append(empty)
    for j in range(ncols):
        if skip[j]:
            continue
        col = np.sort(col_idx[col_ptr[j]:col_ptr[j + 1]].copy())
        while col.shape[0] > 0:
            piv = col[col.shape[0] - 1]
            o = owner[piv]
            if o < 0:
                break
            col = _symdiff(col, store[o])
        if col.shape[0] > 0:
            piv = col[col.shape[0] - 1]
            owner[piv] = j
            low[j] = piv
            store[j] = col
    return low


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def union_find_components(n, u, v):
    """Connected component label (smallest vertex of the component) per vertex."""
    parent = np.arange(n)
    for e in range(u.shape[0]):
        a = _find(parent, u[e])
        b = _find(parent, v[e])
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    labels = np.empty(n, dtype=np.int64)
    for x in range(n):
        labels[x] = _find(parent, x)
    return labels


@njit(cache=True)
def union_find_merges(n, u, v, vertex_rank):
    """Process edges in the given order; elder-rule merges.

    The surviving root of a merge is the vertex with smaller ``vertex_rank``.
    Returns, per edge, the dying root (``-1`` when the edge closes a cycle).
    """
    parent = np.arange(n)
    dying = np.full(u.shape[0], -1, dtype=np.int64)
    for e in range(u.shape[0]):
        a = _find(parent, u[e])
        b = _find(parent, v[e])
        if a == b:
            continue
        if vertex_rank[a] < vertex_rank[b]:
            parent[b] = a
            dying[e] = b
        else:
            parent[a] = b
            dying[e] = a
    return dying


def csr_columns(rows_per_col: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pointer/index arrays for columns given as a dense ``(m, width)`` table."""
    rows_per_col = np.asarray(rows_per_col, dtype=np.int64)
    m, width = rows_per_col.shape
    ptr = np.arange(0, m * width + 1, width, dtype=np.int64) if m else np.zeros(1, dtype=np.int64)
    return ptr, np.ascontiguousarray(rows_per_col.ravel())


def rank(rows_per_col: np.ndarray, nrows: int, bound: int | None = None) -> int:
    """GF(2) rank of the matrix whose column j has ones at ``rows_per_col[j]``."""
    rows_per_col = np.asarray(rows_per_col, dtype=np.int64)
    if rows_per_col.shape[0] == 0 or nrows == 0:
        return 0
    keep = peel_free_columns(rows_per_col, nrows)
    peeled = int(rows_per_col.shape[0] - keep.sum())
    rows_per_col = rows_per_col[keep]
    if bound is not None:
        bound -= peeled
    if rows_per_col.shape[0] == 0 or (bound is not None and bound <= 0):
        return peeled
    ptr, idx = csr_columns(rows_per_col)
    cap = min(nrows, rows_per_col.shape[0])
    if bound is None:
        bound = cap
    if cap * ((nrows + 63) // 64) * 8 <= 512 * 2**20:
        r, *_ = echelon_insert(ptr, idx, nrows, bound)
        return peeled + int(r)
    low = sparse_reduce(ptr, idx, nrows, np.zeros(rows_per_col.shape[0], dtype=np.bool_))
    return peeled + int(np.count_nonzero(low >= 0))


@njit(cache=True)
def peel_free_columns(cols, nrows):
    """Repeatedly drop columns that own a row no other live column touches.

    Such a column is independent of all others, so the rank equals the number
    of dropped columns plus the rank of the survivors. Returns a keep mask.
    """
    m, w = cols.shape
    deg = np.zeros(nrows, dtype=np.int64)
    for j in range(m):
        for t in range(w):
            deg[cols[j, t]] += 1
    ptr = np.zeros(nrows + 1, dtype=np.int64)
    for r in range(nrows):
        ptr[r + 1] = ptr[r] + deg[r]
    fill = ptr[:-1].copy()
    inc = np.empty(m * w, dtype=np.int64)
    for j in range(m):
        for t in range(w):
            r = cols[j, t]
            inc[fill[r]] = j
            fill[r] += 1
    alive = np.ones(m, dtype=np.bool_)
    stack = np.empty(nrows + m * w, dtype=np.int64)
    top = 0
    for r in range(nrows):
        if deg[r] == 1:
            stack[top] = r
            top += 1
    while top > 0:
        top -= 1
        r = stack[top]
        if deg[r] != 1:
            continue
        c = -1
        for t in range(ptr[r], ptr[r + 1]):
            if alive[inc[t]]:
                c = inc[t]
                break
        alive[c] = False
        for t in range(w):
            q = cols[c, t]
            deg[q] -= 1
            if deg[q] == 1:
                stack[top] = q
                top += 1
    return alive
