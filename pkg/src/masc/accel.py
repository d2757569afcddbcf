"""Dual-path numeric kernels: numba-jitted loops with a pure-numpy fallback.

Every hot inner loop of the toolkit (kernel evaluation, field accumulation,
edge sweeps, nearest-neighbor voting, Jacobi rotations) lives here in two
functionally identical implementations.  The jitted path is used when numba
imports cleanly and the environment variable ``MASC_NUMBA`` is not set to a
falsy value (``0``, ``false``, ``off``, ``no``).  ``MASC_THREADS`` caps the
numba threading layer.

``benchmarks/bench_accel.py`` times the two paths against each other.
"""

from __future__ import annotations

import os

import numpy as np


def _flag_disabled() -> bool:
    return os.environ.get("MASC_NUMBA", "").strip().lower() in {"0", "false", "off", "no"}


USING_NUMBA = False
if not _flag_disabled():
    try:
        import numba
        from numba import njit, prange

        threads = os.environ.get("MASC_THREADS", "").strip()
        if threads.isdigit() and int(threads) > 0:
            numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via subprocess test
        USING_NUMBA = False

# Keep numpy row reductions block-size independent: summing axis=1 of a
# (g, n) array uses pairwise summation over n regardless of g, so per-row
# results are bit-identical whether evaluated singly or in bulk.
_BLOCK_ROWS = 2048


# ---------------------------------------------------------------------------
# trigonometric kernel evaluation: w0 + 2 * sum_k w_k cos(k t)


def _cosine_sum_np(weights: np.ndarray, ts: np.ndarray) -> np.ndarray:
    n = weights.shape[0]
    ks = np.arange(1, n, dtype=np.float64)
    tail = weights[1:]
    out = np.empty(ts.shape[0], dtype=np.float64)
    for lo in range(0, ts.shape[0], _BLOCK_ROWS):
        hi = min(lo + _BLOCK_ROWS, ts.shape[0])
        out[lo:hi] = weights[0] + 2.0 * np.sum(
            np.cos(np.multiply.outer(ts[lo:hi], ks)) * tail, axis=1
        )
    return out


if USING_NUMBA:

    @njit(cache=True, parallel=True)
    def _cosine_sum_jit(weights, ts):
        n = weights.shape[0]
        out = np.empty(ts.shape[0], dtype=np.float64)
        for i in prange(ts.shape[0]):
            t = ts[i]
            acc = 0.0
            for k in range(1, n):
                acc += weights[k] * np.cos(k * t)
            out[i] = weights[0] + 2.0 * acc
        return out

    def cosine_sum(weights: np.ndarray, ts: np.ndarray) -> np.ndarray:
        return _cosine_sum_jit(weights, ts)

else:
    cosine_sum = _cosine_sum_np


# ---------------------------------------------------------------------------
# field accumulation: mean over columns of Phi(dist)^2, Phi read from a
# uniform lookup table on [0, pi] (linear interpolation)


def _field_rows_np(dist_block: np.ndarray, table: np.ndarray, step: float) -> np.ndarray:
    pos = np.clip(dist_block / step, 0.0, table.shape[0] - 1.0)
    idx = np.minimum(pos.astype(np.int64), table.shape[0] - 2)
    frac = pos - idx
    phi = table[idx] * (1.0 - frac) + table[idx + 1] * frac
    return np.sum(phi * phi, axis=1)


if USING_NUMBA:

    @njit(cache=True, parallel=True)
    def _field_rows_jit(dist_block, table, step):
        rows, cols = dist_block.shape
        last = table.shape[0] - 2
        out = np.empty(rows, dtype=np.float64)
        for i in prange(rows):
            acc = 0.0
            for j in range(cols):
                pos = dist_block[i, j] / step
                if pos < 0.0:
                    pos = 0.0
                elif pos > last + 1.0:
                    pos = last + 1.0
                idx = int(pos)
                if idx > last:
                    idx = last
                frac = pos - idx
                phi = table[idx] * (1.0 - frac) + table[idx + 1] * frac
                acc += phi * phi
            out[i] = acc
        return out

    def field_rows(dist_block: np.ndarray, table: np.ndarray, step: float) -> np.ndarray:
        return _field_rows_jit(dist_block, table, step)

else:
    field_rows = _field_rows_np


# ---------------------------------------------------------------------------
# union-find with batched edge sweeps


def _find_np(parent: np.ndarray, i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def _union_edges_np(parent: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> None:
    for a, b in zip(rows.tolist(), cols.tolist()):
        ra = _find_np(parent, a)
        rb = _find_np(parent, b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb


if USING_NUMBA:

    @njit(cache=True)
    def _union_edges_jit(parent, rows, cols):
        for e in range(rows.shape[0]):
            a = rows[e]
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = cols[e]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b

    def union_edges(parent: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> None:
        _union_edges_jit(parent, rows.astype(np.int64), cols.astype(np.int64))

else:

    def union_edges(parent: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> None:
        _union_edges_np(parent, rows, cols)


def flatten_roots(parent: np.ndarray) -> np.ndarray:
    """Resolve every entry to its root, in place, and return the array."""
    for i in range(parent.shape[0]):
        parent[i] = _find_np(parent, i)
    return parent


# ---------------------------------------------------------------------------
# k-nearest labeled neighbors with deterministic tie rules:
# distance ties prefer the smaller point id, vote ties the smaller label


def _knn_votes_np(dist_block, neighbor_ids, neighbor_labels, kbar, n_labels):
    rows = dist_block.shape[0]
    k = min(kbar, dist_block.shape[1])
    out = np.empty(rows, dtype=np.int64)
    for i in range(rows):
        sel = np.lexsort((neighbor_ids, dist_block[i]))[:k]
        counts = np.bincount(neighbor_labels[sel], minlength=n_labels)
        out[i] = int(np.argmax(counts))
    return out


if USING_NUMBA:

    @njit(cache=True, parallel=True)
    def _knn_votes_jit(dist_block, neighbor_ids, neighbor_labels, kbar, n_labels):
        rows, cols = dist_block.shape
        k = min(kbar, cols)
        out = np.empty(rows, dtype=np.int64)
        for i in prange(rows):
            dist = dist_block[i].copy()
            ids = neighbor_ids.copy()
            labs = neighbor_labels.copy()
            # partial selection sort of the k smallest (distance, id) pairs
            for a in range(k):
                best = a
                for b in range(a + 1, cols):
                    if dist[b] < dist[best] or (dist[b] == dist[best] and ids[b] < ids[best]):
                        best = b
                if best != a:
                    dist[a], dist[best] = dist[best], dist[a]
                    ids[a], ids[best] = ids[best], ids[a]
                    labs[a], labs[best] = labs[best], labs[a]
            counts = np.zeros(n_labels, dtype=np.int64)
            for a in range(k):
                counts[labs[a]] += 1
            winner = 0
            for lab in range(1, n_labels):
                if counts[lab] > counts[winner]:
                    winner = lab
            out[i] = winner
        return out

    def knn_votes(dist_block, neighbor_ids, neighbor_labels, kbar, n_labels):
        return _knn_votes_jit(
            np.ascontiguousarray(dist_block, dtype=np.float64),
            neighbor_ids.astype(np.int64),
            neighbor_labels.astype(np.int64),
            kbar,
            n_labels,
        )

else:
    knn_votes = _knn_votes_np


# ---------------------------------------------------------------------------
# cyclic Jacobi eigendecomposition of a symmetric matrix


def _jacobi_sweeps_np(a: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int) -> int:
    q = a.shape[0]
    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2.0)
        if off < tol:
            return sweep
        for p in range(q - 1):
            for r in range(p + 1, q):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                theta = 0.5 * (a[r, r] - a[p, p]) / apr
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = a[:, p].copy()
                rot_r = a[:, r].copy()
                a[:, p] = c * rot_p - s * rot_r
                a[:, r] = s * rot_p + c * rot_r
                rot_p = a[p, :].copy()
                rot_r = a[r, :].copy()
                a[p, :] = c * rot_p - s * rot_r
                a[r, :] = s * rot_p + c * rot_r
                rot_p = v[:, p].copy()
                rot_r = v[:, r].copy()
                v[:, p] = c * rot_p - s * rot_r
                v[:, r] = s * rot_p + c * rot_r
    return max_sweeps


if USING_NUMBA:

    @njit(cache=True)
    def _jacobi_sweeps_jit(a, v, tol, max_sweeps):
        q = a.shape[0]
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(q - 1):
                for r in range(p + 1, q):
                    off += 2.0 * a[p, r] * a[p, r]
            if np.sqrt(off) < tol:
                return sweep
            for p in range(q - 1):
                for r in range(p + 1, q):
                    apr = a[p, r]
                    if apr == 0.0:
                        continue
                    theta = 0.5 * (a[r, r] - a[p, p]) / apr
                    if theta == 0.0:
                        t = 1.0
                    elif theta > 0.0:
                        t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    for i in range(q):
                        aip = a[i, p]
                        air = a[i, r]
                        a[i, p] = c * aip - s * air
                        a[i, r] = s * aip + c * air
                    for i in range(q):
                        api = a[p, i]
                        ari = a[r, i]
                        a[p, i] = c * api - s * ari
                        a[r, i] = s * api + c * ari
                    for i in range(q):
                        vip = v[i, p]
                        vir = v[i, r]
                        v[i, p] = c * vip - s * vir
                        v[i, r] = s * vip + c * vir
        return max_sweeps

    def jacobi_sweeps(a, v, tol, max_sweeps):
        return _jacobi_sweeps_jit(a, v, tol, max_sweeps)

else:
    jacobi_sweeps = _jacobi_sweeps_np
