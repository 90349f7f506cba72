"""Point clouds and exact Euclidean k-nearest-neighbor tables.

Every estimator in the package consumes a :class:`NeighborTable`: for each
point, the distances to its ``k_max`` nearest neighbors (self excluded,
ascending, ties broken by the smaller point index) and the matching indices.

Two constructors produce bitwise-identical tables. :func:`build_neighbor_table`
uses a KD-tree for low ambient dimension and a blocked scan otherwise;
:func:`brute_force_neighbor_table` sorts the full pairwise matrix and exists
as a testing oracle.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    DegenerateNeighborhood,
    DuplicatePoints,
    InvalidConfig,
    KTooLarge,
    NonFiniteInput,
)

# Above this ambient dimension KD-trees stop paying off.
_TREE_MAX_DIM = 16
# Relative slack used to detect possible ties at the k_max boundary.
_TIE_RTOL = 1e-9
_BLOCK_ELEMS = 4_000_000


def worker_count():
    """Parallelism cap, read from ``IDEST_THREADS`` (default: all cores)."""
    raw = os.environ.get("IDEST_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        value = 0
    return value if value > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class PointCloud:
    """``n`` points in ``R^d`` stored row-major as float64."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise InvalidConfig(f"points must be a 2-D array, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise InvalidConfig(f"a point cloud needs at least 2 points, got {pts.shape[0]}")
        if pts.shape[1] < 1:
            raise InvalidConfig("ambient dimension must be at least 1")
        if not np.all(np.isfinite(pts)):
            bad = np.argwhere(~np.isfinite(pts))[0]
            raise NonFiniteInput(f"non-finite coordinate at row {bad[0]}, column {bad[1]}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class NeighborTable:
    """Sorted k-NN distances and indices for every point of a cloud.

    Attributes:
        distances: ``(n, k_max)`` array; ``distances[i, j]`` is the distance
            from point ``i`` to its ``(j+1)``-th nearest neighbor.
        indices: ``(n, k_max)`` array of the matching neighbor indices.
        d: ambient dimension of the source cloud.
        source_index: for each row, the index of the point in the cloud that
            was passed in (differs from ``arange(n)`` only after duplicates
            were dropped).
    """

    distances: np.ndarray
    indices: np.ndarray
    d: int
    source_index: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("distances", "indices"):
            getattr(self, name).setflags(write=False)
        if self.source_index is None:
            src = np.arange(self.distances.shape[0])
            src.setflags(write=False)
            object.__setattr__(self, "source_index", src)

    @property
    def n(self):
        return self.distances.shape[0]

    @property
    def k_max(self):
        return self.distances.shape[1]

    def kth_distance(self, k):
        """``T_k`` for every point (1-based ``k``)."""
        return self.distances[:, k - 1]

    def count_within(self, point, t):
        """Counting process ``N(t, x)`` restricted to the stored neighbors."""
        return int(np.count_nonzero(self.distances[point] <= t))


def _sq_distances_to(queries, targets):
    """Squared distances with a fixed per-coordinate accumulation order.

    ``queries`` has shape ``(b, d)``. ``targets`` is either ``(n, d)`` (all
    pairs, result ``(b, n)``) or ``(b, m, d)`` (per-row candidates, result
    ``(b, m)``). Both layouts perform the identical floating-point operations
    per pair, which is what makes the tree and oracle paths agree bitwise.
    """
    if targets.ndim == 2:
        acc = np.zeros((queries.shape[0], targets.shape[0]))
        for c in range(queries.shape[1]):
            diff = queries[:, c, None] - targets[None, :, c]
            acc += diff * diff
    else:
        acc = np.zeros(targets.shape[:2])
        for c in range(queries.shape[1]):
            diff = queries[:, c, None] - targets[:, :, c]
            acc += diff * diff
    return acc


def _sort_rows(dist, idx):
    """Order each row by (distance, index)."""
    order = np.lexsort((idx, dist), axis=1)
    return np.take_along_axis(dist, order, axis=1), np.take_along_axis(idx, order, axis=1)


def _prepare(cloud, k_max, dedup_policy):
    if dedup_policy not in ("error", "drop_duplicates"):
        raise InvalidConfig(f"unknown dedup_policy {dedup_policy!r}")
    if not isinstance(k_max, (int, np.integer)) or k_max < 1:
        raise InvalidConfig(f"k_max must be a positive integer, got {k_max!r}")
    pts = cloud.points
    source = np.arange(cloud.n)
    if dedup_policy == "drop_duplicates":
        _, first = np.unique(pts, axis=0, return_index=True)
        source = np.sort(first)
        pts = pts[source]
    n = pts.shape[0]
    if k_max > n - 1:
        raise KTooLarge(f"k too large: k_max={k_max} but only {n} distinct points (need k_max <= n - 1)")
    return pts, source


def _finish(dist_sq, idx, pts, source, dedup_policy):
    dist = np.sqrt(dist_sq)
    if dedup_policy == "error" and np.any(dist[:, 0] == 0.0):
        i = int(np.flatnonzero(dist[:, 0] == 0.0)[0])
        raise DuplicatePoints(
            f"point {i} duplicates point {int(idx[i, 0])} (zero-distance neighbor)"
        )
    return NeighborTable(
        distances=np.ascontiguousarray(dist),
        indices=np.ascontiguousarray(idx.astype(np.intp)),
        d=pts.shape[1],
        source_index=source,
    )


def brute_force_neighbor_table(cloud, k_max, dedup_policy="error"):
    """Reference k-NN table from the full ``n x n`` distance matrix."""
    pts, source = _prepare(cloud, k_max, dedup_policy)
    n = pts.shape[0]
    sq = _sq_distances_to(pts, pts)
    np.fill_diagonal(sq, np.inf)
    idx = np.broadcast_to(np.arange(n), (n, n))
    sq, idx = _sort_rows(sq, idx)
    return _finish(sq[:, :k_max], idx[:, :k_max], pts, source, dedup_policy)


def _blocked_table(pts, k_max):
    n = pts.shape[0]
    block = max(1, _BLOCK_ELEMS // max(n, 1))
    out_sq = np.empty((n, k_max))
    out_idx = np.empty((n, k_max), dtype=np.intp)
    all_idx = np.arange(n)
    for start in range(0, n, block):
        stop = min(n, start + block)
        sq = _sq_distances_to(pts[start:stop], pts)
        rows = np.arange(stop - start)
        sq[rows, start + rows] = np.inf
        # argpartition narrows the candidates; boundary ties are resolved below
        part = np.argpartition(sq, k_max, axis=1)[:, : k_max + 1] if k_max < n - 1 else np.argsort(sq, axis=1)
        cand_sq = np.take_along_axis(sq, part, axis=1)
        cand_sq, cand_idx = _sort_rows(cand_sq, part)
        kth = cand_sq[:, k_max - 1]
        tied = np.flatnonzero(np.sum(sq <= kth[:, None] * (1 + 2 * _TIE_RTOL), axis=1) > k_max)
        for r in tied:
            full_sq, full_idx = _sort_rows(sq[r : r + 1], all_idx[None, :])
            cand_sq[r, :k_max] = full_sq[0, :k_max]
            cand_idx[r, :k_max] = full_idx[0, :k_max]
        out_sq[start:stop] = cand_sq[:, :k_max]
        out_idx[start:stop] = cand_idx[:, :k_max]
    return out_sq, out_idx


def _tree_table(pts, k_max):
    n = pts.shape[0]
    tree = cKDTree(pts)
    kq = min(k_max + 2, n)
    _, cand = tree.query(pts, k=kq, workers=worker_count())
    cand = np.asarray(cand, dtype=np.intp).reshape(n, kq)
    sq = _sq_distances_to(pts, pts[cand])
    sq[cand == np.arange(n)[:, None]] = np.inf
    sq, cand = _sort_rows(sq, cand)
    kth = sq[:, k_max - 1]
    # A row is safe when a strictly farther candidate exists beyond position k_max.
    beyond = sq[:, k_max] if kq > k_max + 1 else np.full(n, np.inf)
    if kq == n:
        unsafe = np.zeros(n, dtype=bool)
    else:
        unsafe = beyond <= kth * (1 + 2 * _TIE_RTOL)
    for r in np.flatnonzero(unsafe):
        radius = np.sqrt(kth[r]) * (1 + _TIE_RTOL) + 1e-300
        ball = np.asarray(tree.query_ball_point(pts[r], radius), dtype=np.intp)
        ball = ball[ball != r]
        bsq = _sq_distances_to(pts[r : r + 1], pts[ball][None, :, :])
        bsq, ball = _sort_rows(bsq, ball[None, :])
        sq[r, :k_max] = bsq[0, :k_max]
        cand[r, :k_max] = ball[0, :k_max]
    return sq[:, :k_max], cand[:, :k_max]


def build_neighbor_table(cloud, k_max, dedup_policy="error"):
    """Exact Euclidean k-NN table for ``cloud``.

    Args:
        cloud: the :class:`PointCloud` to index.
        k_max: number of neighbors kept per point, ``1 <= k_max <= n - 1``.
        dedup_policy: ``"error"`` raises :class:`DuplicatePoints` on any
            zero-distance neighbor; ``"drop_duplicates"`` keeps only the first
            occurrence of each coordinate row and records the survivors in
            ``source_index``.

    Returns:
        A :class:`NeighborTable` identical to
        :func:`brute_force_neighbor_table` on the same input.
    """
    pts, source = _prepare(cloud, k_max, dedup_policy)
    if pts.shape[1] <= _TREE_MAX_DIM:
        sq, idx = _tree_table(pts, k_max)
    else:
        sq, idx = _blocked_table(pts, k_max)
    return _finish(sq, idx, pts, source, dedup_policy)


def _check_k(table, k):
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise InvalidConfig(f"k must be an integer >= 2, got {k!r}")
    if k > table.k_max:
        raise KTooLarge(f"k too large: k={k} exceeds table k_max={table.k_max}")


def log_distance_ratios_all(table, k):
    """``S_k(x) = sum_{j<k} log(T_k / T_j)`` for every point at once."""
    _check_k(table, k)
    dist = table.distances
    if np.any(dist[:, :k] == 0.0):
        raise DegenerateNeighborhood(int(np.flatnonzero(np.any(dist[:, :k] == 0.0, axis=1))[0]))
    return np.log(dist[:, k - 1 : k] / dist[:, : k - 1]).sum(axis=1)


def log_distance_ratios(table, point, k):
    """``S_k`` for a single point; see :func:`log_distance_ratios_all`."""
    _check_k(table, k)
    row = table.distances[point, :k]
    if np.any(row == 0.0):
        raise DegenerateNeighborhood(point)
    return float(np.log(row[k - 1] / row[: k - 1]).sum())
