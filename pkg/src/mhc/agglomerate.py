"""First-nearest-neighbor agglomeration over integrated cosine distances.

One merge pass: find each node's nearest neighbor under the mean of
per-view cosine distances, connect mutual/one-sided nearest pairs into an
undirected graph, and collapse connected components.  Every node has
degree >= 1, so every component has >= 2 nodes and the cluster count
strictly drops; that is the whole termination argument.

Two interchangeable nearest-neighbor backends are provided.  The exact
backend scans block-wise without materializing the full n x n matrix.
The tree backend maps mean cosine distance to squared Euclidean distance
on per-view-normalized, concatenated, 1/sqrt(v)-scaled rows:

    |z_a - z_b|^2 = (1/v) sum_i 2 (1 - <u_a, u_b>)  =  2 * d_mean(a, b)

which is monotone, so exact Euclidean nearest neighbors from a k-d tree
are exact cosine-mean nearest neighbors.  Both backends break distance
ties toward the smallest index, and tests pin them elementwise equal.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .dataset import MultiViewDataset
from .distance import normalize_rows
from .errors import ValidationError
from .partition import Partition

# Tolerance band for recognizing distance ties.  Wider than any noise the
# two backends' arithmetic paths can produce (BLAS tiling can round dot
# products of bit-identical rows differently), far narrower than genuine
# distance gaps.  Rows whose minimum is not unique within the band are
# re-resolved through one shared, position-independent arbiter so both
# backends break ties identically.
_TIE_ATOL = 1e-12
_TIE_RTOL = 1e-9


def _tie_threshold(best):
    return best + _TIE_ATOL + _TIE_RTOL * best


def _resolve_tie(units, a: int, candidates) -> int:
    # one np.dot per candidate pair: bit-identical inputs give
    # bit-identical outputs regardless of row position
    best_val = np.inf
    best_idx = -1
    for c in sorted(int(c) for c in candidates):
        if c == a:
            continue
        total = 0.0
        for u in units:
            total += 1.0 - float(np.dot(u[c], u[a]))
        total /= len(units)
        if total < best_val:
            best_val = total
            best_idx = c
    return best_idx


@dataclass(frozen=True)
class NeighborGraph:
    """Undirected graph on cluster nodes; edges as sorted (a, b) pairs."""

    order: int
    edges: np.ndarray

    def __post_init__(self):
        edges = np.ascontiguousarray(self.edges, dtype=np.int64)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValidationError("edges must be an (E, 2) array")
        if edges.size:
            if int(edges.min()) < 0 or int(edges.max()) >= self.order:
                raise ValidationError("edge endpoint out of range")
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValidationError("edges must be sorted pairs a < b")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)


@dataclass(frozen=True)
class ClusterRepresentatives:
    """Per-view representative matrix per cluster, plus member counts.

    Row c of each view is the mean of the *original* samples in cluster
    c, i.e. the size-weighted mean of lower-level representatives.
    """

    views: tuple[np.ndarray, ...]
    sizes: np.ndarray

    def __post_init__(self):
        sizes = np.ascontiguousarray(self.sizes, dtype=np.int64)
        if sizes.ndim != 1 or sizes.size == 0 or int(sizes.min()) < 1:
            raise ValidationError("cluster sizes must be positive")
        for view in self.views:
            if view.shape[0] != sizes.shape[0]:
                raise ValidationError("views and sizes disagree on cluster count")
        sizes.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)


def thread_count() -> int:
    """Worker count for the tree backend; MHC_THREADS overrides."""
    raw = os.environ.get("MHC_THREADS", "").strip()
    if raw:
        try:
            val = int(raw)
        except ValueError:
            raise ValidationError(
                f"MHC_THREADS must be a positive integer, got {raw!r}"
            ) from None
        if val < 1:
            raise ValidationError(f"MHC_THREADS must be a positive integer, got {raw!r}")
        return val
    return os.cpu_count() or 1


def _as_view_matrices(x) -> list[np.ndarray]:
    if isinstance(x, MultiViewDataset):
        mats = list(x.views)
    elif isinstance(x, ClusterRepresentatives):
        mats = list(x.views)
    else:
        mats = [np.asarray(m, dtype=np.float64) for m in x]
    if not mats:
        raise ValidationError("no views given")
    rows = mats[0].shape[0]
    for m in mats:
        if m.ndim != 2 or m.shape[0] != rows:
            raise ValidationError("views must be 2-d with one shared row count")
    if rows < 2:
        raise ValidationError("need at least 2 rows for nearest neighbors")
    return mats


def nearest_neighbors_exact(x, *, block_rows: int | None = None) -> np.ndarray:
    """Integrated-distance nearest neighbor per row, by blocked full scan.

    Accumulates per-view cosine distances for a block of query rows
    against all rows, averages, masks the self-distance with +inf, and
    takes the row argmin (first occurrence, hence smallest index on
    ties).  Never allocates more than block_rows * n floats at once.
    """
    views = _as_view_matrices(x)
    units = [normalize_rows(m) for m in views]
    k = units[0].shape[0]
    if block_rows is None:
        block_rows = max(16, min(k, (1 << 24) // k))
    out = np.empty(k, dtype=np.int64)
    for start in range(0, k, block_rows):
        stop = min(start + block_rows, k)
        acc = None
        for u in units:
            d = 1.0 - u[start:stop] @ u.T
            acc = d if acc is None else acc + d
        acc /= len(units)
        acc[np.arange(stop - start), np.arange(start, stop)] = np.inf
        out[start:stop] = np.argmin(acc, axis=1)
        best = acc[np.arange(stop - start), out[start:stop]]
        thresh = _tie_threshold(best)
        tied = np.nonzero((acc <= thresh[:, None]).sum(axis=1) > 1)[0]
        for r in tied:
            cand = np.nonzero(acc[r] <= thresh[r])[0]
            out[start + r] = _resolve_tie(units, start + r, cand)
    return out


def nearest_neighbors_fast(x, *, workers: int | None = None) -> np.ndarray:
    """Same contract as nearest_neighbors_exact via a k-d tree.

    Queries k=3 neighbors (self included) and keeps the closest non-self
    candidate.  Rows whose minimum is not unique within the tie band --
    duplicate rows, or a third neighbor close enough that unreturned
    points could still compete -- fall back to a radius query and the
    shared tie arbiter.
    """
    views = _as_view_matrices(x)
    units = [normalize_rows(m) for m in views]
    k = units[0].shape[0]
    z = np.ascontiguousarray(np.hstack(units) / np.sqrt(len(units)))
    tree = cKDTree(z)
    if workers is None:
        workers = thread_count()
    kq = min(3, k)
    dist, idx = tree.query(z, k=kq, workers=workers)
    rows = np.arange(k)
    d = np.where(idx == rows[:, None], np.inf, dist)
    # squared z-distance / 2 equals the mean-over-views cosine distance
    d_int = d * d / 2.0
    order = np.argmin(d_int, axis=1)
    nn = idx[rows, order].astype(np.int64)
    best = d_int[rows, order]
    thresh = _tie_threshold(best)
    ambiguous = (d_int <= thresh[:, None]).sum(axis=1) > 1
    # the farthest returned neighbor still inside the band means points
    # beyond the kq returned could compete as well
    ambiguous |= (dist[:, -1] ** 2 / 2.0) <= thresh
    for a in np.nonzero(ambiguous)[0]:
        radius = math.sqrt(2.0 * thresh[a]) * (1.0 + 1e-12)
        group = tree.query_ball_point(z[a], radius)
        nn[a] = _resolve_tie(units, int(a), group)
    return nn


def nearest_neighbors(x, *, backend: str = "tree", workers: int | None = None) -> np.ndarray:
    if backend == "tree":
        return nearest_neighbors_fast(x, workers=workers)
    if backend == "exact":
        return nearest_neighbors_exact(x)
    raise ValidationError(f"unknown nearest-neighbor backend: {backend!r}")


def nearest_from_distance_matrix(dist) -> np.ndarray:
    """Row argmin of a precomputed distance matrix, self excluded."""
    d = np.array(dist, dtype=np.float64, copy=True)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValidationError("distance matrix must be square")
    if d.shape[0] < 2:
        raise ValidationError("need at least 2 nodes")
    np.fill_diagonal(d, np.inf)
    return np.argmin(d, axis=1).astype(np.int64)


def build_graph(nearest) -> NeighborGraph:
    """Undirected graph with an edge whenever either endpoint picked the other."""
    nearest = np.asarray(nearest, dtype=np.int64)
    k = nearest.shape[0]
    if nearest.ndim != 1 or k < 2:
        raise ValidationError("nearest must be a 1-d array over >= 2 nodes")
    if int(nearest.min()) < 0 or int(nearest.max()) >= k:
        raise ValidationError("nearest-neighbor index out of range")
    nodes = np.arange(k, dtype=np.int64)
    if np.any(nearest == nodes):
        raise ValidationError("self-loop: a node listed itself as nearest")
    pairs = np.stack([np.minimum(nodes, nearest), np.maximum(nodes, nearest)], axis=1)
    edges = np.unique(pairs, axis=0)
    return NeighborGraph(order=k, edges=edges)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]  # path halving
            a = parent[a]
        return a

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def connected_components(graph: NeighborGraph) -> Partition:
    """Partition of graph nodes into connected components, canonical ids."""
    uf = _UnionFind(graph.order)
    for a, b in graph.edges:
        uf.union(int(a), int(b))
    roots = np.fromiter(
        (uf.find(i) for i in range(graph.order)), dtype=np.int64, count=graph.order
    )
    return Partition.from_assignment(roots)


def group_sums(views, assignment, num_clusters: int):
    """Per-view sums of original rows per cluster, plus member counts."""
    assignment = np.asarray(assignment, dtype=np.int64)
    sizes = np.bincount(assignment, minlength=num_clusters)
    if sizes.min() < 1:
        raise ValidationError("every cluster must be non-empty")
    order = np.argsort(assignment, kind="stable")
    cuts = np.searchsorted(assignment[order], np.arange(num_clusters))
    sums = [np.add.reduceat(np.asarray(x)[order], cuts, axis=0) for x in views]
    return sums, sizes


def compute_representatives(
    dataset: MultiViewDataset, partition: Partition
) -> ClusterRepresentatives:
    """Mean of original member samples per cluster, per view."""
    if partition.n != dataset.n:
        raise ValidationError(
            f"partition covers {partition.n} samples, dataset has {dataset.n}"
        )
    sums, sizes = group_sums(dataset.views, partition.assignment, partition.num_clusters)
    views = []
    for s in sums:
        rep = s / sizes[:, None]
        rep.setflags(write=False)
        views.append(rep)
    return ClusterRepresentatives(views=tuple(views), sizes=sizes)
