"""Nested partition hierarchies: fitting, level selection, refinement.

fit() alternates two parameter-free steps until one cluster remains:
integrate per-view cosine distances between current cluster
representatives, then collapse the first-nearest-neighbor graph into
connected components.  Level 0 is the first pass over raw samples, so
every stored level has fewer clusters than samples and counts strictly
decrease to 1.

cut() recovers an exact cluster count m: start from the coarsest level
with at least m clusters (the closest division) and greedily merge the
pair of clusters with minimum integrated representative distance, one
pair per iteration; that is exactly |closest| - m merges.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .agglomerate import (
    ClusterRepresentatives,
    build_graph,
    compute_representatives,
    connected_components,
    group_sums,
    nearest_neighbors,
)
from .dataset import MultiViewDataset
from .distance import (
    integrate_distances,
    integrated_pair_distances,
    normalize_rows,
    view_distance_matrix,
)
from .errors import ValidationError
from .partition import Partition

FORMAT_NAME = "mhc-hierarchy"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class MergeDistanceStats:
    """Distribution of the nearest-neighbor distances merged at one level."""

    dist_min: float
    dist_mean: float
    dist_max: float


@dataclass(frozen=True)
class Hierarchy:
    """Strictly coarsening partitions of one dataset, last level = 1 cluster."""

    levels: tuple[Partition, ...]
    merge_stats: tuple[MergeDistanceStats, ...]
    representatives: tuple[ClusterRepresentatives, ...] | None = None

    def __post_init__(self):
        if not self.levels:
            raise ValidationError("hierarchy needs at least one level")
        n = self.levels[0].n
        counts = [p.num_clusters for p in self.levels]
        for p in self.levels:
            if p.n != n:
                raise ValidationError("levels cover different sample counts")
        if any(b >= a for a, b in zip(counts, counts[1:])):
            raise ValidationError("cluster counts must strictly decrease")
        if counts[-1] != 1:
            raise ValidationError("last level must be a single cluster")
        for fine, coarse in zip(self.levels, self.levels[1:]):
            pairs = np.unique(
                np.stack([fine.assignment, coarse.assignment], axis=1), axis=0
            )
            if pairs.shape[0] != fine.num_clusters:
                raise ValidationError("levels are not nested")
        if len(self.merge_stats) != len(self.levels):
            raise ValidationError("need one merge-stats entry per level")
        if self.representatives is not None and len(self.representatives) != len(
            self.levels
        ):
            raise ValidationError("need one representative set per level")

    @property
    def n(self) -> int:
        return self.levels[0].n

    @property
    def level_sizes(self) -> tuple[int, ...]:
        return tuple(p.num_clusters for p in self.levels)


def _merge_pass(views, backend: str, workers):
    nn = nearest_neighbors(views, backend=backend, workers=workers)
    dists = integrated_pair_distances(views, np.arange(nn.shape[0]), nn)
    stats = MergeDistanceStats(
        dist_min=float(dists.min()),
        dist_mean=float(dists.mean()),
        dist_max=float(dists.max()),
    )
    components = connected_components(build_graph(nn))
    return components, stats


def fit(
    dataset: MultiViewDataset,
    *,
    nn_backend: str = "tree",
    workers: int | None = None,
) -> Hierarchy:
    """Cluster hierarchy for a dataset; no tuning parameters.

    The keyword-only arguments select an execution strategy and worker
    count; they do not change the result (the backends are exact and
    tie-break identically).
    """
    components, stats = _merge_pass(dataset.views, nn_backend, workers)
    levels = [components]
    merge_stats = [stats]
    reps = [compute_representatives(dataset, components)]
    while levels[-1].num_clusters > 1:
        components, stats = _merge_pass(reps[-1].views, nn_backend, workers)
        assignment = components.assignment[levels[-1].assignment]
        part = Partition(assignment=assignment, num_clusters=components.num_clusters)
        levels.append(part)
        merge_stats.append(stats)
        reps.append(compute_representatives(dataset, part))
    return Hierarchy(
        levels=tuple(levels),
        merge_stats=tuple(merge_stats),
        representatives=tuple(reps),
    )


def closest_level(hierarchy: Hierarchy, m: int) -> Partition:
    """Coarsest level with at least m clusters.

    With levels sized (7, 3, 1) and m=2, that is the 3-cluster level; an
    exact match returns that level itself.
    """
    top = hierarchy.levels[0].num_clusters
    if m < 1:
        raise ValidationError("cluster count must be at least 1")
    if m > top:
        raise ValidationError(
            f"requested {m} clusters but the finest level has {top}"
        )
    for part in reversed(hierarchy.levels):
        if part.num_clusters >= m:
            return part
    raise AssertionError("unreachable: finest level checked above")


def refine_to_k(dataset: MultiViewDataset, closest: Partition, m: int) -> Partition:
    """Merge down from ``closest`` to exactly m clusters.

    Each iteration merges the pair of clusters whose integrated cosine
    distance between per-view representatives (size-weighted means of
    original samples) is minimal; ties go to the lexicographically
    smallest pair.  Exactly ``closest.num_clusters - m`` iterations.
    """
    k0 = closest.num_clusters
    if not 1 <= m <= k0:
        raise ValidationError(f"cannot refine {k0} clusters to {m}")
    if m == k0:
        return closest
    if closest.n != dataset.n:
        raise ValidationError("partition does not cover this dataset")
    sums, int_sizes = group_sums(dataset.views, closest.assignment, k0)
    counts = int_sizes.astype(np.float64)
    reps = [s / counts[:, None] for s in sums]
    work = integrate_distances([view_distance_matrix(r) for r in reps])
    work[np.tril_indices(k0)] = np.inf  # upper triangle only: pair (i, j), i < j
    alive = np.ones(k0, dtype=bool)
    owner = np.arange(k0)
    for _ in range(k0 - m):
        i, j = np.unravel_index(np.argmin(work), work.shape)
        counts[i] += counts[j]
        for s in sums:
            s[i] += s[j]
        alive[j] = False
        owner[j] = i
        work[j, :] = np.inf
        work[:, j] = np.inf
        others = np.nonzero(alive)[0]
        others = others[others != i]
        if others.size:
            total = np.zeros(others.size)
            for s in sums:
                merged = s[i] / counts[i]
                norm = np.linalg.norm(merged)
                if norm == 0.0:
                    raise ValidationError(
                        "merged cluster representative has zero norm"
                    )
                rest = normalize_rows(s[others] / counts[others, None])
                total += 1.0 - rest @ (merged / norm)
            total /= len(sums)
            below = others < i
            work[others[below], i] = total[below]
            work[i, others[~below]] = total[~below]
    root = owner.copy()
    while True:
        hop = root[root]
        if np.array_equal(hop, root):
            break
        root = hop
    return Partition.from_assignment(root[closest.assignment])


def cut(hierarchy: Hierarchy, dataset: MultiViewDataset, m: int) -> Partition:
    """Exactly m clusters: closest division, then pairwise refinement."""
    if dataset.n != hierarchy.n:
        raise ValidationError(
            f"hierarchy covers {hierarchy.n} samples, dataset has {dataset.n}"
        )
    return refine_to_k(dataset, closest_level(hierarchy, m), m)


def hierarchy_document(
    hierarchy: Hierarchy,
    *,
    command: str = "fit",
    nn_backend: str = "tree",
    header: bool = False,
    input_views=None,
) -> dict:
    """JSON-ready document for a hierarchy; deterministic field values."""
    levels = []
    for part, stats in zip(hierarchy.levels, hierarchy.merge_stats):
        levels.append(
            {
                "num_clusters": part.num_clusters,
                "assignment": part.assignment.tolist(),
                "merge_distance": {
                    "min": float(stats.dist_min),
                    "mean": float(stats.dist_mean),
                    "max": float(stats.dist_max),
                },
            }
        )
    first = hierarchy.representatives[0] if hierarchy.representatives else None
    return {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "tool_version": __version__,
        "command": command,
        "nn_backend": nn_backend,
        "header": bool(header),
        "n": hierarchy.n,
        "v": len(first.views) if first is not None else None,
        "input_views": list(input_views) if input_views is not None else None,
        "level_sizes": list(hierarchy.level_sizes),
        "levels": levels,
    }


def document_text(doc: dict) -> str:
    """Canonical serialization: sorted keys, no whitespace variance."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def hierarchy_from_document(doc: dict) -> Hierarchy:
    """Rebuild a hierarchy (without representatives) from its document."""
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ValidationError("not a hierarchy file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValidationError(
            f"unsupported hierarchy format version: {doc.get('format_version')!r}"
        )
    try:
        raw_levels = doc["levels"]
        levels = []
        stats = []
        for entry in raw_levels:
            levels.append(
                Partition(
                    assignment=np.asarray(entry["assignment"], dtype=np.int64),
                    num_clusters=int(entry["num_clusters"]),
                )
            )
            md = entry["merge_distance"]
            stats.append(
                MergeDistanceStats(
                    dist_min=float(md["min"]),
                    dist_mean=float(md["mean"]),
                    dist_max=float(md["max"]),
                )
            )
        declared_sizes = [int(s) for s in doc["level_sizes"]]
        declared_n = int(doc["n"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed hierarchy file: {exc}") from None
    hierarchy = Hierarchy(levels=tuple(levels), merge_stats=tuple(stats))
    if list(hierarchy.level_sizes) != declared_sizes:
        raise ValidationError("hierarchy level_sizes disagree with levels")
    if hierarchy.n != declared_n:
        raise ValidationError("hierarchy n disagrees with assignments")
    return hierarchy
