"""Canonical flat partitions used for both sample and node assignments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class Partition:
    """Cluster id per element, ids contiguous in [0, num_clusters).

    Canonical form orders cluster ids by each cluster's smallest member,
    so two runs that group elements identically produce identical arrays.
    Construct from arbitrary ids with :meth:`from_assignment`.
    """

    assignment: np.ndarray
    num_clusters: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.assignment, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("assignment must be a non-empty 1-d array")
        if self.num_clusters < 1:
            raise ValidationError("need at least one cluster")
        if int(arr.min()) < 0 or int(arr.max()) >= self.num_clusters:
            raise ValidationError("cluster ids must lie in [0, num_clusters)")
        if np.bincount(arr, minlength=self.num_clusters).min() == 0:
            raise ValidationError("every cluster id must be used")
        arr.setflags(write=False)
        object.__setattr__(self, "assignment", arr)

    @classmethod
    def from_assignment(cls, raw) -> "Partition":
        raw = np.asarray(raw)
        _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        return cls(assignment=rank[inverse], num_clusters=int(first.size))

    @property
    def n(self) -> int:
        return int(self.assignment.shape[0])

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_clusters)

    def __eq__(self, other):
        return (
            isinstance(other, Partition)
            and self.num_clusters == other.num_clusters
            and np.array_equal(self.assignment, other.assignment)
        )
