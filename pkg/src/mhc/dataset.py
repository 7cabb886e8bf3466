"""Multi-view data: container, delimited-text loading, synthetic generation.

The on-disk convention is one sample per row, so a view file with n rows
and d columns loads to an n x d float matrix.  Rows are samples in every
in-memory matrix as well; code that receives column-major data must
transpose before constructing a dataset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MultiViewDataset:
    """v feature matrices over the same n samples, plus optional labels.

    Invariants, checked at construction: every view is a finite n x d_i
    float64 matrix with n >= 2 and d_i >= 1; all views agree on n;
    labels, when present, are n non-negative integers.
    """

    views: tuple[np.ndarray, ...]
    labels: np.ndarray | None = None

    def __post_init__(self):
        if len(self.views) < 1:
            raise ValidationError("dataset needs at least one view")
        cleaned = []
        n = None
        for i, view in enumerate(self.views, start=1):
            arr = np.ascontiguousarray(view, dtype=np.float64)
            if arr.ndim != 2:
                raise ValidationError(f"view {i} is not a 2-d matrix")
            rows, dim = arr.shape
            if rows < 2:
                raise ValidationError(f"view {i} has {rows} sample(s); need at least 2")
            if dim < 1:
                raise ValidationError(f"view {i} has no feature columns")
            if not np.isfinite(arr).all():
                raise ValidationError(f"view {i} contains non-finite values")
            if n is None:
                n = rows
            elif rows != n:
                raise ValidationError(f"view {i} has {rows} rows, expected {n}")
            cleaned.append(_frozen(arr))
        object.__setattr__(self, "views", tuple(cleaned))
        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.ndim != 1 or lab.shape[0] != n:
                raise ValidationError(
                    f"labels have length {lab.size}, expected {n}"
                )
            if not np.issubdtype(lab.dtype, np.integer):
                raise ValidationError("labels must be integers")
            if lab.size and int(lab.min()) < 0:
                raise ValidationError("labels must be non-negative")
            object.__setattr__(
                self, "labels", _frozen(np.ascontiguousarray(lab, dtype=np.int64))
            )

    @property
    def n(self) -> int:
        return self.views[0].shape[0]

    @property
    def v(self) -> int:
        return len(self.views)


def read_text_utf8(path) -> str:
    """Read a text file; undecodable bytes are a validation error, not I/O."""
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise ValidationError(f"{path}: not UTF-8 text") from None


def _detect_delimiter(first_line: str) -> str:
    # Tab wins if present anywhere in the first line; comma otherwise.
    return "\t" if "\t" in first_line else ","


def _load_view(path, *, header: bool = False) -> np.ndarray:
    text = read_text_utf8(path)
    lines = text.splitlines()
    delim = _detect_delimiter(lines[0]) if lines else ","
    rows: list[list[float]] = []
    width = None
    for rownum, line in enumerate(lines, start=1):
        if header and rownum == 1:
            continue
        if not line.strip():
            continue
        vals = []
        for colnum, field in enumerate(line.split(delim), start=1):
            s = field.strip()
            try:
                val = float(s)
            except ValueError:
                raise ValidationError(
                    f"{path}: row {rownum}, column {colnum}: not a number: {s!r}"
                ) from None
            if not math.isfinite(val):
                raise ValidationError(
                    f"{path}: row {rownum}, column {colnum}: non-finite value {s!r}"
                )
            vals.append(val)
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ValidationError(
                f"{path}: row {rownum}: expected {width} columns, found {len(vals)}"
            )
        if all(v == 0.0 for v in vals):
            raise ValidationError(
                f"{path}: row {rownum}: all-zero sample (cosine distance undefined)"
            )
        rows.append(vals)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def load_labels(path, expected: int | None = None) -> np.ndarray:
    """Load one non-negative integer label per line."""
    text = read_text_utf8(path)
    labels = []
    for rownum, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        try:
            val = int(s)
        except ValueError:
            raise ValidationError(
                f"{path}: row {rownum}: not an integer label: {s!r}"
            ) from None
        if val < 0:
            raise ValidationError(f"{path}: row {rownum}: negative label {val}")
        labels.append(val)
    if not labels:
        raise ValidationError(f"{path}: no labels")
    if expected is not None and len(labels) != expected:
        raise ValidationError(
            f"{path}: {len(labels)} labels for {expected} samples"
        )
    return np.asarray(labels, dtype=np.int64)


def load_dataset(view_paths, label_path=None, *, header: bool = False) -> MultiViewDataset:
    """Load a dataset from one delimited text file per view.

    The delimiter (comma or tab) is auto-detected from the first line of
    each file; ``header=True`` skips the first line.  Raises
    ValidationError naming the offending file, row, and column for any
    malformed cell, ragged row, all-zero sample, or row-count mismatch
    across views.
    """
    view_paths = list(view_paths)
    if not view_paths:
        raise ValidationError("at least one view file is required")
    views = [_load_view(p, header=header) for p in view_paths]
    n0 = views[0].shape[0]
    for p, v in zip(view_paths, views):
        if v.shape[0] != n0:
            raise ValidationError(
                f"view row counts differ: {view_paths[0]} has {n0} rows, "
                f"{p} has {v.shape[0]}"
            )
    labels = load_labels(label_path, expected=n0) if label_path is not None else None
    return MultiViewDataset(views=tuple(views), labels=labels)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for the synthetic multi-view generator."""

    n: int
    v: int
    m_true: int
    dims: tuple[int, ...]
    separation: float
    noise: float
    seed: int

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("n must be at least 2")
        if self.v < 1:
            raise ValidationError("v must be at least 1")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != self.v:
            raise ValidationError(f"got {len(dims)} dims for {self.v} views")
        if any(d < 2 for d in dims):
            raise ValidationError("every view needs at least 2 dimensions")
        if not 1 <= self.m_true <= self.n:
            raise ValidationError("m_true must satisfy 1 <= m_true <= n")
        if self.separation < 0:
            raise ValidationError("separation must be >= 0")
        if self.noise < 0:
            raise ValidationError("noise must be >= 0")
        object.__setattr__(self, "dims", dims)


def _random_unit(rng, dim: int) -> np.ndarray:
    while True:
        g = rng.standard_normal(dim)
        norm = np.linalg.norm(g)
        if norm > 1e-12:
            return g / norm


def _cluster_directions(rng, m: int, dim: int):
    """A base unit vector plus m unit vectors orthogonal to it.

    The m directions are mutually orthogonal while dim allows (m < dim);
    past that they are arbitrary unit directions orthogonal to the base.
    """
    base = _random_unit(rng, dim)
    basis = [base]
    dirs = np.empty((m, dim))
    for j in range(m):
        g = rng.standard_normal(dim)
        for e in basis:
            g -= (g @ e) * e
        norm = np.linalg.norm(g)
        if len(basis) < dim and norm > 1e-9:
            g /= norm
            basis.append(g)
        else:
            g = _random_unit(rng, dim)
            g -= (g @ base) * base
            g /= np.linalg.norm(g)
        dirs[j] = g
    return base, dirs


def generate_synthetic(spec: SyntheticSpec) -> MultiViewDataset:
    """Deterministic cluster blobs on the unit sphere, one draw per view.

    Cluster j in a view gets center cos(t)*b + sin(t)*q_j where b is a
    shared base direction, q_j is a unit direction orthogonal to b, and
    t = (pi/2) * separation / (1 + separation).  Squared center gaps are
    sin(t)^2 * (2 - 2 q_i.q_j), so every pairwise cosine distance between
    centers grows monotonically with ``separation`` and reaches 0 at
    separation 0.  Samples add isotropic Gaussian noise; ``noise=0``
    reproduces each center bitwise.  Labels cycle 0..m_true-1 so cluster
    sizes stay balanced.  Everything is a pure function of the spec.
    """
    rng = np.random.default_rng(spec.seed)
    labels = np.arange(spec.n, dtype=np.int64) % spec.m_true
    theta = 0.5 * math.pi * spec.separation / (1.0 + spec.separation)
    views = []
    for dim in spec.dims:
        base, dirs = _cluster_directions(rng, spec.m_true, dim)
        centers = math.cos(theta) * base + math.sin(theta) * dirs
        x = centers[labels]
        if spec.noise > 0:
            x = x + spec.noise * rng.standard_normal((spec.n, dim))
        views.append(x)
    return MultiViewDataset(views=tuple(views), labels=labels)


def view_text(view: np.ndarray, delimiter: str = ",") -> str:
    """Delimited text for a view matrix, shortest-round-trip floats."""
    lines = [delimiter.join(repr(float(x)) for x in row) for row in np.asarray(view)]
    return "\n".join(lines) + "\n"


def labels_text(labels) -> str:
    return "\n".join(str(int(x)) for x in labels) + "\n"
