"""Cosine distances within a view and their integration across views.

Pairwise matrices are dense float64 with +inf on the diagonal, so a row
argmin can never pick the sample itself.  Off-diagonal entries live in
[0, 2].  view_distance_matrix computes one value per unordered pair and
mirrors it, so the result is exactly symmetric, not just within rounding.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError


def normalize_rows(x, *, what: str = "row") -> np.ndarray:
    """Rows scaled to unit L2 norm; a zero-norm row is a ValidationError."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValidationError("expected a 2-d matrix")
    norms = np.linalg.norm(x, axis=1)
    bad = np.nonzero(norms == 0.0)[0]
    if bad.size:
        raise ValidationError(
            f"{what} {bad[0]} has zero norm; cosine distance undefined"
        )
    return x / norms[:, None]


def cosine_distance(x, y) -> float:
    """1 - <x, y> / (|x| |y|) for two feature vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape or x.size == 0:
        raise ValidationError("cosine_distance expects two equal-length vectors")
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ValidationError("cosine distance undefined for zero vectors")
    return float(1.0 - (x @ y) / (nx * ny))


def view_distance_matrix(view) -> np.ndarray:
    """Pairwise cosine distances within one view, +inf diagonal."""
    u = normalize_rows(view)
    s = u @ u.T
    s = np.triu(s, 1)
    s = s + s.T
    d = 1.0 - s
    np.fill_diagonal(d, np.inf)
    return d


def integrate_distances(matrices) -> np.ndarray:
    """Entrywise mean of per-view distance matrices.

    With a single view the output equals the input bitwise.  The +inf
    diagonal survives averaging and is re-asserted on the result.
    """
    mats = [np.asarray(m, dtype=np.float64) for m in matrices]
    if not mats:
        raise ValidationError("no distance matrices to integrate")
    shape = mats[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValidationError("distance matrices must be square")
    for m in mats[1:]:
        if m.shape != shape:
            raise ValidationError("distance matrices must share one shape")
    out = np.mean(np.stack(mats, axis=0), axis=0)
    np.fill_diagonal(out, np.inf)
    return out


def integrated_pair_distances(views, left, right) -> np.ndarray:
    """Mean-over-views cosine distance for selected row pairs.

    ``left`` and ``right`` are equal-length index arrays into the rows of
    every view; entry i is the integrated distance between rows left[i]
    and right[i].  Used for per-level merge-distance statistics without
    materializing full matrices.
    """
    views = list(views)
    left = np.asarray(left, dtype=np.intp)
    right = np.asarray(right, dtype=np.intp)
    total = np.zeros(left.shape[0])
    for x in views:
        x = np.asarray(x, dtype=np.float64)
        xa = x[left]
        xb = x[right]
        norms = np.linalg.norm(xa, axis=1) * np.linalg.norm(xb, axis=1)
        if np.any(norms == 0.0):
            raise ValidationError("zero-norm row; cosine distance undefined")
        total += 1.0 - np.einsum("ij,ij->i", xa, xb) / norms
    return total / len(views)


def distance_matrix_text(d, delimiter: str = ",") -> str:
    """Delimited text for a distance matrix; diagonal serializes as 'inf'."""
    rows = []
    for row in np.asarray(d, dtype=np.float64):
        rows.append(delimiter.join(repr(float(x)) for x in row))
    return "\n".join(rows) + "\n"
