"""External clustering quality scores: accuracy, NMI, pairwise F-measure.

Conventions, fixed here and relied on by callers:
- accuracy maximizes matched samples over one-to-one label assignments
  (rectangular contingency tables are zero-padded square first);
- NMI uses natural logs with sqrt(H_true * H_pred) normalization; if
  both labelings are single-cluster the score is 1.0, if exactly one has
  zero entropy it is 0.0;
- the F-measure counts unordered same-cluster pairs, with precision
  (recall) defined as 1.0 when the prediction (truth) has no
  same-cluster pairs, and F = 0.0 when precision + recall = 0.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError


def _label_pair(truth, pred):
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.ndim != 1 or pred.ndim != 1 or truth.shape != pred.shape:
        raise ValidationError("label vectors must share one length")
    if truth.size == 0:
        raise ValidationError("label vectors are empty")
    return truth, pred


def contingency_table(truth, pred) -> np.ndarray:
    """Counts c[i, j] = |{samples with truth id i and pred id j}|.

    Rows and columns follow np.unique order of the respective labels.
    """
    truth, pred = _label_pair(truth, pred)
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(pred, return_inverse=True)
    r = int(ti.max()) + 1
    c = int(pi.max()) + 1
    table = np.zeros((r, c), dtype=np.int64)
    np.add.at(table, (ti, pi), 1)
    return table


def optimal_assignment(cost) -> np.ndarray:
    """Column permutation minimizing total cost over a square matrix."""
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValidationError("cost matrix must be square")
    if not np.isfinite(cost).all():
        raise ValidationError("cost matrix must be finite")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=np.int64)
    perm[rows] = cols
    return perm


def accuracy(truth, pred) -> float:
    """Fraction of samples matched under the best one-to-one label mapping."""
    truth, pred = _label_pair(truth, pred)
    table = contingency_table(truth, pred)
    side = max(table.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    perm = optimal_assignment(-padded.astype(np.float64))
    matched = padded[np.arange(side), perm].sum()
    return float(matched / truth.size)


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(truth, pred) -> float:
    """Mutual information over sqrt of entropy product, natural logs."""
    truth, pred = _label_pair(truth, pred)
    table = contingency_table(truth, pred).astype(np.float64)
    n = table.sum()
    row = table.sum(axis=1)
    col = table.sum(axis=0)
    if table.shape == (1, 1):
        return 1.0
    h_true = _entropy(row)
    h_pred = _entropy(col)
    if h_true == 0.0 or h_pred == 0.0:
        return 0.0
    nz = table > 0
    outer = np.outer(row, col)
    mi = float((table[nz] / n * np.log(n * table[nz] / outer[nz])).sum())
    value = mi / np.sqrt(h_true * h_pred)
    return float(min(1.0, max(0.0, value)))


def f_measure(truth, pred) -> float:
    """Harmonic mean of pair precision and recall over same-cluster pairs."""
    truth, pred = _label_pair(truth, pred)
    table = contingency_table(truth, pred)

    def pairs(counts):
        counts = counts.astype(np.int64)
        return int((counts * (counts - 1) // 2).sum())

    both = pairs(table.ravel())
    same_true = pairs(table.sum(axis=1))
    same_pred = pairs(table.sum(axis=0))
    precision = both / same_pred if same_pred else 1.0
    recall = both / same_true if same_true else 1.0
    if precision + recall == 0.0:
        return 0.0
    return float(2.0 * precision * recall / (precision + recall))
