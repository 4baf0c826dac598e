"""Precision-recall AUC as step-wise average precision.

AP = sum over positives, in descending score order, of
(R_i - R_{i-1}) * P_i. Tied scores are handled by averaging over the tie
group's attainable precisions (the expected precision when the group's
internal order is uniformly random), which makes the value independent of
input permutation.
"""

from __future__ import annotations

import numpy as np

from .errors import SingleClass


def _tie_group_sum(tp_before: int, n_before: int, size: int, positives: int) -> float:
    # Expected sum of precisions over the group's positives: position t in
    # the group is a positive with probability p/g, and conditioned on
    # that, the expected positive count up to t is 1 + (t-1)(p-1)/(g-1).
    t = np.arange(1, size + 1, dtype=np.float64)
    if size == 1:
        expected_tp = np.array([float(tp_before + 1)])
    else:
        expected_tp = tp_before + 1.0 + (t - 1.0) * (positives - 1.0) / (size - 1.0)
    return float(np.sum((positives / size) * expected_tp / (n_before + t)))


def pr_auc(scores, labels) -> float:
    """Area under the precision-recall curve for binary labels.

    Scores only need to rank: the value is invariant under strictly
    monotone transforms. Raises SingleClass unless both labels occur.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-D and equally long")
    if not np.isfinite(scores).all():
        raise ValueError("scores must be finite")
    y = labels.astype(np.int64)
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    total_pos = int(y.sum())
    if total_pos == 0 or total_pos == y.size:
        raise SingleClass("pr_auc needs both positive and negative labels")

    order = np.argsort(-scores, kind="stable")
    s, yy = scores[order], y[order]

    if np.unique(s).size == s.size:
        ranks = np.arange(1, s.size + 1, dtype=np.float64)
        ap = float(np.sum(yy * np.cumsum(yy) / ranks))
        return ap / total_pos

    ap = 0.0
    tp_before = n_before = 0
    start = 0
    while start < s.size:
        end = start
        while end < s.size and s[end] == s[start]:
            end += 1
        size = end - start
        positives = int(yy[start:end].sum())
        if positives:
            ap += _tie_group_sum(tp_before, n_before, size, positives)
        tp_before += positives
        n_before += size
        start = end
    return ap / total_pos
