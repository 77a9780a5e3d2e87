"""Ranking metrics for scored streams with binary ground-truth labels."""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["auc", "f1_at_k"]


def auc(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Area under the ROC curve via the rank statistic, ties averaged."""
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise ValueError(f"labels and scores differ in length: {y.shape} vs {s.shape}")
    n1 = int(y.sum())
    n0 = y.size - n1
    if n1 == 0 or n0 == 0:
        raise ValueError("AUC needs both positive and negative labels")
    _, inverse, counts = np.unique(s, return_inverse=True, return_counts=True)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    avg_rank = starts + (counts + 1) / 2.0
    ranks = avg_rank[inverse]
    return float((ranks[y == 1].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0))


def f1_at_k(labels: Sequence[int], scores: Sequence[float], k: int) -> float:
    """F1 when the ``k`` highest-scored items are flagged as anomalies.

    Ties at the cutoff are broken by position (earlier items first).
    """
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise ValueError(f"labels and scores differ in length: {y.shape} vs {s.shape}")
    if not 1 <= k <= y.size:
        raise ValueError(f"k must be in [1, {y.size}], got {k}")
    top = np.argsort(-s, kind="stable")[:k]
    tp = int(y[top].sum())
    positives = int(y.sum())
    if tp == 0:
        return 0.0
    precision = tp / k
    recall = tp / positives
    return 2.0 * precision * recall / (precision + recall)
