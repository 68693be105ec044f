"""Impression-level ranking metrics."""
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.metrics import roc_auc_score

from newsrec.core.exceptions import MetricError
from newsrec.schemas.metrics import MetricReport


def _arrays(labels: Sequence[int], scores: Sequence[float]):
    y = np.asarray(labels, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape or y.ndim != 1:
        raise MetricError(f"labels {y.shape} and scores {s.shape} must be equal-length vectors")
    return y, s


def _ranked_labels(y: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Labels in score-descending order; ties keep the original candidate order."""
    order = np.argsort(-s, kind="stable")
    return y[order]


def auc(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Probability a positive outscores a negative; ties count one half."""
    y, s = _arrays(labels, scores)
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        raise MetricError("AUC needs at least one positive and one negative")
    return float(roc_auc_score(y, s))


def mrr(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Mean over positives of 1 / rank."""
    y, s = _arrays(labels, scores)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise MetricError("MRR needs at least one positive")
    ranked = _ranked_labels(y, s)
    return float(np.sum(ranked / np.arange(1, len(ranked) + 1)) / n_pos)


def ndcg_at_k(labels: Sequence[int], scores: Sequence[float], k: int) -> float:
    """Binary-gain nDCG with log2(rank + 1) discount."""
    if k < 1:
        raise MetricError(f"k must be >= 1, got {k}")
    y, s = _arrays(labels, scores)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise MetricError("nDCG needs at least one positive")
    ranked = _ranked_labels(y, s)[:k]
    discounts = 1.0 / np.log2(np.arange(2, k + 2))
    dcg = float(np.sum(ranked * discounts[: len(ranked)]))
    ideal = float(np.sum(discounts[: min(k, n_pos)]))
    return dcg / ideal


@dataclass
class MetricAccumulator:
    """Running sums for averaging metrics over impressions; ``merge`` is associative."""

    auc_sum: float = 0.0
    mrr_sum: float = 0.0
    ndcg5_sum: float = 0.0
    ndcg10_sum: float = 0.0
    n_scored: int = 0
    n_skipped: int = 0
    n_unknown_news: int = 0

    def add(self, labels: Sequence[int], scores: Sequence[float]) -> bool:
        """Score one impression; degenerate ones (no positive or no negative) are skipped."""
        n_pos = int(np.sum(labels))
        if n_pos == 0 or n_pos == len(labels):
            self.n_skipped += 1
            return False
        self.auc_sum += auc(labels, scores)
        self.mrr_sum += mrr(labels, scores)
        self.ndcg5_sum += ndcg_at_k(labels, scores, 5)
        self.ndcg10_sum += ndcg_at_k(labels, scores, 10)
        self.n_scored += 1
        return True

    def skip_unknown(self) -> None:
        self.n_skipped += 1
        self.n_unknown_news += 1

    def merge(self, other: "MetricAccumulator") -> "MetricAccumulator":
        return MetricAccumulator(
            auc_sum=self.auc_sum + other.auc_sum,
            mrr_sum=self.mrr_sum + other.mrr_sum,
            ndcg5_sum=self.ndcg5_sum + other.ndcg5_sum,
            ndcg10_sum=self.ndcg10_sum + other.ndcg10_sum,
            n_scored=self.n_scored + other.n_scored,
            n_skipped=self.n_skipped + other.n_skipped,
            n_unknown_news=self.n_unknown_news + other.n_unknown_news,
        )

    def report(self) -> MetricReport:
        n = self.n_scored

        def mean(total: float) -> float:
            return min(1.0, max(0.0, total / n)) if n else 0.0

        return MetricReport(
            auc=mean(self.auc_sum),
            mrr=mean(self.mrr_sum),
            ndcg5=mean(self.ndcg5_sum),
            ndcg10=mean(self.ndcg10_sum),
            n_scored=self.n_scored,
            n_skipped=self.n_skipped,
            n_unknown_news=self.n_unknown_news,
        )
