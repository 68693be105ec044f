"""Tests for impression-level ranking metrics."""
import math

import numpy as np
import pytest

from newsrec.core.exceptions import MetricError
from newsrec.schemas.metrics import MetricReport, reference_report
from newsrec.services.metrics import MetricAccumulator, auc, mrr, ndcg_at_k


def naive_auc(labels, scores):
    pos = [s for y, s in zip(labels, scores) if y == 1]
    neg = [s for y, s in zip(labels, scores) if y == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def naive_order(scores):
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def naive_mrr(labels, scores):
    ranks = [r + 1 for r, i in enumerate(naive_order(scores)) if labels[i] == 1]
    return sum(1.0 / r for r in ranks) / len(ranks)


def naive_ndcg(labels, scores, k):
    order = naive_order(scores)
    dcg = sum(labels[i] / math.log2(r + 2) for r, i in enumerate(order[:k]))
    ideal = sum(1.0 / math.log2(r + 2) for r in range(min(k, sum(labels))))
    return dcg / ideal


class TestAuc:
    def test_examples(self):
        assert auc([1, 0], [0.9, 0.1]) == 1.0
        assert auc([1, 0], [0.1, 0.9]) == 0.0
        assert auc([1, 0, 1, 0], [0.8, 0.7, 0.6, 0.5]) == pytest.approx(0.75)

    def test_ties_count_half(self):
        assert auc([1, 0], [0.5, 0.5]) == pytest.approx(0.5)

    @pytest.mark.parametrize("labels", [[1, 1], [0, 0, 0]])
    def test_undefined(self, labels):
        with pytest.raises(MetricError):
            auc(labels, [0.1] * len(labels))

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            labels = [1, 0] + list(rng.integers(0, 2, size=8))
            scores = rng.normal(size=10)
            base = auc(labels, scores)
            assert abs(auc(labels, np.exp(scores)) - base) < 1e-12
            assert abs(auc(labels, 3.0 * scores + 7.0) - base) < 1e-12


class TestMrr:
    def test_examples(self):
        assert mrr([1, 0, 0], [0.9, 0.2, 0.1]) == 1.0
        assert mrr([0, 1, 0, 1], [0.9, 0.8, 0.3, 0.1]) == pytest.approx(0.375)
        assert mrr([1, 1, 1], [0.3, 0.2, 0.1]) == pytest.approx(11 / 18)

    def test_ties_keep_candidate_order(self):
        assert mrr([0, 1], [0.5, 0.5]) == 0.5

    def test_undefined(self):
        with pytest.raises(MetricError):
            mrr([0, 0], [0.1, 0.2])


class TestNdcg:
    def test_examples(self):
        assert ndcg_at_k([1, 0, 0], [0.9, 0.5, 0.1], 5) == 1.0
        assert ndcg_at_k([0, 1], [0.9, 0.1], 1) == 0.0
        value = ndcg_at_k([1, 0, 0, 1], [0.9, 0.8, 0.7, 0.6], 5)
        expected = (1 + 1 / math.log2(5)) / (1 + 1 / math.log2(3))
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(0.8772, abs=1e-4)

    def test_bad_k(self):
        with pytest.raises(MetricError):
            ndcg_at_k([1, 0], [0.1, 0.2], 0)

    def test_not_monotone_in_k(self):
        # A top hit then a miss: nDCG@1 is perfect, nDCG@2 is not.
        labels, scores = [1, 0, 1], [0.9, 0.8, 0.7]
        assert ndcg_at_k(labels, scores, 1) == 1.0
        assert ndcg_at_k(labels, scores, 2) < 1.0


class TestOracle:
    def test_against_naive_implementations(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(2, 51))
            labels = list(rng.integers(0, 2, size=n))
            labels[0], labels[1] = 1, 0
            # Coarse scores so ties actually happen.
            scores = list(np.round(rng.random(n), 1))
            assert abs(auc(labels, scores) - naive_auc(labels, scores)) < 1e-12
            assert abs(mrr(labels, scores) - naive_mrr(labels, scores)) < 1e-12
            for k in (5, 10):
                value = ndcg_at_k(labels, scores, k)
                assert abs(value - naive_ndcg(labels, scores, k)) < 1e-12
                assert 0.0 <= value <= 1.0

    def test_permutation_invariance_with_distinct_scores(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            labels = np.array([1, 0] + list(rng.integers(0, 2, size=10)))
            scores = rng.permutation(12) / 12.0
            perm = rng.permutation(12)
            for metric in (auc, mrr, lambda y, s: ndcg_at_k(y, s, 5)):
                assert metric(labels, scores) == pytest.approx(metric(labels[perm], scores[perm]), abs=1e-12)


class TestAccumulator:
    def test_mean_over_impressions(self):
        acc = MetricAccumulator()
        acc.add([1, 0], [0.9, 0.1])
        acc.add([1, 0], [0.5, 0.5])
        assert acc.report().auc == pytest.approx(0.75)

    def test_degenerate_impressions_skipped(self):
        acc = MetricAccumulator()
        acc.add([1, 0], [0.9, 0.1])
        before = acc.report()
        assert acc.add([0, 0, 0], [0.1, 0.2, 0.3]) is False
        assert acc.add([1, 1], [0.1, 0.2]) is False
        after = acc.report()
        assert after.n_skipped == 2
        assert after.n_total == 3
        assert (after.auc, after.mrr, after.ndcg5, after.ndcg10) == (
            before.auc, before.mrr, before.ndcg5, before.ndcg10
        )

    def test_merge_is_associative(self):
        rng = np.random.default_rng(1)
        parts = []
        for _ in range(3):
            acc = MetricAccumulator()
            for _ in range(5):
                acc.add([1, 0, 0, 1], rng.random(4))
            acc.skip_unknown()
            parts.append(acc)
        a, b, c = parts
        left = a.merge(b).merge(c).report()
        right = a.merge(b.merge(c)).report()
        assert left.auc == pytest.approx(right.auc, abs=1e-12)
        assert left.n_unknown_news == 3
        assert left.n_scored == 15

    def test_empty_report(self):
        report = MetricAccumulator().report()
        assert report.n_scored == 0
        assert report.auc == 0.0


class TestReport:
    def test_table(self):
        report = MetricReport(auc=0.7, mrr=0.3, ndcg5=0.35, ndcg10=0.42, n_scored=10, n_skipped=1)
        table = report.to_table("naml/toy/generated", reference_report("naml", "distilbert-base", "generated"))
        header, _, measured, reference, _ = table.splitlines()
        assert header.split()[1:] == ["AUC", "MRR", "nDCG@5", "nDCG@10"]
        assert measured.split()[1:] == ["0.7000", "0.3000", "0.3500", "0.4200"]
        assert reference.split() == ["reference", "0.7130", "0.3260", "0.3630", "0.4250"]

    def test_unknown_reference(self):
        assert reference_report("naml", "toy", "generated") is None

    def test_bounds(self):
        with pytest.raises(ValueError):
            MetricReport(auc=1.2, mrr=0.3, ndcg5=0.35, ndcg10=0.42, n_scored=1, n_skipped=0)
