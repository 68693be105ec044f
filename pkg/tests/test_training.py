"""Tests for sample construction and the training loop."""
import json
from collections import Counter
from datetime import datetime

import numpy as np
import pytest
import torch
from pydantic import ValidationError

from newsrec.core.exceptions import ConfigurationError, MissingDescriptionError, TrainingError
from newsrec.models.loss import ranking_softmax_loss
from newsrec.models.plm import load_plm
from newsrec.models.recommender import FALLBACK_USER, NewsRecommender
from newsrec.schemas.mind import Impression
from newsrec.schemas.training import Arch, CompositionMode
from newsrec.services.training_service import (
    BatchCollator,
    SamplingStats,
    build_training_samples,
    epoch_samples,
    load_report,
    prepare_corpus,
    train,
)

TS = datetime(2019, 11, 11, 9, 5, 58)


def impression(n_pos, n_neg, history=None, user_id="U1"):
    candidates = [(f"P{i}", 1) for i in range(n_pos)] + [(f"N{i}", 0) for i in range(n_neg)]
    return Impression(
        impression_id="1", user_id=user_id, timestamp=TS, history=history or [], candidates=candidates
    )


class TestBuildTrainingSamples:
    def test_one_positive_nine_negatives(self):
        samples = build_training_samples(impression(1, 9), 4, np.random.default_rng(0))
        assert len(samples) == 1
        assert len(samples[0].candidates) == 5
        assert len(set(samples[0].candidates)) == 5

    def test_one_sample_per_positive(self):
        samples = build_training_samples(impression(2, 6), 4, np.random.default_rng(0))
        assert len(samples) == 2
        assert sorted(s.candidates[s.label_index] for s in samples) == ["P0", "P1"]

    def test_negatives_with_replacement(self):
        [sample] = build_training_samples(impression(1, 2), 4, np.random.default_rng(0))
        assert len(sample.candidates) == 5
        negatives = [c for i, c in enumerate(sample.candidates) if i != sample.label_index]
        assert set(negatives) <= {"N0", "N1"}
        assert len(negatives) == 4

    def test_zero_negatives_skipped(self):
        stats = SamplingStats()
        assert build_training_samples(impression(2, 0), 4, np.random.default_rng(0), stats=stats) == []
        assert stats.skipped_impressions == 1

    def test_history_truncated_to_most_recent(self):
        history = [f"H{i}" for i in range(60)]
        [sample] = build_training_samples(impression(1, 4, history), 4, np.random.default_rng(0), history_len=50)
        assert sample.history == history[-50:]

    def test_reproducible(self):
        imp = impression(3, 7, ["H1", "H2"])
        a = build_training_samples(imp, 4, np.random.default_rng(11))
        b = build_training_samples(imp, 4, np.random.default_rng(11))
        assert a == b

    def test_invariants_over_random_impressions(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n_pos, n_neg, k = int(rng.integers(0, 4)), int(rng.integers(0, 12)), int(rng.integers(1, 6))
            if n_pos + n_neg == 0:
                continue
            imp = impression(n_pos, n_neg)
            for sample in build_training_samples(imp, k, rng):
                assert len(sample.candidates) == k + 1
                assert 0 <= sample.label_index <= k
                labels = Counter(dict(imp.candidates)[c] for c in sample.candidates)
                assert labels[1] == 1
                assert sample.candidates[sample.label_index] in imp.positives


class TestEpochSamples:
    def test_unknown_news(self, make_config, articles):
        config = make_config(mode=CompositionMode.TITLE_ONLY)
        _, corpus = prepare_corpus(config, articles)
        imps = [
            impression(1, 4, ["N1", "GONE"]).model_copy(update={"candidates": [("N2", 1), ("N3", 0), ("N4", 0)]}),
            impression(1, 1).model_copy(update={"candidates": [("GONE", 1), ("N3", 0)]}),
        ]
        stats = SamplingStats()
        samples = epoch_samples(config, imps, corpus, epoch=1, stats=stats)
        assert len(samples) == 1
        assert samples[0].history == ["N1"]
        assert stats.dropped_unknown == 1

    def test_resampled_each_epoch(self, make_config, articles):
        config = make_config(mode=CompositionMode.TITLE_ONLY)
        _, corpus = prepare_corpus(config, articles)
        imps = [
            impression(1, 1).model_copy(
                update={"candidates": [("N1", 1), ("N2", 0), ("N3", 0), ("N4", 0), ("N5", 0), ("N6", 0)]}
            )
        ] * 20
        one = [s.candidates for s in epoch_samples(config, imps, corpus, epoch=1)]
        again = [s.candidates for s in epoch_samples(config, imps, corpus, epoch=1)]
        two = [s.candidates for s in epoch_samples(config, imps, corpus, epoch=2)]
        assert one == again
        assert one != two


class TestCollator:
    def test_unique_news_and_padding(self, make_config, articles):
        config = make_config(mode=CompositionMode.TITLE_ONLY)
        _, corpus = prepare_corpus(config, articles)
        imp = impression(1, 1).model_copy(update={"history": ["N1", "N2"], "candidates": [("N2", 1), ("N3", 0)]})
        samples = build_training_samples(imp, 1, np.random.default_rng(0))
        samples += build_training_samples(
            imp.model_copy(update={"history": [], "user_id": "U9"}), 1, np.random.default_rng(1)
        )
        batch = BatchCollator(corpus, {"U1": 1})(samples)
        assert batch["news_input_ids"].shape == (3, config.max_len)
        assert batch["history_index"].tolist() == [[0, 1], [-1, -1]]
        assert batch["user_index"].tolist() == [1, 0]
        assert batch["candidate_index"].shape == (2, 2)

    def test_fallback_rate_masks_users(self, make_config, articles):
        _, corpus = prepare_corpus(make_config(mode=CompositionMode.TITLE_ONLY), articles)
        samples = build_training_samples(impression(1, 3), 1, np.random.default_rng(0)) * 64
        index = {"U1": 1}
        assert BatchCollator(corpus, index, fallback_rate=1.0)(samples)["user_index"].eq(FALLBACK_USER).all()

        def users(seed):
            collator = BatchCollator(corpus, index, fallback_rate=0.5, generator=torch.Generator().manual_seed(seed))
            return collator(samples)["user_index"].tolist()

        first = users(3)
        assert first == users(3)
        assert 0 < first.count(FALLBACK_USER) < len(samples)

    def test_fallback_embedding_gets_gradient(self, make_config, articles):
        config = make_config(arch=Arch.NPA, mode=CompositionMode.TITLE_ONLY)
        tokenizer, corpus = prepare_corpus(config, articles)
        model = NewsRecommender(config, load_plm(config, tokenizer), n_users=1)
        imp = impression(1, 1).model_copy(update={"history": ["N1", "N2"], "candidates": [("N3", 1), ("N4", 0)]})
        samples = build_training_samples(imp, 1, np.random.default_rng(0))
        batch = BatchCollator(corpus, {"U1": 1}, fallback_rate=1.0)(samples)
        labels = batch.pop("labels")
        ranking_softmax_loss(model(**batch), labels).backward()
        grad = model.user_encoder.user_embedding.weight.grad
        assert grad[FALLBACK_USER].abs().sum() > 0
        assert grad[1].abs().sum() == 0


class TestPrepareCorpus:
    def test_generated_needs_cache(self, make_config, articles):
        with pytest.raises(MissingDescriptionError):
            prepare_corpus(make_config(), articles, cache=None)

    def test_preprocessed_corpus_must_match(self, make_config, articles):
        _, corpus = prepare_corpus(make_config(mode=CompositionMode.TITLE_TEMPLATE), articles)
        with pytest.raises(ConfigurationError):
            prepare_corpus(make_config(mode=CompositionMode.TITLE_ONLY), articles, corpus=corpus)


class TestConfig:
    def test_zero_epochs_rejected(self, make_config):
        with pytest.raises(ValidationError):
            make_config(epochs=0)

    def test_nrms_heads_must_divide(self, make_config):
        with pytest.raises(ValidationError):
            make_config(arch=Arch.NRMS, d_news=15, n_heads=2)

    def test_fallback_rate_bounds(self, make_config):
        assert make_config().fallback_user_rate == 0.05
        with pytest.raises(ValidationError):
            make_config(fallback_user_rate=1.0)

    def test_unknown_field_rejected(self, make_config):
        with pytest.raises(ValidationError):
            make_config(learning_rate=0.1)


class TestTrain:
    def test_writes_checkpoints_and_report(self, tmp_path, make_config, articles, impressions, description_cache):
        config = make_config(epochs=2, batch_size=64)
        final, report = train(
            config, articles, impressions, description_cache, tmp_path, show_progress=False
        )
        assert final == tmp_path / "final"
        assert (final / "head.safetensors").exists()
        assert (tmp_path / "epoch-1").is_dir() and (tmp_path / "epoch-2").is_dir()
        records = load_report(tmp_path / "train_report.jsonl")
        assert [r.epoch for r in records] == [1, 2]
        # Batch larger than the dataset: one partial batch per epoch.
        assert all(r.n_batches == 1 for r in records)
        assert all(np.isfinite(r.mean_loss) for r in records)
        summary = json.loads((tmp_path / "train_summary.json").read_text())
        assert summary["optimizer"]["name"] == "AdamW"
        assert summary["optimizer"]["lr"] == config.lr
        assert report.n_samples > 0

    def test_same_seed_same_losses(self, tmp_path, make_config, articles, impressions):
        config = make_config(mode=CompositionMode.TITLE_TEMPLATE, epochs=2, batch_size=2, lr=1e-3)
        _, a = train(config, articles, impressions, None, tmp_path / "a", show_progress=False)
        _, b = train(config, articles, impressions, None, tmp_path / "b", show_progress=False)
        assert a.losses == b.losses

    def test_empty_training_set(self, tmp_path, make_config, articles):
        no_negatives = [impression(1, 0).model_copy(update={"candidates": [("N1", 1)]})]
        with pytest.raises(TrainingError):
            train(
                make_config(mode=CompositionMode.TITLE_ONLY), articles, no_negatives, None, tmp_path,
                show_progress=False,
            )
