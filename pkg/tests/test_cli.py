"""End-to-end tests for the newsrec command line."""
import json

import pytest

from newsrec.main import main
from newsrec.services.training_service import load_report

SMALL_MODEL = {
    "d_news": 16,
    "attn_hidden": 8,
    "n_heads": 2,
    "user_embed_dim": 8,
    "toy_hidden": 16,
    "toy_layers": 1,
    "toy_heads": 2,
    "max_len_title": 16,
    "max_len_augmented": 64,
    "batch_size": 4,
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(SMALL_MODEL), encoding="utf-8")
    return path


def train_args(news_path, behaviors_path, config_file, out, *extra):
    return [
        "train",
        "--news", str(news_path),
        "--behaviors", str(behaviors_path),
        "--config", str(config_file),
        "--plm", "toy",
        "--epochs", "1",
        "--quiet",
        "--out", str(out),
        *extra,
    ]


class TestStats:
    def test_fixture_counts(self, tmp_path, news_path, behaviors_path, capsys):
        code = main(["stats", "--news", str(news_path), "--behaviors", str(behaviors_path), "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "n_users: 2" in out
        assert "n_news: 6" in out
        assert "n_clicks: 4" in out
        assert "differs from reference" in out
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["status"] == "ok"
        assert manifest["input_digests"]["news"].startswith("sha256:")

    def test_empty_behaviors(self, tmp_path, news_path, capsys):
        empty = tmp_path / "behaviors.tsv"
        empty.write_text("", encoding="utf-8")
        code = main(["stats", "--news", str(news_path), "--behaviors", str(empty), "--out", str(tmp_path)])
        assert code == 0
        assert "n_impressions: 0" in capsys.readouterr().out

    def test_parse_errors_reported(self, tmp_path, news_path, capsys):
        bad = tmp_path / "behaviors.tsv"
        bad.write_text("1\tU1\t11/11/2019 9:05:58 AM\t\tN5\n", encoding="utf-8")
        code = main(["stats", "--news", str(news_path), "--behaviors", str(bad), "--out", str(tmp_path)])
        assert code == 3
        assert "line 1" in capsys.readouterr().err


class TestGenerateDescriptions:
    def test_fixture_run(self, tmp_path, news_path, fixture_path, capsys):
        cache = tmp_path / "descriptions.json"
        code = main([
            "generate-descriptions", "--news", str(news_path), "--fixture", str(fixture_path), "--out", str(cache),
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "3 descriptions" in out
        assert len(json.loads(cache.read_text())) == 3
        manifest = json.loads((tmp_path / "descriptions.manifest.json").read_text())
        assert manifest["command"] == "generate-descriptions"
        assert manifest["config"]["temperature"] == 0.0

    def test_fixture_missing_key(self, tmp_path, news_path, fixture_texts, capsys):
        partial = tmp_path / "partial.json"
        partial.write_text(json.dumps({k: v for k, v in fixture_texts.items() if k != "news-politics"}))
        cache = tmp_path / "descriptions.json"
        code = main(["generate-descriptions", "--news", str(news_path), "--fixture", str(partial), "--out", str(cache)])
        assert code != 0
        assert "news-politics" in capsys.readouterr().err
        # Completed keys survive the failure.
        assert len(json.loads(cache.read_text())) == 2

    def test_no_credential(self, tmp_path, news_path, monkeypatch, capsys):
        from newsrec.core.config import settings

        monkeypatch.setattr(settings, "llm_provider", "openai")
        monkeypatch.delenv(settings.llm_api_key_env, raising=False)
        code = main(["generate-descriptions", "--news", str(news_path), "--out", str(tmp_path / "c.json")])
        assert code == 2
        assert settings.llm_api_key_env in capsys.readouterr().err


class TestTrainAndEvaluate:
    def test_generated_mode_needs_cache(self, tmp_path, news_path, behaviors_path, config_file):
        code = main(train_args(news_path, behaviors_path, config_file, tmp_path / "run", "--mode", "generated"))
        assert code == 2
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest["status"] == "failed"

    def test_zero_epochs(self, tmp_path, news_path, behaviors_path, config_file):
        args = train_args(news_path, behaviors_path, config_file, tmp_path / "run", "--mode", "title")
        args[args.index("--epochs") + 1] = "0"
        assert main(args) == 2

    def test_invalid_enum_is_usage_error(self, tmp_path, news_path, behaviors_path, config_file):
        with pytest.raises(SystemExit) as exc:
            main(train_args(news_path, behaviors_path, config_file, tmp_path / "run", "--mode", "headline"))
        assert exc.value.code == 2

    def test_train_then_evaluate(
        self, tmp_path, news_path, behaviors_path, config_file, fixture_path, capsys
    ):
        cache = tmp_path / "descriptions.json"
        assert main(["generate-descriptions", "--news", str(news_path), "--fixture", str(fixture_path),
                     "--out", str(cache)]) == 0
        run = tmp_path / "run"
        assert main(train_args(news_path, behaviors_path, config_file, run,
                               "--mode", "generated", "--arch", "nrms", "--cache", str(cache))) == 0
        assert (run / "final" / "newsrec_config.json").exists()
        assert json.loads((run / "manifest.json").read_text())["status"] == "ok"

        capsys.readouterr()
        code = main(["evaluate", "--checkpoint", str(run / "final"), "--news", str(news_path),
                     "--behaviors", str(behaviors_path), "--cache", str(cache), "--quiet",
                     "--out", str(tmp_path / "eval")])
        assert code == 0
        metrics = json.loads((tmp_path / "eval" / "metrics.json").read_text())
        assert metrics["n_scored"] > 0
        assert "nDCG@10" in capsys.readouterr().out

    def test_preprocessed_corpus(self, tmp_path, news_path, behaviors_path, config_file):
        corpus = tmp_path / "corpus.jsonl"
        assert main(["preprocess", "--news", str(news_path), "--mode", "template", "--plm", "toy",
                     "--config", str(config_file), "--out", str(corpus)]) == 0
        assert corpus.exists()
        assert main(train_args(news_path, behaviors_path, config_file, tmp_path / "run",
                               "--mode", "template", "--corpus", str(corpus))) == 0

    def test_corpus_mode_mismatch(self, tmp_path, news_path, behaviors_path, config_file):
        corpus = tmp_path / "corpus.jsonl"
        main(["preprocess", "--news", str(news_path), "--mode", "template", "--plm", "toy",
              "--config", str(config_file), "--out", str(corpus)])
        assert main(train_args(news_path, behaviors_path, config_file, tmp_path / "run",
                               "--mode", "title", "--corpus", str(corpus))) == 2

    def test_same_seed_same_losses(self, tmp_path, news_path, behaviors_path, config_file):
        for name in ("a", "b"):
            assert main(train_args(news_path, behaviors_path, config_file, tmp_path / name,
                                   "--mode", "title", "--seed", "7")) == 0
        a = load_report(tmp_path / "a" / "train_report.jsonl")
        b = load_report(tmp_path / "b" / "train_report.jsonl")
        assert [r.mean_loss for r in a] == [r.mean_loss for r in b]

    def test_evaluate_missing_behaviors(self, tmp_path, news_path, config_file, behaviors_path):
        run = tmp_path / "run"
        assert main(train_args(news_path, behaviors_path, config_file, run, "--mode", "title")) == 0
        code = main(["evaluate", "--checkpoint", str(run / "final"), "--news", str(news_path),
                     "--behaviors", str(tmp_path / "missing.tsv"), "--out", str(tmp_path / "eval")])
        assert code != 0


def test_synthetic_dataset_script(tmp_path, capsys):
    from scripts.make_synthetic_mind import make_synthetic_mind

    make_synthetic_mind(tmp_path, n_articles=40, n_categories=4, n_impressions=50, n_users=10)
    fixture = json.loads((tmp_path / "descriptions_fixture.json").read_text())
    assert len(fixture) == 4
    code = main(["stats", "--news", str(tmp_path / "news.tsv"),
                 "--behaviors", str(tmp_path / "behaviors_train.tsv"), "--out", str(tmp_path / "stats")])
    assert code == 0
    assert "n_impressions: 40" in capsys.readouterr().out
