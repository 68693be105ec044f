"""Command-line entry point."""
import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from newsrec.converters.mind_tsv import (
    ParseReport,
    build_category_vocab,
    dataset_stats,
    read_behaviors,
    read_news,
)
from newsrec.converters.text_compose import read_corpus, write_corpus
from newsrec.core.config import settings
from newsrec.core.exceptions import ConfigurationError, NewsRecError
from newsrec.core.logging import setup_logging
from newsrec.core.manifest import run_manifest
from newsrec.db.description_cache import DescriptionCache
from newsrec.models.checkpoint import load_checkpoint
from newsrec.schemas.metrics import reference_report
from newsrec.schemas.training import Arch, CompositionMode, ModelConfig, PlmChoice
from newsrec.services.description_service import corpus_word_stats, generate_all
from newsrec.services.evaluation_service import corpus_for_checkpoint, evaluate
from newsrec.services.llm_clients import build_llm_client
from newsrec.services.training_service import prepare_corpus, train

logger = logging.getLogger(__name__)

# CLI flag -> ModelConfig field, applied over the --config file when given.
CONFIG_FLAGS = {
    "arch": "arch",
    "plm": "plm_name",
    "mode": "mode",
    "epochs": "epochs",
    "batch_size": "batch_size",
    "lr": "lr",
    "seed": "seed",
    "history_len": "history_len",
    "k_negatives": "k_negatives",
    "max_len": None,
    "freeze_plm": "freeze_plm",
    "num_workers": "num_workers",
}


def _require_file(path: Optional[str], flag: str) -> Path:
    if not path:
        raise ConfigurationError(f"{flag} is required", param=flag)
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"{flag} file not found: {path}", param=flag)
    return p


def _load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    p = _require_file(path, "--config")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"--config is not valid JSON: {e}", param="--config")
    if not isinstance(data, dict):
        raise ConfigurationError("--config must hold a JSON object", param="--config")
    return data


def build_model_config(args: argparse.Namespace) -> ModelConfig:
    """Config file values, overridden by any CLI flag that was given."""
    values = _load_config_file(getattr(args, "config", None))
    for flag, field in CONFIG_FLAGS.items():
        value = getattr(args, flag, None)
        # store_true flags only override when set
        if value is None or (flag == "freeze_plm" and not value):
            continue
        if flag == "max_len":
            try:
                mode = CompositionMode(values.get("mode", args.mode or CompositionMode.TITLE_GENERATED))
            except ValueError as e:
                raise ConfigurationError(str(e), param="mode")
            field = "max_len_title" if mode == CompositionMode.TITLE_ONLY else "max_len_augmented"
        values[field] = value
    try:
        return ModelConfig.model_validate(values)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "config"
        raise ConfigurationError(f"Invalid config ({where}): {first['msg']}", param=where)


def _load_cache(path: Optional[str], required: bool) -> Optional[DescriptionCache]:
    if not path:
        if required:
            raise ConfigurationError(
                "generated mode needs --cache with category descriptions", param="--cache"
            )
        return None
    return DescriptionCache.load(path, missing_ok=False)


def cmd_generate_descriptions(args: argparse.Namespace) -> int:
    news_path = _require_file(args.news, "--news")
    if not args.out:
        raise ConfigurationError("--out (description cache path) is required", param="--out")
    out = Path(args.out)
    manifest_path = out.with_name(out.stem + ".manifest.json")
    with run_manifest(
        "generate-descriptions",
        manifest_path,
        {"news": news_path, "fixture": args.fixture, "cache": out},
        config={
            "provider": "fixture" if args.fixture else settings.llm_provider,
            "model": settings.llm_model if settings.llm_provider == "openai" else settings.bedrock_model_id,
            "temperature": settings.llm_temperature,
            "force": args.force,
        },
        seed=args.seed,
    ) as manifest:
        vocab = build_category_vocab(read_news(news_path))
        cache = DescriptionCache.load(out)
        client = build_llm_client(args.fixture)
        manifest.outputs.append(str(out))

        async def _run():
            try:
                return await generate_all(
                    vocab, client, cache, force=args.force, concurrency=args.concurrency
                )
            finally:
                await client.aclose()

        asyncio.run(_run())
        print(f"{len(cache)} descriptions")
        print(f"mean word count: {corpus_word_stats(cache):.1f}")
    return 0


def cmd_preprocess(args: argparse.Namespace) -> int:
    news_path = _require_file(args.news, "--news")
    config = build_model_config(args)
    if not args.out:
        raise ConfigurationError("--out (corpus file) is required", param="--out")
    out = Path(args.out)
    with run_manifest(
        "preprocess",
        out.with_name(out.stem + ".manifest.json"),
        {"news": news_path, "cache": args.cache, "config": args.config},
        config=config.model_dump(mode="json"),
        seed=config.seed,
    ) as manifest:
        cache = _load_cache(args.cache, config.mode == CompositionMode.TITLE_GENERATED)
        tokenizer, corpus = prepare_corpus(config, read_news(news_path), cache)
        write_corpus(out, corpus, pad_token_id=tokenizer.pad_token_id)
        manifest.outputs.append(str(out))
        print(f"{len(corpus)} news items -> {out} (mode={corpus.mode.value}, max_len={corpus.max_len})")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    news_path = _require_file(args.news, "--news")
    behaviors_path = _require_file(args.behaviors, "--behaviors")
    config = build_model_config(args)
    out_dir = Path(args.out or "runs/train")
    with run_manifest(
        "train",
        out_dir / "manifest.json",
        {
            "news": news_path,
            "behaviors": behaviors_path,
            "cache": args.cache,
            "corpus": args.corpus,
            "config": args.config,
        },
        config=config.model_dump(mode="json"),
        seed=config.seed,
    ) as manifest:
        cache = _load_cache(args.cache, config.mode == CompositionMode.TITLE_GENERATED)
        corpus = read_corpus(_require_file(args.corpus, "--corpus")) if args.corpus else None
        final, report = train(
            config,
            read_news(news_path),
            read_behaviors(behaviors_path),
            cache,
            out_dir,
            corpus=corpus,
            show_progress=not args.quiet,
        )
        manifest.outputs.extend(report.checkpoints + [str(out_dir / "train_report.jsonl")])
        for record in report.epochs:
            print(f"epoch {record.epoch}: loss={record.mean_loss:.5f} samples={record.n_samples}")
        print(f"checkpoint: {final}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    checkpoint = Path(args.checkpoint) if args.checkpoint else None
    if checkpoint is None or not checkpoint.is_dir():
        raise ConfigurationError(f"--checkpoint directory not found: {args.checkpoint}", param="--checkpoint")
    news_path = _require_file(args.news, "--news")
    behaviors_path = _require_file(args.behaviors, "--behaviors")
    out_dir = Path(args.out or checkpoint / "eval")
    with run_manifest(
        "evaluate",
        out_dir / "manifest.json",
        {"news": news_path, "behaviors": behaviors_path, "cache": args.cache},
        seed=args.seed,
    ) as manifest:
        model, tokenizer, user_index = load_checkpoint(checkpoint)
        config = model.config
        manifest.config = config.model_dump(mode="json")
        cache = _load_cache(args.cache, config.mode == CompositionMode.TITLE_GENERATED)
        corpus = corpus_for_checkpoint(model, tokenizer, read_news(news_path), cache)
        report = evaluate(
            model, read_behaviors(behaviors_path), corpus, user_index, show_progress=not args.quiet
        )
        out_dir.mkdir(parents=True, exist_ok=True)
        metrics_path = out_dir / "metrics.json"
        metrics_path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        manifest.outputs.append(str(metrics_path))
        label = f"{config.arch.value}/{config.plm_name.value}/{config.mode.value}"
        print(report.to_table(label, reference_report(config.arch.value, config.plm_name.value, config.mode.value)))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    news_path = _require_file(args.news, "--news")
    behaviors_path = _require_file(args.behaviors, "--behaviors")
    out_dir = Path(args.out or "runs/stats")
    with run_manifest(
        "stats", out_dir / "manifest.json", {"news": news_path, "behaviors": behaviors_path}
    ):
        news_report, behavior_report = ParseReport(), ParseReport()
        articles = read_news(news_path, news_report)
        impressions = read_behaviors(behaviors_path, behavior_report)
        errors = news_report.errors + behavior_report.errors
        for error in errors:
            print(f"parse error: {error.message}", file=sys.stderr)
        stats = dataset_stats(articles, impressions)
        print(stats.to_text())
        if news_report.duplicates:
            print(f"duplicate_news_ids: {news_report.duplicates}")
        for name, diff in stats.compare_reference().items():
            print(f"note: {name} {diff['observed']} differs from reference {diff['reference']}")
        if errors:
            return 3
    return 0


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file mirroring ModelConfig")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--out", help="Output path (directory, or file for cache/corpus)")
    parser.add_argument("--quiet", action="store_true", help="No progress bars")


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", type=CompositionMode, choices=list(CompositionMode),
                        metavar="{title,template,generated}")
    parser.add_argument("--arch", type=Arch, choices=list(Arch), metavar="{naml,nrms,npa}")
    parser.add_argument("--plm", type=PlmChoice, choices=list(PlmChoice),
                        metavar="{distilbert-base,bert-base,toy}")
    parser.add_argument("--max-len", dest="max_len", type=int)
    parser.add_argument("--cache", help="Description cache JSON (generated mode)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsrec", description="News recommendation with LLM-generated category descriptions"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate-descriptions", help="Generate category descriptions")
    _add_shared(gen)
    gen.add_argument("--news", required=True)
    gen.add_argument("--fixture", help="JSON key->text fixture instead of a live LLM")
    gen.add_argument("--force", action="store_true", help="Regenerate cached entries")
    gen.add_argument("--concurrency", type=int)
    gen.set_defaults(func=cmd_generate_descriptions)

    pre = sub.add_parser("preprocess", help="Compose and tokenize the catalog")
    _add_shared(pre)
    _add_model_flags(pre)
    pre.add_argument("--news", required=True)
    pre.set_defaults(func=cmd_preprocess)

    tr = sub.add_parser("train", help="Train a recommender")
    _add_shared(tr)
    _add_model_flags(tr)
    tr.add_argument("--news", required=True)
    tr.add_argument("--behaviors", required=True)
    tr.add_argument("--corpus", help="Preprocessed corpus from 'preprocess'")
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--batch-size", dest="batch_size", type=int)
    tr.add_argument("--lr", type=float)
    tr.add_argument("--history-len", dest="history_len", type=int)
    tr.add_argument("--k-negatives", dest="k_negatives", type=int)
    tr.add_argument("--num-workers", dest="num_workers", type=int)
    tr.add_argument("--freeze-plm", dest="freeze_plm", action="store_true",
                    help="Keep PLM weights fixed (faster, lower quality)")
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("evaluate", help="Evaluate a checkpoint")
    _add_shared(ev)
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--news", required=True)
    ev.add_argument("--behaviors", required=True)
    ev.add_argument("--cache", help="Description cache JSON (generated-mode checkpoints)")
    ev.set_defaults(func=cmd_evaluate)

    st = sub.add_parser("stats", help="Dataset statistics")
    _add_shared(st)
    st.add_argument("--news", required=True)
    st.add_argument("--behaviors", required=True)
    st.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()
    try:
        return args.func(args)
    except NewsRecError as e:
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
