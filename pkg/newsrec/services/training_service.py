"""Negative-sampled training of a news recommender."""
import json
import logging
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from torch.utils.data import DataLoader, Dataset
from tqdm import tqdm

from newsrec.converters.text_compose import NewsCorpus, build_corpus, compose_catalog
from newsrec.core.exceptions import ConfigurationError, TrainingError
from newsrec.db.description_cache import DescriptionCache
from newsrec.models.checkpoint import save_checkpoint
from newsrec.models.loss import ranking_softmax_loss
from newsrec.models.plm import load_plm, load_tokenizer
from newsrec.models.recommender import FALLBACK_USER, NewsRecommender, build_user_index
from newsrec.schemas.mind import Impression, NewsArticle
from newsrec.schemas.training import EpochRecord, ModelConfig, PlmChoice, TrainReport

logger = logging.getLogger(__name__)

REPORT_FILE = "train_report.jsonl"


@dataclass
class TrainingSample:
    user_id: str
    history: List[str]
    candidates: List[str]
    label_index: int


@dataclass
class SamplingStats:
    skipped_impressions: int = 0
    dropped_unknown: int = 0


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def build_training_samples(
    impression: Impression,
    k: int,
    rng: np.random.Generator,
    history_len: int = 50,
    stats: Optional[SamplingStats] = None,
) -> List[TrainingSample]:
    """One sample per clicked candidate, each with ``k`` negatives from the same impression.

    Negatives are drawn without replacement when at least ``k`` exist and with
    replacement otherwise; candidate order is shuffled.
    """
    negatives = impression.negatives
    if not negatives:
        if stats is not None:
            stats.skipped_impressions += 1
        return []
    history = impression.history[-history_len:] if history_len > 0 else []
    samples = []
    for positive in impression.positives:
        picks = rng.choice(len(negatives), size=k, replace=len(negatives) < k)
        candidates = [positive] + [negatives[i] for i in picks]
        perm = rng.permutation(k + 1)
        samples.append(
            TrainingSample(
                user_id=impression.user_id,
                history=list(history),
                candidates=[candidates[i] for i in perm],
                label_index=int(np.flatnonzero(perm == 0)[0]),
            )
        )
    return samples


class SampleDataset(Dataset):
    def __init__(self, samples: Sequence[TrainingSample]):
        self.samples = list(samples)

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, i: int) -> TrainingSample:
        return self.samples[i]


class BatchCollator:
    """Packs samples so each distinct news item in the batch is encoded once.

    With ``fallback_rate`` > 0 that share of samples is scored as ``FALLBACK_USER``.
    """

    def __init__(
        self,
        corpus: NewsCorpus,
        user_index: Dict[str, int],
        fallback_rate: float = 0.0,
        generator: Optional[torch.Generator] = None,
    ):
        self.corpus = corpus
        self.user_index = user_index
        self.fallback_rate = fallback_rate
        self.generator = generator

    def users(self, samples: List[TrainingSample]) -> torch.Tensor:
        users = torch.tensor(
            [self.user_index.get(s.user_id, FALLBACK_USER) for s in samples], dtype=torch.long
        )
        if self.fallback_rate > 0:
            drop = torch.rand(len(samples), generator=self.generator) < self.fallback_rate
            users[drop] = FALLBACK_USER
        return users

    def __call__(self, samples: List[TrainingSample]) -> Dict[str, torch.Tensor]:
        slots: Dict[str, int] = {}
        for sample in samples:
            for news_id in (*sample.history, *sample.candidates):
                slots.setdefault(news_id, len(slots))
        rows = [self.corpus.index[news_id] for news_id in slots]
        width = max(1, max(len(s.history) for s in samples))
        history_index = torch.full((len(samples), width), -1, dtype=torch.long)
        for b, sample in enumerate(samples):
            for j, news_id in enumerate(sample.history):
                history_index[b, j] = slots[news_id]
        return {
            "news_input_ids": torch.from_numpy(self.corpus.token_ids[rows]),
            "news_attention_mask": torch.from_numpy(self.corpus.attention_mask[rows]),
            "history_index": history_index,
            "candidate_index": torch.tensor(
                [[slots[n] for n in s.candidates] for s in samples], dtype=torch.long
            ),
            "user_index": self.users(samples),
            "labels": torch.tensor([s.label_index for s in samples], dtype=torch.long),
        }


def prepare_corpus(
    config: ModelConfig,
    articles: List[NewsArticle],
    cache: Optional[DescriptionCache] = None,
    corpus: Optional[NewsCorpus] = None,
):
    """Tokenizer and tokenized catalog for ``config``; validates a preprocessed corpus."""
    if corpus is not None:
        if corpus.mode != config.mode:
            raise ConfigurationError(
                f"corpus mode {corpus.mode.value} != config mode {config.mode.value}", param="corpus"
            )
        if corpus.max_len != config.max_len or corpus.tokenizer_name != config.pretrained_id:
            raise ConfigurationError(
                f"corpus built for {corpus.tokenizer_name}/{corpus.max_len}, "
                f"config wants {config.pretrained_id}/{config.max_len}",
                param="corpus",
            )
        tokenizer = load_tokenizer(config, texts=corpus.texts)
        return tokenizer, corpus

    if config.plm_name == PlmChoice.TOY:
        # The toy vocabulary is read off the composed texts, so compose first.
        composed = compose_catalog(articles, config.mode, cache)
        tokenizer = load_tokenizer(config, texts=[c.full_text for c in composed])
    else:
        tokenizer = load_tokenizer(config)
        composed = compose_catalog(articles, config.mode, cache, sep_token=tokenizer.sep_token)
    corpus = build_corpus(composed, tokenizer, config.max_len, config.pretrained_id)
    return tokenizer, corpus


def _known_sample(sample: TrainingSample, corpus: NewsCorpus) -> Optional[TrainingSample]:
    if any(n not in corpus for n in sample.candidates):
        return None
    sample.history = [n for n in sample.history if n in corpus]
    return sample


def epoch_samples(
    config: ModelConfig,
    impressions: List[Impression],
    corpus: NewsCorpus,
    epoch: int,
    stats: Optional[SamplingStats] = None,
) -> List[TrainingSample]:
    """Freshly drawn negatives for one epoch; reproducible from (seed, epoch)."""
    rng = np.random.default_rng([config.seed, epoch])
    samples: List[TrainingSample] = []
    for impression in impressions:
        for sample in build_training_samples(
            impression, config.k_negatives, rng, config.history_len, stats
        ):
            known = _known_sample(sample, corpus)
            if known is None:
                if stats is not None:
                    stats.dropped_unknown += 1
                continue
            samples.append(known)
    return samples


def train(
    config: ModelConfig,
    articles: List[NewsArticle],
    impressions: List[Impression],
    cache: Optional[DescriptionCache],
    out_dir: Union[str, Path],
    corpus: Optional[NewsCorpus] = None,
    device: Optional[str] = None,
    show_progress: bool = True,
) -> Tuple[Path, TrainReport]:
    """Train for ``config.epochs`` epochs with AdamW and write checkpoints to ``out_dir``.

    Each epoch writes ``epoch-N/`` and appends one JSON line to the report;
    the last weights are also saved as ``final/``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    device = device or ("cuda" if torch.cuda.is_available() else "cpu")
    seed_everything(config.seed)
    started = time.perf_counter()

    tokenizer, corpus = prepare_corpus(config, articles, cache, corpus)
    user_index = build_user_index(imp.user_id for imp in impressions)
    plm = load_plm(config, tokenizer)
    model = NewsRecommender(config, plm, n_users=len(user_index)).to(device)

    params = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.AdamW(params, lr=config.lr, weight_decay=config.weight_decay)
    group = optimizer.param_groups[0]
    report = TrainReport(
        seed=config.seed,
        optimizer={
            "name": "AdamW",
            "lr": config.lr,
            "betas": list(group["betas"]),
            "eps": group["eps"],
            "weight_decay": group["weight_decay"],
        },
        deviations=[f"gradient clipping at global norm {config.grad_clip_norm}"]
        + (["PLM frozen (fast mode)"] if config.freeze_plm else []),
    )
    report_path = out_dir / REPORT_FILE
    report_path.unlink(missing_ok=True)
    collator = BatchCollator(
        corpus,
        user_index,
        fallback_rate=config.fallback_user_rate,
        generator=torch.Generator().manual_seed(config.seed),
    )

    for epoch in range(1, config.epochs + 1):
        epoch_started = time.perf_counter()
        stats = SamplingStats()
        samples = epoch_samples(config, impressions, corpus, epoch, stats)
        if not samples:
            raise TrainingError("Training set is empty after negative sampling", code="empty_training_set")
        loader = DataLoader(
            SampleDataset(samples),
            batch_size=config.batch_size,
            shuffle=True,
            num_workers=config.num_workers,
            collate_fn=collator,
            generator=torch.Generator().manual_seed(config.seed + epoch),
        )

        model.train()
        total_loss, n_seen, n_batches = 0.0, 0, 0
        batches = tqdm(loader, desc=f"epoch {epoch}", leave=False, disable=not show_progress)
        for batch_idx, batch in enumerate(batches):
            batch = {name: tensor.to(device) for name, tensor in batch.items()}
            labels = batch.pop("labels")
            scores = model(**batch)
            loss = ranking_softmax_loss(scores, labels)
            if not torch.isfinite(loss):
                raise TrainingError(
                    f"Non-finite loss at epoch {epoch}, batch {batch_idx} (lr={config.lr})",
                    code="nan_loss",
                )
            optimizer.zero_grad()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(params, config.grad_clip_norm)
            optimizer.step()
            total_loss += loss.item() * len(labels)
            n_seen += len(labels)
            n_batches += 1

        record = EpochRecord(
            epoch=epoch,
            mean_loss=total_loss / n_seen,
            n_samples=n_seen,
            n_batches=n_batches,
            wall_time_s=time.perf_counter() - epoch_started,
            seed=config.seed,
        )
        report.epochs.append(record)
        report.n_samples = n_seen
        report.skipped_impressions = stats.skipped_impressions
        with open(report_path, "a", encoding="utf-8") as f:
            f.write(record.model_dump_json() + "\n")
        logger.info(
            "[Trainer] epoch %d/%d loss=%.5f samples=%d skipped=%d",
            epoch, config.epochs, record.mean_loss, n_seen, stats.skipped_impressions,
        )
        ckpt = save_checkpoint(out_dir / f"epoch-{epoch}", model, tokenizer, user_index)
        report.checkpoints.append(str(ckpt))

    final = save_checkpoint(out_dir / "final", model, tokenizer, user_index)
    report.checkpoints.append(str(final))
    report.wall_time_s = time.perf_counter() - started
    (out_dir / "train_summary.json").write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return final, report


def load_report(path: Union[str, Path]) -> List[EpochRecord]:
    with open(path, encoding="utf-8") as f:
        return [EpochRecord.model_validate(json.loads(line)) for line in f if line.strip()]
