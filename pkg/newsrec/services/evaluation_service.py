"""Scoring impressions with a trained model and averaging ranking metrics."""
import logging
from typing import Dict, List, Optional

import numpy as np
import torch
from tqdm import tqdm

from newsrec.converters.text_compose import NewsCorpus, build_corpus, compose_catalog
from newsrec.db.description_cache import DescriptionCache
from newsrec.models.recommender import NewsRecommender, lookup_users, score
from newsrec.schemas.metrics import MetricReport
from newsrec.schemas.mind import Impression, NewsArticle
from newsrec.services.metrics import MetricAccumulator

logger = logging.getLogger(__name__)


def corpus_for_checkpoint(
    model: NewsRecommender,
    tokenizer,
    articles: List[NewsArticle],
    cache: Optional[DescriptionCache] = None,
) -> NewsCorpus:
    """Compose and tokenize the catalog exactly as the checkpoint was trained."""
    config = model.config
    composed = compose_catalog(articles, config.mode, cache, sep_token=tokenizer.sep_token)
    return build_corpus(composed, tokenizer, config.max_len, config.pretrained_id)


@torch.no_grad()
def encode_corpus(
    model: NewsRecommender,
    corpus: NewsCorpus,
    rows: Optional[List[int]] = None,
    batch_size: int = 256,
    device: str = "cpu",
    show_progress: bool = False,
) -> torch.Tensor:
    """News vectors for ``rows`` of the corpus (all rows by default), in row order."""
    rows = list(range(len(corpus))) if rows is None else rows
    chunks = []
    starts = range(0, len(rows), batch_size)
    for start in tqdm(starts, desc="news vectors", leave=False, disable=not show_progress):
        chunk = rows[start:start + batch_size]
        input_ids = torch.from_numpy(corpus.token_ids[chunk]).to(device)
        mask = torch.from_numpy(corpus.attention_mask[chunk]).to(device)
        chunks.append(model.encode_news(input_ids, mask).cpu())
    if not chunks:
        return torch.zeros(0, model.config.d_news)
    return torch.cat(chunks)


@torch.no_grad()
def evaluate(
    model: NewsRecommender,
    impressions: List[Impression],
    corpus: NewsCorpus,
    user_index: Dict[str, int],
    batch_size: int = 256,
    device: Optional[str] = None,
    show_progress: bool = True,
) -> MetricReport:
    """Average AUC, MRR, nDCG@5 and nDCG@10 over impressions.

    Each distinct news item is encoded once. Impressions mentioning news
    missing from the corpus, or lacking a positive or a negative, are skipped.
    """
    device = device or ("cuda" if torch.cuda.is_available() else "cpu")
    model = model.to(device)
    model.eval()
    history_len = model.config.history_len
    acc = MetricAccumulator()

    usable: List[Impression] = []
    needed: Dict[str, int] = {}
    for impression in impressions:
        ids = [*impression.history[-history_len:], *(n for n, _ in impression.candidates)]
        if any(n not in corpus for n in ids):
            acc.skip_unknown()
            continue
        if not impression.positives or not impression.negatives:
            acc.n_skipped += 1
            continue
        usable.append(impression)
        for n in ids:
            needed.setdefault(n, len(needed))

    rows = [corpus.index[n] for n in needed]
    vectors = encode_corpus(model, corpus, rows, batch_size, device, show_progress)

    chunks = range(0, len(usable), batch_size)
    for start in tqdm(chunks, desc="impressions", leave=False, disable=not show_progress):
        chunk = usable[start:start + batch_size]
        width = max(1, max(len(imp.history[-history_len:]) for imp in chunk))
        history = torch.zeros(len(chunk), width, vectors.shape[-1])
        mask = torch.zeros(len(chunk), width, dtype=torch.bool)
        for b, imp in enumerate(chunk):
            for j, news_id in enumerate(imp.history[-history_len:]):
                history[b, j] = vectors[needed[news_id]]
                mask[b, j] = True
        users = model.encode_user(
            history.to(device), mask.to(device), lookup_users(user_index, [imp.user_id for imp in chunk]).to(device)
        ).cpu()
        for b, imp in enumerate(chunk):
            candidates = vectors[[needed[n] for n, _ in imp.candidates]]
            scores = score(users[b].unsqueeze(0), candidates).double().numpy()
            acc.add(np.asarray(imp.labels), scores)

    report = acc.report()
    logger.info(
        "[Evaluator] AUC=%.4f MRR=%.4f nDCG@5=%.4f nDCG@10=%.4f scored=%d skipped=%d",
        report.auc, report.mrr, report.ndcg5, report.ndcg10, report.n_scored, report.n_skipped,
    )
    return report
