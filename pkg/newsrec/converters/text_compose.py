"""Turn catalog articles into news-encoder input text and token ids."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import numpy as np
from pydantic import BaseModel, model_validator

from newsrec.converters.mind_tsv import category_key
from newsrec.core.exceptions import ConfigurationError, MissingDescriptionError
from newsrec.db.description_cache import DescriptionCache
from newsrec.schemas.descriptions import USER_TEMPLATE
from newsrec.schemas.mind import NewsArticle
from newsrec.schemas.training import CompositionMode

logger = logging.getLogger(__name__)

MIN_MAX_LEN = 4
CORPUS_FORMAT = "newsrec-corpus"
CORPUS_VERSION = 1


class ComposedNewsText(BaseModel):
    news_id: str
    mode: CompositionMode
    d_title: str
    d_desc: Optional[str] = None
    full_text: str

    @model_validator(mode="after")
    def check_mode(self) -> "ComposedNewsText":
        if self.mode == CompositionMode.TITLE_ONLY:
            if self.d_desc is not None or self.full_text != self.d_title:
                raise ValueError("title-only text must be the bare title")
        elif self.d_desc is None:
            raise ValueError(f"{self.mode.value} text needs a description part")
        return self


@dataclass
class TokenizedNews:
    token_ids: List[int]
    attention_mask: List[int]
    max_len: int


def compose(
    article: NewsArticle,
    mode: CompositionMode,
    cache: Optional[DescriptionCache] = None,
    sep_token: str = "[SEP]",
) -> ComposedNewsText:
    """Build the encoder string for ``article`` under ``mode``."""
    title = article.title
    if mode == CompositionMode.TITLE_ONLY:
        return ComposedNewsText(news_id=article.news_id, mode=mode, d_title=title, full_text=title)

    key = category_key(article)
    if mode == CompositionMode.TITLE_TEMPLATE:
        desc = USER_TEMPLATE.format(key=key)
    else:
        entry = cache.get(key) if cache is not None else None
        if entry is None:
            raise MissingDescriptionError(key)
        desc = entry.text
    return ComposedNewsText(
        news_id=article.news_id,
        mode=mode,
        d_title=title,
        d_desc=desc,
        full_text=f"{title} {sep_token} {desc}",
    )


def tokenize(composed: ComposedNewsText, tokenizer, max_len: int) -> TokenizedNews:
    """Single-sequence encoding with special tokens, right truncation, padding to max_len."""
    if max_len < MIN_MAX_LEN:
        raise ConfigurationError(f"max_len must be >= {MIN_MAX_LEN}, got {max_len}", param="max_len")
    encoded = tokenizer(
        composed.full_text,
        max_length=max_len,
        truncation=True,
        padding="max_length",
        return_token_type_ids=False,
    )
    return TokenizedNews(
        token_ids=list(encoded["input_ids"]),
        attention_mask=list(encoded["attention_mask"]),
        max_len=max_len,
    )


@dataclass
class NewsCorpus:
    """Tokenized catalog: row i of the arrays belongs to ``news_ids[i]``."""

    news_ids: List[str]
    token_ids: np.ndarray
    attention_mask: np.ndarray
    mode: CompositionMode
    tokenizer_name: str
    max_len: int
    texts: List[str] = field(default_factory=list)
    index: Dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {news_id: i for i, news_id in enumerate(self.news_ids)}

    def __len__(self) -> int:
        return len(self.news_ids)

    def __contains__(self, news_id: str) -> bool:
        return news_id in self.index


def compose_catalog(
    articles: Iterable[NewsArticle],
    mode: CompositionMode,
    cache: Optional[DescriptionCache] = None,
    sep_token: str = "[SEP]",
) -> List[ComposedNewsText]:
    return [compose(a, mode, cache, sep_token) for a in articles]


def build_corpus(
    composed: List[ComposedNewsText],
    tokenizer,
    max_len: int,
    tokenizer_name: str,
) -> NewsCorpus:
    """Tokenize every composed text with ``tokenize`` and stack the rows."""
    modes = {c.mode for c in composed}
    if len(modes) > 1:
        raise ConfigurationError(f"mixed composition modes in one corpus: {sorted(m.value for m in modes)}")
    mode = modes.pop() if modes else CompositionMode.TITLE_ONLY
    rows = [tokenize(c, tokenizer, max_len) for c in composed]
    token_ids = np.asarray([r.token_ids for r in rows], dtype=np.int64).reshape(len(rows), max_len)
    attention_mask = np.asarray([r.attention_mask for r in rows], dtype=np.int64).reshape(len(rows), max_len)
    return NewsCorpus(
        news_ids=[c.news_id for c in composed],
        token_ids=token_ids,
        attention_mask=attention_mask,
        mode=mode,
        tokenizer_name=tokenizer_name,
        max_len=max_len,
        texts=[c.full_text for c in composed],
    )


def write_corpus(path: Union[str, Path], corpus: NewsCorpus, pad_token_id: int) -> None:
    """JSON lines: one header record, then one record per news item."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        header = {
            "format": CORPUS_FORMAT,
            "version": CORPUS_VERSION,
            "tokenizer": corpus.tokenizer_name,
            "mode": corpus.mode.value,
            "max_len": corpus.max_len,
            "pad_token_id": pad_token_id,
        }
        f.write(json.dumps(header) + "\n")
        for i, news_id in enumerate(corpus.news_ids):
            record = {
                "news_id": news_id,
                "mode": corpus.mode.value,
                "full_text": corpus.texts[i] if corpus.texts else "",
                "token_ids": corpus.token_ids[i].tolist(),
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_corpus(path: Union[str, Path]) -> NewsCorpus:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        try:
            header = json.loads(f.readline())
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Corpus {path} has no header: {e}", param="corpus")
        if header.get("format") != CORPUS_FORMAT or header.get("version") != CORPUS_VERSION:
            raise ConfigurationError(f"Unsupported corpus format in {path}", param="corpus")
        records = [json.loads(line) for line in f if line.strip()]
    max_len = int(header["max_len"])
    pad = int(header["pad_token_id"])
    token_ids = np.asarray([r["token_ids"] for r in records], dtype=np.int64).reshape(-1, max_len)
    # Padding is always trailing, so the mask is 1 up to the last non-pad token.
    lengths = np.asarray(
        [max((j + 1 for j, t in enumerate(r["token_ids"]) if t != pad), default=0) for r in records],
        dtype=np.int64,
    )
    attention_mask = (np.arange(max_len)[None, :] < lengths[:, None]).astype(np.int64)
    return NewsCorpus(
        news_ids=[r["news_id"] for r in records],
        token_ids=token_ids,
        attention_mask=attention_mask,
        mode=CompositionMode(header["mode"]),
        tokenizer_name=header["tokenizer"],
        max_len=max_len,
        texts=[r.get("full_text", "") for r in records],
    )
