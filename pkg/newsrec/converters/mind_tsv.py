"""Convert MIND news.tsv / behaviors.tsv lines to typed records and back."""
import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from newsrec.core.exceptions import ParseError
from newsrec.schemas.mind import DatasetStats, Impression, NewsArticle

logger = logging.getLogger(__name__)

NEWS_COLUMNS = (
    "news_id",
    "category",
    "subcategory",
    "title",
    "abstract",
    "url",
    "title_entities",
    "abstract_entities",
)
BEHAVIOR_COLUMNS = ("impression_id", "user_id", "time", "history", "impressions")
TIMESTAMP_FORMATS = ("%m/%d/%Y %I:%M:%S %p", "%m/%d/%Y %H:%M:%S")

PathLike = Union[str, Path]
TextSource = Union[IO[str], Iterable[str]]


@dataclass
class ParseReport:
    """Collects recoverable problems when parsing in lenient mode."""

    errors: List[ParseError] = field(default_factory=list)
    duplicates: int = 0
    lines: int = 0

    @property
    def ok(self) -> bool:
        return not self.errors


def read_table(source: TextSource, columns: Sequence[str]) -> pd.DataFrame:
    """Raw string frame, one row per physical line (blank lines included).

    Titles carry bare ``"`` characters, so quoting is off. Rows wider than
    ``columns`` are cut to width; short rows are padded with NaN.
    """
    buffer = source if hasattr(source, "read") else io.StringIO("".join(source))
    width = len(columns)
    try:
        return pd.read_csv(
            buffer,
            sep="\t",
            header=None,
            names=list(columns),
            dtype=str,
            keep_default_na=False,
            quoting=csv.QUOTE_NONE,
            skip_blank_lines=False,
            engine="python",
            on_bad_lines=lambda fields: fields[:width],
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(columns), dtype=str)


def _rows(frame: pd.DataFrame) -> Iterable[Tuple[int, List[str]]]:
    """(line number, present fields) for every non-blank row."""
    for position, row in enumerate(frame.itertuples(index=False, name=None)):
        cols = [value.rstrip("\r") for value in row if isinstance(value, str)]
        if any(value.strip() for value in cols):
            yield position + 1, cols


def _fail(error: ParseError, report: ParseReport, strict: bool) -> None:
    if strict:
        raise error
    logger.warning("[MindParser] %s", error.message)
    report.errors.append(error)


def _optional(value: str) -> Optional[str]:
    return value if value != "" else None


def parse_news(stream: TextSource, report: Optional[ParseReport] = None) -> List[NewsArticle]:
    """Parse news.tsv lines in order.

    Without ``report`` the first malformed line raises ``ParseError``; with it,
    malformed lines are recorded there and skipped. Duplicate ids keep the
    first occurrence and are counted either way.
    """
    strict = report is None
    report = report if report is not None else ParseReport()
    articles: List[NewsArticle] = []
    seen = set()
    for line_number, cols in _rows(read_table(stream, NEWS_COLUMNS)):
        report.lines += 1
        if len(cols) < 4:
            _fail(ParseError(f"expected at least 4 columns, got {len(cols)}", line_number, "news"), report, strict)
            continue
        if not cols[3].strip():
            _fail(ParseError("empty title", line_number, "news"), report, strict)
            continue
        values = dict(zip(NEWS_COLUMNS, cols))
        try:
            article = NewsArticle(
                news_id=values["news_id"],
                category=values["category"],
                subcategory=values["subcategory"],
                title=values["title"],
                **{
                    name: _optional(values[name])
                    for name in NEWS_COLUMNS[4:]
                    if name in values
                },
            )
        except ValidationError as e:
            _fail(ParseError(str(e.errors()[0]["msg"]), line_number, "news"), report, strict)
            continue
        if article.news_id in seen:
            report.duplicates += 1
            logger.debug("[MindParser] duplicate news_id %s at line %d kept first", article.news_id, line_number)
            continue
        seen.add(article.news_id)
        articles.append(article)
    if report.duplicates:
        logger.warning("[MindParser] %d duplicate news_id rows dropped (first kept)", report.duplicates)
    return articles


def parse_timestamp(value: str) -> datetime:
    value = value.strip()
    for fmt in TIMESTAMP_FORMATS:
        try:
            return datetime.strptime(value, fmt)
        except ValueError:
            continue
    return datetime.fromisoformat(value)


def format_timestamp(ts: datetime) -> str:
    hour = ts.hour % 12 or 12
    return f"{ts.month}/{ts.day}/{ts.year} {hour}:{ts:%M:%S} {ts:%p}"


def _parse_candidate(token: str, line_number: int) -> Tuple[str, int]:
    news_id, sep, label = token.rpartition("-")
    if not sep or not news_id or label not in ("0", "1"):
        raise ParseError(f"candidate '{token}' lacks a -0/-1 label suffix", line_number, "behaviors")
    return news_id, int(label)


def parse_behaviors(stream: TextSource, report: Optional[ParseReport] = None) -> List[Impression]:
    """Parse behaviors.tsv lines in order; same error contract as ``parse_news``."""
    strict = report is None
    report = report if report is not None else ParseReport()
    impressions: List[Impression] = []
    for line_number, cols in _rows(read_table(stream, BEHAVIOR_COLUMNS)):
        report.lines += 1
        if len(cols) < len(BEHAVIOR_COLUMNS):
            _fail(
                ParseError(f"expected {len(BEHAVIOR_COLUMNS)} columns, got {len(cols)}", line_number, "behaviors"),
                report,
                strict,
            )
            continue
        impression_id, user_id, time_col, history_col, candidates_col = cols
        try:
            timestamp = parse_timestamp(time_col)
        except ValueError:
            _fail(ParseError(f"unparseable time '{time_col}'", line_number, "behaviors"), report, strict)
            continue
        tokens = candidates_col.split()
        if not tokens:
            _fail(ParseError("empty candidate column", line_number, "behaviors"), report, strict)
            continue
        try:
            candidates = [_parse_candidate(token, line_number) for token in tokens]
        except ParseError as e:
            _fail(e, report, strict)
            continue
        impressions.append(
            Impression(
                impression_id=impression_id,
                user_id=user_id,
                timestamp=timestamp,
                history=history_col.split(),
                candidates=candidates,
            )
        )
    return impressions


def format_news_line(article: NewsArticle) -> str:
    values = [getattr(article, name) for name in NEWS_COLUMNS]
    return "\t".join("" if v is None else v for v in values)


def format_behavior_line(impression: Impression) -> str:
    return "\t".join(
        [
            impression.impression_id,
            impression.user_id,
            format_timestamp(impression.timestamp),
            " ".join(impression.history),
            " ".join(f"{news_id}-{label}" for news_id, label in impression.candidates),
        ]
    )


def read_news(path: PathLike, report: Optional[ParseReport] = None) -> List[NewsArticle]:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_news(f, report)


def read_behaviors(path: PathLike, report: Optional[ParseReport] = None) -> List[Impression]:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_behaviors(f, report)


def write_news(path: PathLike, articles: Iterable[NewsArticle]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for article in articles:
            f.write(format_news_line(article) + "\n")


def write_behaviors(path: PathLike, impressions: Iterable[Impression]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for impression in impressions:
            f.write(format_behavior_line(impression) + "\n")


def category_key(article: NewsArticle) -> str:
    """Two-level taxonomy key, e.g. ``tv-golden-globes``."""
    return f"{article.category}-{article.subcategory}".lower()


def build_category_vocab(articles: Iterable[NewsArticle]) -> List[str]:
    """Distinct category keys in first-seen order."""
    return list(dict.fromkeys(category_key(a) for a in articles))


def dataset_stats(articles: List[NewsArticle], impressions: List[Impression]) -> DatasetStats:
    return DatasetStats(
        n_users=len({imp.user_id for imp in impressions}),
        n_news=len(articles),
        n_impressions=len(impressions),
        n_clicks=sum(len(imp.positives) for imp in impressions),
    )
