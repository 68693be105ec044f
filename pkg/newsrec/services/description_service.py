"""Category description generation with caching and bounded retries."""
import asyncio
import logging
from typing import Iterable, List, Optional

from tqdm import tqdm

from newsrec.core.config import settings
from newsrec.core.exceptions import (
    ConfigurationError,
    DescriptionGenerationError,
    LlmClientError,
)
from newsrec.core.rate_limit import RateLimiter
from newsrec.db.description_cache import DescriptionCache
from newsrec.schemas.descriptions import (
    SYSTEM_MESSAGE,
    USER_TEMPLATE,
    CategoryDescription,
    PromptPair,
    count_words,
)
from newsrec.services.llm_clients import LlmClient

logger = logging.getLogger(__name__)


def build_prompt(key: str) -> PromptPair:
    if not key:
        raise ConfigurationError("category key must be non-empty", param="key")
    return PromptPair(system_message=SYSTEM_MESSAGE, user_message=USER_TEMPLATE.format(key=key))


async def generate_description(
    key: str,
    client: LlmClient,
    cache: DescriptionCache,
    *,
    force: bool = False,
    max_attempts: Optional[int] = None,
    backoff_base: Optional[float] = None,
    rate_limiter: Optional[RateLimiter] = None,
) -> CategoryDescription:
    """Return the cached description for ``key`` or ask the client for one.

    Transient client failures are retried with exponential backoff; the
    result is stored in ``cache`` and persisted before returning.
    """
    if not force:
        cached = cache.get(key)
        if cached is not None:
            return cached

    max_attempts = max_attempts or settings.llm_max_attempts
    backoff_base = settings.llm_backoff_base if backoff_base is None else backoff_base
    prompt = build_prompt(key)

    attempt = 0
    while True:
        attempt += 1
        if rate_limiter is not None:
            await rate_limiter.acquire()
        try:
            text = await client.complete(prompt)
            break
        except LlmClientError as e:
            if not e.transient or attempt >= max_attempts:
                raise DescriptionGenerationError(
                    f"Description for '{key}' failed after {attempt} attempt(s): {e.message}",
                    key=key,
                    attempts=attempt,
                ) from e
            delay = backoff_base * (2 ** (attempt - 1))
            logger.warning(
                "[DescriptionService] %s attempt %d failed (%s); retrying in %.1fs",
                key, attempt, e.code, delay,
            )
            await asyncio.sleep(delay)

    text = (text or "").strip()
    if not text:
        raise DescriptionGenerationError(
            f"Empty description returned for '{key}'", key=key, attempts=attempt
        )

    description = CategoryDescription(
        key=key,
        text=text,
        generator_model=client.model_name,
        prompt_fingerprint=prompt.fingerprint,
        word_count=count_words(text),
    )
    # put + save has no await in between, so concurrent tasks never interleave writes.
    cache.put(description)
    cache.save()
    return description


async def generate_all(
    vocab: Iterable[str],
    client: LlmClient,
    cache: DescriptionCache,
    *,
    force: bool = False,
    concurrency: Optional[int] = None,
    rate_limiter: Optional[RateLimiter] = None,
    max_attempts: Optional[int] = None,
    backoff_base: Optional[float] = None,
) -> DescriptionCache:
    """Make sure every key in ``vocab`` has a description.

    Completed keys are persisted as they finish, so a failed run resumes
    where it stopped. Per-key failures are raised together at the end.
    """
    keys = list(dict.fromkeys(vocab))
    pending = [k for k in keys if force or k not in cache]
    logger.info(
        "[DescriptionService] %d categories, %d cached, %d to generate",
        len(keys), len(keys) - len(pending), len(pending),
    )
    if not pending:
        return cache

    semaphore = asyncio.Semaphore(concurrency or settings.llm_concurrency)
    rate_limiter = rate_limiter or RateLimiter()
    progress = tqdm(total=len(pending), desc="descriptions", unit="cat", leave=False)

    async def _one(key: str) -> CategoryDescription:
        async with semaphore:
            try:
                return await generate_description(
                    key,
                    client,
                    cache,
                    force=force,
                    max_attempts=max_attempts,
                    backoff_base=backoff_base,
                    rate_limiter=rate_limiter,
                )
            finally:
                progress.update(1)

    try:
        results = await asyncio.gather(*(_one(k) for k in pending), return_exceptions=True)
    finally:
        progress.close()

    failures: List[DescriptionGenerationError] = []
    for key, result in zip(pending, results):
        if isinstance(result, DescriptionGenerationError):
            failures.append(result)
        elif isinstance(result, BaseException):
            failures.append(
                DescriptionGenerationError(f"Description for '{key}' failed: {result}", key=key)
            )
    if failures:
        names = ", ".join(f.key for f in failures if f.key)
        raise DescriptionGenerationError(
            f"{len(failures)} of {len(pending)} categories failed: {names}", failures=failures
        )
    return cache


def corpus_word_stats(cache: DescriptionCache) -> float:
    """Mean word count over cached descriptions."""
    if len(cache) == 0:
        raise ConfigurationError("Description cache is empty", param="cache")
    return sum(d.word_count for d in cache) / len(cache)
