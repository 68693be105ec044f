"""Rate limiting for LLM requests using a token bucket."""
import asyncio
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from newsrec.core.config import settings


@dataclass
class TokenBucket:
    """Token bucket refilled continuously at capacity / window per second."""

    capacity: int
    window: float
    tokens: float = field(default=0.0)
    clock: Callable[[], float] = field(default=time.monotonic, repr=False)
    last_update: float = field(default=0.0)
    refill_rate: float = field(default=0.0)  # tokens per second

    def __post_init__(self):
        self.tokens = float(self.capacity)
        self.refill_rate = self.capacity / self.window
        self.last_update = self.clock()

    def _refill(self) -> None:
        now = self.clock()
        elapsed = now - self.last_update
        self.last_update = now
        self.tokens = min(self.capacity, self.tokens + elapsed * self.refill_rate)

    def consume(self, tokens: int = 1) -> bool:
        """Try to consume tokens. Returns True if successful."""
        self._refill()
        if self.tokens >= tokens:
            self.tokens -= tokens
            return True
        return False

    def seconds_until(self, tokens: int = 1) -> float:
        """Seconds until ``tokens`` are available."""
        needed = tokens - self.tokens
        if needed <= 0:
            return 0.0
        return needed / self.refill_rate


class RateLimiter:
    """Async limiter shared by all in-flight LLM requests of one run."""

    def __init__(
        self,
        requests: Optional[int] = None,
        window: Optional[float] = None,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.bucket = TokenBucket(
            capacity=requests or settings.rate_limit_requests,
            window=float(window or settings.rate_limit_window),
            clock=clock,
        )
        self._lock = asyncio.Lock()

    async def acquire(self) -> None:
        """Wait until one request token is available, then take it."""
        async with self._lock:
            while not self.bucket.consume():
                await asyncio.sleep(self.bucket.seconds_until())
