"""Fixed-window request budgets per platform."""

from __future__ import annotations

import math
import threading
import time
from typing import Callable, Optional


class QuotaExceeded(Exception):
    def __init__(self, platform: Optional[str], retry_after: float):
        who = f"{platform} " if platform else ""
        super().__init__(f"{who}quota exhausted, retry in {retry_after:.1f}s")
        self.platform = platform
        self.retry_after = retry_after


class RateBudget:
    """``capacity`` request units per window; the bucket refills completely at
    each window boundary (windows are aligned to the budget's creation time).

    All consumption goes through one lock, so concurrent jobs sharing a
    platform see a single total order of spends.
    """

    def __init__(
        self,
        capacity: int,
        window_seconds: float,
        *,
        platform: Optional[str] = None,
        clock: Callable[[], float] = time.time,
    ):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        if window_seconds <= 0:
            raise ValueError("window length must be positive")
        self.capacity = capacity
        self.window_seconds = window_seconds
        self.platform = platform
        self.clock = clock
        self._origin = clock()
        self._window = 0
        self._tokens = capacity
        self._lock = threading.Lock()
        self.consumed_total = 0
        self.rejected_total = 0

    def _roll(self, now: float) -> None:
        window = math.floor((now - self._origin) / self.window_seconds)
        if window > self._window:
            self._window = window
            self._tokens = self.capacity

    def _reset_in(self, now: float) -> float:
        return self._origin + (self._window + 1) * self.window_seconds - now

    @property
    def tokens(self) -> int:
        with self._lock:
            self._roll(self.clock())
            return self._tokens

    def seconds_until_reset(self) -> float:
        with self._lock:
            now = self.clock()
            self._roll(now)
            return self._reset_in(now)

    def consume(self, n: int = 1) -> int:
        """Spend ``n`` units and return what is left in this window."""
        if n < 1:
            raise ValueError("must consume at least one request unit")
        with self._lock:
            now = self.clock()
            self._roll(now)
            if self._tokens < n:
                self.rejected_total += 1
                raise QuotaExceeded(self.platform, self._reset_in(now))
            self._tokens -= n
            self.consumed_total += n
            return self._tokens

    def __repr__(self) -> str:
        return f"RateBudget({self.platform!r}, {self._tokens}/{self.capacity} per {self.window_seconds}s)"


def consume_quota(budget: RateBudget, n: int = 1) -> RateBudget:
    budget.consume(n)
    return budget
