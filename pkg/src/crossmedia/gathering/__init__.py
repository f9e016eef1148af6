"""Search and crawl orchestration."""

from .requests import MIN_WAIT_MS, CrawlJobSpec, InvalidRequest, SearchRequest
from .service import (
    GatheringService,
    NotACrawl,
    PlatformOutcome,
    QuotaError,
    Scheduler,
    SearchResult,
    new_job_id,
)

__all__ = [
    "CrawlJobSpec", "GatheringService", "InvalidRequest", "MIN_WAIT_MS", "NotACrawl",
    "PlatformOutcome", "QuotaError", "Scheduler", "SearchRequest", "SearchResult", "new_job_id",
]
