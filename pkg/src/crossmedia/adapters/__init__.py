"""Platform adapters over deterministic fixture corpora."""

from .budget import QuotaExceeded, RateBudget, consume_quota
from .fixtures import (
    DEFAULT_BUDGETS,
    PROFILES,
    CapabilityViolation,
    CursorError,
    FixtureAdapter,
    Page,
    UnknownPlatform,
    capabilities,
    load_adapters,
    load_jsonl,
    map_native,
    shipped_fixture_dir,
)
from .schemas import SCHEMAS, MappingError, NativeSchema

__all__ = [
    "CapabilityViolation", "CursorError", "DEFAULT_BUDGETS", "FixtureAdapter", "MappingError",
    "NativeSchema", "PROFILES", "Page", "QuotaExceeded", "RateBudget", "SCHEMAS", "UnknownPlatform",
    "capabilities", "consume_quota", "load_adapters", "load_jsonl", "map_native", "shipped_fixture_dir",
]
