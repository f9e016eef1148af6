"""Computed metadata for activities (the ``enrichedData`` block)."""

from .enrich import compute_enriched_fields, enrich_activity, enrich_batch
from .lexicons import LexiconError, Lexicons, default_lexicons, shipped_lexicon_dir
from .text import (
    compute_content_metrics,
    compute_sentiment,
    convert_emoticons,
    convert_slang,
    detect_language,
    extract_entities,
    shannon_entropy,
)

__all__ = [
    "LexiconError", "Lexicons", "compute_content_metrics", "compute_enriched_fields", "compute_sentiment",
    "convert_emoticons", "convert_slang", "default_lexicons", "detect_language", "enrich_activity",
    "enrich_batch", "extract_entities", "shannon_entropy", "shipped_lexicon_dir",
]
