from __future__ import annotations

import logging
from dataclasses import replace
from typing import Optional

from ..activity import Activity, EnrichedData
from .lexicons import Lexicons, default_lexicons
from .text import (
    compute_content_metrics,
    compute_sentiment,
    convert_emoticons,
    convert_slang,
    detect_language,
    extract_entities,
)

log = logging.getLogger(__name__)

_METRIC_FIELDS = {
    "numOfCharacters": "num_of_characters",
    "numOfWords": "num_of_words",
    "avgWordLength": "avg_word_length",
    "wordsToSentencesRatio": "words_to_sentences_ratio",
    "numPunctuation": "num_punctuation",
    "syllablesPerWord": "syllables_per_word",
    "entropy": "entropy",
}


def _entities(text, lexicons):
    e = extract_entities(text)
    return {"embedded_urls": tuple(e["embeddedUrls"]), "mentions": tuple(e["mentions"]), "tags": tuple(e["tags"])}


def _metrics(text, lexicons):
    return {_METRIC_FIELDS[k]: v for k, v in compute_content_metrics(text).items()}


def _conversions(text, lexicons):
    return {
        "converted_emoticons": convert_emoticons(text, lexicons.emoticons),
        "converted_slang": convert_slang(text, lexicons.slang),
    }


def _sentiment(text, lexicons):
    s = compute_sentiment(text, lexicons)
    return {"abs_fear_factor": s["absFearFactor"], "abs_happiness_factor": s["absHappinessFactor"]}


def _language(text, lexicons):
    return {"language": detect_language(text, lexicons)}


_STEPS = (_entities, _metrics, _conversions, _sentiment, _language)


def compute_enriched_fields(text: str, lexicons: Lexicons) -> dict:
    """All computed attributes for a body, keyed by EnrichedData field name.

    A failing step is logged and its fields are left out, so one bad
    attribute never loses the rest.
    """
    out: dict = {}
    for step in _STEPS:
        try:
            out.update(step(text, lexicons))
        except Exception:  # per-field failures must not abort enrichment
            log.exception("enrichment step %s failed", step.__name__)
    return out


def enrich_activity(a: Activity, lexicons: Optional[Lexicons] = None) -> Activity:
    """Return ``a`` with its ``enrichedData`` recomputed from the object content.

    Media, engagement counts and unknown enrichedData keys are carried over;
    the content itself is never modified.
    """
    lexicons = lexicons or default_lexicons()
    text = a.object.content if isinstance(a.object.content, str) else ""
    current = a.object.enriched_data or EnrichedData()
    return a.with_enriched(replace(current, **compute_enriched_fields(text, lexicons)))


def enrich_batch(activities, lexicons: Optional[Lexicons] = None) -> list[Activity]:
    lexicons = lexicons or default_lexicons()
    return [enrich_activity(a, lexicons) for a in activities]
