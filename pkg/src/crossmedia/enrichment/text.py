"""Text-level enrichment: entities, content metrics, conversions, sentiment, language.

Tokenization rules are deliberately simple and deterministic:

* words are whitespace-separated tokens of the raw body;
* sentences are non-blank segments between runs of ``.``, ``!`` or ``?``
  outside URLs (at least one for any non-empty body);
* syllables are vowel groups, at least one per word containing a letter;
* entropy is the Shannon entropy (bits) of the character distribution.
"""

from __future__ import annotations

import math
import re
from collections import Counter

from .lexicons import Lexicons

_URL = re.compile(r"https?://\S+")
_MENTION = re.compile(r"(?<![\w@])@(\w+)")
_TAG = re.compile(r"(?<![\w#&])#(\w+)")
_SENTENCE_SPLIT = re.compile(r"[.!?]+")
_VOWEL_GROUP = re.compile(r"[aeiouyäöüáàâéèêíìîóòôúùû]+", re.IGNORECASE)
_WORD = re.compile(r"\w+")
_LETTERS = re.compile(r"[^\W\d_]+")
_TOKEN = re.compile(r"\S+")

PUNCTUATION = frozenset(".,;:!?\"'()-")


def _unique(items) -> list:
    return list(dict.fromkeys(items))


def extract_entities(text: str) -> dict:
    urls = _unique(_URL.findall(text))
    rest = _URL.sub(" ", text)
    return {
        "embeddedUrls": urls,
        "mentions": _unique(_MENTION.findall(rest)),
        "tags": _unique(_TAG.findall(rest)),
    }


def _syllables(word: str) -> int:
    if not any(ch.isalpha() for ch in word):
        return 0
    return max(1, len(_VOWEL_GROUP.findall(word)))


def shannon_entropy(text: str) -> float:
    if not text:
        return 0.0
    n = len(text)
    h = -sum(c / n * math.log2(c / n) for c in Counter(text).values())
    return max(0.0, h)


def sentence_count(text: str) -> int:
    if not text.strip():
        return 0
    return max(1, sum(1 for seg in _SENTENCE_SPLIT.split(text) if seg.strip()))


def compute_content_metrics(text: str) -> dict:
    words = text.split()
    if not words:
        return {
            "numOfCharacters": len(text),
            "numOfWords": 0,
            "avgWordLength": 0.0,
            "wordsToSentencesRatio": 0.0,
            "numPunctuation": sum(ch in PUNCTUATION for ch in text),
            "syllablesPerWord": 0.0,
            "entropy": shannon_entropy(text),
        }
    # Dots inside URLs are not sentence ends.
    sentences = max(1, sentence_count(_URL.sub(" ", text)))
    return {
        "numOfCharacters": len(text),
        "numOfWords": len(words),
        "avgWordLength": sum(len(w) for w in words) / len(words),
        "wordsToSentencesRatio": len(words) / sentences,
        "numPunctuation": sum(ch in PUNCTUATION for ch in text),
        "syllablesPerWord": sum(_syllables(w) for w in words) / len(words),
        "entropy": shannon_entropy(text),
    }


def _replace_tokens(text: str, lookup) -> str:
    def sub(m: re.Match) -> str:
        repl = lookup(m.group(0))
        return m.group(0) if repl is None else repl

    return _TOKEN.sub(sub, text)


def convert_emoticons(text: str, mapping: dict) -> str:
    return _replace_tokens(text, mapping.get)


def convert_slang(text: str, mapping: dict) -> str:
    """Whole-token slang expansion; lookup is case-insensitive (keys lower-case)."""
    return _replace_tokens(text, lambda tok: mapping.get(tok.lower()))


def compute_sentiment(text: str, lexicons: Lexicons) -> dict:
    """Absolute lexicon hit counts.

    Each whitespace token of the body is converted (emoticons, then slang) and
    counts at most once per class, so the two factors never exceed the word
    count when the lexicons are disjoint.
    """
    fear = happy = 0
    for token in text.split():
        converted = convert_slang(convert_emoticons(token, lexicons.emoticons), lexicons.slang)
        words = {w.lower() for w in _WORD.findall(converted)}
        fear += bool(words & lexicons.fear)
        happy += bool(words & lexicons.happiness)
    return {"absFearFactor": fear, "absHappinessFactor": happy}


def detect_language(text: str, lexicons: Lexicons) -> str:
    """Language whose stopword list overlaps the text most; ``"und"`` on no hit or a tie."""
    words = [w.lower() for w in _LETTERS.findall(text)]
    if not words:
        return "und"
    scores = {lang: sum(w in stop for w in words) for lang, stop in lexicons.stopwords.items()}
    best = max(scores.values(), default=0)
    leaders = [lang for lang, s in scores.items() if s == best]
    if best == 0 or len(leaders) != 1:
        return "und"
    return leaders[0]
