"""Word lists and token maps used by enrichment, loaded once at startup."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional


class LexiconError(RuntimeError):
    """A configured lexicon file is missing or unreadable."""


def shipped_lexicon_dir() -> Path:
    return Path(str(resources.files("crossmedia") / "data" / "lexicons"))


def read_word_list(path: Path) -> frozenset:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise LexiconError(f"cannot read word list {path}: {exc}") from None
    return frozenset(w.strip().lower() for w in lines if w.strip() and not w.lstrip().startswith("#"))


def read_map(path: Path) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise LexiconError(f"cannot read token map {path}: {exc}") from None
    if not isinstance(data, dict):
        raise LexiconError(f"{path} must hold a JSON object")
    return {str(k): str(v) for k, v in data.items()}


@dataclass(frozen=True)
class Lexicons:
    fear: frozenset = frozenset()
    happiness: frozenset = frozenset()
    emoticons: dict = field(default_factory=dict)
    slang: dict = field(default_factory=dict)
    stopwords: dict = field(default_factory=dict)  # language code -> frozenset

    @classmethod
    def load(cls, directory: Optional[Path | str] = None) -> "Lexicons":
        """Load ``fear.txt``, ``happiness.txt``, ``emoticons.json``, ``slang.json``
        and ``stopwords/<lang>.txt`` from ``directory`` (the shipped set by default)."""
        base = Path(directory) if directory else shipped_lexicon_dir()
        stop_dir = base / "stopwords"
        if not stop_dir.is_dir():
            raise LexiconError(f"missing stopword directory {stop_dir}")
        stopwords = {p.stem: read_word_list(p) for p in sorted(stop_dir.glob("*.txt"))}
        if not stopwords:
            raise LexiconError(f"no stopword lists under {stop_dir}")
        return cls(
            fear=read_word_list(base / "fear.txt"),
            happiness=read_word_list(base / "happiness.txt"),
            emoticons=read_map(base / "emoticons.json"),
            slang={k.lower(): v for k, v in read_map(base / "slang.json").items()},
            stopwords=stopwords,
        )


_default: Optional[Lexicons] = None


def default_lexicons() -> Lexicons:
    global _default
    if _default is None:
        _default = Lexicons.load()
    return _default
