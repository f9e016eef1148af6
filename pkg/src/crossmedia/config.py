"""Service configuration: one JSON file plus ``CROSSMEDIA_*`` environment overrides.

Recognised keys (file) and variables (environment):

========================  ==============================  =====================
key                       variable                        default
========================  ==============================  =====================
host                      CROSSMEDIA_HOST                 127.0.0.1
port                      CROSSMEDIA_PORT                 8080
dataDir                   CROSSMEDIA_DATA_DIR             (in-memory store)
fixtureDir                CROSSMEDIA_FIXTURE_DIR          shipped fixtures
lexiconDir                CROSSMEDIA_LEXICON_DIR          shipped lexicons
pollInterval              CROSSMEDIA_POLL_INTERVAL        0.25 (seconds)
budgets.<platform>        CROSSMEDIA_BUDGET_<PLATFORM>    see adapters
========================  ==============================  =====================

A budget is ``[capacity, windowSeconds]`` in the file and
``capacity/windowSeconds`` in the environment.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .activity import PLATFORMS

ENV_PREFIX = "CROSSMEDIA_"


class ConfigError(ValueError):
    pass


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    data_dir: Optional[Path] = None
    fixture_dir: Optional[Path] = None
    lexicon_dir: Optional[Path] = None
    poll_interval: float = 0.25
    budgets: dict = field(default_factory=dict)  # platform -> (capacity, window seconds)


def _budget(platform: str, value) -> tuple[int, float]:
    if isinstance(value, str):
        value = value.split("/")
    try:
        capacity, window = value
        return int(capacity), float(window)
    except (TypeError, ValueError):
        raise ConfigError(f"budget for {platform} must be capacity/windowSeconds, got {value!r}") from None


def load_config(path: Optional[Path | str] = None, env: Optional[Mapping[str, str]] = None) -> ServiceConfig:
    env = os.environ if env is None else env
    path = path or env.get(ENV_PREFIX + "CONFIG")
    raw: dict = {}
    if path:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")

    def pick(key: str, var: str):
        return env.get(ENV_PREFIX + var, raw.get(key))

    cfg = ServiceConfig()
    if (v := pick("host", "HOST")) is not None:
        cfg.host = str(v)
    try:
        if (v := pick("port", "PORT")) is not None:
            cfg.port = int(v)
        if (v := pick("pollInterval", "POLL_INTERVAL")) is not None:
            cfg.poll_interval = float(v)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for attr, key, var in (
        ("data_dir", "dataDir", "DATA_DIR"),
        ("fixture_dir", "fixtureDir", "FIXTURE_DIR"),
        ("lexicon_dir", "lexiconDir", "LEXICON_DIR"),
    ):
        if v := pick(key, var):
            setattr(cfg, attr, Path(v))
    budgets = raw.get("budgets", {})
    if not isinstance(budgets, dict):
        raise ConfigError("budgets must map platform -> [capacity, windowSeconds]")
    for platform in PLATFORMS:
        value = env.get(f"{ENV_PREFIX}BUDGET_{platform.upper()}", budgets.get(platform))
        if value is not None:
            cfg.budgets[platform] = _budget(platform, value)
    unknown = set(budgets) - set(PLATFORMS)
    if unknown:
        raise ConfigError(f"budgets for unknown platforms: {sorted(unknown)}")
    return cfg
