"""Geo-circle and time-window filters shared by native adapters and post-filters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

EARTH_RADIUS_KM = 6371.0088
DEFAULT_RADIUS_KM = 10.0


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in kilometres."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


@dataclass(frozen=True)
class GeoCircle:
    latitude: float
    longitude: float
    radius_km: float = DEFAULT_RADIUS_KM

    def __post_init__(self):
        if not self.radius_km > 0:
            raise ValueError("radius must be positive")
        if not -90 <= self.latitude <= 90 or not -180 <= self.longitude <= 180:
            raise ValueError("circle center out of range")

    def contains(self, latitude: Optional[float], longitude: Optional[float]) -> bool:
        if latitude is None or longitude is None:
            return False
        return haversine_km(self.latitude, self.longitude, latitude, longitude) <= self.radius_km

    def to_dict(self) -> dict:
        return {"latitude": self.latitude, "longitude": self.longitude, "radius": self.radius_km}


@dataclass(frozen=True)
class TimeWindow:
    """Closed interval of Unix seconds; either bound may be open."""

    since: Optional[float] = None
    until: Optional[float] = None

    def __post_init__(self):
        if self.since is not None and self.until is not None and self.since > self.until:
            raise ValueError("since must not be after until")

    def contains(self, when: datetime | float | None) -> bool:
        if when is None:
            return False
        ts = when.timestamp() if isinstance(when, datetime) else float(when)
        if self.since is not None and ts < self.since:
            return False
        if self.until is not None and ts > self.until:
            return False
        return True

    @property
    def unbounded(self) -> bool:
        return self.since is None and self.until is None

    def to_dict(self) -> dict:
        return {"since": self.since, "until": self.until}
