"""Telemetry events and the 4-dimensional behavioral feature vector.

Features: mean and population standard deviation of the time intervals
between consecutive events (all kinds), total pointer path length, and
click count.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

TELEMETRY_GRACE_S = 5.0


class EventKind(enum.Enum):
    POINTER_MOVE = "pointer_move"
    CLICK = "click"
    KEY = "key"
    SUBMIT = "submit"


@dataclass(frozen=True)
class InteractionEvent:
    kind: EventKind
    t: float
    x: float | None = None
    y: float | None = None

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("event time must be >= 0")
        if self.kind is EventKind.POINTER_MOVE and (self.x is None or self.y is None):
            raise ValueError("pointer_move events need coordinates")


class TelemetryError(ValueError):
    """Telemetry that cannot be analyzed (callers score it as bot-like)."""


class InsufficientDataError(TelemetryError):
    """Fewer than two events: no intervals to measure."""


def validate_events(
    events: list[InteractionEvent], time_limit_s: float | None = None
) -> None:
    """Ordering and time-window checks; raises TelemetryError on violation."""
    for prev, cur in zip(events, events[1:]):
        if cur.t < prev.t:
            raise TelemetryError("events must be sorted by time")
    if time_limit_s is not None and events:
        if events[-1].t > time_limit_s + TELEMETRY_GRACE_S:
            raise TelemetryError("telemetry extends past the time limit grace window")


@dataclass(frozen=True)
class FeatureVector:
    avg_time_interval: float
    std_time_interval: float
    total_movement: float
    num_clicks: float

    def as_list(self) -> list[float]:
        return [self.avg_time_interval, self.std_time_interval, self.total_movement, self.num_clicks]

    @staticmethod
    def from_list(values) -> "FeatureVector":
        a, s, m, c = (float(v) for v in values)
        return FeatureVector(a, s, m, c)


FEATURE_NAMES = ("avg_time_interval", "std_time_interval", "total_movement", "num_clicks")
N_FEATURES = len(FEATURE_NAMES)


def extract_features(events: list[InteractionEvent]) -> FeatureVector:
    """Pure feature extraction over a sorted event stream.

    Intervals run over all events. The pointer path is the polyline
    through every event that carries coordinates, so clicks with
    positions extend it.
    """
    if len(events) < 2:
        raise InsufficientDataError(f"need >= 2 events, got {len(events)}")
    validate_events(events)

    intervals = [b.t - a.t for a, b in zip(events, events[1:])]
    mean = sum(intervals) / len(intervals)
    var = sum((iv - mean) ** 2 for iv in intervals) / len(intervals)

    movement = 0.0
    prev_xy: tuple[float, float] | None = None
    for e in events:
        if e.x is not None and e.y is not None:
            if prev_xy is not None:
                movement += math.hypot(e.x - prev_xy[0], e.y - prev_xy[1])
            prev_xy = (e.x, e.y)

    return FeatureVector(
        avg_time_interval=mean,
        std_time_interval=math.sqrt(var),
        total_movement=movement,
        num_clicks=float(sum(1 for e in events if e.kind is EventKind.CLICK)),
    )


def events_from_wire(raw: list[dict], time_limit_s: float | None = None) -> list[InteractionEvent]:
    """Parse API-shaped telemetry ({kind,t,x?,y?} dicts); TelemetryError on bad input."""
    if not isinstance(raw, list):
        raise TelemetryError("telemetry must be a list")
    events = []
    for item in raw:
        if not isinstance(item, dict):
            raise TelemetryError("telemetry entries must be objects")
        try:
            kind = EventKind(item["kind"])
            t = float(item["t"])
            x = item.get("x")
            y = item.get("y")
            events.append(
                InteractionEvent(
                    kind=kind,
                    t=t,
                    x=None if x is None else float(x),
                    y=None if y is None else float(y),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TelemetryError(f"malformed telemetry event: {exc}") from exc
    validate_events(events, time_limit_s)
    return events
