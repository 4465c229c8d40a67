"""Shared service-test helpers: virtual-clock engines and canned telemetry."""

import pytest

from adaptcha.service.config import ServiceConfig
from adaptcha.service.core import CaptchaService, VirtualClock
from adaptcha.service.journal import Journal


# interval multipliers with human-scale irregularity (std/mean ~ 0.7)
_GAPS = [0.3, 1.8, 0.6, 1.4, 0.2, 2.1, 0.9, 1.1, 0.5, 1.7, 0.4, 2.3, 0.8]


def human_telemetry(elapsed: float = 6.0, n_moves: int = 10, n_clicks: int = 3):
    """Telemetry that passes every heuristic and scores well-positive
    under the shipped classifier (human-scale jittered intervals)."""
    n = n_moves + n_clicks
    gaps = [_GAPS[i % len(_GAPS)] for i in range(n)]
    scale = (elapsed * 0.92) / sum(gaps)
    events = []
    t = 0.0
    for i in range(n):
        t += gaps[i] * scale
        if i < n_moves:
            events.append({"kind": "pointer_move", "t": round(t, 4), "x": 55.0 * i + 7, "y": 40.0 * i + 3})
        else:
            events.append({"kind": "click", "t": round(t, 4), "x": 100.0 + 60 * (i - n_moves), "y": 150.0})
    events.append({"kind": "submit", "t": elapsed})
    return events


def bot_telemetry():
    """No pointer movement, instant: trips the hard flags."""
    return [
        {"kind": "click", "t": 0.01},
        {"kind": "click", "t": 0.02},
        {"kind": "submit", "t": 0.03},
    ]


@pytest.fixture
def engine():
    svc = CaptchaService(
        ServiceConfig(seed_mode="fixed", seed=77, assets="none"),
        clock=VirtualClock(),
        journal=Journal(),
    )
    return svc


def ground_truth(engine, session_id):
    rec = engine._session(session_id)
    assert rec.outstanding is not None
    return rec.outstanding.challenge


def submit_after(engine, session_id, challenge_id, solution, telemetry, elapsed):
    engine.clock.advance(elapsed)
    return engine.submit_response(session_id, challenge_id, solution, telemetry)
