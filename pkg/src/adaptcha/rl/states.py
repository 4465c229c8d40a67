"""Discretized session state for the difficulty policy.

90 states = level(5) x failure bucket(3) x response-time bucket(3) x
suspicion(2), packed into a single id. The packing is a bijection;
tests enumerate all 90 round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..challenge.difficulty import DifficultyLevel

N_LEVELS = 5
N_FAILURE_BUCKETS = 3    # 0, 1, >=2
N_TIME_BUCKETS = 3       # fast < 2 s, normal, slow > 10 s
N_SUSPICION = 2
N_STATES = N_LEVELS * N_FAILURE_BUCKETS * N_TIME_BUCKETS * N_SUSPICION

FAST_THRESHOLD_S = 2.0
SLOW_THRESHOLD_S = 10.0

TIME_FAST, TIME_NORMAL, TIME_SLOW = 0, 1, 2


@dataclass
class SessionStats:
    """Per-session behavioral snapshot feeding the RL state."""

    current_level: DifficultyLevel
    consecutive_failures: int = 0
    last_response_time_s: float | None = None
    suspicion_flag: bool = False

    def after_response(
        self, correct: bool, elapsed_s: float, suspicious: bool
    ) -> "SessionStats":
        return SessionStats(
            current_level=self.current_level,
            consecutive_failures=0 if correct else self.consecutive_failures + 1,
            last_response_time_s=elapsed_s,
            suspicion_flag=suspicious,
        )


@dataclass(frozen=True)
class RlState:
    state_id: int

    def __post_init__(self):
        if not 0 <= self.state_id < N_STATES:
            raise ValueError(f"state_id must be in [0, {N_STATES}), got {self.state_id}")

    @property
    def level(self) -> int:
        return self.state_id // (N_FAILURE_BUCKETS * N_TIME_BUCKETS * N_SUSPICION) + 1

    @property
    def failure_bucket(self) -> int:
        return (self.state_id // (N_TIME_BUCKETS * N_SUSPICION)) % N_FAILURE_BUCKETS

    @property
    def time_bucket(self) -> int:
        return (self.state_id // N_SUSPICION) % N_TIME_BUCKETS

    @property
    def suspicious(self) -> bool:
        return self.state_id % N_SUSPICION == 1


def pack_state(level: int, failure_bucket: int, time_bucket: int, suspicious: bool) -> RlState:
    sid = ((level - 1) * N_FAILURE_BUCKETS + failure_bucket) * N_TIME_BUCKETS + time_bucket
    return RlState(sid * N_SUSPICION + (1 if suspicious else 0))


def time_bucket_of(elapsed_s: float | None) -> int:
    """Missing response time counts as normal."""
    if elapsed_s is None:
        return TIME_NORMAL
    if elapsed_s < FAST_THRESHOLD_S:
        return TIME_FAST
    if elapsed_s > SLOW_THRESHOLD_S:
        return TIME_SLOW
    return TIME_NORMAL


def encode_state(stats: SessionStats) -> RlState:
    return pack_state(
        level=stats.current_level.level,
        failure_bucket=min(stats.consecutive_failures, 2),
        time_bucket=time_bucket_of(stats.last_response_time_s),
        suspicious=stats.suspicion_flag,
    )
