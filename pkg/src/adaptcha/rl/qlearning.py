"""Tabular Q-learning over the discretized session states.

The table is 90 states x 3 actions (lower / hold / raise). Updates
follow the standard temporal-difference rule

    Q(s,a) <- Q(s,a) + alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))

and action selection is epsilon-greedy with seeded uniform tie-breaks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..challenge.difficulty import MAX_LEVEL, MIN_LEVEL, DifficultyLevel
from ..challenge.verify import VerificationResult
from ..rng import SplitMix64
from .states import N_STATES, RlState

ACTION_DELTAS = (-1, 0, +1)
N_ACTIONS = len(ACTION_DELTAS)


@dataclass(frozen=True)
class RlAction:
    delta: int

    def __post_init__(self):
        if self.delta not in ACTION_DELTAS:
            raise ValueError(f"action delta must be in {ACTION_DELTAS}")

    @property
    def index(self) -> int:
        return self.delta + 1

    @staticmethod
    def from_index(i: int) -> "RlAction":
        return RlAction(ACTION_DELTAS[i])


@dataclass(frozen=True)
class Reward:
    value: int

    def __post_init__(self):
        if self.value not in (-1, 0, +1):
            raise ValueError("reward must be -1, 0 or +1")


@dataclass
class LearningParams:
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 1.0
    epsilon_decay: float = 0.995
    epsilon_floor: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise ValueError("epsilon_decay must be in (0, 1]")
        if not 0.0 <= self.epsilon_floor <= 1.0:
            raise ValueError("epsilon_floor must be in [0, 1]")

    def decayed(self, episodes: int) -> float:
        """Exploration rate after the given number of completed episodes."""
        return max(self.epsilon_floor, self.epsilon * self.epsilon_decay**episodes)


class QTable:
    """Dense value table plus visit counts. Single-writer by contract."""

    def __init__(self, values: np.ndarray | None = None, visit_counts: np.ndarray | None = None):
        self.values = np.zeros((N_STATES, N_ACTIONS)) if values is None else np.asarray(values, dtype=np.float64)
        self.visit_counts = (
            np.zeros((N_STATES, N_ACTIONS), dtype=np.int64)
            if visit_counts is None
            else np.asarray(visit_counts, dtype=np.int64)
        )
        if self.values.shape != (N_STATES, N_ACTIONS) or self.visit_counts.shape != (N_STATES, N_ACTIONS):
            raise ValueError(f"Q table must be {N_STATES}x{N_ACTIONS}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Q values must be finite")

    def copy(self) -> "QTable":
        return QTable(self.values.copy(), self.visit_counts.copy())

    def greedy_actions(self, state: RlState) -> list[RlAction]:
        """All argmax actions (the tie set)."""
        row = self.values[state.state_id]
        best = row.max()
        return [RlAction.from_index(i) for i in range(N_ACTIONS) if row[i] == best]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QTable)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.visit_counts, other.visit_counts)
        )


def reward(result: VerificationResult, ambiguous: bool) -> Reward:
    """+1 for a correct, in-time response; -1 for incorrect or late;
    0 whenever the interaction was ambiguous, regardless of the result."""
    if ambiguous:
        return Reward(0)
    return Reward(+1) if result.correct and result.within_limit else Reward(-1)


def q_update(
    q: QTable,
    s: RlState,
    a: RlAction,
    r: Reward,
    s_next: RlState,
    params: LearningParams,
) -> QTable:
    """One temporal-difference step; mutates exactly one cell in place."""
    old = q.values[s.state_id, a.index]
    target = r.value + params.gamma * q.values[s_next.state_id].max()
    q.values[s.state_id, a.index] = old + params.alpha * (target - old)
    q.visit_counts[s.state_id, a.index] += 1
    return q


def select_action(
    q: QTable,
    s: RlState,
    params: LearningParams,
    rng: SplitMix64,
    epsilon: float | None = None,
) -> RlAction:
    """Epsilon-greedy. Ties in the greedy branch break uniformly via rng.

    Draw order is fixed (one float for explore/exploit, then one
    bounded int), so a given rng state always yields the same action.
    """
    eps = params.epsilon if epsilon is None else epsilon
    if rng.next_float() < eps:
        return RlAction.from_index(rng.next_below(N_ACTIONS))
    ties = q.greedy_actions(s)
    if len(ties) == 1:
        return ties[0]
    return ties[rng.next_below(len(ties))]


def apply_action(level: DifficultyLevel, a: RlAction) -> DifficultyLevel:
    return DifficultyLevel(max(MIN_LEVEL, min(MAX_LEVEL, level.level + a.delta)))
