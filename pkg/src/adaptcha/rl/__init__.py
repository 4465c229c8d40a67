"""Adaptive difficulty via tabular Q-learning."""

from .qlearning import (
    ACTION_DELTAS,
    N_ACTIONS,
    LearningParams,
    QTable,
    Reward,
    RlAction,
    apply_action,
    q_update,
    reward,
    select_action,
)
from .states import (
    FAST_THRESHOLD_S,
    N_STATES,
    SLOW_THRESHOLD_S,
    RlState,
    SessionStats,
    encode_state,
    pack_state,
    time_bucket_of,
)
from .store import QTableFormatError, load_qtable, save_qtable

__all__ = [
    "ACTION_DELTAS",
    "FAST_THRESHOLD_S",
    "LearningParams",
    "N_ACTIONS",
    "N_STATES",
    "QTable",
    "QTableFormatError",
    "Reward",
    "RlAction",
    "RlState",
    "SLOW_THRESHOLD_S",
    "SessionStats",
    "apply_action",
    "encode_state",
    "load_qtable",
    "pack_state",
    "q_update",
    "reward",
    "save_qtable",
    "select_action",
    "time_bucket_of",
]
