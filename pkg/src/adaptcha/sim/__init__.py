"""Agent population simulator and metrics engine."""

from .agents import (
    AgentKind,
    AgentPlay,
    AgentSpec,
    AgentState,
    BotModels,
    ChallengeView,
    HumanModel,
    agent_play,
    new_agent_state,
)
from .metrics import MetricsReport, adaptability_score, build_training_set, compute_metrics
from .run import (
    PopulationConfig,
    SimulationResult,
    load_population,
    run_simulation,
    run_simulation_sharded,
)

__all__ = [
    "AgentKind",
    "AgentPlay",
    "AgentSpec",
    "AgentState",
    "BotModels",
    "ChallengeView",
    "HumanModel",
    "MetricsReport",
    "PopulationConfig",
    "SimulationResult",
    "adaptability_score",
    "agent_play",
    "build_training_set",
    "compute_metrics",
    "load_population",
    "new_agent_state",
    "run_simulation",
    "run_simulation_sharded",
]
