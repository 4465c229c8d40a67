"""Hybrid human/bot classification: hard heuristics first, SVM second.

Any triggered heuristic flag forces a bot verdict. Otherwise the SVM
score decides, with an abstention band: scores inside (-0.25, +0.25)
yield "uncertain", which the session layer treats as escalate-don't-block.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .features import (
    FeatureVector,
    InteractionEvent,
    TelemetryError,
    extract_features,
)
from .svm import SvmModel, svm_decision

# heuristic thresholds, calibrated against the simulator's human model
NO_MOVEMENT_PX = 1.0
INHUMAN_SPEED_S = 0.5
METRONOME_STD_S = 0.005
METRONOME_MIN_INTERVALS = 5

MARGIN_BAND = 0.25


class Label(enum.Enum):
    HUMAN = "human"
    BOT = "bot"
    UNCERTAIN = "uncertain"


@dataclass(frozen=True)
class HeuristicFlags:
    no_movement: bool = False
    inhuman_speed: bool = False
    metronomic_timing: bool = False

    def any(self) -> bool:
        return self.no_movement or self.inhuman_speed or self.metronomic_timing

    def as_dict(self) -> dict:
        return {
            "no_movement": self.no_movement,
            "inhuman_speed": self.inhuman_speed,
            "metronomic_timing": self.metronomic_timing,
        }


@dataclass(frozen=True)
class Verdict:
    label: Label
    score: float
    flags: HeuristicFlags

    def __post_init__(self):
        if self.flags.any() and self.label is not Label.BOT:
            raise ValueError("hard-flag override: any flag forces a bot verdict")


def heuristic_flags(
    events: list[InteractionEvent],
    features: FeatureVector | None,
    elapsed_s: float,
) -> HeuristicFlags:
    """Pure rule checks. A missing feature vector (insufficient data)
    scores as the no-movement + inhuman-speed pattern."""
    if features is None:
        return HeuristicFlags(no_movement=True, inhuman_speed=True, metronomic_timing=False)
    n_intervals = max(len(events) - 1, 0)
    return HeuristicFlags(
        no_movement=features.total_movement < NO_MOVEMENT_PX,
        inhuman_speed=elapsed_s < INHUMAN_SPEED_S,
        metronomic_timing=(
            n_intervals >= METRONOME_MIN_INTERVALS
            and features.std_time_interval < METRONOME_STD_S
        ),
    )


def classify(
    model: SvmModel,
    events: list[InteractionEvent],
    elapsed_s: float,
) -> Verdict:
    """Full hybrid verdict; every failure path maps to a bot verdict."""
    try:
        features = extract_features(events)
    except TelemetryError:
        features = None

    flags = heuristic_flags(events, features, elapsed_s)
    if features is None or flags.any():
        return Verdict(label=Label.BOT, score=0.0 if features is None else svm_decision(model, features), flags=flags)

    score = svm_decision(model, features)
    if score >= MARGIN_BAND:
        label = Label.HUMAN
    elif score <= -MARGIN_BAND:
        label = Label.BOT
    else:
        label = Label.UNCERTAIN
    return Verdict(label=label, score=score, flags=flags)


@dataclass(frozen=True)
class LabeledSession:
    events: list[InteractionEvent]
    elapsed_s: float
    is_human: bool


@dataclass(frozen=True)
class ClassifierMetrics:
    precision: float
    recall: float
    f1: float
    fpr: float


def evaluate_classifier(
    model: SvmModel,
    sessions: list[LabeledSession],
    *,
    uncertain_counts_as_bot: bool = True,
) -> ClassifierMetrics:
    """Confusion metrics: human is the positive class for precision /
    recall / F1; FPR is the fraction of true humans labeled bot.

    Abstentions (uncertain) count as bot in strict mode (default); the
    lenient mode counts them as human, mirroring that escalation lets a
    real human pass eventually rather than blocking them.
    """
    n_human = sum(1 for s in sessions if s.is_human)
    n_bot = len(sessions) - n_human
    if n_human == 0 or n_bot == 0:
        raise ValueError("evaluation set must contain both classes")

    tp = fp = fn = human_as_bot = 0
    for s in sessions:
        verdict = classify(model, s.events, s.elapsed_s)
        label = verdict.label
        if label is Label.UNCERTAIN:
            label = Label.BOT if uncertain_counts_as_bot else Label.HUMAN
        predicted_human = label is Label.HUMAN
        if s.is_human and predicted_human:
            tp += 1
        elif s.is_human:
            fn += 1
            human_as_bot += 1
        elif predicted_human:
            fp += 1

    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
    return ClassifierMetrics(precision=precision, recall=recall, f1=f1, fpr=human_as_bot / n_human)
