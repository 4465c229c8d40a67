"""Journal-derived evaluation metrics.

Everything here folds over journal events only, so a report can be
recomputed offline from a journal file and must equal the live run's
report exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..analysis.features import FeatureVector
from ..rng import SplitMix64, derive
from ..service.journal import (
    EVENT_CHALLENGE_ISSUED,
    EVENT_RESPONSE_SUBMITTED,
    EVENT_SESSION_CREATED,
    EVENT_VERDICT,
    JournalError,
    replay_events,
)

HUMAN_TAG = "human"

ORACLE_FAST_S = 2.0
ORACLE_SLOW_S = 10.0


@dataclass
class KindStats:
    sessions: int = 0
    verified: int = 0
    blocked: int = 0
    challenges: int = 0
    level_sum: int = 0

    @property
    def mean_level(self) -> float | None:
        return self.level_sum / self.challenges if self.challenges else None


@dataclass
class MetricsReport:
    n_sessions: int
    n_challenges: int
    n_responses: int
    bypass_rate: float | None
    human_success_rate: float | None
    avg_response_time_s: float | None
    fpr: float | None
    adaptability_score: float | None
    f1: float | None
    per_level_challenge_counts: dict[int, int]
    per_kind: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_sessions": self.n_sessions,
            "n_challenges": self.n_challenges,
            "n_responses": self.n_responses,
            "bypass_rate": self.bypass_rate,
            "human_success_rate": self.human_success_rate,
            "avg_response_time_s": self.avg_response_time_s,
            "fpr": self.fpr,
            "adaptability_score": self.adaptability_score,
            "f1": self.f1,
            "per_level_challenge_counts": {str(k): v for k, v in sorted(self.per_level_challenge_counts.items())},
            "per_kind": {k: dict(v) for k, v in sorted(self.per_kind.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        def fmt(v):
            return "undefined" if v is None else f"{v:.4f}"

        rows = [
            ("sessions", str(self.n_sessions)),
            ("challenges served", str(self.n_challenges)),
            ("bypass rate", fmt(self.bypass_rate)),
            ("human success rate", fmt(self.human_success_rate)),
            ("avg human response (s)", fmt(self.avg_response_time_s)),
            ("false positive rate", fmt(self.fpr)),
            ("adaptability score", fmt(self.adaptability_score)),
            ("classifier F1 (human+)", fmt(self.f1)),
        ]
        width = max(len(r[0]) for r in rows)
        lines = [f"{name:<{width}}  {value}" for name, value in rows]
        levels = " ".join(f"L{k}:{v}" for k, v in sorted(self.per_level_challenge_counts.items()))
        lines.append(f"{'per-level counts':<{width}}  {levels}")
        for kind, stats in sorted(self.per_kind.items()):
            mean_level = stats.get("mean_level")
            lines.append(
                f"{kind:<{width}}  sessions={stats['sessions']} verified={stats['verified']} "
                f"blocked={stats['blocked']} mean_level={'-' if mean_level is None else f'{mean_level:.3f}'}"
            )
        return "\n".join(lines) + "\n"


def _round(v: float | None, digits: int = 9) -> float | None:
    return None if v is None else round(v, digits)


def adaptability_score(events: list[dict], tags: dict[str, str] | None = None) -> float | None:
    """Agreement between difficulty actions and the oracle direction.

    For each non-first challenge issuance, the oracle wants +1 if the
    previous response was bot-flagged (bot or uncertain verdict) or
    suspiciously fast and correct; -1 if a ground-truth human answered
    wrong or took more than 10 s; otherwise it abstains. The score is
    matching actions / non-abstained oracles, undefined when the oracle
    never speaks.
    """
    tags = tags or {}
    session_tag: dict[str, str] = {}
    prev_response: dict[str, dict] = {}
    matches = 0
    scored = 0
    for e in events:
        kind = e["event"]
        sid = e.get("session_id")
        if kind == EVENT_SESSION_CREATED:
            session_tag[sid] = tags.get(sid, e.get("tag"))
        elif kind == EVENT_CHALLENGE_ISSUED:
            prev = prev_response.get(sid)
            if prev is None:
                continue
            oracle = 0
            suspicious = prev["verdict_label"] in ("bot", "uncertain")
            fast_correct = prev["correct"] and prev["elapsed_s"] < ORACLE_FAST_S
            if suspicious or fast_correct:
                oracle = +1
            elif session_tag.get(sid) == HUMAN_TAG and (
                not prev["correct"] or prev["elapsed_s"] > ORACLE_SLOW_S
            ):
                oracle = -1
            if oracle != 0:
                scored += 1
                if e["action_delta"] == oracle:
                    matches += 1
        elif kind == EVENT_RESPONSE_SUBMITTED:
            prev_response[sid] = e
    return matches / scored if scored else None


def compute_metrics(events: list[dict], tags: dict[str, str] | None = None) -> MetricsReport:
    """Fold a journal into the full evaluation report."""
    tags = tags or {}
    sessions = replay_events(events)

    per_kind: dict[str, KindStats] = {}
    per_level: dict[int, int] = {}
    human_elapsed: list[float] = []
    n_challenges = 0
    n_responses = 0

    session_tag = {sid: tags.get(sid, rec.tag) or "untagged" for sid, rec in sessions.items()}

    for e in events:
        kind = e["event"]
        if kind == EVENT_CHALLENGE_ISSUED:
            n_challenges += 1
            level = int(e["level"])
            per_level[level] = per_level.get(level, 0) + 1
            ks = per_kind.setdefault(session_tag[e["session_id"]], KindStats())
            ks.challenges += 1
            ks.level_sum += level
        elif kind == EVENT_RESPONSE_SUBMITTED:
            n_responses += 1
            if session_tag[e["session_id"]] == HUMAN_TAG:
                human_elapsed.append(float(e["elapsed_s"]))

    for sid, rec in sessions.items():
        ks = per_kind.setdefault(session_tag[sid], KindStats())
        ks.sessions += 1
        if rec.state == "verified_human":
            ks.verified += 1
        elif rec.state == "blocked":
            ks.blocked += 1

    humans = per_kind.get(HUMAN_TAG, KindStats())
    bot_sessions = sum(s.sessions for k, s in per_kind.items() if k != HUMAN_TAG)
    bot_verified = sum(s.verified for k, s in per_kind.items() if k != HUMAN_TAG)

    tp, fn, fp = humans.verified, humans.blocked, bot_verified
    f1 = 2 * tp / (2 * tp + fp + fn) if (humans.sessions and bot_sessions and (2 * tp + fp + fn)) else None

    return MetricsReport(
        n_sessions=len(sessions),
        n_challenges=n_challenges,
        n_responses=n_responses,
        bypass_rate=_round(bot_verified / bot_sessions) if bot_sessions else None,
        human_success_rate=_round(humans.verified / humans.sessions) if humans.sessions else None,
        avg_response_time_s=_round(sum(human_elapsed) / len(human_elapsed)) if human_elapsed else None,
        fpr=_round(humans.blocked / humans.sessions) if humans.sessions else None,
        adaptability_score=_round(adaptability_score(events, tags)),
        f1=_round(f1),
        per_level_challenge_counts=dict(sorted(per_level.items())),
        per_kind={
            k: {
                "sessions": s.sessions,
                "verified": s.verified,
                "blocked": s.blocked,
                "challenges": s.challenges,
                "mean_level": _round(s.mean_level, 6),
            }
            for k, s in per_kind.items()
        },
    )


def build_training_set(
    events: list[dict],
    tags: dict[str, str] | None = None,
    *,
    seed: int = 0,
    holdout_frac: float = 0.2,
) -> tuple[list[tuple[FeatureVector, int]], list[tuple[FeatureVector, int]]]:
    """Labeled (features, +/-1) rows from journal responses, split
    train/holdout by a seeded shuffle."""
    tags = tags or {}
    session_tag: dict[str, str] = {}
    rows: list[tuple[FeatureVector, int]] = []
    for e in events:
        if e["event"] == EVENT_SESSION_CREATED:
            session_tag[e["session_id"]] = tags.get(e["session_id"], e.get("tag")) or "untagged"
        elif e["event"] == EVENT_RESPONSE_SUBMITTED and e.get("features"):
            tag = session_tag.get(e["session_id"], "untagged")
            label = +1 if tag == HUMAN_TAG else -1
            rows.append((FeatureVector.from_list(e["features"]), label))
    if not rows:
        raise JournalError("journal has no feature-bearing responses")
    labels = {label for _, label in rows}
    if labels != {+1, -1}:
        raise JournalError("journal responses cover only one class")
    rng = SplitMix64(derive(seed, "training-split"))
    rng.shuffle(rows)
    n_holdout = int(round(holdout_frac * len(rows)))
    return rows[n_holdout:], rows[:n_holdout]
