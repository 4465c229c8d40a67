"""Append-only JSONL event journal.

One event per line. The journal is the system of record: session final
states and every evaluation metric are recomputable from it alone. A
torn (truncated) final line is tolerated on replay and dropped with a
warning, which is the expected crash-recovery path.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

EVENT_SESSION_CREATED = "session_created"
EVENT_CHALLENGE_ISSUED = "challenge_issued"
EVENT_RESPONSE_SUBMITTED = "response_submitted"
EVENT_VERDICT = "verdict"
EVENT_Q_UPDATE = "q_update"

EVENT_TYPES = (
    EVENT_SESSION_CREATED,
    EVENT_CHALLENGE_ISSUED,
    EVENT_RESPONSE_SUBMITTED,
    EVENT_VERDICT,
    EVENT_Q_UPDATE,
)

# timestamp-ish keys stripped when canonicalizing for run comparison
_TIME_KEYS = ("ts", "issued_at", "created_at", "verified_at")


class JournalError(ValueError):
    """Journal file unreadable or structurally corrupt."""


class Journal:
    """Single-writer append stream, kept in memory and optionally
    mirrored line-by-line to a file (flushed per event)."""

    def __init__(self, path: str | None = None):
        self.events: list[dict] = []
        self._path = path
        self._lock = threading.Lock()
        self._fh = open(path, "a", encoding="utf-8") if path else None

    def append(self, event: dict) -> None:
        if event.get("event") not in EVENT_TYPES:
            raise JournalError(f"unknown journal event type {event.get('event')!r}")
        with self._lock:
            self.events.append(event)
            if self._fh is not None:
                self._fh.write(json.dumps(event, sort_keys=True) + "\n")
                self._fh.flush()

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def dump(self) -> str:
        with self._lock:
            return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)

    def __len__(self) -> int:
        return len(self.events)


def read_journal(path: str) -> list[dict]:
    """Load events from a JSONL file; tolerates one torn final line."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw_lines = f.read().splitlines()
    except OSError as exc:
        raise JournalError(f"cannot read journal: {exc}") from exc
    return parse_journal_lines(raw_lines)


def parse_journal_lines(raw_lines: list[str]) -> list[dict]:
    events = []
    for i, line in enumerate(raw_lines):
        if not line.strip():
            continue
        try:
            event = json.loads(line)
        except json.JSONDecodeError as exc:
            if i == len(raw_lines) - 1:
                log.warning("dropping torn final journal line: %s", exc)
                continue
            raise JournalError(f"corrupt journal line {i + 1}: {exc}") from exc
        if not isinstance(event, dict) or event.get("event") not in EVENT_TYPES:
            raise JournalError(f"journal line {i + 1} is not a known event")
        events.append(event)
    return events


@dataclass
class ReplayedSession:
    session_id: str
    state: str = "created"
    tag: str | None = None
    challenges: int = 0
    responses: int = 0
    q_updates: int = 0
    levels: list[int] = field(default_factory=list)
    last_verdict: str | None = None


def replay_events(events: list[dict]) -> dict[str, ReplayedSession]:
    """Reconstruct per-session final state by folding the event stream."""
    sessions: dict[str, ReplayedSession] = {}
    for e in events:
        sid = e.get("session_id")
        if sid is None:
            raise JournalError(f"event without session_id: {e.get('event')}")
        kind = e["event"]
        if kind == EVENT_SESSION_CREATED:
            sessions[sid] = ReplayedSession(session_id=sid, tag=e.get("tag"))
            continue
        if sid not in sessions:
            raise JournalError(f"event for unknown session {sid}")
        rec = sessions[sid]
        if kind == EVENT_CHALLENGE_ISSUED:
            rec.state = "challenged"
            rec.challenges += 1
            rec.levels.append(int(e["level"]))
        elif kind == EVENT_RESPONSE_SUBMITTED:
            rec.responses += 1
            rec.last_verdict = e.get("verdict_label")
        elif kind == EVENT_VERDICT:
            rec.state = e["state"]
        elif kind == EVENT_Q_UPDATE:
            rec.q_updates += 1
    return sessions


def journal_replay(path: str) -> dict[str, ReplayedSession]:
    return replay_events(read_journal(path))


def canonicalize(events: list[dict]) -> list[dict]:
    """Strip wall-clock timestamps so two runs can be compared."""
    out = []
    for e in events:
        out.append({k: v for k, v in e.items() if k not in _TIME_KEYS})
    return out
