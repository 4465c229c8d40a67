"""The verification service engine.

One object owns sessions, the shared Q table, the classifier, the nonce
source, and the journal. The HTTP layer and the in-process simulator
both drive this same engine, so simulated metrics describe the real
code path.

Session lifecycle:

    created -> challenged -> verified_human | blocked | escalated
    escalated -> challenged   (next challenge auto-issued on escalation)

A challenge is one-time: submitting against a consumed challenge_id is
rejected. Ground truth never leaves the engine; payloads carry only
renderable assets and the prompt.
"""

from __future__ import annotations

import base64
import datetime as dt
import enum
import hashlib
import hmac
import secrets
import threading
import time
from dataclasses import dataclass, field
from importlib import resources

from ..analysis.classify import HeuristicFlags, Label, Verdict, classify
from ..analysis.features import InteractionEvent, TelemetryError, events_from_wire, extract_features
from ..analysis.svm import SvmModel, load_model
from ..challenge.audio import AudioChallenge, generate_audio_challenge
from ..challenge.difficulty import DifficultyLevel
from ..challenge.grid import GridChallenge, generate_grid_challenge
from ..challenge.synth import render_audio
from ..challenge.tiles import render_tile, to_pgm
from ..challenge.verify import (
    AudioSolution,
    GridSolution,
    Solution,
    SolutionError,
    VerificationResult,
    verify_solution,
)
from ..rl.qlearning import QTable, Reward, RlAction, apply_action, q_update, reward, select_action
from ..rl.states import RlState, SessionStats, encode_state
from ..rl.store import load_qtable
from ..rng import MASK64, SplitMix64, derive
from .config import ServiceConfig
from .journal import (
    EVENT_CHALLENGE_ISSUED,
    EVENT_Q_UPDATE,
    EVENT_RESPONSE_SUBMITTED,
    EVENT_SESSION_CREATED,
    EVENT_VERDICT,
    Journal,
)

MODALITIES = ("grid", "audio", "paired")

TOKEN_PREFIX = "v1"


class ApiError(Exception):
    """Structured service error mapped onto HTTP status codes."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def not_found(what: str) -> ApiError:
    return ApiError(404, "not_found", f"{what} not found")


def conflict(message: str) -> ApiError:
    return ApiError(409, "conflict", message)


def gone(message: str) -> ApiError:
    return ApiError(410, "gone", message)


def invalid(message: str) -> ApiError:
    return ApiError(422, "invalid", message)


class SessionState(enum.Enum):
    CREATED = "created"
    CHALLENGED = "challenged"
    VERIFIED_HUMAN = "verified_human"
    BLOCKED = "blocked"
    ESCALATED = "escalated"


LEGAL_TRANSITIONS: dict[SessionState, frozenset[SessionState]] = {
    SessionState.CREATED: frozenset({SessionState.CHALLENGED}),
    SessionState.CHALLENGED: frozenset(
        {SessionState.VERIFIED_HUMAN, SessionState.BLOCKED, SessionState.ESCALATED}
    ),
    SessionState.ESCALATED: frozenset({SessionState.CHALLENGED}),
    SessionState.VERIFIED_HUMAN: frozenset(),
    SessionState.BLOCKED: frozenset(),
}


class Clock:
    """Wall clock; swapped for a virtual clock in simulations."""

    def now(self) -> float:
        return time.time()


class VirtualClock(Clock):
    def __init__(self, start: float = 0.0):
        self.t = start

    def now(self) -> float:
        return self.t

    def advance(self, seconds: float) -> None:
        self.t += seconds


def iso_utc(epoch_s: float) -> str:
    return (
        dt.datetime.fromtimestamp(round(epoch_s, 3), tz=dt.timezone.utc)
        .isoformat(timespec="milliseconds")
        .replace("+00:00", "Z")
    )


class NonceSource:
    """128-bit unique hex nonces; linearizable. Fixed mode is a counter
    stream so fixed-seed service runs are reproducible."""

    def __init__(self, seed: int | None = None):
        self._lock = threading.Lock()
        self._rng = SplitMix64(derive(seed, "nonce")) if seed is not None else None

    def next(self) -> str:
        with self._lock:
            if self._rng is None:
                return secrets.token_hex(16)
            return f"{self._rng.next_u64():016x}{self._rng.next_u64():016x}"


@dataclass
class OutstandingChallenge:
    challenge: GridChallenge | AudioChallenge
    paired_audio: AudioChallenge | None
    modality: str
    state: RlState
    action: RlAction


@dataclass
class SessionRecord:
    session_id: str
    state: SessionState
    stats: SessionStats
    created_at: float
    updated_at: float
    tag: str | None = None
    history: list[tuple[str, VerificationResult, Verdict, Reward, RlAction]] = field(default_factory=list)
    outstanding: OutstandingChallenge | None = None
    consumed_ids: set[str] = field(default_factory=set)
    verified_at: float | None = None
    last_modality: str = "grid"
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def _default_model_bytes() -> bytes:
    return resources.files("adaptcha.data").joinpath("default_model.json").read_bytes()


def _default_qtable_bytes() -> bytes:
    return resources.files("adaptcha.data").joinpath("default_qtable.json").read_bytes()


def make_pass_token(key: bytes, session_id: str, verified_at: float) -> str:
    ts = str(int(verified_at))
    mac = hmac.new(key, f"{session_id}:{ts}".encode("utf-8"), hashlib.sha256).hexdigest()
    return f"{TOKEN_PREFIX}.{ts}.{mac}"


def verify_pass_token(key: bytes, session_id: str, token: str) -> bool:
    parts = token.split(".")
    if len(parts) != 3 or parts[0] != TOKEN_PREFIX:
        return False
    expected = hmac.new(key, f"{session_id}:{parts[1]}".encode("utf-8"), hashlib.sha256).hexdigest()
    return hmac.compare_digest(expected, parts[2])


class CaptchaService:
    """In-process engine behind the HTTP API and the simulator."""

    def __init__(
        self,
        config: ServiceConfig,
        *,
        clock: Clock | None = None,
        qtable: QTable | None = None,
        model: SvmModel | None = None,
        journal: Journal | None = None,
    ):
        self.config = config
        self.clock = clock if clock is not None else Clock()
        self.journal = journal if journal is not None else Journal(config.journal_path)
        self._hmac_key = config.resolved_hmac_key()

        if model is not None:
            self.model = model
        elif config.model_path:
            with open(config.model_path, "rb") as f:
                self.model = load_model(f.read())
        else:
            self.model = load_model(_default_model_bytes())

        if qtable is not None:
            self.qtable = qtable
        elif config.qtable_path:
            with open(config.qtable_path, "rb") as f:
                self.qtable = load_qtable(f.read())
        else:
            self.qtable = load_qtable(_default_qtable_bytes())

        fixed = config.seed_mode == "fixed"
        base_seed = config.seed if fixed else secrets.randbits(64)
        self._nonces = NonceSource(base_seed if fixed else None)
        self._challenge_seeds = SplitMix64(derive(base_seed, "challenge-seed"))
        self._action_rng = SplitMix64(derive(base_seed, "action"))

        self._sessions: dict[str, SessionRecord] = {}
        self._sessions_lock = threading.Lock()
        self._q_lock = threading.Lock()
        self._completed_sessions = 0

    # -- helpers ---------------------------------------------------------

    def _session(self, session_id: str) -> SessionRecord:
        with self._sessions_lock:
            rec = self._sessions.get(session_id)
        if rec is None:
            raise not_found(f"session {session_id}")
        return rec

    def _transition(self, rec: SessionRecord, new_state: SessionState) -> None:
        if new_state not in LEGAL_TRANSITIONS[rec.state]:
            raise conflict(f"illegal transition {rec.state.value} -> {new_state.value}")
        rec.state = new_state
        rec.updated_at = self.clock.now()

    def _journal(self, event: str, **payload) -> None:
        self.journal.append({"event": event, "ts": iso_utc(self.clock.now()), **payload})

    def current_epsilon(self) -> float:
        with self._q_lock:
            return self.config.rl.decayed(self._completed_sessions)

    # -- API operations --------------------------------------------------

    def create_session(self, tag: str | None = None) -> dict:
        now = self.clock.now()
        rec = SessionRecord(
            session_id=self._nonces.next(),
            state=SessionState.CREATED,
            stats=SessionStats(current_level=DifficultyLevel(self.config.initial_level)),
            created_at=now,
            updated_at=now,
            tag=tag,
        )
        with self._sessions_lock:
            self._sessions[rec.session_id] = rec
        self._journal(
            EVENT_SESSION_CREATED,
            session_id=rec.session_id,
            tag=tag,
            initial_level=self.config.initial_level,
            state=rec.state.value,
        )
        return {"session_id": rec.session_id, "state": rec.state.value}

    def issue_challenge(self, session_id: str, modality: str = "grid") -> dict:
        if modality not in MODALITIES:
            raise invalid(f"modality must be one of {MODALITIES}, got {modality!r}")
        rec = self._session(session_id)
        with rec.lock:
            if rec.state not in (SessionState.CREATED, SessionState.ESCALATED):
                raise conflict(f"cannot issue a challenge in state {rec.state.value}")
            if len(rec.history) >= self.config.max_challenges_per_session:
                # unreachable through the normal flow (the submit path
                # blocks at the cap), kept as a defensive guard
                raise conflict("challenge budget exhausted")
            return self._issue_locked(rec, modality)

    def _issue_locked(self, rec: SessionRecord, modality: str) -> dict:
        s = encode_state(rec.stats)
        if self.config.rl_enabled:
            with self._q_lock:
                eps = self.config.rl.decayed(self._completed_sessions)
                action = select_action(self.qtable, s, self.config.rl, self._action_rng, epsilon=eps)
            level = apply_action(rec.stats.current_level, action)
        else:
            eps = 0.0
            action = RlAction(0)
            level = DifficultyLevel(self.config.initial_level)
        rec.stats.current_level = level

        seed = self._challenge_seeds.next_u64()
        challenge_id = self._nonces.next()
        now = self.clock.now()
        paired_audio: AudioChallenge | None = None

        if modality == "audio":
            challenge: GridChallenge | AudioChallenge = generate_audio_challenge(
                seed, level, challenge_id=challenge_id, issued_at=now,
                time_limit_s=self.config.time_limit_s,
            )
        else:
            challenge = generate_grid_challenge(
                seed, level, challenge_id=challenge_id, issued_at=now,
                time_limit_s=self.config.time_limit_s,
            )
            if modality == "paired":
                paired_audio = generate_audio_challenge(
                    derive(seed, "paired-audio"), level, paired_grid=challenge,
                    challenge_id=challenge_id, issued_at=now,
                    time_limit_s=self.config.time_limit_s,
                )

        rec.outstanding = OutstandingChallenge(
            challenge=challenge, paired_audio=paired_audio, modality=modality, state=s, action=action
        )
        rec.last_modality = modality
        self._transition(rec, SessionState.CHALLENGED)
        self._journal(
            EVENT_CHALLENGE_ISSUED,
            session_id=rec.session_id,
            challenge_id=challenge_id,
            modality=modality,
            level=level.level,
            state_id=s.state_id,
            action_delta=action.delta,
            epsilon=eps,
        )
        return self._payload(rec.session_id, rec.outstanding, now)

    def _payload(self, session_id: str, out: OutstandingChallenge, now: float) -> dict:
        ch = out.challenge
        payload: dict = {
            "session_id": session_id,
            "challenge_id": ch.challenge_id,
            "modality": out.modality,
            "level": ch.difficulty.level,
            "time_limit_s": ch.time_limit_s,
            "issued_at": iso_utc(now),
        }
        mode = self.config.assets
        if isinstance(ch, GridChallenge):
            payload["prompt"] = f"Select every {ch.target_category.value} tile"
            tiles = []
            for i, spec in enumerate(ch.tiles):
                entry: dict = {"index": i}
                if mode == "inline":
                    entry["image_pgm_base64"] = base64.b64encode(
                        to_pgm(render_tile(spec, self.config.tile_size))
                    ).decode("ascii")
                elif mode == "url":
                    entry["image_url"] = f"/v1/challenge/{ch.challenge_id}/tile/{i}.pgm"
                tiles.append(entry)
            payload["tiles"] = tiles
            audio = out.paired_audio
        else:
            payload["prompt"] = "Type the digits and words you hear, in order"
            audio = ch
        if audio is not None:
            if mode == "inline":
                payload["audio"] = {
                    "wav_base64": base64.b64encode(render_audio(audio)).decode("ascii")
                }
            elif mode == "url":
                payload["audio"] = {"wav_url": f"/v1/challenge/{audio.challenge_id}/audio.wav"}
            else:
                payload["audio"] = {}
        return payload

    def challenge_asset(self, challenge_id: str, kind: str, index: int | None = None) -> bytes:
        """Asset fetch for url mode; only outstanding challenges are servable."""
        with self._sessions_lock:
            candidates = [r for r in self._sessions.values() if r.outstanding is not None]
        for rec in candidates:
            out = rec.outstanding
            if out is None or out.challenge.challenge_id != challenge_id:
                continue
            if kind == "tile" and isinstance(out.challenge, GridChallenge):
                if index is None or not 0 <= index < len(out.challenge.tiles):
                    raise not_found("tile")
                return to_pgm(render_tile(out.challenge.tiles[index], self.config.tile_size))
            if kind == "audio":
                audio = out.paired_audio if isinstance(out.challenge, GridChallenge) else out.challenge
                if audio is not None:
                    return render_audio(audio)
            raise not_found(kind)
        raise not_found(f"challenge {challenge_id}")

    @staticmethod
    def _parse_solution(challenge: GridChallenge | AudioChallenge, raw) -> Solution:
        if not isinstance(raw, dict):
            raise invalid("solution must be an object")
        try:
            if isinstance(challenge, GridChallenge):
                if "indices" not in raw:
                    raise invalid("grid solution needs an 'indices' array")
                return GridSolution.of(raw["indices"])
            if "transcript" not in raw:
                raise invalid("audio solution needs a 'transcript' string")
            return AudioSolution.of(raw["transcript"])
        except SolutionError as exc:
            raise invalid(str(exc)) from exc
        except TypeError as exc:
            raise invalid(f"malformed solution: {exc}") from exc

    def submit_response(self, session_id: str, challenge_id: str, solution_raw, telemetry_raw) -> dict:
        rec = self._session(session_id)
        with rec.lock:
            if challenge_id in rec.consumed_ids:
                raise gone(f"challenge {challenge_id} already consumed")
            if rec.state is not SessionState.CHALLENGED or rec.outstanding is None:
                raise conflict(f"no outstanding challenge in state {rec.state.value}")
            out = rec.outstanding
            if out.challenge.challenge_id != challenge_id:
                raise not_found(f"challenge {challenge_id}")

            challenge = out.challenge
            solution = self._parse_solution(challenge, solution_raw)
            elapsed = max(0.0, self.clock.now() - challenge.issued_at)
            result = verify_solution(challenge, solution, elapsed)

            # malformed telemetry is evidence, not a server error
            events: list[InteractionEvent] = []
            telemetry_ok = True
            try:
                events = events_from_wire(telemetry_raw, challenge.time_limit_s)
            except TelemetryError:
                telemetry_ok = False

            verdict = (
                classify(self.model, events, elapsed)
                if telemetry_ok
                else Verdict(
                    label=Label.BOT,
                    score=0.0,
                    flags=HeuristicFlags(no_movement=True, inhuman_speed=True),
                )
            )

            r = reward(result, ambiguous=verdict.label is Label.UNCERTAIN)

            suspicious = verdict.label in (Label.BOT, Label.UNCERTAIN)
            rec.stats = rec.stats.after_response(result.correct, elapsed, suspicious)
            s_next = encode_state(rec.stats)
            if self.config.rl_enabled:
                with self._q_lock:
                    q_update(self.qtable, out.state, out.action, r, s_next, self.config.rl)

            rec.consumed_ids.add(challenge_id)
            rec.outstanding = None
            rec.history.append((challenge_id, result, verdict, r, out.action))

            features = None
            if telemetry_ok and len(events) >= 2:
                try:
                    features = extract_features(events).as_list()
                except TelemetryError:
                    features = None

            self._journal(
                EVENT_RESPONSE_SUBMITTED,
                session_id=session_id,
                challenge_id=challenge_id,
                correct=result.correct,
                within_limit=result.within_limit,
                elapsed_s=round(elapsed, 6),
                verdict_label=verdict.label.value,
                score=round(verdict.score, 9),
                flags=verdict.flags.as_dict(),
                features=features,
                level=challenge.difficulty.level,
            )

            passed = verdict.label is Label.HUMAN and result.correct and result.within_limit
            budget_left = len(rec.history) < self.config.max_challenges_per_session
            if passed:
                self._transition(rec, SessionState.VERIFIED_HUMAN)
                rec.verified_at = self.clock.now()
            elif verdict.label is Label.BOT or not budget_left:
                self._transition(rec, SessionState.BLOCKED)
            else:
                self._transition(rec, SessionState.ESCALATED)
            self._journal(EVENT_VERDICT, session_id=session_id, state=rec.state.value)
            self._journal(
                EVENT_Q_UPDATE,
                session_id=session_id,
                s=out.state.state_id,
                a=out.action.delta,
                r=r.value,
                s_next=s_next.state_id,
            )

            response: dict = {
                "verdict": {
                    "label": verdict.label.value,
                    "score": round(verdict.score, 9),
                    "flags": verdict.flags.as_dict(),
                },
                "state": rec.state.value,
            }

            if rec.state is SessionState.ESCALATED:
                response["next_challenge"] = self._issue_locked(rec, out.modality)
                response["state"] = rec.state.value

            if rec.state in (SessionState.VERIFIED_HUMAN, SessionState.BLOCKED):
                self._finish_session(rec)
            if rec.state is SessionState.VERIFIED_HUMAN:
                response["token"] = make_pass_token(self._hmac_key, session_id, rec.verified_at)
            return response

    def _finish_session(self, rec: SessionRecord) -> None:
        with self._q_lock:
            self._completed_sessions += 1

    def get_verdict(self, session_id: str) -> dict:
        rec = self._session(session_id)
        out: dict = {"state": rec.state.value}
        if rec.state is SessionState.VERIFIED_HUMAN and rec.verified_at is not None:
            out["token"] = make_pass_token(self._hmac_key, session_id, rec.verified_at)
        return out

    def healthz(self) -> dict:
        return {
            "status": "ok",
            "qtable_version": 1,
            "sessions": len(self._sessions),
            "completed_sessions": self._completed_sessions,
        }
