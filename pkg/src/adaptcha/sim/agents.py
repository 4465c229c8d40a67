"""Agent population models.

Four archetypes drive the service: humans (accurate, slow, jittery
pointer traces, with a small careless tail), random bots (blind subset
guesses, no pointer movement), vision bots (per-tile classifier with
level-dependent accuracy, fast near-metronomic telemetry), and replay
bots (captured human solution + telemetry resubmitted verbatim).

All the numeric constants here are the calibration surface for the
desk-scale evaluation targets; they live in the two model dataclasses
so a population file can override any of them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from ..rng import SplitMix64


class AgentKind(enum.Enum):
    HUMAN = "human"
    RANDOM_BOT = "random_bot"
    VISION_BOT = "vision_bot"
    REPLAY_BOT = "replay_bot"


@dataclass(frozen=True)
class AgentSpec:
    kind: AgentKind
    count: int
    skill: float = 1.0

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be >= 0")
        if not 0.0 <= self.skill <= 1.0:
            raise ValueError("skill must be in [0, 1]")


@dataclass(frozen=True)
class HumanModel:
    base_accuracy: float = 0.98
    accuracy_slope: float = 0.03          # accuracy loss per level step
    response_mu_base: float = 4.0         # lognormal mu = ln(base + rate * level)
    response_mu_rate: float = 0.6
    response_sigma: float = 0.3
    min_waypoints: int = 5
    max_waypoints: int = 15
    extra_clicks_max: int = 2             # clicks = selections + uniform{0..2}
    widget_px: float = 300.0
    careless_prob: float = 0.04           # sloppy-telemetry tail
    careless_time_scale: float = 0.16
    careless_waypoints: int = 2
    careless_span_px: float = 40.0
    audio_listen_lead_s: float = 1.0

    def accuracy(self, level: int, skill: float) -> float:
        return max(0.0, min(1.0, skill * (self.base_accuracy - self.accuracy_slope * (level - 1))))

    def response_time(self, level: int, rng: SplitMix64) -> float:
        mu = math.log(self.response_mu_base + self.response_mu_rate * level)
        return math.exp(rng.next_gauss(mu, self.response_sigma))


@dataclass(frozen=True)
class BotModels:
    random_guess_sizes: tuple[int, ...] = (3, 4, 5)
    random_elapsed: tuple[float, float] = (0.1, 0.5)
    vision_tile_accuracy_base: float = 0.95
    vision_tile_accuracy_slope: float = 0.12
    vision_elapsed: tuple[float, float] = (0.5, 1.0)
    vision_metronomic_frac: float = 0.15   # exactly-even intervals -> heuristic flag
    vision_jitter_s: tuple[float, float] = (0.012, 0.03)      # crude driver jitter
    vision_stealth_frac: float = 0.40      # jitter-humanized sessions
    vision_stealth_jitter_s: tuple[float, float] = (0.036, 0.044)
    vision_moves: tuple[int, int] = (20, 28)
    replay_resubmit_prob: float = 0.25     # chance to retry a consumed challenge id
    # replay automation regularizes event timing toward an even grid; the
    # mix factor below is how much of the human jitter the replayer loses
    replay_timing_flatten: tuple[float, float] = (0.55, 0.95)

    def vision_accuracy(self, level: int) -> float:
        return max(0.0, min(1.0, self.vision_tile_accuracy_base - self.vision_tile_accuracy_slope * (level - 1)))


@dataclass
class ChallengeView:
    """What an agent sees plus the harness-side ground truth it needs to
    simulate perception (a stand-in for actually looking at pixels)."""

    challenge_id: str
    modality: str                 # grid | audio | paired
    level: int
    time_limit_s: float
    target_indices: frozenset[int] | None = None
    transcript_tokens: list[str] | None = None


@dataclass
class AgentPlay:
    solution: dict
    telemetry: list[dict]
    elapsed_s: float


@dataclass
class AgentState:
    """Per-session persistent agent context."""

    spec: AgentSpec
    rng: SplitMix64
    careless: bool = False
    captured_solution: dict | None = None
    captured_telemetry: list[dict] | None = None
    captured_elapsed: float = 0.0
    prev_challenge_id: str | None = None
    vision_mode: str | None = None
    vision_jitter: float = 0.0
    vision_elapsed: float | None = None


def _tile_center(index: int, widget_px: float) -> tuple[float, float]:
    cell = widget_px / 3.0
    return (cell * (index % 3) + cell / 2.0, cell * (index // 3) + cell / 2.0)


def _spread_times(rng: SplitMix64, n: int, elapsed: float) -> list[float]:
    """n event times strictly inside (0, elapsed), naturally jittered."""
    times = sorted(rng.next_uniform(0.04, 0.97) * elapsed for _ in range(n))
    return times


def _human_grid_play(state: AgentState, view: ChallengeView, model: HumanModel) -> AgentPlay:
    rng = state.rng
    targets = set(view.target_indices or ())
    accuracy = model.accuracy(view.level, state.spec.skill)
    elapsed = model.response_time(view.level, rng)
    if state.careless:
        elapsed *= model.careless_time_scale

    selection = set(targets)
    if rng.next_float() >= accuracy:
        # near-miss: swap one or two indices with decoys
        n_swaps = 1 + rng.next_below(2)
        decoys = sorted(set(range(9)) - targets)
        chosen = sorted(selection)
        for _ in range(min(n_swaps, len(chosen), len(decoys))):
            victim = chosen[rng.next_below(len(chosen))]
            repl = decoys[rng.next_below(len(decoys))]
            selection.discard(victim)
            selection.add(repl)
            chosen = sorted(selection)
            decoys = sorted(set(range(9)) - selection)

    if state.careless:
        n_moves = model.careless_waypoints
        span = model.careless_span_px
    else:
        n_moves = model.min_waypoints + rng.next_below(model.max_waypoints - model.min_waypoints + 1)
        span = model.widget_px
    n_clicks = len(selection) + rng.next_below(model.extra_clicks_max + 1)

    times = _spread_times(rng, n_moves + n_clicks, elapsed)
    events: list[dict] = []
    cursor = 0
    for _ in range(n_moves):
        events.append(
            {
                "kind": "pointer_move",
                "t": times[cursor],
                "x": rng.next_uniform(0.0, span),
                "y": rng.next_uniform(0.0, span),
            }
        )
        cursor += 1
    click_targets = sorted(selection) or [rng.next_below(9)]
    for j in range(n_clicks):
        x, y = _tile_center(click_targets[j % len(click_targets)], model.widget_px)
        events.append(
            {
                "kind": "click",
                "t": times[cursor],
                "x": x + rng.next_gauss(0.0, 6.0),
                "y": y + rng.next_gauss(0.0, 6.0),
            }
        )
        cursor += 1
    events.sort(key=lambda e: e["t"])
    events.append({"kind": "submit", "t": elapsed})
    return AgentPlay(solution={"indices": sorted(selection)}, telemetry=events, elapsed_s=elapsed)


def _human_audio_play(state: AgentState, view: ChallengeView, model: HumanModel) -> AgentPlay:
    rng = state.rng
    tokens = list(view.transcript_tokens or [])
    accuracy = model.accuracy(view.level, state.spec.skill)
    elapsed = model.audio_listen_lead_s + model.response_time(view.level, rng)
    if state.careless:
        elapsed *= model.careless_time_scale

    heard = list(tokens)
    if rng.next_float() >= accuracy and heard:
        # mishear one token
        i = rng.next_below(len(heard))
        heard[i] = "garbled" if heard[i] != "garbled" else "noise"

    n_moves = 3 if state.careless else 4 + rng.next_below(4)
    n_keys = max(4, 3 * len(tokens))
    span = model.careless_span_px if state.careless else model.widget_px
    times = _spread_times(rng, n_moves + n_keys + 1, elapsed)
    events: list[dict] = []
    cursor = 0
    for _ in range(n_moves):
        events.append(
            {"kind": "pointer_move", "t": times[cursor], "x": rng.next_uniform(0, span), "y": rng.next_uniform(0, span)}
        )
        cursor += 1
    events.append({"kind": "click", "t": times[cursor], "x": span / 2, "y": span / 2})
    cursor += 1
    for _ in range(n_keys):
        events.append({"kind": "key", "t": times[cursor]})
        cursor += 1
    events.sort(key=lambda e: e["t"])
    events.append({"kind": "submit", "t": elapsed})
    return AgentPlay(solution={"transcript": " ".join(heard)}, telemetry=events, elapsed_s=elapsed)


def _random_bot_play(state: AgentState, view: ChallengeView, bots: BotModels) -> AgentPlay:
    rng = state.rng
    elapsed = rng.next_uniform(*bots.random_elapsed)
    if view.modality == "audio":
        solution = {"transcript": "zero noise"}
        n_actions = 3
    else:
        size = bots.random_guess_sizes[rng.next_below(len(bots.random_guess_sizes))]
        solution = {"indices": sorted(rng.sample(9, size))}
        n_actions = size
    # clicks with no coordinates and zero pointer movement
    step = elapsed / (n_actions + 1)
    events = [{"kind": "click", "t": step * (i + 1)} for i in range(n_actions)]
    events.append({"kind": "submit", "t": elapsed})
    return AgentPlay(solution=solution, telemetry=events, elapsed_s=elapsed)


def _vision_bot_play(state: AgentState, view: ChallengeView, bots: BotModels) -> AgentPlay:
    rng = state.rng
    if state.vision_elapsed is None:
        state.vision_elapsed = rng.next_uniform(*bots.vision_elapsed)
    elapsed = state.vision_elapsed
    accuracy = bots.vision_accuracy(view.level)
    targets = set(view.target_indices or ())

    if view.modality == "audio":
        tokens = list(view.transcript_tokens or [])
        heard = [t if rng.next_float() < accuracy else "static" for t in tokens]
        solution: dict = {"transcript": " ".join(heard) or "static"}
        clicked: list[int] = [4]
    else:
        selection = set()
        for i in range(9):
            is_target = i in targets
            correct = rng.next_float() < accuracy
            if is_target == correct:  # classified as target
                selection.add(i)
        solution = {"indices": sorted(selection)}
        clicked = sorted(selection) or [4]

    # straight-line sweep through clicked tiles; timing regularity is a
    # per-session trait (metronomic, crude jitter, or stealth jitter)
    if state.vision_mode is None:
        u = rng.next_float()
        if u < bots.vision_metronomic_frac:
            state.vision_mode = "metronomic"
        elif u < bots.vision_metronomic_frac + bots.vision_stealth_frac:
            state.vision_mode = "stealth"
        else:
            state.vision_mode = "crude"
        if state.vision_mode == "metronomic":
            state.vision_jitter = 0.0
        elif state.vision_mode == "stealth":
            state.vision_jitter = rng.next_uniform(*bots.vision_stealth_jitter_s)
        else:
            state.vision_jitter = rng.next_uniform(*bots.vision_jitter_s)
    jitter = state.vision_jitter
    n_moves = bots.vision_moves[0] + rng.next_below(bots.vision_moves[1] - bots.vision_moves[0] + 1)
    path: list[tuple[float, float]] = [(0.0, 0.0)]
    for idx in clicked:
        path.append(_tile_center(idx, 300.0))
    points: list[tuple[float, float]] = []
    for k in range(n_moves):
        f = k / max(n_moves - 1, 1)
        seg = min(int(f * (len(path) - 1)), len(path) - 2)
        local = f * (len(path) - 1) - seg
        x0, y0 = path[seg]
        x1, y1 = path[seg + 1]
        points.append((x0 + (x1 - x0) * local, y0 + (y1 - y0) * local))

    n_events = n_moves + len(clicked)
    base = elapsed / (n_events + 1)
    events = []
    t = 0.0
    for k in range(n_events):
        t += base + (rng.next_gauss(0.0, jitter) if jitter else 0.0)
        t = max(t, 0.0)
        if k < n_moves:
            events.append({"kind": "pointer_move", "t": t, "x": points[k][0], "y": points[k][1]})
        else:
            x, y = _tile_center(clicked[k - n_moves], 300.0)
            events.append({"kind": "click", "t": t, "x": x, "y": y})
    events.sort(key=lambda e: e["t"])
    events.append({"kind": "submit", "t": max(elapsed, t)})
    return AgentPlay(solution=solution, telemetry=events, elapsed_s=max(elapsed, t))


def _replay_bot_play(state: AgentState, view: ChallengeView, model: HumanModel, bots: BotModels) -> AgentPlay:
    """Replays one captured human interaction for every challenge it
    meets. The answer was right once, elsewhere; the replayer keeps the
    captured coordinates but its scheduler flattens the event timing
    toward an even grid."""
    if state.captured_solution is None:
        human_state = AgentState(spec=replace(state.spec, kind=AgentKind.HUMAN), rng=state.rng)
        fake_view = ChallengeView(
            challenge_id="captured",
            modality="grid",
            level=view.level,
            time_limit_s=view.time_limit_s,
            target_indices=frozenset(state.rng.sample(9, 3 + state.rng.next_below(3))),
        )
        captured = _human_grid_play(human_state, fake_view, model)
        flatten = state.rng.next_uniform(*bots.replay_timing_flatten)
        events = [dict(e) for e in captured.telemetry]
        n = len(events)
        for k, e in enumerate(events):
            grid_t = captured.elapsed_s * (k + 1) / n
            e["t"] = (1.0 - flatten) * e["t"] + flatten * grid_t
        state.captured_solution = captured.solution
        state.captured_telemetry = events
        state.captured_elapsed = captured.elapsed_s
    if view.modality == "audio":
        solution = {"transcript": "zero replay"}
    else:
        solution = state.captured_solution
    return AgentPlay(
        solution=solution,
        telemetry=[dict(e) for e in state.captured_telemetry or []],
        elapsed_s=state.captured_elapsed,
    )


def agent_play(
    state: AgentState,
    view: ChallengeView,
    human_model: HumanModel,
    bot_models: BotModels,
) -> AgentPlay:
    kind = state.spec.kind
    if kind is AgentKind.HUMAN:
        if view.modality == "audio":
            return _human_audio_play(state, view, human_model)
        return _human_grid_play(state, view, human_model)
    if kind is AgentKind.RANDOM_BOT:
        return _random_bot_play(state, view, bot_models)
    if kind is AgentKind.VISION_BOT:
        return _vision_bot_play(state, view, bot_models)
    if kind is AgentKind.REPLAY_BOT:
        return _replay_bot_play(state, view, human_model, bot_models)
    raise ValueError(f"unknown agent kind {kind}")


def new_agent_state(spec: AgentSpec, seed: int, human_model: HumanModel, rng_stream: SplitMix64 | None = None) -> AgentState:
    rng = rng_stream or SplitMix64(seed)
    careless = spec.kind is AgentKind.HUMAN and rng.next_float() < human_model.careless_prob
    return AgentState(spec=spec, rng=rng, careless=careless)
