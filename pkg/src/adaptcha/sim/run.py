"""Deterministic simulation runner.

Drives the in-process service session by session: the agent schedule,
every agent decision, the service's challenge seeds, nonces, and action
draws, and the virtual clock all derive from one run seed, so a run is
a pure function of (population, config, n_sessions, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace

from ..challenge.audio import AudioChallenge
from ..challenge.grid import GridChallenge
from ..rng import SplitMix64, derive
from ..service.config import ConfigError, ServiceConfig, config_from_dict
from ..service.core import ApiError, CaptchaService, SessionState, VirtualClock
from ..service.journal import Journal
from .agents import (
    AgentKind,
    AgentSpec,
    AgentState,
    BotModels,
    ChallengeView,
    HumanModel,
    agent_play,
    new_agent_state,
)
from .metrics import MetricsReport, compute_metrics

TERMINAL_STATES = (SessionState.VERIFIED_HUMAN.value, SessionState.BLOCKED.value)


@dataclass
class PopulationConfig:
    specs: list[AgentSpec] = field(
        default_factory=lambda: [
            AgentSpec(AgentKind.HUMAN, count=70),
            AgentSpec(AgentKind.RANDOM_BOT, count=10),
            AgentSpec(AgentKind.VISION_BOT, count=10),
            AgentSpec(AgentKind.REPLAY_BOT, count=10),
        ]
    )
    human_model: HumanModel = field(default_factory=HumanModel)
    bot_models: BotModels = field(default_factory=BotModels)
    # modality mix for human sessions; bots always attack the grid
    human_modality_weights: dict[str, float] = field(
        default_factory=lambda: {"grid": 0.7, "audio": 0.2, "paired": 0.1}
    )

    def __post_init__(self):
        if not self.specs or sum(s.count for s in self.specs) <= 0:
            raise ConfigError("population: needs at least one agent with count > 0")
        if not self.human_modality_weights or any(w < 0 for w in self.human_modality_weights.values()):
            raise ConfigError("human_modality_weights: must be non-negative")

    @staticmethod
    def from_dict(doc: dict) -> "PopulationConfig":
        if not isinstance(doc, dict):
            raise ConfigError("population file: must be a JSON object")
        kwargs: dict = {}
        if "population" in doc:
            specs = []
            for item in doc["population"]:
                try:
                    specs.append(
                        AgentSpec(
                            kind=AgentKind(item["kind"]),
                            count=int(item["count"]),
                            skill=float(item.get("skill", 1.0)),
                        )
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise ConfigError(f"population: bad agent spec {item!r}: {exc}") from exc
            kwargs["specs"] = specs
        for key, cls in (("human_model", HumanModel), ("bot_models", BotModels)):
            if key in doc:
                valid = {f.name for f in fields(cls)}
                unknown = set(doc[key]) - valid
                if unknown:
                    raise ConfigError(f"{key}: unknown field {sorted(unknown)[0]!r}")
                kwargs[key] = replace(cls(), **{k: v for k, v in doc[key].items()})
        if "human_modality_weights" in doc:
            kwargs["human_modality_weights"] = dict(doc["human_modality_weights"])
        return PopulationConfig(**kwargs)


def load_population(path: str) -> tuple[PopulationConfig, ServiceConfig | None]:
    """Population file, optionally embedding service config overrides."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise ConfigError(f"population file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"population file: invalid JSON: {exc}") from exc
    service_cfg = config_from_dict(doc["service"]) if "service" in doc else None
    doc = {k: v for k, v in doc.items() if k != "service"}
    return PopulationConfig.from_dict(doc), service_cfg


@dataclass
class SimulationResult:
    report: MetricsReport
    events: list[dict]
    tags: dict[str, str]
    service: CaptchaService

    def journal_text(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)


def _weighted_pick(rng: SplitMix64, weights: list[tuple[str, float]]) -> str:
    total = sum(w for _, w in weights)
    x = rng.next_float() * total
    acc = 0.0
    for name, w in weights:
        acc += w
        if x < acc:
            return name
    return weights[-1][0]


def _view_from_truth(service: CaptchaService, session_id: str, payload: dict) -> ChallengeView:
    """Harness-side ground truth so agents can simulate perception.

    This peeks at server state directly; it exists only inside the
    simulator and never crosses the API surface.
    """
    rec = service._session(session_id)
    out = rec.outstanding
    assert out is not None and out.challenge.challenge_id == payload["challenge_id"]
    ch = out.challenge
    if isinstance(ch, GridChallenge):
        return ChallengeView(
            challenge_id=ch.challenge_id,
            modality=out.modality,
            level=ch.difficulty.level,
            time_limit_s=ch.time_limit_s,
            target_indices=ch.target_indices,
        )
    assert isinstance(ch, AudioChallenge)
    return ChallengeView(
        challenge_id=ch.challenge_id,
        modality=out.modality,
        level=ch.difficulty.level,
        time_limit_s=ch.time_limit_s,
        transcript_tokens=list(ch.tokens),
    )


def _shard_worker(args: tuple[PopulationConfig, ServiceConfig, int, int]) -> tuple[int, list[dict], dict[str, str]]:
    population, config, n_sessions, seed = args
    result = run_simulation(population, config, n_sessions, seed)
    return seed, result.events, result.tags


def run_simulation_sharded(
    population: PopulationConfig,
    config: ServiceConfig,
    sessions_per_seed: int,
    seeds: list[int],
    workers: int | None = None,
) -> tuple[MetricsReport, list[dict], dict[str, str]]:
    """Independent seeds across worker processes, merged seed-sorted.

    The merge concatenates per-seed journals in seed order and folds the
    union, so the outcome is independent of worker completion order.
    """
    from concurrent.futures import ProcessPoolExecutor

    jobs = [(population, config, sessions_per_seed, seed) for seed in seeds]
    if workers is not None and workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_shard_worker, jobs))
    else:
        shards = [_shard_worker(job) for job in jobs]
    shards.sort(key=lambda item: seeds.index(item[0]))

    events: list[dict] = []
    tags: dict[str, str] = {}
    for _, shard_events, shard_tags in shards:
        events.extend(shard_events)
        tags.update(shard_tags)
    return compute_metrics(events, tags), events, tags


def run_simulation(
    population: PopulationConfig,
    config: ServiceConfig,
    n_sessions: int,
    seed: int,
) -> SimulationResult:
    if n_sessions < 1:
        raise ConfigError("n_sessions: must be >= 1")

    sim_config = replace(
        config,
        seed_mode="fixed",
        seed=derive(seed, "service"),
        journal_path=None,
        assets="none",  # agents act on ground truth, not pixels
    )
    clock = VirtualClock()
    journal = Journal(path=None)
    service = CaptchaService(sim_config, clock=clock, journal=journal)

    schedule_rng = SplitMix64(derive(seed, "schedule"))
    spec_weights = [(i, float(s.count)) for i, s in enumerate(population.specs) if s.count > 0]
    modality_weights = sorted(population.human_modality_weights.items())

    tags: dict[str, str] = {}
    for k in range(n_sessions):
        spec = population.specs[int(_weighted_pick(schedule_rng, [(str(i), w) for i, w in spec_weights]))]
        agent = new_agent_state(spec, 0, population.human_model, SplitMix64(derive(seed, "agent", k)))
        if spec.kind is AgentKind.HUMAN:
            modality = _weighted_pick(agent.rng, modality_weights)
        else:
            modality = "grid"

        created = service.create_session(tag=spec.kind.value)
        sid = created["session_id"]
        tags[sid] = spec.kind.value

        payload = service.issue_challenge(sid, modality)
        state = "challenged"
        while state not in TERMINAL_STATES:
            view = _view_from_truth(service, sid, payload)
            play = agent_play(agent, view, population.human_model, population.bot_models)

            if (
                spec.kind is AgentKind.REPLAY_BOT
                and agent.prev_challenge_id is not None
                and agent.rng.next_float() < population.bot_models.replay_resubmit_prob
            ):
                try:
                    service.submit_response(sid, agent.prev_challenge_id, play.solution, play.telemetry)
                except ApiError:
                    pass  # consumed nonce rejected, as designed

            clock.advance(play.elapsed_s)
            response = service.submit_response(sid, payload["challenge_id"], play.solution, play.telemetry)
            agent.prev_challenge_id = payload["challenge_id"]
            state = response["state"]
            if state not in TERMINAL_STATES:
                payload = response["next_challenge"]
        clock.advance(0.5)

    report = compute_metrics(journal.events, tags)
    return SimulationResult(report=report, events=list(journal.events), tags=tags, service=service)
