#!/usr/bin/env python3
"""Train the default behavioral classifier shipped with the service.

The training set is synthesized straight from the simulator's agent
models: clean human traces (positive class) against random-bot and
replay-bot traces (negative class), across all difficulty levels and
both modalities. Replay traces are separable through their
timing-regularization artifact (replayers preserve coordinates but
flatten inter-event jitter); a hypothetical replayer with bit-perfect
timing is stopped by the one-time challenge nonce, not by this
classifier.

Vision bots are deliberately held out as the novel-attack case: the
service must degrade gracefully against telemetry the classifier never
saw, by escalating uncertain sessions into harder challenges until the
solver's per-tile accuracy collapses. Operators retrain on their own
journals (train-classifier subcommand) once an attack wave is labeled.
The careless-human tail is also excluded so the margin stays tight
around confident human behavior.

Run: python scripts/train_default_model.py [--seed N] [--out PATH]
"""

import argparse
from dataclasses import replace
from pathlib import Path

from adaptcha.analysis.features import events_from_wire, extract_features
from adaptcha.analysis.svm import SvmTrainConfig, save_model, svm_decision, train_svm
from adaptcha.rng import SplitMix64, derive
from adaptcha.sim.agents import (
    AgentKind,
    AgentSpec,
    BotModels,
    ChallengeView,
    HumanModel,
    agent_play,
    new_agent_state,
)

N_PER_CLASS = 1200


def synthesize(seed: int) -> list:
    human_model = replace(HumanModel(), careless_prob=0.0)
    bot_models = BotModels()
    plan = [
        (AgentKind.HUMAN, +1, N_PER_CLASS),
        (AgentKind.RANDOM_BOT, -1, N_PER_CLASS // 2),
        (AgentKind.REPLAY_BOT, -1, N_PER_CLASS // 2),
    ]
    rows = []
    idx = 0
    for kind, label, n in plan:
        for k in range(n):
            idx += 1
            rng = SplitMix64(derive(seed, "train", idx))
            state = new_agent_state(AgentSpec(kind, count=1), 0, human_model, rng)
            level = 1 + rng.next_below(5)
            modality = "audio" if (kind is AgentKind.HUMAN and k % 4 == 0) else "grid"
            view = ChallengeView(
                challenge_id=f"synthetic-{idx}",
                modality=modality,
                level=level,
                time_limit_s=30.0,
                target_indices=frozenset(rng.sample(9, 3 + rng.next_below(3))),
                transcript_tokens=["three", "river", "nine", "stone"],
            )
            play = agent_play(state, view, human_model, bot_models)
            try:
                features = extract_features(events_from_wire(play.telemetry))
            except Exception:
                continue  # insufficient-data traces are heuristic territory
            rows.append((features, label))
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parent.parent / "src/adaptcha/data/default_model.json"),
    )
    args = parser.parse_args()

    rows = synthesize(args.seed)
    model = train_svm(rows, SvmTrainConfig(lam=1e-3, epochs=80, eta0=0.5, seed=args.seed))
    acc = sum(1 for x, y in rows if (1 if svm_decision(model, x) > 0 else -1) == y) / len(rows)
    print(f"training rows: {len(rows)}  accuracy: {acc:.4f}")
    print(f"w = {model.w.round(4).tolist()}  b = {model.b:.4f}")
    Path(args.out).write_bytes(save_model(model))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
