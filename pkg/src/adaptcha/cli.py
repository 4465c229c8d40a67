"""Command-line entry point.

Subcommands: serve, simulate, train-classifier, q-inspect, gen-challenge,
metrics, replay. Exit codes: 0 success, 1 operational error, 2 usage
error (argparse's convention).
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
from pathlib import Path

from .analysis.svm import DatasetError, SvmTrainConfig, save_model, svm_decision, train_svm
from .challenge.audio import generate_audio_challenge
from .challenge.difficulty import MAX_LEVEL, MIN_LEVEL, DifficultyLevel
from .challenge.grid import generate_grid_challenge
from .challenge.synth import render_audio
from .challenge.tiles import render_tile, to_pgm
from .rl.qlearning import ACTION_DELTAS, QTable
from .rl.states import N_STATES, RlState
from .rl.store import QTableFormatError, load_qtable
from .rng import derive
from .service.config import ConfigError, ServiceConfig, load_config
from .service.core import CaptchaService
from .service.http import ServiceServer
from .service.journal import JournalError, read_journal
from .sim.metrics import build_training_set, compute_metrics
from .sim.run import PopulationConfig, load_population, run_simulation

ACTION_NAMES = {-1: "lower", 0: "hold", +1: "raise"}


class OperationalError(RuntimeError):
    pass


def _level(value: str) -> DifficultyLevel:
    try:
        n = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"level must be an integer, got {value!r}") from exc
    if not MIN_LEVEL <= n <= MAX_LEVEL:
        raise argparse.ArgumentTypeError(f"level must be in [{MIN_LEVEL}, {MAX_LEVEL}]")
    return DifficultyLevel(n)


def cmd_serve(args) -> int:
    config = load_config(args.config) if args.config else ServiceConfig()
    engine = CaptchaService(config)
    server = ServiceServer(engine)
    host, port = server.address
    print(f"serving on http://{host}:{port} (journal: {config.journal_path or 'memory'})", flush=True)

    def _interrupt(signum, frame):
        raise KeyboardInterrupt

    signal.signal(signal.SIGTERM, _interrupt)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("shutting down", flush=True)
    finally:
        server.shutdown()
    return 0


def cmd_simulate(args) -> int:
    if args.population:
        population, service_cfg = load_population(args.population)
    else:
        population, service_cfg = PopulationConfig(), None
    config = service_cfg or ServiceConfig()
    result = run_simulation(population, config, n_sessions=args.sessions, seed=args.seed)

    out = Path(args.out)
    out.write_text(result.report.to_json(), encoding="utf-8")
    journal_path = Path(args.journal) if args.journal else out.with_suffix(".journal.jsonl")
    journal_path.write_text(result.journal_text(), encoding="utf-8")
    print(result.report.to_text(), end="")
    print(f"report: {out}\njournal: {journal_path}")
    return 0


def cmd_train_classifier(args) -> int:
    events = read_journal(args.journal)
    train, holdout = build_training_set(events, seed=args.seed)
    model = train_svm(train, SvmTrainConfig(seed=args.seed))

    def accuracy(rows):
        return sum(1 for x, y in rows if (1 if svm_decision(model, x) > 0 else -1) == y) / len(rows)

    Path(args.out).write_bytes(save_model(model))
    print(f"trained on {len(train)} rows, holdout {len(holdout)}")
    print(f"train accuracy: {accuracy(train):.4f}")
    if holdout:
        tp = sum(1 for x, y in holdout if y == 1 and svm_decision(model, x) > 0)
        fp = sum(1 for x, y in holdout if y == -1 and svm_decision(model, x) > 0)
        fn = sum(1 for x, y in holdout if y == 1 and svm_decision(model, x) <= 0)
        f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
        print(f"holdout accuracy: {accuracy(holdout):.4f}")
        print(f"holdout f1 (human-positive): {f1:.4f}")
    print(f"model: {args.out}")
    return 0


def cmd_gen_challenge(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.modality == "grid":
        ch = generate_grid_challenge(args.seed, args.level, challenge_id="inspection")
        for i, spec in enumerate(ch.tiles):
            (out / f"tile_{i}.pgm").write_bytes(to_pgm(render_tile(spec, args.tile_size)))
        answer = {
            "modality": "grid",
            "level": ch.difficulty.level,
            "target_category": ch.target_category.value,
            "target_indices": sorted(ch.target_indices),
        }
        (out / "answer.json").write_text(json.dumps(answer, indent=2) + "\n", encoding="utf-8")
        print(f"wrote 9 tiles + answer.json to {out}")
    else:
        ch = generate_audio_challenge(args.seed, args.level, challenge_id="inspection")
        (out / "challenge.wav").write_bytes(render_audio(ch))
        (out / "transcript.txt").write_text(ch.expected_transcript + "\n", encoding="utf-8")
        print(f"wrote challenge.wav + transcript.txt to {out}")
    return 0


def cmd_q_inspect(args) -> int:
    try:
        q = load_qtable(Path(args.qtable).read_bytes())
    except OSError as exc:
        raise OperationalError(f"cannot read qtable: {exc}") from exc
    print(f"{'state':>5}  {'level':>5} {'fails':>5} {'time':>6} {'susp':>4}  "
          f"{'Q(lower)':>10} {'Q(hold)':>10} {'Q(raise)':>10}  greedy")
    time_names = {0: "fast", 1: "normal", 2: "slow"}
    for sid in range(N_STATES):
        s = RlState(sid)
        row = q.values[sid]
        best = row.max()
        ties = [ACTION_NAMES[ACTION_DELTAS[i]] for i in range(3) if row[i] == best]
        note = ties[0] if len(ties) == 1 else f"tie({'/'.join(ties)})"
        print(
            f"{sid:>5}  {s.level:>5} {s.failure_bucket:>5} {time_names[s.time_bucket]:>6} "
            f"{int(s.suspicious):>4}  {row[0]:>10.4f} {row[1]:>10.4f} {row[2]:>10.4f}  {note}"
        )
    return 0


def cmd_metrics(args) -> int:
    events = read_journal(args.journal)
    report = compute_metrics(events)
    if args.json:
        print(report.to_json(), end="")
    else:
        print(report.to_text(), end="")
    return 0


def cmd_replay(args) -> int:
    from .service.journal import journal_replay

    sessions = journal_replay(args.journal)
    counts: dict[str, int] = {}
    for rec in sessions.values():
        counts[rec.state] = counts.get(rec.state, 0) + 1
    print(f"replayed {len(sessions)} sessions from {args.journal}")
    for state, n in sorted(counts.items()):
        print(f"  {state}: {n}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptcha", description="adaptive CAPTCHA service toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP verification service")
    p.add_argument("--config", help="service config JSON (defaults apply when omitted)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="run the deterministic agent simulation")
    p.add_argument("--population", help="population config JSON (calibrated defaults when omitted)")
    p.add_argument("--sessions", type=int, required=True, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.add_argument("--out", default="report.json", help="metrics report path")
    p.add_argument("--journal", help="journal path (default: <out>.journal.jsonl)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train-classifier", help="train an SVM from a simulation journal")
    p.add_argument("--journal", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=cmd_train_classifier)

    p = sub.add_parser("gen-challenge", help="render challenge assets for inspection")
    p.add_argument("--modality", choices=("grid", "audio"), required=True)
    p.add_argument("--level", type=_level, required=True, metavar="L")
    p.add_argument("--seed", type=int, required=True, metavar="S")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--tile-size", type=int, default=64, choices=(32, 64, 128))
    p.set_defaults(func=cmd_gen_challenge)

    p = sub.add_parser("q-inspect", help="print the greedy policy of a Q-table snapshot")
    p.add_argument("--qtable", required=True)
    p.set_defaults(func=cmd_q_inspect)

    p = sub.add_parser("metrics", help="recompute the metrics report from a journal")
    p.add_argument("--journal", required=True)
    p.add_argument("--json", action="store_true", help="emit JSON instead of the text table")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("replay", help="reconstruct session states from a journal")
    p.add_argument("--journal", required=True)
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "sessions", None) is not None and args.sessions < 1:
        parser.error("--sessions must be >= 1")
    try:
        return args.func(args)
    except (ConfigError, JournalError, QTableFormatError, DatasetError, OperationalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
