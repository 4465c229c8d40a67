#!/usr/bin/env python3
"""Desk-scale evaluation: the headline metrics run.

Simulates the default 70/30 human/bot population against the service
with shipped defaults and prints the evaluation table next to the
calibration targets. Writes report + journal alongside for offline
recomputation (adaptcha metrics --journal ...).

Run: python scripts/run_experiment.py [--sessions N] [--seed S] [--outdir DIR]
"""

import argparse
import time
from pathlib import Path

from adaptcha.service.config import ServiceConfig
from adaptcha.sim.run import PopulationConfig, run_simulation

TARGETS = [
    ("human success rate", "human_success_rate", "0.90 .. 0.99"),
    ("bot bypass rate", "bypass_rate", "<= 0.10"),
    ("false positive rate", "fpr", "<= 0.05"),
    ("classifier F1 (human+)", "f1", ">= 0.95"),
    ("adaptability score", "adaptability_score", ">= 0.85"),
    ("avg human response (s)", "avg_response_time_s", "~5.6 (reference)"),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sessions", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--outdir", default="experiment_out")
    args = parser.parse_args()

    t0 = time.time()
    result = run_simulation(PopulationConfig(), ServiceConfig(), n_sessions=args.sessions, seed=args.seed)
    elapsed = time.time() - t0

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.json").write_text(result.report.to_json(), encoding="utf-8")
    (outdir / "journal.jsonl").write_text(result.journal_text(), encoding="utf-8")

    print(f"{args.sessions} sessions, seed {args.seed}, {elapsed:.1f}s\n")
    print(f"{'metric':<26} {'measured':>10}   target")
    for label, attr, target in TARGETS:
        value = getattr(result.report, attr)
        shown = "undefined" if value is None else f"{value:.4f}"
        print(f"{label:<26} {shown:>10}   {target}")
    print()
    print(result.report.to_text())
    print(f"report:  {outdir / 'report.json'}")
    print(f"journal: {outdir / 'journal.jsonl'}")


if __name__ == "__main__":
    main()
