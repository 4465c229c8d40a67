#!/usr/bin/env python3
"""Construct the default difficulty-policy table shipped with the service.

The §-free rationale: the online reward (+1 for a correct, in-time
response) measures challenge appropriateness, so on its own it always
favors easier challenges: every agent population answers easy challenges
more reliably than hard ones. The security-facing directions, raise on
suspicion and lower for struggling users, are therefore encoded here as
a value prior. Online temporal-difference updates refine the numbers on
top of this prior; the greedy directions only flip if live traffic
earns it.

Run: python scripts/build_default_qtable.py [--out PATH]
"""

import argparse
from pathlib import Path

import numpy as np

from adaptcha.rl.qlearning import QTable
from adaptcha.rl.states import N_STATES, RlState
from adaptcha.rl.store import save_qtable

# magnitudes leave headroom against occasional contrary rewards (each
# online update moves a cell by ~alpha * TD-error), while staying well
# inside the reward-bounded envelope |Q| <= 1/(1-gamma) = 10
RAISE_VALUE = 1.5
LOWER_VALUE = 1.5
HOLD_VALUE = 0.3


def build_prior() -> QTable:
    values = np.zeros((N_STATES, 3))
    for sid in range(N_STATES):
        s = RlState(sid)
        if s.suspicious:
            values[sid] = [0.0, 0.1, RAISE_VALUE]       # raise on suspicion
        elif s.failure_bucket >= 1:
            values[sid] = [LOWER_VALUE, 0.1, 0.0]       # ease off for strugglers
        else:
            values[sid] = [0.0, HOLD_VALUE, 0.0]        # steady state: hold
    return QTable(values=values)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parent.parent / "src/adaptcha/data/default_qtable.json"),
    )
    args = parser.parse_args()
    Path(args.out).write_bytes(save_qtable(build_prior()))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
