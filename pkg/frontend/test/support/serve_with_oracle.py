#!/usr/bin/env python3
"""Test-harness service: the real HTTP service plus a ground-truth sidecar.

Runs the verification service on an ephemeral port and appends every
issued challenge's answer to a local JSONL file so the integration test
can play the role of a human who can actually see the tiles. Nothing is
added to the HTTP surface; the widget under test still consumes only
the public API.

Prints "PORT <n>" on stdout once the server is listening.
"""

import argparse
import json
import sys

from adaptcha.challenge.grid import GridChallenge
from adaptcha.service.config import ServiceConfig
from adaptcha.service.core import CaptchaService
from adaptcha.service.http import ServiceServer


class OracleService(CaptchaService):
    def __init__(self, config, oracle_path):
        super().__init__(config)
        self._oracle_path = oracle_path

    def _issue_locked(self, rec, modality):
        payload = super()._issue_locked(rec, modality)
        challenge = rec.outstanding.challenge
        truth = {"challenge_id": challenge.challenge_id}
        if isinstance(challenge, GridChallenge):
            truth["indices"] = sorted(challenge.target_indices)
        else:
            truth["transcript"] = challenge.expected_transcript
        with open(self._oracle_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(truth) + "\n")
        return payload


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--oracle", required=True)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    config = ServiceConfig(port=0, seed_mode="fixed", seed=args.seed)
    engine = OracleService(config, args.oracle)
    server = ServiceServer(engine)
    host, port = server.address
    print(f"PORT {port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()


if __name__ == "__main__":
    sys.exit(main())
