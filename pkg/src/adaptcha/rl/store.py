"""Versioned JSON snapshot format for Q tables.

Floats survive the round trip exactly (shortest-repr float encoding is
lossless for binary64), so load(save(q)) == q.
"""

from __future__ import annotations

import json

import numpy as np

from .qlearning import N_ACTIONS, QTable
from .states import N_STATES

FORMAT_NAME = "adaptcha-qtable"
FORMAT_VERSION = 1


class QTableFormatError(ValueError):
    """Snapshot bytes are not a valid Q-table file."""


def save_qtable(q: QTable) -> bytes:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "shape": [N_STATES, N_ACTIONS],
        "values": q.values.tolist(),
        "visit_counts": q.visit_counts.tolist(),
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def load_qtable(data: bytes) -> QTable:
    if not data:
        raise QTableFormatError("empty Q-table payload")
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise QTableFormatError(f"unparseable Q-table payload: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise QTableFormatError("not a Q-table snapshot")
    if doc.get("version") != FORMAT_VERSION:
        raise QTableFormatError(f"unsupported snapshot version {doc.get('version')!r}")
    if doc.get("shape") != [N_STATES, N_ACTIONS]:
        raise QTableFormatError(f"unexpected table shape {doc.get('shape')!r}")
    try:
        values = np.array(doc["values"], dtype=np.float64)
        visits = np.array(doc["visit_counts"], dtype=np.int64)
        return QTable(values, visits)
    except (KeyError, TypeError, ValueError) as exc:
        raise QTableFormatError(f"malformed Q-table contents: {exc}") from exc
