"""Solution checking for both challenge modalities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .audio import AudioChallenge, normalize_transcript
from .grid import GridChallenge


class SolutionError(ValueError):
    """Malformed solution or solution/challenge variant mismatch."""


@dataclass(frozen=True)
class GridSolution:
    indices: frozenset[int]

    @staticmethod
    def of(indices) -> "GridSolution":
        items = list(indices)
        if len(items) != len(set(items)):
            raise SolutionError("duplicate grid indices in solution")
        for i in items:
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i <= 8:
                raise SolutionError(f"grid index out of range: {i!r}")
        return GridSolution(frozenset(items))


@dataclass(frozen=True)
class AudioSolution:
    transcript: str

    @staticmethod
    def of(transcript: str) -> "AudioSolution":
        if not isinstance(transcript, str) or not normalize_transcript(transcript):
            raise SolutionError("transcript empty after normalization")
        return AudioSolution(transcript)


Solution = Union[GridSolution, AudioSolution]


@dataclass(frozen=True)
class VerificationResult:
    correct: bool
    elapsed_s: float
    within_limit: bool


def verify_solution(
    challenge: GridChallenge | AudioChallenge,
    solution: Solution,
    elapsed_s: float,
) -> VerificationResult:
    """Pure check: grid answers must equal the target set exactly, audio
    answers must normalize to the expected transcript."""
    if elapsed_s < 0:
        raise SolutionError("elapsed_s must be >= 0")

    if isinstance(challenge, GridChallenge):
        if not isinstance(solution, GridSolution):
            raise SolutionError("grid challenge requires a grid solution")
        correct = solution.indices == challenge.target_indices
    elif isinstance(challenge, AudioChallenge):
        if not isinstance(solution, AudioSolution):
            raise SolutionError("audio challenge requires an audio solution")
        correct = normalize_transcript(solution.transcript) == challenge.expected_transcript
    else:
        raise SolutionError(f"unknown challenge type {type(challenge).__name__}")

    return VerificationResult(
        correct=correct,
        elapsed_s=elapsed_s,
        within_limit=elapsed_s <= challenge.time_limit_s,
    )
