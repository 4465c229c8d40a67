"""Audio challenge: a spoken-token sequence the user must transcribe.

Tokens are digit words ("zero".."nine") plus a fixed 32-word vocabulary
loaded from the versioned wordlist. When paired with a grid challenge,
the first word token is the grid's target category name, which is the
content-level audio-visual synchronization rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from ..rng import SplitMix64, derive
from .difficulty import DifficultyLevel, DifficultyParams, difficulty_params
from .grid import DEFAULT_TIME_LIMIT_S, GridChallenge

DIGIT_WORDS = ("zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine")

_WS = re.compile(r"\s+")


def normalize_transcript(text: str) -> str:
    """Lowercase, trim, collapse internal whitespace. Idempotent."""
    return _WS.sub(" ", text.strip().lower())


def load_wordlist() -> tuple[str, ...]:
    """Vocabulary words in file order ('#' lines are comments)."""
    raw = resources.files("adaptcha.data").joinpath("wordlist.txt").read_text("utf-8")
    words = []
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return tuple(words)


WORDLIST = load_wordlist()

# token id -> token string; digits first, then vocabulary in file order
TOKEN_TABLE = DIGIT_WORDS + WORDLIST
TOKEN_INDEX = {token: i for i, token in enumerate(TOKEN_TABLE)}


def tone_pair_hz(token: str) -> tuple[float, float]:
    """Fixed two-tone signature for a token.

    Low band 420..1978 Hz and high band 2400..3958 Hz at 38 Hz spacing;
    both sit well under the 8 kHz Nyquist limit and the bands never
    overlap, so spectral peak-finding recovers the pair unambiguously.
    """
    i = TOKEN_INDEX[token]
    return 420.0 + 38.0 * i, 2400.0 + 38.0 * i


@dataclass
class AudioChallenge:
    challenge_id: str
    tokens: list[str]
    expected_transcript: str
    difficulty: DifficultyLevel
    waveform_seed: int                    # handle used by the renderer's noise stream
    issued_at: float = 0.0
    time_limit_s: float = DEFAULT_TIME_LIMIT_S
    params: DifficultyParams = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.params is None:
            self.params = difficulty_params(self.difficulty)
        if not any(t in DIGIT_WORDS for t in self.tokens):
            raise ValueError("audio challenge needs at least one digit token")
        if not any(t not in DIGIT_WORDS for t in self.tokens):
            raise ValueError("audio challenge needs at least one word token")
        for t in self.tokens:
            if t not in TOKEN_INDEX:
                raise ValueError(f"unknown token {t!r}")
        if self.expected_transcript != normalize_transcript(" ".join(self.tokens)):
            raise ValueError("expected_transcript inconsistent with tokens")


def generate_audio_challenge(
    seed: int,
    level: DifficultyLevel,
    paired_grid: GridChallenge | None = None,
    *,
    challenge_id: str = "",
    issued_at: float = 0.0,
    time_limit_s: float = DEFAULT_TIME_LIMIT_S,
) -> AudioChallenge:
    """Deterministic token sequence from (seed, level, pairing)."""
    rng = SplitMix64(derive(seed, "audio", level.level))
    params = difficulty_params(level)
    n = params.token_count

    # per-slot digit/word coin, then force at least one of each
    is_digit = [rng.next_below(2) == 0 for _ in range(n)]
    if all(is_digit):
        is_digit[rng.next_below(n)] = False
    elif not any(is_digit):
        is_digit[rng.next_below(n)] = True

    tokens = [
        DIGIT_WORDS[rng.next_below(len(DIGIT_WORDS))]
        if d
        else WORDLIST[rng.next_below(len(WORDLIST))]
        for d in is_digit
    ]

    if paired_grid is not None:
        first_word_slot = is_digit.index(False)
        tokens[first_word_slot] = paired_grid.target_category.value

    return AudioChallenge(
        challenge_id=challenge_id,
        tokens=tokens,
        expected_transcript=normalize_transcript(" ".join(tokens)),
        difficulty=level,
        waveform_seed=derive(seed, "waveform", level.level),
        issued_at=issued_at,
        time_limit_s=time_limit_s,
        params=params,
    )
