"""Procedural challenge generation, rendering, and verification."""

from .audio import (
    DIGIT_WORDS,
    WORDLIST,
    AudioChallenge,
    generate_audio_challenge,
    normalize_transcript,
    tone_pair_hz,
)
from .difficulty import MAX_LEVEL, MIN_LEVEL, DifficultyLevel, DifficultyParams, difficulty_params
from .grid import (
    CATEGORIES,
    DEFAULT_TIME_LIMIT_S,
    Distortion,
    GridChallenge,
    TileCategory,
    TileSpec,
    generate_grid_challenge,
)
from .synth import SAMPLE_RATE, decode_wav, encode_wav, render_audio, render_waveform
from .tiles import from_pgm, render_tile, to_pgm, to_png
from .verify import (
    AudioSolution,
    GridSolution,
    Solution,
    SolutionError,
    VerificationResult,
    verify_solution,
)

__all__ = [
    "AudioChallenge",
    "AudioSolution",
    "CATEGORIES",
    "DEFAULT_TIME_LIMIT_S",
    "DIGIT_WORDS",
    "DifficultyLevel",
    "DifficultyParams",
    "Distortion",
    "GridChallenge",
    "GridSolution",
    "MAX_LEVEL",
    "MIN_LEVEL",
    "SAMPLE_RATE",
    "Solution",
    "SolutionError",
    "TileCategory",
    "TileSpec",
    "VerificationResult",
    "WORDLIST",
    "decode_wav",
    "difficulty_params",
    "encode_wav",
    "from_pgm",
    "generate_audio_challenge",
    "generate_grid_challenge",
    "normalize_transcript",
    "render_audio",
    "render_tile",
    "render_waveform",
    "to_pgm",
    "to_png",
    "tone_pair_hz",
    "verify_solution",
]
