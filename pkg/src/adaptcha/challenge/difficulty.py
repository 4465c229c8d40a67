"""Difficulty levels and the per-level hardness parameter table."""

from __future__ import annotations

from dataclasses import dataclass

MIN_LEVEL = 1
MAX_LEVEL = 5


@dataclass(frozen=True, order=True)
class DifficultyLevel:
    """Discrete difficulty in [1, 5]. Out-of-range values are rejected."""

    level: int

    def __post_init__(self):
        if not isinstance(self.level, int) or isinstance(self.level, bool):
            raise ValueError(f"difficulty level must be an int, got {self.level!r}")
        if not MIN_LEVEL <= self.level <= MAX_LEVEL:
            raise ValueError(
                f"difficulty level must be in [{MIN_LEVEL}, {MAX_LEVEL}], got {self.level}"
            )

    @staticmethod
    def clamped(level: int) -> "DifficultyLevel":
        return DifficultyLevel(max(MIN_LEVEL, min(MAX_LEVEL, int(level))))


@dataclass(frozen=True)
class DifficultyParams:
    """Hardness knobs for one level.

    Visual axes (noise_sigma, occlusion_fraction, warp_amplitude) and
    token_count increase strictly with level; audio_snr_db and
    tone_duration_ms decrease strictly, so every axis gets harder.
    """

    noise_sigma: float        # additive gaussian pixel noise, fraction of full scale
    occlusion_fraction: float  # fraction of pixels blanked
    warp_amplitude: float      # sinusoidal row shift, pixels
    audio_snr_db: float        # signal-to-noise ratio over voiced segments
    token_count: int           # spoken tokens per audio challenge
    tone_duration_ms: int      # per-token tone length


def difficulty_params(level: DifficultyLevel) -> DifficultyParams:
    """Fixed monotone mapping from level to hardness parameters."""
    n = level.level - 1
    return DifficultyParams(
        noise_sigma=0.05 + 0.075 * n,
        occlusion_fraction=0.05 * n,
        warp_amplitude=0.5 * n,
        audio_snr_db=20.0 - 4.0 * n,
        token_count=3 + level.level,
        tone_duration_ms=250 - 25 * n,
    )
