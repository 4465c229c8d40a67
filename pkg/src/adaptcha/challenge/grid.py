"""3x3 grid challenge: pick every tile of the target category.

Generation is fully deterministic in (seed, level); only the nonce and
issue timestamp come from the serving context.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..rng import SplitMix64, derive
from .difficulty import DifficultyLevel, DifficultyParams, difficulty_params

GRID_SIZE = 9
TARGET_COUNTS = (3, 4, 5)
DEFAULT_TIME_LIMIT_S = 30.0


class TileCategory(enum.Enum):
    CIRCLE = "circle"
    TRIANGLE = "triangle"
    SQUARE = "square"
    STRIPES = "stripes"
    CHECKER = "checker"
    CROSS = "cross"


CATEGORIES = tuple(TileCategory)


@dataclass(frozen=True)
class Distortion:
    """The visual subset of DifficultyParams applied to a single tile."""

    noise_sigma: float
    occlusion_fraction: float
    warp_amplitude: float

    @staticmethod
    def from_params(p: DifficultyParams) -> "Distortion":
        return Distortion(p.noise_sigma, p.occlusion_fraction, p.warp_amplitude)

    @staticmethod
    def none() -> "Distortion":
        return Distortion(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TileSpec:
    """Everything needed to render one tile bitmap, bit-reproducibly."""

    category: TileCategory
    seed: int
    distortion: Distortion


@dataclass
class GridChallenge:
    challenge_id: str
    tiles: list[TileSpec]                 # exactly 9, row-major 3x3
    target_category: TileCategory
    target_indices: frozenset[int]
    difficulty: DifficultyLevel
    issued_at: float = 0.0
    time_limit_s: float = DEFAULT_TIME_LIMIT_S
    params: DifficultyParams = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.params is None:
            self.params = difficulty_params(self.difficulty)
        if len(self.tiles) != GRID_SIZE:
            raise ValueError(f"grid must have {GRID_SIZE} tiles, got {len(self.tiles)}")
        if len(self.target_indices) not in TARGET_COUNTS:
            raise ValueError(f"target count must be in {TARGET_COUNTS}")
        for i, tile in enumerate(self.tiles):
            is_target = i in self.target_indices
            if is_target != (tile.category == self.target_category):
                raise ValueError(f"tile {i} category inconsistent with target set")


def generate_grid_challenge(
    seed: int,
    level: DifficultyLevel,
    *,
    challenge_id: str = "",
    issued_at: float = 0.0,
    time_limit_s: float = DEFAULT_TIME_LIMIT_S,
) -> GridChallenge:
    """Deterministic grid challenge from (seed, level).

    Target count is uniform over {3,4,5}; target positions are a
    partial Fisher-Yates sample; decoys draw uniformly from the five
    non-target categories.
    """
    rng = SplitMix64(derive(seed, "grid", level.level))
    params = difficulty_params(level)
    distortion = Distortion.from_params(params)

    count = TARGET_COUNTS[rng.next_below(len(TARGET_COUNTS))]
    target_category = CATEGORIES[rng.next_below(len(CATEGORIES))]
    target_indices = frozenset(rng.sample(GRID_SIZE, count))
    decoy_pool = tuple(c for c in CATEGORIES if c is not target_category)

    tiles = []
    for i in range(GRID_SIZE):
        category = target_category if i in target_indices else decoy_pool[rng.next_below(len(decoy_pool))]
        tiles.append(TileSpec(category=category, seed=rng.next_u64(), distortion=distortion))

    return GridChallenge(
        challenge_id=challenge_id,
        tiles=tiles,
        target_category=target_category,
        target_indices=target_indices,
        difficulty=level,
        issued_at=issued_at,
        time_limit_s=time_limit_s,
        params=params,
    )
