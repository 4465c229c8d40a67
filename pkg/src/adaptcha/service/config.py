"""Service configuration with startup validation."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields

from ..challenge.difficulty import MAX_LEVEL, MIN_LEVEL
from ..rl.qlearning import LearningParams

ASSET_MODES = ("inline", "url", "none")
SEED_MODES = ("entropy", "fixed")
VALID_TILE_SIZES = (32, 64, 128)

DEFAULT_HMAC_KEY_ENV = "ADAPTCHA_HMAC_KEY"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _serving_rl_params() -> LearningParams:
    # serving profile: the shipped policy prior does the steering, so
    # exploration stays at the floor instead of decaying from 1.0
    return LearningParams(alpha=0.1, gamma=0.9, epsilon=0.05, epsilon_decay=1.0, epsilon_floor=0.05)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8131
    initial_level: int = 2
    time_limit_s: float = 30.0
    max_challenges_per_session: int = 5
    rl: LearningParams = field(default_factory=_serving_rl_params)
    rl_enabled: bool = True          # False pins every challenge at initial_level
    model_path: str | None = None    # None -> packaged default classifier
    qtable_path: str | None = None   # None -> packaged default policy table
    journal_path: str | None = None  # None -> in-memory journal only
    seed_mode: str = "entropy"
    seed: int = 0                    # used when seed_mode == "fixed"
    hmac_key: str | None = None      # None -> env DEFAULT_HMAC_KEY_ENV or a fixed dev key
    assets: str = "inline"
    tile_size: int = 64

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not MIN_LEVEL <= self.initial_level <= MAX_LEVEL:
            raise ConfigError(f"initial_level: must be in [{MIN_LEVEL}, {MAX_LEVEL}], got {self.initial_level}")
        if self.time_limit_s <= 0:
            raise ConfigError(f"time_limit_s: must be > 0, got {self.time_limit_s}")
        if self.max_challenges_per_session < 1:
            raise ConfigError(f"max_challenges_per_session: must be >= 1, got {self.max_challenges_per_session}")
        if self.seed_mode not in SEED_MODES:
            raise ConfigError(f"seed_mode: must be one of {SEED_MODES}, got {self.seed_mode!r}")
        if self.assets not in ASSET_MODES:
            raise ConfigError(f"assets: must be one of {ASSET_MODES}, got {self.assets!r}")
        if self.tile_size not in VALID_TILE_SIZES:
            raise ConfigError(f"tile_size: must be one of {VALID_TILE_SIZES}, got {self.tile_size}")
        if not isinstance(self.port, int) or not 0 <= self.port <= 65535:
            raise ConfigError(f"port: must be in [0, 65535], got {self.port!r}")
        if not isinstance(self.rl, LearningParams):
            raise ConfigError("rl: must be a LearningParams object")

    def resolved_hmac_key(self) -> bytes:
        if self.hmac_key:
            return self.hmac_key.encode("utf-8")
        env = os.environ.get(DEFAULT_HMAC_KEY_ENV)
        if env:
            return env.encode("utf-8")
        return b"adaptcha-dev-key"


def config_from_dict(doc: dict) -> ServiceConfig:
    """Build a config from parsed JSON, rejecting unknown fields."""
    if not isinstance(doc, dict):
        raise ConfigError("config: must be a JSON object")
    known = {f.name for f in fields(ServiceConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
    kwargs = dict(doc)
    if "rl" in kwargs:
        rl = kwargs["rl"]
        if not isinstance(rl, dict):
            raise ConfigError("rl: must be an object")
        try:
            kwargs["rl"] = LearningParams(**rl)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"rl: {exc}") from exc
    try:
        return ServiceConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc


def load_config(path: str) -> ServiceConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise ConfigError(f"config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file: invalid JSON: {exc}") from exc
    return config_from_dict(doc)
