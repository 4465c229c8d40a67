"""Session lifecycle service: engine, journal, config, HTTP front end."""

from .config import ConfigError, ServiceConfig, config_from_dict, load_config
from .core import (
    ApiError,
    CaptchaService,
    Clock,
    NonceSource,
    SessionRecord,
    SessionState,
    VirtualClock,
    iso_utc,
    make_pass_token,
    verify_pass_token,
)
from .http import ServiceServer
from .journal import (
    Journal,
    JournalError,
    ReplayedSession,
    canonicalize,
    journal_replay,
    parse_journal_lines,
    read_journal,
    replay_events,
)

__all__ = [
    "ApiError",
    "CaptchaService",
    "Clock",
    "ConfigError",
    "Journal",
    "JournalError",
    "NonceSource",
    "ReplayedSession",
    "ServiceConfig",
    "ServiceServer",
    "SessionRecord",
    "SessionState",
    "VirtualClock",
    "canonicalize",
    "config_from_dict",
    "iso_utc",
    "journal_replay",
    "load_config",
    "make_pass_token",
    "parse_journal_lines",
    "read_journal",
    "replay_events",
    "verify_pass_token",
]
