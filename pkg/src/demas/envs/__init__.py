"""Environment registry and config parsing.

Environments are registered under stable names and can be configured either
with their typed config dataclasses or with flat mapping keys as they appear
in run-configuration files (ORDER_FIXED_SIZE, TIMESTEP_DURATION, ...).
"""
from __future__ import annotations

from dataclasses import fields
from typing import Any, Mapping

from ..book import Side
from ..errors import ConfigError
from ..kernel import at_time, duration_ns
from ..market import MarketConfig
from .core import StepResult, TradingEnv
from .daily_investor import DailyInvestorConfig, DailyInvestorEnv
from .execution import ExecutionConfig, ExecutionEnv
from .markets import CancelAll, EnvAgent, Noop, OrderCommand, PlaceLimit, PlaceMarket

DAILY_INVESTOR = "markets-daily_investor-v0"
EXECUTION = "markets-execution-v0"

_REGISTRY: dict[str, tuple[type[TradingEnv], type]] = {
    DAILY_INVESTOR: (DailyInvestorEnv, DailyInvestorConfig),
    EXECUTION: (ExecutionEnv, ExecutionConfig),
}

# Flat config-file spellings to dataclass fields, with value adapters.
_KEY_MAP: dict[str, tuple[str, Any]] = {
    "ORDER_FIXED_SIZE": ("order_fixed_size", int),
    "TIMESTEP_DURATION": ("timestep", duration_ns),
    "FIRST_WAKEUP": ("first_wakeup", lambda v: at_time(v) if isinstance(v, str) else int(v)),
    "STARTING_TIME": ("starting_time", lambda v: at_time(v) if isinstance(v, str) else int(v)),
    "STARTING_CASH": ("starting_cash", int),
    "PARENT_ORDER_SIZE": ("parent_order_size", int),
    "DIRECTION": ("direction", lambda v: Side(str(v).upper())),
    "TIME_WINDOW": ("time_window", duration_ns),
    "CHILD_ORDER_SIZE": ("child_order_size", int),
    "PENALTY": ("penalty", int),
    "K": ("k", int),
    "RAW_PENALTY": ("raw_penalty", bool),
}


def env_names() -> list[str]:
    return sorted(_REGISTRY)


def parse_env_config(name: str, mapping: Mapping[str, Any]):
    """Build the env's typed config from flat configuration-file keys."""
    _, config_cls = _lookup(name)
    allowed = {f.name for f in fields(config_cls)}
    kwargs = {}
    for key, value in mapping.items():
        if key not in _KEY_MAP:
            raise ConfigError(f"unknown env config key {key!r}; known keys: {sorted(_KEY_MAP)}")
        field_name, adapt = _KEY_MAP[key]
        if field_name not in allowed:
            raise ConfigError(f"config key {key!r} does not apply to {name}")
        try:
            kwargs[field_name] = adapt(value)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from exc
    return config_cls(**kwargs)


def make(name: str, config=None, market: MarketConfig | None = None) -> TradingEnv:
    """Instantiate a registered environment.

    ``config`` may be the env's typed config dataclass, a flat mapping of
    configuration-file keys, or None for defaults.
    """
    env_cls, config_cls = _lookup(name)
    if config is None:
        typed = None
    elif isinstance(config, config_cls):
        typed = config
    elif isinstance(config, Mapping):
        typed = parse_env_config(name, config)
    else:
        raise ConfigError(f"config must be a {config_cls.__name__} or a mapping, got {type(config).__name__}")
    return env_cls(config=typed, market=market)


def _lookup(name: str) -> tuple[type[TradingEnv], type]:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown environment {name!r}; registered: {env_names()}") from None
