"""Deterministic discrete-event multi-agent market simulator.

Agents exchange timestamped messages through an interruptible kernel; a
price-time-priority exchange and a configurable background population form a
simulated market, exposed to learning code through reset/step environments.
"""
from .book import OrderBook, Side
from .envs import DAILY_INVESTOR, EXECUTION, env_names, make
from .errors import (
    ConfigError,
    EpisodeSetupError,
    RoutingError,
    SchedulingError,
    SimError,
    StateError,
    UsageError,
)
from .exchange import BookSeedConfig, ExchangeAgent, MarketHours
from .kernel import (
    Agent,
    Kernel,
    KernelConfig,
    LatencyModel,
    Message,
    RunLog,
    RunResult,
    RunStatus,
    WAKEUP,
    at_time,
    fmt_time,
    hours,
    minutes,
    seconds,
)
from .market import MarketConfig, build_market_agents, run_market_day
from .traders import (
    FundamentalConfig,
    FundamentalProcess,
    MomentumConfig,
    NoiseConfig,
    Population,
    ValueConfig,
)

__version__ = "0.1.0"
