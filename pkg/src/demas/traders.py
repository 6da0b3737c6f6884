"""Background trading population: noise, value and momentum agents.

These non-learning participants generate the order flow an experimental agent
trades against. Value agents share one mean-reverting fundamental price path
and quote passively at the near touch; noise agents send random market orders
on an exponential clock; momentum agents chase moving-average crossovers of
the mid price sampled at their own wakeups.

All sizes, rates and the fundamental parameters are configurable; the defaults
produce a liquid desk-scale market that stays two-sided over a full day.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .book import Side
from .errors import ConfigError
from .exchange import (
    CancelRequest,
    LimitOrderRequest,
    MarketHours,
    MarketOrderRequest,
    OrderAccepted,
    OrderRejected,
    StatsQuery,
    StatsReply,
)
from .kernel import Agent, seconds


# -- shared fundamental -------------------------------------------------------

@dataclass(slots=True)
class FundamentalConfig:
    mean: int = 10_000  # cents
    kappa: float = 1.67e-4  # mean reversion per step
    sigma: float = 5.0  # per-step shock, cents
    step_nanos: int = seconds(1)

    def __post_init__(self) -> None:
        if not 0 < self.kappa <= 1:
            raise ConfigError(f"kappa must be in (0, 1], got {self.kappa}")
        if self.sigma < 0 or self.mean <= 0 or self.step_nanos <= 0:
            raise ConfigError("fundamental needs positive mean and step and non-negative sigma")


def mean_revert_step(prev: float, mean: float, kappa: float, sigma: float, shock: float) -> float:
    """One step of r_j = r_{j-1} + kappa * (mean - r_{j-1}) + sigma * shock, floored at 1 cent."""
    return max(prev + kappa * (mean - prev) + sigma * shock, 1.0)


class FundamentalProcess:
    """Lazily sampled mean-reverting path, shared by all value agents.

    Applies :func:`mean_revert_step` with standard normal shocks on a fixed
    step grid, starting from the mean. Indexed by step number since midnight,
    so the value at a time depends only on the seed, never on who asks first.
    """

    def __init__(self, config: FundamentalConfig, seed_seq: np.random.SeedSequence):
        self.config = config
        self._rng = np.random.default_rng(seed_seq)
        self._path = [float(config.mean)]

    def value_at(self, t: int) -> float:
        j = t // self.config.step_nanos
        cfg = self.config
        path = self._path
        while len(path) <= j:
            path.append(
                mean_revert_step(path[-1], cfg.mean, cfg.kappa, cfg.sigma, self._rng.standard_normal())
            )
        return path[j]


# -- configs -------------------------------------------------------------------

@dataclass(slots=True)
class NoiseConfig:
    count: int = 100
    mean_wake: int = seconds(10)  # exponential inter-arrival
    size_bounds: tuple[int, int] = (1, 10)

    def __post_init__(self) -> None:
        _check_common(self.count, self.mean_wake, self.size_bounds)


@dataclass(slots=True)
class ValueConfig:
    count: int = 10
    mean_wake: int = seconds(10)
    # Large quotes: the handful of value agents are the liquidity anchors
    # keeping the touch alive against the steady market-order noise flow.
    size_bounds: tuple[int, int] = (2_000, 10_000)
    obs_noise: float = 10.0  # std of the fundamental observation error, cents

    def __post_init__(self) -> None:
        _check_common(self.count, self.mean_wake, self.size_bounds)
        if self.obs_noise < 0:
            raise ConfigError("obs_noise must be non-negative")


@dataclass(slots=True)
class MomentumConfig:
    count: int = 5
    mean_wake: int = seconds(60)
    size: int = 20
    short_window: int = 20
    long_window: int = 50

    def __post_init__(self) -> None:
        _check_common(self.count, self.mean_wake, (self.size, self.size))
        if not 0 < self.short_window < self.long_window:
            raise ConfigError("need 0 < short_window < long_window")


def _check_common(count: int, mean_wake: int, size_bounds: tuple[int, int]) -> None:
    if count < 0:
        raise ConfigError("agent count must be non-negative")
    if mean_wake <= 0:
        raise ConfigError("mean_wake must be positive")
    lo, hi = size_bounds
    if not 0 < lo <= hi:
        raise ConfigError(f"bad size bounds ({lo}, {hi})")


@dataclass(slots=True)
class Population:
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    value: ValueConfig = field(default_factory=ValueConfig)
    momentum: MomentumConfig = field(default_factory=MomentumConfig)

    @property
    def total(self) -> int:
        return self.noise.count + self.value.count + self.momentum.count


# -- agents -------------------------------------------------------------------

class BackgroundTrader(Agent):
    """Common wake/track plumbing for the background population."""

    def __init__(self, exchange_id: int, hours: MarketHours, mean_wake: int, name: str):
        super().__init__(name=name)
        self.exchange_id = exchange_id
        self.hours = hours
        self.mean_wake = mean_wake

    def kernel_starting(self, now: int) -> None:
        # First wakeup lands at a random offset past the open so the
        # population arrives spread out rather than in one burst.
        first = max(now, self.hours.open) + self._gap()
        self.set_wakeup(first)

    def _gap(self) -> int:
        return int(self.rng.exponential(self.mean_wake)) + 1

    def _reschedule(self, now: int) -> bool:
        """Schedule the next wakeup; False when the day is over."""
        nxt = now + self._gap()
        if nxt >= self.hours.close:
            return False
        self.set_wakeup(nxt)
        return True


class NoiseTrader(BackgroundTrader):
    """Sends a market order of random side and size on an exponential clock."""

    def __init__(self, exchange_id: int, hours: MarketHours, config: NoiseConfig):
        super().__init__(exchange_id, hours, config.mean_wake, "noise")
        self.config = config

    def wakeup(self, now: int) -> None:
        self._reschedule(now)
        if not self.hours.is_open(now):
            return
        side = Side.BUY if self.rng.integers(0, 2) == 0 else Side.SELL
        lo, hi = self.config.size_bounds
        qty = int(self.rng.integers(lo, hi + 1))
        self.send(self.exchange_id, MarketOrderRequest(side, qty))


class ValueTrader(BackgroundTrader):
    """Quotes passively on the side its fundamental observation favors.

    Each wakeup asks the exchange for book stats; on the reply it cancels its
    previous order and joins the near touch: a bid when the observed
    fundamental exceeds the mid, an ask otherwise (ties sell). Holds when the
    book is one-sided. At most one resting order ever exists per agent.
    """

    def __init__(
        self,
        exchange_id: int,
        hours: MarketHours,
        config: ValueConfig,
        fundamental: FundamentalProcess,
    ):
        super().__init__(exchange_id, hours, config.mean_wake, "value")
        self.config = config
        self.fundamental = fundamental
        self._live_order: int | None = None
        self._awaiting_ack = False

    def wakeup(self, now: int) -> None:
        self._reschedule(now)
        if not self.hours.is_open(now) or self._awaiting_ack:
            return
        self.send(self.exchange_id, StatsQuery())

    def receive_message(self, now: int, sender: int, payload) -> None:
        if isinstance(payload, StatsReply):
            self._quote(now, payload)
        elif isinstance(payload, OrderAccepted):
            self._live_order = payload.order_id
            self._awaiting_ack = False
        elif isinstance(payload, OrderRejected):
            # Typically a quote that arrived after the close; resume quoting.
            self._awaiting_ack = False

    def _quote(self, now: int, stats: StatsReply) -> None:
        if stats.best_bid is None or stats.best_ask is None:
            return
        if not self.hours.is_open(now):
            return
        obs = self.fundamental.value_at(now) + self.config.obs_noise * self.rng.standard_normal()
        mid = (stats.best_bid + stats.best_ask) / 2
        if obs > mid:
            side, price = Side.BUY, stats.best_bid
        else:
            side, price = Side.SELL, stats.best_ask
        lo, hi = self.config.size_bounds
        qty = int(self.rng.integers(lo, hi + 1))
        if self._live_order is not None:
            self.send(self.exchange_id, CancelRequest(self._live_order))
            self._live_order = None
        self.send(self.exchange_id, LimitOrderRequest(side, qty, price))
        self._awaiting_ack = True


class MomentumTrader(BackgroundTrader):
    """Market-buys when the short mid average clears the long one, sells when below."""

    def __init__(self, exchange_id: int, hours: MarketHours, config: MomentumConfig):
        super().__init__(exchange_id, hours, config.mean_wake, "momentum")
        self.config = config
        self.mids: list[float] = []

    def wakeup(self, now: int) -> None:
        self._reschedule(now)
        if not self.hours.is_open(now):
            return
        self.send(self.exchange_id, StatsQuery())

    def receive_message(self, now: int, sender: int, payload) -> None:
        if not isinstance(payload, StatsReply):
            return
        if payload.best_bid is None or payload.best_ask is None:
            return
        self.mids.append((payload.best_bid + payload.best_ask) / 2)
        cfg = self.config
        if len(self.mids) < cfg.long_window:
            return
        short_avg = sum(self.mids[-cfg.short_window:]) / cfg.short_window
        long_avg = sum(self.mids[-cfg.long_window:]) / cfg.long_window
        if short_avg == long_avg or not self.hours.is_open(now):
            return
        side = Side.BUY if short_avg > long_avg else Side.SELL
        self.send(self.exchange_id, MarketOrderRequest(side, cfg.size))


def build_background(
    population: Population,
    exchange_id: int,
    hours: MarketHours,
    fundamental: FundamentalProcess,
) -> list[Agent]:
    """The full population in a fixed roster order: noise, value, momentum."""
    agents: list[Agent] = []
    for _ in range(population.noise.count):
        agents.append(NoiseTrader(exchange_id, hours, population.noise))
    for _ in range(population.value.count):
        agents.append(ValueTrader(exchange_id, hours, population.value, fundamental))
    for _ in range(population.momentum.count):
        agents.append(MomentumTrader(exchange_id, hours, population.momentum))
    return agents
