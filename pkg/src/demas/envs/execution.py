"""Parent-order execution within a time window via child market/limit orders.

The agent must fill ``parent_order_size`` shares in ``time_window``; each step
it may cross the spread (MARKET), rest a child at the near touch (LIMIT), or
wait (DO NOTHING). Step rewards measure implementation gain against the entry
price; unexecuted quantity is penalized per share when the window closes.

Rewards are kept as integer-cent PNL internally and scaled by the parent size
only on the way out, so episode accounting is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..book import Side
from ..errors import ConfigError, EpisodeSetupError
from ..kernel import at_time, hours, seconds
from ..market import MarketConfig
from .core import TradingEnv
from .features import direction_feature, imbalance, mid_changes, near_touch
from .markets import CancelAll, OrderCommand, PlaceLimit, PlaceMarket

MARKET, DO_NOTHING, LIMIT = 0, 1, 2
IMBALANCE_NEAR_LEVELS = 5  # depth of the near-book imbalance feature


@dataclass
class ExecutionConfig:
    parent_order_size: int = 20_000
    direction: Side = Side.BUY
    time_window: int = hours(4)
    child_order_size: int = 50
    penalty: int = 100  # cents per unexecuted share
    timestep: int = seconds(10)
    starting_time: int = at_time("09:35")
    k: int = 3
    raw_penalty: bool = False  # report the terminal update unscaled

    def __post_init__(self) -> None:
        if self.parent_order_size <= 0 or self.child_order_size <= 0:
            raise ConfigError("order sizes must be positive")
        if self.child_order_size > self.parent_order_size:
            raise ConfigError("child order size cannot exceed the parent order")
        if self.time_window <= 0:
            raise ConfigError("time window must be positive")
        if self.penalty < 0:
            raise ConfigError("penalty must be non-negative")
        if self.k < 1:
            raise ConfigError("k must be at least 1")

    @property
    def numside(self) -> int:
        return 1 if self.direction is Side.BUY else -1


class ExecutionEnv(TradingEnv):
    """State (holdingsPct, timePct, differencePct, imbalance5, imbalanceAll,
    priceImpact, spread, directionFeature, k mid changes)."""

    n_actions = 3

    def __init__(self, config: ExecutionConfig | None = None, market: MarketConfig | None = None):
        self.config = config or ExecutionConfig()
        super().__init__(
            market=market,
            first_wakeup=self.config.starting_time,
            timestep=self.config.timestep,
            history=self.config.k + 1,
        )
        if self.config.starting_time + self.config.time_window > self.market.hours.close:
            raise ConfigError("execution window extends past the market close")
        self.state_length = 8 + self.config.k
        self.entry_price: int | None = None
        self.executed_qty = 0
        self._step_pnl_cents = 0
        self._total_pnl_cents = 0

    # -- ledger ----------------------------------------------------------
    def on_episode_start(self, raw: dict) -> None:
        if raw["mid"] is None:
            raise EpisodeSetupError("no two-sided market at the execution start time")
        self.entry_price = int(round(raw["mid"]))
        self.executed_qty = 0
        self._step_pnl_cents = 0
        self._total_pnl_cents = 0

    def absorb(self, raw: dict) -> None:
        pnl = 0
        for fill in raw["fills"]:
            self.executed_qty += fill["qty"]
            pnl += self.config.numside * (self.entry_price - fill["price"]) * fill["qty"]
        self._step_pnl_cents = pnl
        self._total_pnl_cents += pnl

    # -- mdp pieces ------------------------------------------------------------
    def observation(self, raw: dict) -> np.ndarray:
        cfg = self.config
        holdings_pct = self.executed_qty / cfg.parent_order_size
        time_pct = (raw["time"] - cfg.starting_time) / cfg.time_window
        price_impact = float(raw["mid"] - self.entry_price) if raw["mid"] is not None else 0.0
        spread = float(raw["spread"]) if raw["spread"] is not None else 0.0
        state = [
            holdings_pct,
            time_pct,
            holdings_pct - time_pct,
            imbalance(raw["bids"], raw["asks"], IMBALANCE_NEAR_LEVELS),
            imbalance(raw["bids"], raw["asks"], None),
            price_impact,
            spread,
            direction_feature(raw["mid"], raw["last_transaction"]),
            *mid_changes(raw["mid_history"], cfg.k),
        ]
        return np.asarray(state, dtype=np.float64)

    def step_reward(self, prev_raw: dict, raw: dict) -> float:
        return self._step_pnl_cents / self.config.parent_order_size

    def is_done(self, raw: dict) -> bool:
        cfg = self.config
        return raw["time"] >= cfg.starting_time + cfg.time_window or self.executed_qty >= cfg.parent_order_size

    def terminal_update(self, raw: dict) -> float:
        cfg = self.config
        shortfall = cfg.parent_order_size - self.executed_qty
        if shortfall <= 0:
            return 0.0
        penalty = -abs(cfg.penalty * shortfall)
        return float(penalty) if cfg.raw_penalty else penalty / cfg.parent_order_size

    def action_commands(self, action: int, raw: dict) -> list[OrderCommand]:
        cfg = self.config
        remaining = cfg.parent_order_size - self.executed_qty
        qty = min(cfg.child_order_size, remaining)
        if action == DO_NOTHING or qty <= 0:
            return []
        if action == MARKET:
            return [CancelAll(), PlaceMarket(cfg.direction, qty)]
        touch = near_touch(cfg.direction, raw["best_bid"], raw["best_ask"])
        if touch is None:
            return []  # no passive side to join; treated as DO NOTHING
        return [CancelAll(), PlaceLimit(cfg.direction, qty, touch)]

    def step_info(self, raw: dict) -> dict:
        return {
            "time": raw["time"],
            "executed_qty": self.executed_qty,
            "step_pnl_cents": self._step_pnl_cents,
            "total_pnl_cents": self._total_pnl_cents,
            "entry_price": self.entry_price,
        }
