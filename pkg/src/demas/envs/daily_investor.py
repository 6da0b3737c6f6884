"""Minute-frequency investor maximizing end-of-day marked-to-market value.

Actions are fixed-size market orders (BUY / HOLD / SELL); the reward is the
one-step change of cash plus holdings valued at the last transaction price.
The episode runs from the first wakeup to the market close.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..book import Side
from ..errors import ConfigError
from ..kernel import at_time, minutes
from ..market import MarketConfig
from .core import TradingEnv
from .features import direction_feature, imbalance, mid_changes
from .markets import Noop, OrderCommand, PlaceMarket

log = logging.getLogger(__name__)

BUY, HOLD, SELL = 0, 1, 2
IMBALANCE_LEVELS = 3  # book depth used for the imbalance feature


@dataclass
class DailyInvestorConfig:
    order_fixed_size: int = 100
    timestep: int = minutes(1)
    first_wakeup: int = at_time("09:35")
    k: int = 3
    starting_cash: int = 10_000_000

    def __post_init__(self) -> None:
        if self.order_fixed_size <= 0:
            raise ConfigError("order_fixed_size must be positive")
        if self.k < 1:
            raise ConfigError("k must be at least 1")


def marked_to_market(raw: dict) -> int:
    """Cash plus holdings valued at the last transaction price, integer cents.

    Before any market trade the position is valued at zero; harmless in
    practice because the position is also zero until the agent trades.
    """
    last = raw["last_transaction"]
    if last is None:
        if raw["holdings"]:
            log.debug("marking %d shares with no transaction price yet", raw["holdings"])
        return raw["cash"]
    return raw["cash"] + raw["holdings"] * last


class DailyInvestorEnv(TradingEnv):
    """State (holdings, imbalance, spread, direction feature, k mid changes)."""

    n_actions = 3

    def __init__(self, config: DailyInvestorConfig | None = None, market: MarketConfig | None = None):
        self.config = config or DailyInvestorConfig()
        super().__init__(
            market=market,
            first_wakeup=self.config.first_wakeup,
            timestep=self.config.timestep,
            history=self.config.k + 1,
            starting_cash=self.config.starting_cash,
        )
        self.state_length = 4 + self.config.k

    def observation(self, raw: dict) -> np.ndarray:
        spread = float(raw["spread"]) if raw["spread"] is not None else 0.0
        state = [
            float(raw["holdings"]),
            imbalance(raw["bids"], raw["asks"], IMBALANCE_LEVELS),
            spread,
            direction_feature(raw["mid"], raw["last_transaction"]),
            *mid_changes(raw["mid_history"], self.config.k),
        ]
        return np.asarray(state, dtype=np.float64)

    def step_reward(self, prev_raw: dict, raw: dict) -> float:
        return float(marked_to_market(raw) - marked_to_market(prev_raw))

    def is_done(self, raw: dict) -> bool:
        return raw["time"] >= self.market.hours.close

    def action_commands(self, action: int, raw: dict) -> list[OrderCommand]:
        size = self.config.order_fixed_size
        if action == BUY:
            return [PlaceMarket(Side.BUY, size)]
        if action == HOLD:
            return [Noop()]
        return [PlaceMarket(Side.SELL, size)]

    def step_info(self, raw: dict) -> dict:
        return {
            "time": raw["time"],
            "cash": raw["cash"],
            "holdings": raw["holdings"],
            "marked_to_market": marked_to_market(raw),
        }
