"""Standard single-instrument market assembly: one exchange plus background flow.

The defaults aim for a liquid desk-scale market that stays two-sided over a
full trading day: a wide pre-seeded ladder covers the fundamental's plausible
wander range, value agents keep the touch replenished, and noise flow walks
the touch along the ladder so the mid can track the fundamental.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exchange import BookSeedConfig, ExchangeAgent, MarketHours
from .kernel import Agent, Kernel, KernelConfig, LatencyModel, RunLog, minutes
from .traders import FundamentalConfig, FundamentalProcess, Population, build_background


def day_seed_book() -> BookSeedConfig:
    """Ladder wide and deep enough to backstop a day of one-sided stretches."""
    return BookSeedConfig(center=10_000, half_spread=5, tick=20, levels=40, qty_per_level=30_000)


@dataclass
class MarketConfig:
    hours: MarketHours = field(default_factory=MarketHours)
    seed_book: BookSeedConfig = field(default_factory=day_seed_book)
    fundamental: FundamentalConfig = field(default_factory=FundamentalConfig)
    population: Population = field(default_factory=Population)
    latency: LatencyModel = field(default_factory=LatencyModel)
    validate: bool = False


def build_market_agents(config: MarketConfig, seed: int) -> list[Agent]:
    """Roster with the exchange at index 0 followed by the background population.

    The exchange must stay at index 0: traders address it by that id.
    """
    fundamental = FundamentalProcess(config.fundamental, np.random.SeedSequence([seed, 1]))
    exchange = ExchangeAgent(hours=config.hours, seed_book=config.seed_book, validate=config.validate)
    background = build_background(config.population, 0, config.hours, fundamental)
    return [exchange, *background]


def run_market_day(
    config: MarketConfig, seed: int, *, start: int | None = None, end: int | None = None
) -> RunLog:
    """One uninterrupted background-only session; returns the collected logs."""
    start = config.hours.open - minutes(2) if start is None else start
    end = config.hours.close + minutes(2) if end is None else end
    kernel_cfg = KernelConfig(start_time=start, end_time=end, seed=seed, latency=config.latency)
    kernel = Kernel(kernel_cfg, build_market_agents(config, seed))
    kernel.run()
    return kernel.terminate()
