"""Shared market templates for the environment tests.

The quiet market has no background traders, so every number an env produces
is exactly predictable from the seeded ladder. The busy market is a scaled
down population on a short session, fast enough for sequencing tests.
"""
from demas.exchange import BookSeedConfig, MarketHours
from demas.kernel import at_time
from demas.market import MarketConfig
from demas.traders import MomentumConfig, NoiseConfig, Population, ValueConfig


def quiet_market(close="10:00", qty_per_level=100_000):
    return MarketConfig(
        hours=MarketHours(open=at_time("09:30"), close=at_time(close)),
        seed_book=BookSeedConfig(qty_per_level=qty_per_level),
        population=Population(
            noise=NoiseConfig(count=0),
            value=ValueConfig(count=0),
            momentum=MomentumConfig(count=0),
        ),
        validate=True,
    )


def busy_market(close="10:00"):
    return MarketConfig(
        hours=MarketHours(open=at_time("09:30"), close=at_time(close)),
        seed_book=BookSeedConfig(levels=20, qty_per_level=5_000, tick=10),
        population=Population(
            noise=NoiseConfig(count=10),
            value=ValueConfig(count=2, size_bounds=(500, 2_000)),
            momentum=MomentumConfig(count=1, short_window=5, long_window=10),
        ),
        validate=True,
    )
