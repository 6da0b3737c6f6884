"""
A full simulated trading day
============================

Runs the default market: one exchange, 100 noise traders, 10 value traders
and 5 momentum traders, 09:30 to 16:00. Prints tape summary statistics and a
coarse intraday price path. The whole day is a single deterministic function
of (config, seed).
"""
import numpy as np

from demas.kernel import fmt_time
from demas.market import MarketConfig, run_market_day

config = MarketConfig()
print(f"population: {config.population.total} background agents")

log = run_market_day(config, seed=2024)
tape = log.trade_tape()
prices = np.array([price for _, price, _, _, _ in tape])
qtys = np.array([qty for _, _, qty, _, _ in tape])

print(f"trades: {len(tape)}, volume: {qtys.sum()} shares")
print(f"price range: {prices.min()} .. {prices.max()} cents, close {prices[-1]}")

# sample the last trade before each half hour mark for a rough path
print("\nintraday path (last trade at or before each mark):")
marks = np.arange(tape[0][0], tape[-1][0] + 1, 30 * 60 * 1_000_000_000)
times = np.array([t for t, *_ in tape])
for mark in marks:
    idx = np.searchsorted(times, mark, side="right") - 1
    if idx >= 0:
        print(f"  {fmt_time(int(mark))}  {prices[idx]}")

# rerun with the same seed: the tape is identical, byte for byte
again = run_market_day(config, seed=2024)
print(f"\nrerun reproduces the tape exactly: {again.trade_tape() == tape}")
