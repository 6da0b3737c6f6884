"""
The daily investor task
=======================

An agent wakes once a minute inside a live market and chooses BUY, HOLD or
SELL for a fixed clip of shares. Observations summarize the book (imbalance,
spread, direction, recent mid changes) plus the agent's own holdings; the
reward per step is the change in marked-to-market value, in cents.

Runs a short session so the episode finishes in seconds. HOLD first shows the
no-trading baseline, then a scripted round trip shows that crossing the
spread is exactly what a round trip costs.
"""
from demas.envs.daily_investor import BUY, HOLD, SELL, DailyInvestorConfig, DailyInvestorEnv
from demas.exchange import BookSeedConfig, MarketHours
from demas.kernel import at_time, fmt_time
from demas.market import MarketConfig
from demas.traders import MomentumConfig, NoiseConfig, Population, ValueConfig

market = MarketConfig(
    hours=MarketHours(open=at_time("09:30"), close=at_time("10:00")),
    seed_book=BookSeedConfig(levels=20, qty_per_level=5_000, tick=10),
    population=Population(
        noise=NoiseConfig(count=10),
        value=ValueConfig(count=2, size_bounds=(500, 2_000)),
        momentum=MomentumConfig(count=1, short_window=5, long_window=10),
    ),
)
env = DailyInvestorEnv(DailyInvestorConfig(order_fixed_size=100), market)
print("state: [holdings, imbalance, spread, direction, last",
      env.config.k, "mid changes]")

env.seed(5)
state = env.reset()
print(f"\ninitial state: {state}")

# holding all day: rewards move only with the market value of what you hold,
# and holdings start at zero, so every reward is zero
total = 0.0
done = False
while not done:
    state, reward, done, info = env.step(HOLD)
    total += reward
print(f"\nHOLD every step: total reward {total}, final cash {info['cash']}")

# a buy marks the position at its own fill price, so the instant reward is 0;
# the cost shows up when the position is unwound back across the spread
env.reset()
state, r_buy, _, info = env.step(BUY)
print(f"\nBUY 100: reward {r_buy}, holdings {info['holdings']}")
state, r_sell, _, info = env.step(SELL)
print(f"SELL 100: reward {r_sell}, holdings {info['holdings']}")
print(f"round trip cost: {-(r_buy + r_sell)} cents "
      f"(quoted spread was {state[2]:.0f} at the end)")

# the tape of the episode's market is available after the episode ends
done = False
while not done:
    _, _, done, info = env.step(HOLD)
tape = env.last_run_log.trade_tape()
print(f"\nbackground market printed {len(tape)} trades; "
      f"last at {fmt_time(tape[-1][0])}")
