"""
Tabular Q-learning on the daily investor task
=============================================

Trains the built-in learner on a 30-minute market and compares it to a
uniform random policy. The state discretizer and epsilon schedule are the
same defaults the command line `train` subcommand uses.

Takes about a minute.
"""
import numpy as np

from demas.envs.daily_investor import DailyInvestorConfig, DailyInvestorEnv
from demas.exchange import BookSeedConfig, MarketHours
from demas.kernel import at_time
from demas.market import MarketConfig
from demas.qlearn import EpsilonSchedule, default_spec, run_policy, train_policy
from demas.traders import MomentumConfig, NoiseConfig, Population, ValueConfig


def make_env():
    market = MarketConfig(
        hours=MarketHours(open=at_time("09:30"), close=at_time("10:00")),
        seed_book=BookSeedConfig(levels=20, qty_per_level=5_000, tick=10),
        population=Population(
            noise=NoiseConfig(count=10),
            value=ValueConfig(count=2, size_bounds=(500, 2_000)),
            momentum=MomentumConfig(count=1, short_window=5, long_window=10),
        ),
    )
    return DailyInvestorEnv(DailyInvestorConfig(order_fixed_size=50), market)


SEED = 3

rng = np.random.default_rng(SEED)
random_returns = run_policy(make_env(), lambda s: int(rng.integers(0, 3)), episodes=50, seed=SEED)
print(f"random policy, 50 episodes: mean return {np.mean(random_returns):.0f} cents")

spec = default_spec(make_env(), learning_rate=0.2, epsilon=EpsilonSchedule(1.0, 0.02))
result = train_policy(make_env(), spec, episodes=300, seed=SEED)

# learning curve, 50-episode buckets; epsilon anneals linearly over training
print("\ntraining (mean return per 50-episode bucket):")
for i in range(0, 300, 50):
    bucket = result.returns[i : i + 50]
    eps = result.epsilons[i]
    print(f"  episodes {i:3d}-{i + 49:3d}: {np.mean(bucket):8.0f}   (epsilon {eps:.2f})")

# the trained table can drive a pure greedy policy on fresh episodes
greedy_returns = run_policy(make_env(), result.greedy_action, episodes=50, seed=SEED + 1)
print(f"\ngreedy policy from the learned table, 50 fresh episodes: "
      f"mean return {np.mean(greedy_returns):.0f} cents")
print(f"states visited during training: {len(result.learner.greedy_table())}")
