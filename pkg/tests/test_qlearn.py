"""Discretizer arithmetic, epsilon decay, Q-update fixed points."""
import numpy as np
import pytest

from env_helpers import quiet_market
from demas.envs.daily_investor import DailyInvestorConfig, DailyInvestorEnv
from demas.envs.execution import ExecutionConfig, ExecutionEnv
from demas.errors import ConfigError
from demas.kernel import at_time, minutes, seconds
from demas.qlearn import (
    Discretizer,
    EpsilonSchedule,
    QLearner,
    QLearnerSpec,
    default_spec,
    run_policy,
    train_policy,
)


def daily_env(**overrides):
    cfg = DailyInvestorConfig(**overrides)
    return DailyInvestorEnv(cfg, quiet_market())


# -- discretizer ----------------------------------------------------------

def test_single_component_binning():
    d = Discretizer([4], [0.0], [1.0])
    assert [d.index([x]) for x in (0.0, 0.24, 0.26, 0.5, 0.74, 0.99)] == [0, 0, 1, 2, 2, 3]


def test_values_outside_range_clip_to_edge_bins():
    d = Discretizer([4], [0.0], [1.0])
    assert d.index([-100.0]) == 0
    assert d.index([100.0]) == 3
    assert d.index([1.0]) == 3  # the top edge belongs to the last bin


def test_mixed_radix_indexing_is_injective():
    d = Discretizer([3, 2, 4], [0.0, 0.0, 0.0], [3.0, 2.0, 4.0])
    seen = set()
    for i in range(3):
        for j in range(2):
            for k in range(4):
                seen.add(d.index([i + 0.5, j + 0.5, k + 0.5]))
    assert seen == set(range(24))
    assert d.n_states == 24


def test_single_bin_component_is_constant():
    d = Discretizer([1, 2], [0.0, 0.0], [1.0, 1.0])
    assert d.index([0.1, 0.1]) == d.index([0.9, 0.1])


def test_state_grid_size_is_bounded():
    with pytest.raises(ConfigError):
        Discretizer([101, 100, 100], [0.0] * 3, [1.0] * 3)  # 1_010_000 states
    Discretizer([100, 100, 100], [0.0] * 3, [1.0] * 3)  # exactly 10^6 is fine


def test_discretizer_validation():
    with pytest.raises(ConfigError):
        Discretizer([], [], [])
    with pytest.raises(ConfigError):
        Discretizer([0], [0.0], [1.0])
    with pytest.raises(ConfigError):
        Discretizer([2], [1.0], [1.0])  # empty range
    with pytest.raises(ConfigError):
        Discretizer([2, 2], [0.0], [1.0])  # length mismatch
    with pytest.raises(ConfigError):
        Discretizer([2], [0.0], [1.0]).index([0.5, 0.5])


# -- epsilon schedule ----------------------------------------------------------

def test_epsilon_decays_monotonically_from_start_to_end():
    sched = EpsilonSchedule(start=1.0, end=0.02)
    values = [sched.at(i, 100) for i in range(100)]
    assert values[0] == 1.0
    assert values[-1] == pytest.approx(0.02)
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_epsilon_span_freezes_at_end_value():
    sched = EpsilonSchedule(start=1.0, end=0.1, span=10)
    values = [sched.at(i, 100) for i in range(100)]
    assert values[9] == pytest.approx(0.1)
    assert all(v == pytest.approx(0.1) for v in values[9:])


def test_epsilon_validation():
    with pytest.raises(ConfigError):
        EpsilonSchedule(start=1.5)
    with pytest.raises(ConfigError):
        EpsilonSchedule(end=-0.1)
    with pytest.raises(ConfigError):
        EpsilonSchedule(start=0.1, end=0.5)  # grows
    with pytest.raises(ConfigError):
        EpsilonSchedule(span=0)


def test_spec_validation():
    with pytest.raises(ConfigError):
        QLearnerSpec([2], [0.0], [1.0], learning_rate=-0.1)
    with pytest.raises(ConfigError):
        QLearnerSpec([2], [0.0], [1.0], discount=1.5)


# -- default specs ------------------------------------------------------------

def test_default_spec_layouts():
    daily = default_spec(daily_env(k=3))
    assert daily.bins == [5, 4, 3, 3, 3, 3, 3]
    assert len(daily.bins) == daily_env(k=3).state_length

    ex_env = ExecutionEnv(
        ExecutionConfig(
            parent_order_size=500,
            child_order_size=50,
            time_window=minutes(10),
            timestep=seconds(30),
            k=2,
        ),
        quiet_market(),
    )
    ex = default_spec(ex_env)
    assert len(ex.bins) == ex_env.state_length
    assert ex.bins[:8] == [5, 4, 3, 3, 3, 3, 3, 3]


def test_default_spec_rejects_wrong_bin_count():
    with pytest.raises(ConfigError):
        default_spec(daily_env(k=3), bins=[2, 2])


def test_default_spec_rejects_unknown_env():
    with pytest.raises(ConfigError):
        default_spec(object())


# -- learner mechanics ------------------------------------------------------

def fast_env():
    market = quiet_market(close="09:40")
    return DailyInvestorEnv(DailyInvestorConfig(timestep=minutes(1)), market)


def test_zero_learning_rate_leaves_table_untouched():
    env = fast_env()
    spec = default_spec(env, learning_rate=0.0)
    result = train_policy(env, spec, episodes=3, seed=1)
    assert all(np.all(row == 0.0) for row in result.learner.q.values())


def test_single_update_matches_bellman_arithmetic():
    spec = QLearnerSpec([2], [0.0], [1.0], learning_rate=0.5, discount=1.0,
                        epsilon=EpsilonSchedule(start=0.0, end=0.0))
    learner = QLearner(2, spec, seed=0)
    learner.begin_episode(0, 1, [0.2])
    s0 = learner.discretizer.index([0.2])
    learner._row(s0)[:] = [1.0, 0.0]  # force a known greedy pick
    assert learner.act() == 0
    learner.observe([0.8], reward=2.0, done=False)
    s1 = learner.discretizer.index([0.8])
    learner._row(s1)[:] = [0.0, 3.0]
    learner._state = s0
    learner._action = 0
    learner.observe([0.8], reward=2.0, done=False)
    # q += lr * (r + max(next) - q) with q=1.5 after the first update:
    # first update: 1.0 + 0.5*(2.0 + 0.0 - 1.0) = 1.5
    # second:       1.5 + 0.5*(2.0 + 3.0 - 1.5) = 3.25
    assert learner.q[s0][0] == pytest.approx(3.25)


def test_terminal_update_ignores_bootstrap():
    spec = QLearnerSpec([2], [0.0], [1.0], learning_rate=1.0, discount=1.0,
                        epsilon=EpsilonSchedule(start=0.0, end=0.0))
    learner = QLearner(2, spec, seed=0)
    learner.begin_episode(0, 1, [0.2])
    learner.act()
    learner._row(learner.discretizer.index([0.8]))[:] = [50.0, 50.0]
    learner.observe([0.8], reward=-1.0, done=True)
    s0 = learner.discretizer.index([0.2])
    assert learner.q[s0][learner._action] == -1.0


def test_training_is_reproducible_per_seed():
    def series(seed):
        return train_policy(fast_env(), default_spec(fast_env()), episodes=4, seed=seed).returns

    assert series(3) == series(3)
    assert series(3) != series(4)


def test_run_policy_fixed_action_matches_env_loop():
    env = fast_env()
    returns = run_policy(env, lambda s: 1, episodes=2, seed=0)  # HOLD forever
    assert returns == [0.0, 0.0]


def test_train_rejects_zero_episodes():
    with pytest.raises(ConfigError):
        train_policy(fast_env(), default_spec(fast_env()), episodes=0, seed=0)
