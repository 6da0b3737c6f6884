"""Tabular Q-learning baseline over uniformly binned observations.

The learner is deliberately small: clip each state component into a fixed
range, slice the range into uniform bins, index the joint grid in mixed radix,
and run epsilon-greedy one-step Q-learning on the resulting table. The table
is stored sparsely (visited states only), but the full grid size is still
bounded up front so a careless bin spec fails fast instead of thrashing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .envs.daily_investor import DailyInvestorEnv
from .envs.execution import ExecutionEnv
from .errors import ConfigError

MAX_STATES = 10**6


class Discretizer:
    """Maps float state vectors onto a mixed-radix integer grid."""

    def __init__(self, bins: list[int], lows: list[float], highs: list[float]):
        if not bins:
            raise ConfigError("need at least one state component")
        if len(bins) != len(lows) or len(bins) != len(highs):
            raise ConfigError("bins, lows and highs must have equal length")
        if any(b < 1 for b in bins):
            raise ConfigError("every component needs at least one bin")
        if any(hi <= lo for lo, hi in zip(lows, highs)):
            raise ConfigError("every component range must have positive width")
        self.bins = list(bins)
        self.lows = np.asarray(lows, dtype=np.float64)
        self.highs = np.asarray(highs, dtype=np.float64)
        self.n_states = 1
        for b in self.bins:
            self.n_states *= b
        if self.n_states > MAX_STATES:
            raise ConfigError(
                f"bin spec spans {self.n_states} states, more than the {MAX_STATES} allowed"
            )
        self._widths = self.highs - self.lows

    def index(self, state) -> int:
        x = np.asarray(state, dtype=np.float64)
        if x.shape != (len(self.bins),):
            raise ConfigError(f"state has shape {x.shape}, discretizer expects ({len(self.bins)},)")
        scaled = (x - self.lows) / self._widths
        out = 0
        for frac, b in zip(scaled, self.bins):
            k = min(b - 1, max(0, int(frac * b)))
            out = out * b + k
        return out


@dataclass
class EpsilonSchedule:
    """Linear decay from start to end over the first span episodes."""

    start: float = 1.0
    end: float = 0.02
    span: int | None = None  # defaults to the full episode count

    def __post_init__(self) -> None:
        for name, v in (("start", self.start), ("end", self.end)):
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"epsilon {name} must be within [0, 1], got {v}")
        if self.end > self.start:
            raise ConfigError("epsilon must not grow over training")
        if self.span is not None and self.span < 1:
            raise ConfigError("epsilon span must be positive")

    def at(self, episode: int, total_episodes: int) -> float:
        span = self.span if self.span is not None else total_episodes
        if span <= 1:
            return self.end
        frac = min(1.0, episode / (span - 1))
        return self.start + (self.end - self.start) * frac


@dataclass
class QLearnerSpec:
    bins: list[int]
    lows: list[float]
    highs: list[float]
    learning_rate: float = 0.1
    discount: float = 1.0  # episodic tasks, no discounting
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ConfigError("learning rate must be non-negative")
        if not 0.0 <= self.discount <= 1.0:
            raise ConfigError("discount must be within [0, 1]")

    def discretizer(self) -> Discretizer:
        return Discretizer(self.bins, self.lows, self.highs)


def default_spec(env, bins: list[int] | None = None, **overrides) -> QLearnerSpec:
    """Bin layout and clip ranges suited to the given environment's state."""
    if isinstance(env, DailyInvestorEnv):
        k = env.config.k
        reach = 10.0 * env.config.order_fixed_size
        defaults = [5, 4, 3, 3] + [3] * k
        lows = [-reach, 0.0, 0.0, -25.0] + [-25.0] * k
        highs = [reach, 1.0, 50.0, 25.0] + [25.0] * k
    elif isinstance(env, ExecutionEnv):
        k = env.config.k
        defaults = [5, 4, 3, 3, 3, 3, 3, 3] + [3] * k
        lows = [0.0, 0.0, -1.0, 0.0, 0.0, -50.0, 0.0, -25.0] + [-25.0] * k
        highs = [1.0, 1.0, 1.0, 1.0, 1.0, 50.0, 50.0, 25.0] + [25.0] * k
    else:
        raise ConfigError(f"no default discretization for {type(env).__name__}")
    if bins is not None:
        if len(bins) != len(defaults):
            raise ConfigError(f"expected {len(defaults)} bin counts, got {len(bins)}")
        defaults = list(bins)
    return QLearnerSpec(bins=defaults, lows=lows, highs=highs, **overrides)


class QLearner:
    """The table and the epsilon-greedy update, decoupled from the episode loop.

    Callers drive it: begin_episode with the reset observation, then alternate
    act() and observe() until done. Ties in the greedy argmax break uniformly
    at random so an all-zero table does not bias toward action 0.
    """

    def __init__(self, n_actions: int, spec: QLearnerSpec, seed: int):
        self.n_actions = n_actions
        self.spec = spec
        self.discretizer = spec.discretizer()
        self.rng = np.random.default_rng(seed)
        self.q: dict[int, np.ndarray] = {}
        self.epsilons: list[float] = []
        self._state: int | None = None
        self._action: int | None = None
        self._eps = spec.epsilon.start

    def _row(self, s: int) -> np.ndarray:
        r = self.q.get(s)
        if r is None:
            r = self.q[s] = np.zeros(self.n_actions)
        return r

    def begin_episode(self, episode: int, total_episodes: int, obs) -> None:
        self._eps = self.spec.epsilon.at(episode, total_episodes)
        self.epsilons.append(self._eps)
        self._state = self.discretizer.index(obs)
        self._action = None

    def act(self) -> int:
        if self.rng.random() < self._eps:
            self._action = int(self.rng.integers(self.n_actions))
        else:
            values = self._row(self._state)
            best = np.flatnonzero(values == values.max())
            self._action = int(best[self.rng.integers(len(best))])
        return self._action

    def observe(self, obs, reward: float, done: bool) -> None:
        nxt = self.discretizer.index(obs)
        target = reward if done else reward + self.spec.discount * self._row(nxt).max()
        values = self._row(self._state)
        values[self._action] += self.spec.learning_rate * (target - values[self._action])
        self._state = nxt

    def greedy_action(self, obs) -> int:
        row = self.q.get(self.discretizer.index(obs))
        if row is None:
            return 0
        return int(np.argmax(row))

    def greedy_table(self) -> dict[int, int]:
        """Visited states mapped to their greedy action."""
        return {s: int(np.argmax(row)) for s, row in sorted(self.q.items())}


@dataclass
class TrainResult:
    learner: QLearner
    returns: list[float]

    @property
    def epsilons(self) -> list[float]:
        return self.learner.epsilons

    def greedy_action(self, obs) -> int:
        return self.learner.greedy_action(obs)

    def greedy_table(self) -> dict[int, int]:
        return self.learner.greedy_table()


def train_policy(env, spec: QLearnerSpec, episodes: int, seed: int) -> TrainResult:
    """Epsilon-greedy tabular Q-learning; returns the table and return series.

    The env is reseeded with the given seed so the run is self-contained and
    reproducible; the same seed also drives exploration.
    """
    if episodes < 1:
        raise ConfigError("need at least one training episode")
    learner = QLearner(env.n_actions, spec, seed)
    env.seed(seed)
    returns: list[float] = []
    for episode in range(episodes):
        obs = env.reset()
        learner.begin_episode(episode, episodes, obs)
        total, done = 0.0, False
        while not done:
            obs, reward, done, _ = env.step(learner.act())
            learner.observe(obs, reward, done)
            total += reward
        returns.append(total)
    return TrainResult(learner, returns)


def run_policy(env, action_fn, episodes: int, seed: int) -> list[float]:
    """Episode returns for a fixed policy; action_fn maps observations to actions."""
    env.seed(seed)
    returns = []
    for _ in range(episodes):
        obs = env.reset()
        total, done = 0.0, False
        while not done:
            obs, reward, done, _ = env.step(action_fn(obs))
            total += reward
        returns.append(total)
    return returns
