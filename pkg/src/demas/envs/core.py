"""Reset/step environment shell over an interruptible market kernel.

Each episode owns a private kernel built from the market template and a seed
derived from (master seed, episode index), so episodes are isolated and any
(seed, action sequence) pair replays identically. Subclasses supply the state,
reward, done and action-translation logic; this module owns the mechanics.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..errors import ConfigError, EpisodeSetupError, UsageError
from ..kernel import Kernel, KernelConfig, RunStatus, minutes
from ..market import MarketConfig, build_market_agents
from .markets import EnvAgent, OrderCommand

DEFAULT_SEED = 0  # master seed used when seed() is never called


class StepResult:
    """(state, reward, done, info), unpackable like the classic 4-tuple."""

    __slots__ = ("state", "reward", "done", "info")

    def __init__(self, state: np.ndarray, reward: float, done: bool, info: dict):
        self.state = state
        self.reward = reward
        self.done = done
        self.info = info

    def __iter__(self):
        return iter((self.state, self.reward, self.done, self.info))

    def __repr__(self) -> str:
        return f"StepResult(reward={self.reward}, done={self.done}, info={self.info})"


class TradingEnv:
    """Base environment; subclasses define the task over the raw-state dicts.

    Subclass contract: set ``n_actions`` and ``state_length``, implement
    ``observation``, ``step_reward``, ``is_done`` and ``action_commands``,
    and optionally override ``absorb`` (per-step ledger updates, called before
    reward/done), ``terminal_update`` (added to the final reward),
    ``on_episode_start`` and ``step_info``.
    """

    n_actions: int = 0
    state_length: int = 0

    def __init__(
        self,
        market: MarketConfig | None = None,
        first_wakeup: int = 0,
        timestep: int = 0,
        history: int = 2,
        starting_cash: int = 10_000_000,
    ):
        self.market = market if market is not None else MarketConfig()
        if timestep <= 0:
            raise ConfigError("timestep must be positive")
        if not self.market.hours.open <= first_wakeup < self.market.hours.close:
            raise ConfigError("first wakeup must fall inside market hours")
        self.first_wakeup = first_wakeup
        self.timestep = timestep
        self.history = history
        self.starting_cash = starting_cash
        self._master_seed = DEFAULT_SEED
        self._episode_index = 0
        self._kernel: Kernel | None = None
        self._prev_raw: dict | None = None
        self._active = False
        self.last_run_log = None
        self.last_episode_seed: int | None = None

    # -- seeding ---------------------------------------------------------
    def seed(self, n: int) -> None:
        """Fix the master seed; episode kernels derive from (n, episode index)."""
        self._master_seed = int(n) & 0xFFFFFFFFFFFFFFFF
        self._episode_index = 0

    def _episode_seed(self) -> int:
        seq = np.random.SeedSequence([self._master_seed, self._episode_index])
        return int(seq.generate_state(1, np.uint64)[0])

    # -- episode lifecycle --------------------------------------------------
    def reset(self) -> np.ndarray:
        """Build a fresh kernel, run to the first interruption, return the state.

        Any in-flight episode is discarded. Raises EpisodeSetupError when the
        simulation finishes before the first interruption.
        """
        seed = self._episode_seed()
        self._episode_index += 1
        self.last_episode_seed = seed
        start = self.market.hours.open - minutes(2)
        end = self.market.hours.close + minutes(5)
        agents = build_market_agents(self.market, seed)
        env_agent = EnvAgent(
            exchange_id=0,
            first_wakeup=self.first_wakeup,
            timestep=self.timestep,
            starting_cash=self.starting_cash,
            history=self.history,
        )
        kernel = Kernel(
            KernelConfig(start_time=start, end_time=end, seed=seed, latency=replace(self.market.latency)),
            [*agents, env_agent],
        )
        result = kernel.run()
        if result.status is not RunStatus.INTERRUPTED:
            raise EpisodeSetupError("simulation finished before the first environment wakeup")
        self._kernel = kernel
        self._prev_raw = result.raw_state
        self._active = True
        self.last_run_log = None
        self.on_episode_start(result.raw_state)
        return self.observation(result.raw_state)

    def step(self, action) -> StepResult:
        if self._kernel is None:
            raise UsageError("reset() must be called before step()")
        if not self._active:
            raise UsageError("episode is done; call reset() to start a new one")
        if not isinstance(action, (int, np.integer)) or not 0 <= int(action) < self.n_actions:
            raise UsageError(f"action must be an integer in [0, {self.n_actions}), got {action!r}")
        commands = self.action_commands(int(action), self._prev_raw)
        result = self._kernel.run(injected_action=commands)
        raw = result.raw_state
        self.absorb(raw)
        done = self.is_done(raw) or result.status is RunStatus.DONE
        reward = self.step_reward(self._prev_raw, raw)
        info = self.step_info(raw)
        if done:
            terminal = self.terminal_update(raw)
            reward += terminal
            info["terminal_update"] = terminal
            self.last_run_log = self._kernel.terminate()
            self._active = False
        self._prev_raw = raw
        return StepResult(self.observation(raw), reward, done, info)

    @property
    def episode_active(self) -> bool:
        return self._active

    # -- subclass hooks -----------------------------------------------------
    def observation(self, raw: dict) -> np.ndarray:
        raise NotImplementedError

    def step_reward(self, prev_raw: dict, raw: dict) -> float:
        raise NotImplementedError

    def is_done(self, raw: dict) -> bool:
        raise NotImplementedError

    def action_commands(self, action: int, raw: dict) -> list[OrderCommand]:
        raise NotImplementedError

    def absorb(self, raw: dict) -> None:
        pass

    def terminal_update(self, raw: dict) -> float:
        return 0.0

    def on_episode_start(self, raw: dict) -> None:
        pass

    def step_info(self, raw: dict) -> dict:
        return {"time": raw["time"]}
