"""Standard-factory bindings for the demas trading environments.

Exposes `markets-daily_investor-v0` and `markets-execution-v0` through the
conventional make/reset/step surface so generic RL tooling can drive them.
The handle returned by :func:`make` is a stateless pass-through: every value
it returns comes verbatim from the underlying environment, so the two
surfaces cannot drift.

When gymnasium (or modern gym) is installed, :func:`register_envs` also
registers both names with it; neither is required.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from demas.envs import env_names as _env_names
    from demas.envs import make as _make_env
except ImportError as exc:
    raise ImportError(
        "demas-gym needs the demas package (the native simulator) installed"
    ) from exc

DAILY_INVESTOR = "markets-daily_investor-v0"
EXECUTION = "markets-execution-v0"

__all__ = [
    "DAILY_INVESTOR",
    "EXECUTION",
    "Box",
    "Discrete",
    "EnvHandle",
    "env_names",
    "make",
    "register_envs",
]


@dataclass(frozen=True)
class Discrete:
    """Action space descriptor: integers 0 .. n-1."""

    n: int

    def contains(self, x) -> bool:
        try:
            return 0 <= int(x) < self.n and float(x) == int(x)
        except (TypeError, ValueError):
            return False


@dataclass(frozen=True)
class Box:
    """Observation space descriptor: a flat float vector of fixed length."""

    shape: tuple[int, ...]
    dtype: type = np.float64

    def contains(self, x) -> bool:
        arr = np.asarray(x)
        return arr.shape == self.shape and np.issubdtype(arr.dtype, np.floating)


class EnvHandle:
    """One underlying environment instance behind the standard surface.

    Handles are single-caller; independent handles share nothing. All
    semantics (seeding, rewards, episode boundaries, error checking) live in
    the wrapped environment, which is reachable as ``unwrapped``.
    """

    def __init__(self, name: str, env):
        self.name = name
        self.unwrapped = env
        self.action_space = Discrete(env.n_actions)
        self.observation_space = Box(shape=(env.state_length,))

    def seed(self, n: int) -> None:
        self.unwrapped.seed(n)

    def reset(self) -> np.ndarray:
        return self.unwrapped.reset()

    def step(self, action):
        return self.unwrapped.step(action)

    def __repr__(self) -> str:
        return f"EnvHandle({self.name!r}, obs {self.observation_space.shape}, {self.action_space.n} actions)"


def env_names() -> list[str]:
    return _env_names()


def make(name: str, env_config=None, market=None) -> EnvHandle:
    """Instantiate a registered environment by name.

    ``env_config`` takes the flat configuration keys (ORDER_FIXED_SIZE,
    TIMESTEP_DURATION, ...) or the environment's typed config object;
    unknown names raise the registry's not-registered error.
    """
    return EnvHandle(name, _make_env(name, config=env_config, market=market))


def register_envs() -> None:
    """Register both names with gymnasium (or modern gym) if one is importable.

    A no-op without either package; the local :func:`make` works regardless.
    """
    try:
        import gymnasium as api
    except ImportError:
        try:
            import gym as api
        except ImportError:
            return

    class _Adapter(api.Env):
        # translates to the 5-tuple step and (obs, info) reset convention
        def __init__(self, handle_name, env_config=None, market=None):
            self._handle = make(handle_name, env_config=env_config, market=market)
            self.action_space = api.spaces.Discrete(self._handle.action_space.n)
            n = self._handle.observation_space.shape[0]
            self.observation_space = api.spaces.Box(
                low=-np.inf, high=np.inf, shape=(n,), dtype=np.float64
            )

        def reset(self, *, seed=None, options=None):
            if seed is not None:
                self._handle.seed(seed)
            return self._handle.reset(), {}

        def step(self, action):
            state, reward, done, info = self._handle.step(action)
            return state, reward, done, False, info

    for name in (DAILY_INVESTOR, EXECUTION):
        try:
            api.register(
                id=name,
                entry_point=lambda _name=name, **kw: _Adapter(_name, **kw),
            )
        except api.error.Error:
            pass  # already registered in this process
