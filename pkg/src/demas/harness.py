"""Batch episode runner: JSON run configs, reproducible line-delimited logs.

A run configuration names an environment, its parameter overrides, the market
population, a list of seeds, an episode count and a policy. Running it writes
one JSON-lines file per (seed, episode) plus a manifest carrying the fully
resolved configuration, its hash, library versions and per-file digests.
Identical configurations produce byte-identical output trees, so logs double
as regression fixtures.
"""
from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__, envs
from .errors import ConfigError, UsageError
from .exchange import BookSeedConfig, MarketHours
from .kernel import at_time, duration_ns, fmt_time
from .market import MarketConfig
from .qlearn import EpsilonSchedule, QLearner, default_spec
from .traders import (
    FundamentalConfig,
    MomentumConfig,
    NoiseConfig,
    Population,
    ValueConfig,
)


# -- config parsing --------------------------------------------------------

@dataclass
class PolicySpec:
    kind: str  # random | fixed | q-learning
    action: int | None = None
    bins: list[int] | None = None
    learning_rate: float = 0.1
    discount: float = 1.0
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)


@dataclass
class RunConfig:
    env_name: str
    env_config: object
    market: MarketConfig
    seeds: list[int]
    episodes: int
    policy: PolicySpec
    out: str | None
    resolved: dict  # canonical JSON form, echoed into the manifest


def _reject_unknown(mapping: dict, allowed: tuple, where: str) -> None:
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {where} field(s) {unknown}; expected one of {sorted(allowed)}")


def _parse_time(value, where: str) -> int:
    if isinstance(value, str):
        return at_time(value)
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise ConfigError(f"{where} must be 'HH:MM' or integer nanoseconds, got {value!r}")


def _parse_duration(value, where: str) -> int:
    try:
        return duration_ns(value)
    except ConfigError as e:
        raise ConfigError(f"{where}: {e}") from None


def _block(mapping: dict, key: str) -> dict:
    value = mapping.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"config field {key!r} must be an object")
    return value


def _parse_trader_block(mapping: dict, where: str, cls, duration_fields=("mean_wake",)):
    if not isinstance(mapping, dict):
        raise ConfigError(f"config field {where!r} must be an object")
    _reject_unknown(mapping, tuple(cls.__dataclass_fields__), where)
    kwargs = {}
    for key, value in mapping.items():
        if key in duration_fields:
            kwargs[key] = _parse_duration(value, f"{where}.{key}")
        elif key == "size_bounds":
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(f"{where}: {e}") from None


def _parse_population(mapping: dict) -> Population:
    if not isinstance(mapping, dict):
        raise ConfigError("config field 'population' must be an object")
    _reject_unknown(mapping, ("noise", "value", "momentum"), "population")
    pop = Population()
    if "noise" in mapping:
        pop.noise = _parse_trader_block(mapping["noise"], "population.noise", NoiseConfig)
    if "value" in mapping:
        pop.value = _parse_trader_block(mapping["value"], "population.value", ValueConfig)
    if "momentum" in mapping:
        pop.momentum = _parse_trader_block(mapping["momentum"], "population.momentum", MomentumConfig)
    return pop


def _parse_market(mapping: dict, population: dict | None) -> MarketConfig:
    allowed = ("open", "close", "seed_book", "fundamental", "latency", "validate")
    _reject_unknown(mapping, allowed, "market")
    market = MarketConfig()
    hours_kwargs = {}
    if "open" in mapping:
        hours_kwargs["open"] = _parse_time(mapping["open"], "market.open")
    if "close" in mapping:
        hours_kwargs["close"] = _parse_time(mapping["close"], "market.close")
    if hours_kwargs:
        market.hours = MarketHours(
            open=hours_kwargs.get("open", market.hours.open),
            close=hours_kwargs.get("close", market.hours.close),
        )
    if "seed_book" in mapping:
        block = mapping["seed_book"]
        if block is None:
            market.seed_book = None
        elif not isinstance(block, dict):
            raise ConfigError("market.seed_book must be an object or null")
        else:
            _reject_unknown(block, tuple(BookSeedConfig.__dataclass_fields__), "market.seed_book")
            market.seed_book = BookSeedConfig(**block)
    if "fundamental" in mapping:
        if not isinstance(mapping["fundamental"], dict):
            raise ConfigError("market.fundamental must be an object")
        block = dict(mapping["fundamental"])
        _reject_unknown(block, tuple(FundamentalConfig.__dataclass_fields__), "market.fundamental")
        if "step_nanos" in block:
            block["step_nanos"] = _parse_duration(block["step_nanos"], "market.fundamental.step_nanos")
        market.fundamental = FundamentalConfig(**block)
    if "latency" in mapping:
        block = mapping["latency"]
        if not isinstance(block, dict):
            raise ConfigError("market.latency must be an object")
        _reject_unknown(block, ("base_nanos", "jitter_nanos_max"), "market.latency")
        market.latency = type(market.latency)(
            base_nanos=_parse_duration(block.get("base_nanos", 0), "market.latency.base_nanos"),
            jitter_nanos_max=_parse_duration(
                block.get("jitter_nanos_max", 0), "market.latency.jitter_nanos_max"
            ),
        )
    if "validate" in mapping:
        market.validate = bool(mapping["validate"])
    if population is not None:
        market.population = _parse_population(population)
    return market


def _parse_policy(mapping: dict) -> PolicySpec:
    kind = mapping.get("kind")
    if kind == "random":
        _reject_unknown(mapping, ("kind",), "policy")
        return PolicySpec(kind="random")
    if kind == "fixed":
        _reject_unknown(mapping, ("kind", "action"), "policy")
        if "action" not in mapping or not isinstance(mapping["action"], int):
            raise ConfigError("fixed policy needs an integer 'action' field")
        return PolicySpec(kind="fixed", action=mapping["action"])
    if kind == "q-learning":
        allowed = ("kind", "bins", "learning_rate", "discount", "epsilon")
        _reject_unknown(mapping, allowed, "policy")
        eps = mapping.get("epsilon", {})
        if not isinstance(eps, dict):
            raise ConfigError("policy.epsilon must be an object with start/end/span")
        _reject_unknown(eps, ("start", "end", "span"), "policy.epsilon")
        return PolicySpec(
            kind="q-learning",
            bins=mapping.get("bins"),
            learning_rate=mapping.get("learning_rate", 0.1),
            discount=mapping.get("discount", 1.0),
            epsilon=EpsilonSchedule(
                start=eps.get("start", 1.0), end=eps.get("end", 0.02), span=eps.get("span")
            ),
        )
    raise ConfigError(f"policy kind must be 'random', 'fixed' or 'q-learning', got {kind!r}")


def _enum_safe(pairs):
    return {k: (v.value if isinstance(v, Enum) else v) for k, v in pairs}


def parse_run_config(data: dict) -> RunConfig:
    """Validate a raw config mapping and resolve every default."""
    allowed = ("env", "env_config", "market", "population", "seeds", "episodes", "policy", "out")
    if not isinstance(data, dict):
        raise ConfigError("run config must be a JSON object")
    _reject_unknown(data, allowed, "run config")
    if "env" not in data:
        raise ConfigError("run config needs an 'env' field naming the environment")
    env_name = data["env"]
    env_config = envs.parse_env_config(env_name, _block(data, "env_config"))
    market = _parse_market(_block(data, "market"), data.get("population"))
    seeds = data.get("seeds", [0])
    if not isinstance(seeds, list) or not seeds or not all(
        isinstance(s, int) and not isinstance(s, bool) for s in seeds
    ):
        raise ConfigError("seeds must be a non-empty list of integers")
    episodes = data.get("episodes", 1)
    if not isinstance(episodes, int) or isinstance(episodes, bool) or episodes < 1:
        raise ConfigError(f"episodes must be a positive integer, got {episodes!r}")
    policy = _parse_policy(_block(data, "policy") if "policy" in data else {"kind": "random"})
    out = data.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out must be a directory path string")

    resolved = {
        "env": env_name,
        "env_config": asdict(env_config, dict_factory=_enum_safe),
        "market": asdict(market, dict_factory=_enum_safe),
        "seeds": list(seeds),
        "episodes": episodes,
        "policy": asdict(policy, dict_factory=_enum_safe),
        "out": out,
    }
    # normalize to JSON-native types (tuples become lists) so the in-memory
    # form equals the manifest echo byte for byte
    resolved = json.loads(json.dumps(resolved))
    return RunConfig(env_name, env_config, market, list(seeds), episodes, policy, out, resolved)


def load_config(path: str | Path) -> RunConfig:
    """Parse a UTF-8 JSON run config file, with position info on syntax errors."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    return parse_run_config(data)


def config_hash(resolved: dict) -> str:
    # The output path is where the run lands, not what the run is; leaving it
    # out lets identical experiments in different directories share a hash.
    hashed = {k: v for k, v in resolved.items() if k != "out"}
    canonical = json.dumps(hashed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# -- log writing -----------------------------------------------------------

def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


class LogWriter:
    """Owns one output directory; refuses to clobber a previous run."""

    MANAGED = ("episode_*.jsonl", "manifest.json", "policy_*.json")

    def __init__(self, out_dir: str | Path, overwrite: bool = False):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        existing = [p for pattern in self.MANAGED for p in self.dir.glob(pattern)]
        if existing and not overwrite:
            raise UsageError(
                f"{self.dir} already holds run output ({existing[0].name}, ...); "
                "pass --overwrite to replace it"
            )
        for p in existing:
            p.unlink()
        self.files: dict[str, str] = {}

    def write(self, name: str, lines: list[str]) -> None:
        payload = "".join(line + "\n" for line in lines)
        (self.dir / name).write_text(payload, encoding="utf-8")
        self.files[name] = hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def write_manifest(self, resolved: dict, returns: dict[str, list[float]]) -> None:
        manifest = {
            "config": resolved,
            "config_hash": config_hash(resolved),
            "versions": {
                "demas": __version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
            "files": dict(sorted(self.files.items())),
            "returns": returns,
        }
        text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        (self.dir / "manifest.json").write_text(text, encoding="utf-8")


class EpisodeRecorder:
    """Accumulates one episode's JSON-lines records."""

    def __init__(self, seed: int, episode: int, episode_seed: int, state):
        self.lines = [
            _dumps(
                {
                    "type": "episode",
                    "seed": seed,
                    "episode": episode,
                    "episode_seed": episode_seed,
                    "state": [float(x) for x in state],
                }
            )
        ]
        self.steps = 0
        self.total = 0.0

    def step(self, time: int, state, action: int, reward: float, done: bool) -> None:
        self.steps += 1
        self.total += reward
        self.lines.append(
            _dumps(
                {
                    "type": "step",
                    "step": self.steps,
                    "time": time,
                    "state": [float(x) for x in state],
                    "action": action,
                    "reward": float(reward),
                    "done": bool(done),
                }
            )
        )

    def finish(self, terminal_update: float, run_log) -> None:
        tape = run_log.trade_tape() if run_log is not None else []
        digest = hashlib.sha256(repr(tape).encode("utf-8")).hexdigest()
        self.lines.append(
            _dumps(
                {
                    "type": "summary",
                    "steps": self.steps,
                    "return": self.total,
                    "terminal_update": terminal_update,
                    "trade_count": len(tape),
                    "trade_tape_sha256": digest,
                }
            )
        )


# -- episode execution -------------------------------------------------------

def _build_env(config: RunConfig):
    return envs.make(config.env_name, config.env_config, market=config.market)


def _run_one_episode(env, seed: int, episode: int, action_fn) -> EpisodeRecorder:
    state = env.reset()
    rec = EpisodeRecorder(seed, episode, env.last_episode_seed, state)
    done = False
    while not done:
        action = action_fn(state)
        state, reward, done, info = env.step(action)
        rec.step(info["time"], state, int(action), reward, done)
    rec.finish(info.get("terminal_update", 0.0), env.last_run_log)
    return rec


def _simple_action_fn(policy: PolicySpec, env, rng):
    if policy.kind == "random":
        return lambda state: int(rng.integers(env.n_actions))
    if not 0 <= policy.action < env.n_actions:
        raise ConfigError(
            f"fixed action {policy.action} outside [0, {env.n_actions}) for {type(env).__name__}"
        )
    return lambda state: policy.action


def run_episodes(config: RunConfig, out_dir: str | Path | None = None, overwrite: bool = False):
    """Run the configured seeds x episodes, write logs, return per-seed returns.

    With a q-learning policy the logged episodes are the training episodes, so
    the log doubles as the learning curve.
    """
    out = out_dir if out_dir is not None else config.out
    if out is None:
        raise ConfigError("no output directory: set 'out' in the config or pass --out")
    writer = LogWriter(out, overwrite)
    returns: dict[str, list[float]] = {}
    for seed in config.seeds:
        if config.policy.kind == "q-learning":
            seed_returns = _run_qlearning_seed(config, seed, writer)
        else:
            seed_returns = _run_simple_seed(config, seed, writer)
        returns[str(seed)] = seed_returns
    writer.write_manifest(config.resolved, returns)
    return returns


def _run_simple_seed(config: RunConfig, seed: int, writer: LogWriter) -> list[float]:
    env = _build_env(config)
    env.seed(seed)
    rng = np.random.default_rng(seed)
    action_fn = _simple_action_fn(config.policy, env, rng)
    out = []
    for episode in range(config.episodes):
        rec = _run_one_episode(env, seed, episode, action_fn)
        writer.write(f"episode_s{seed}_e{episode:04d}.jsonl", rec.lines)
        out.append(rec.total)
    return out


def _run_qlearning_seed(config: RunConfig, seed: int, writer: LogWriter) -> list[float]:
    env = _build_env(config)
    policy = config.policy
    spec = default_spec(
        env,
        bins=policy.bins,
        learning_rate=policy.learning_rate,
        discount=policy.discount,
        epsilon=policy.epsilon,
    )
    learner = QLearner(env.n_actions, spec, seed)
    env.seed(seed)
    out = []
    for episode in range(config.episodes):
        obs = env.reset()
        learner.begin_episode(episode, config.episodes, obs)
        rec = EpisodeRecorder(seed, episode, env.last_episode_seed, obs)
        done = False
        while not done:
            action = learner.act()
            obs, reward, done, info = env.step(action)
            learner.observe(obs, reward, done)
            rec.step(info["time"], obs, action, reward, done)
        rec.finish(info.get("terminal_update", 0.0), env.last_run_log)
        writer.write(f"episode_s{seed}_e{episode:04d}.jsonl", rec.lines)
        out.append(rec.total)
    policy_doc = {
        "seed": seed,
        "bins": spec.bins,
        "lows": spec.lows,
        "highs": spec.highs,
        "learning_rate": spec.learning_rate,
        "discount": spec.discount,
        "epsilon": {"start": spec.epsilon.start, "end": spec.epsilon.end, "span": spec.epsilon.span},
        "greedy": {str(s): a for s, a in learner.greedy_table().items()},
        "returns": out,
        "epsilons": learner.epsilons,
    }
    writer.write(f"policy_s{seed}.json", [json.dumps(policy_doc, sort_keys=True, indent=2)])
    return out


# -- replay ------------------------------------------------------------------

def replay(log_path: str | Path) -> str:
    """Readable step table for one episode log, with the return recomputed."""
    path = Path(log_path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read log {path}: {e}") from None
    header, steps, summary = None, [], None
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}:{i}: {e.msg}") from None
        kind = record.get("type")
        if kind == "episode":
            header = record
        elif kind == "step":
            steps.append(record)
        elif kind == "summary":
            summary = record
    if header is None or summary is None:
        raise ConfigError(f"{path} is not a complete episode log")
    out = [
        f"seed {header['seed']} episode {header['episode']} "
        f"(episode seed {header['episode_seed']})",
        f"{'step':>5}  {'time':>8}  {'action':>6}  {'reward':>14}  done",
    ]
    total = 0.0
    for s in steps:
        total += s["reward"]
        out.append(
            f"{s['step']:>5}  {fmt_time(s['time']):>8}  {s['action']:>6}  "
            f"{s['reward']:>14.6f}  {s['done']}"
        )
    out.append(
        f"return {summary['return']} over {summary['steps']} steps "
        f"({summary['trade_count']} market trades)"
    )
    if total != summary["return"]:
        out.append(f"WARNING: recomputed return {total} differs from logged {summary['return']}")
    return "\n".join(out)
