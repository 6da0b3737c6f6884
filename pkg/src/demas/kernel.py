"""Discrete-event simulation kernel.

Simulated time is an integer count of nanoseconds since midnight. Agents
interact only through timestamped messages routed by the kernel; the kernel
pops them in (delivery time, insertion sequence) order, so simultaneous
messages are handled FIFO and runs are fully deterministic for a given seed.

A run can be paused: any agent may raise an interruption while handling a
message, which makes :meth:`Kernel.run` return that agent's raw state. Calling
``run`` again resumes from the queue, optionally injecting an action into the
interrupting agent first.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

import numpy as np

from .errors import ConfigError, RoutingError, SchedulingError, StateError

NANOS_PER_SECOND = 1_000_000_000
NANOS_PER_MINUTE = 60 * NANOS_PER_SECOND
NANOS_PER_HOUR = 60 * NANOS_PER_MINUTE


def seconds(x: float) -> int:
    return int(round(x * NANOS_PER_SECOND))


def minutes(x: float) -> int:
    return int(round(x * NANOS_PER_MINUTE))


def hours(x: float) -> int:
    return int(round(x * NANOS_PER_HOUR))


def at_time(text: str) -> int:
    """Nanoseconds since midnight for a clock string like ``"09:35"`` or ``"16:00:00"``."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"bad clock time {text!r}; expected HH:MM or HH:MM:SS")
    h, m = int(parts[0]), int(parts[1])
    s = float(parts[2]) if len(parts) == 3 else 0.0
    t = h * NANOS_PER_HOUR + m * NANOS_PER_MINUTE + seconds(s)
    if t < 0:
        raise ConfigError(f"clock time {text!r} is negative")
    return t


def fmt_time(t: int) -> str:
    """Render nanoseconds since midnight as HH:MM:SS[.ffffff]."""
    s, ns = divmod(t, NANOS_PER_SECOND)
    h, rem = divmod(s, 3600)
    m, s = divmod(rem, 60)
    base = f"{h:02d}:{m:02d}:{s:02d}"
    return base if ns == 0 else f"{base}.{ns // 1000:06d}"


def duration_ns(spec: int | dict) -> int:
    """A duration given as nanoseconds or as a dict of hours/minutes/seconds."""
    if isinstance(spec, bool):
        raise ConfigError(f"bad duration {spec!r}")
    if isinstance(spec, int):
        return spec
    if isinstance(spec, dict):
        known = {"hours", "minutes", "seconds"}
        unknown = set(spec) - known
        if unknown:
            raise ConfigError(f"unknown duration keys {sorted(unknown)}; expected {sorted(known)}")
        return hours(spec.get("hours", 0)) + minutes(spec.get("minutes", 0)) + seconds(spec.get("seconds", 0))
    raise ConfigError(f"bad duration {spec!r}")


class _Wakeup:
    __slots__ = ()

    def __repr__(self) -> str:
        return "WAKEUP"


#: Sentinel payload for self-addressed timer messages.
WAKEUP = _Wakeup()


@dataclass(slots=True)
class Message:
    sender: int
    recipient: int
    sent_at: int
    deliver_at: int
    payload: Any


@dataclass
class LatencyModel:
    """Messaging delay: a deterministic base plus uniform jitter from the kernel RNG.

    ``pair_nanos`` overrides the base for specific (sender, recipient) pairs.
    Wakeups bypass latency entirely.
    """

    base_nanos: int = 0
    jitter_nanos_max: int = 0
    pair_nanos: dict[tuple[int, int], int] | None = None

    def __post_init__(self) -> None:
        if self.base_nanos < 0 or self.jitter_nanos_max < 0:
            raise ConfigError("latency components must be non-negative")

    def base(self, sender: int, recipient: int) -> int:
        if self.pair_nanos is not None:
            return self.pair_nanos.get((sender, recipient), self.base_nanos)
        return self.base_nanos


@dataclass
class KernelConfig:
    start_time: int
    end_time: int
    seed: int = 0
    latency: LatencyModel = field(default_factory=LatencyModel)


class RunStatus(Enum):
    INTERRUPTED = "interrupted"
    DONE = "done"


@dataclass
class RunResult:
    status: RunStatus
    raw_state: dict | None = None

    @property
    def interrupted(self) -> bool:
        return self.status is RunStatus.INTERRUPTED


@dataclass
class RunLog:
    """Per-agent logs collected at termination, keyed by roster id."""

    agent_logs: dict[int, Any]

    def trade_tape(self) -> list[tuple]:
        """Rows (time_nanos, price_cents, qty, aggressor_id, resting_id) from the first
        agent log that carries a tape (the exchange, in market configurations)."""
        for log in self.agent_logs.values():
            if isinstance(log, dict) and "trade_tape" in log:
                return log["trade_tape"]
        return []


class Agent:
    """A simulation participant.

    Subclasses override the lifecycle hooks they need. ``id``, ``kernel`` and
    ``rng`` are assigned by the kernel at build time; the RNG is an independent
    substream derived from the kernel seed and the agent's roster position.
    """

    def __init__(self, name: str | None = None):
        self.id: int = -1
        self.name = name or type(self).__name__
        self.kernel: Kernel | None = None
        self.rng: np.random.Generator | None = None
        self._log: list = []

    # -- lifecycle hooks -------------------------------------------------
    def kernel_initializing(self, kernel: "Kernel") -> None:
        pass

    def kernel_starting(self, now: int) -> None:
        """Called after every agent has been initialized; may send messages."""

    def receive_message(self, now: int, sender: int, payload: Any) -> None:
        pass

    def wakeup(self, now: int) -> None:
        pass

    def kernel_stopping(self, now: int) -> None:
        pass

    def kernel_terminating(self, now: int) -> Any:
        """Return this agent's contribution to the run log."""
        return self._log

    def apply_injected_action(self, now: int, action: Any) -> None:
        raise StateError(f"agent {self.name} does not accept injected actions")

    # -- conveniences ----------------------------------------------------
    def send(self, recipient: int, payload: Any) -> None:
        self.kernel.route(self.id, recipient, payload)

    def set_wakeup(self, at: int) -> None:
        self.kernel.schedule_wakeup(self.id, at)

    def log_event(self, item: Any) -> None:
        self._log.append(item)


class _Phase(Enum):
    READY = "ready"
    DONE = "done"
    TERMINATED = "terminated"


class Kernel:
    """Owns the clock and the priority message queue for one simulation.

    Building the kernel assigns roster ids, seeds per-agent RNG substreams and
    runs the initializing/starting hooks in roster order; initial messages are
    queued before :meth:`run` is first called. A kernel instance is
    single-threaded; parallelism comes from running independent kernels.
    """

    def __init__(self, config: KernelConfig, agents: Iterable[Agent]):
        roster = list(agents)
        if not roster:
            raise ConfigError("agent roster is empty")
        if config.start_time >= config.end_time:
            raise ConfigError(
                f"start_time {fmt_time(config.start_time)} must precede end_time {fmt_time(config.end_time)}"
            )
        self.config = config
        self.agents = roster
        self.now = config.start_time
        self._queue: list[tuple[int, int, Message]] = []
        self._seq = 0
        self._phase = _Phase.READY
        self._interrupt: dict | None = None
        self._interrupting_agent: int | None = None
        self._last_raw_state: dict | None = None

        # Substream 0 feeds kernel-level draws (latency jitter); agent i gets
        # substream i+1, so appending agents never perturbs earlier streams.
        streams = np.random.SeedSequence(config.seed).spawn(len(roster) + 1)
        self.rng = np.random.default_rng(streams[0])
        for i, agent in enumerate(roster):
            agent.id = i
            agent.kernel = self
            agent.rng = np.random.default_rng(streams[i + 1])
        for agent in roster:
            agent.kernel_initializing(self)
        for agent in roster:
            agent.kernel_starting(self.now)

    # -- queue -----------------------------------------------------------
    def _push(self, message: Message) -> None:
        heapq.heappush(self._queue, (message.deliver_at, self._seq, message))
        self._seq += 1

    def route(self, sender: int, recipient: int, payload: Any, *, sent_at: int | None = None) -> None:
        """Queue a message for delivery after the configured latency.

        Deliveries landing before the current clock are clamped to it.
        """
        n = len(self.agents)
        if not 0 <= recipient < n:
            raise RoutingError(f"unknown recipient {recipient}")
        if not 0 <= sender < n:
            raise RoutingError(f"unknown sender {sender}")
        sent = self.now if sent_at is None else sent_at
        delay = self.config.latency.base(sender, recipient)
        jmax = self.config.latency.jitter_nanos_max
        if jmax:
            delay += int(self.rng.integers(0, jmax, endpoint=True))
        deliver_at = max(sent + delay, self.now)
        self._push(Message(sender, recipient, sent, deliver_at, payload))

    def schedule_wakeup(self, agent_id: int, at: int) -> None:
        """Queue a self-addressed wakeup delivered exactly at ``at`` (no latency)."""
        if not 0 <= agent_id < len(self.agents):
            raise RoutingError(f"unknown agent {agent_id}")
        if at < self.now:
            raise SchedulingError(f"wakeup at {fmt_time(at)} is before the clock {fmt_time(self.now)}")
        self._push(Message(agent_id, agent_id, self.now, at, WAKEUP))

    def interrupt(self, agent_id: int, raw_state: dict) -> None:
        """Pause the run after the current delivery, surfacing ``raw_state``."""
        self._interrupt = raw_state
        self._interrupting_agent = agent_id
        self._last_raw_state = raw_state

    # -- run/terminate -----------------------------------------------------
    def run(self, injected_action: Any = None) -> RunResult:
        """Process queued messages until an interruption, queue exhaustion, or end time.

        ``injected_action`` is handed to the agent that raised the previous
        interruption before any queued message is delivered.
        """
        if self._phase is not _Phase.READY:
            raise StateError("cannot resume a finished kernel")
        if injected_action is not None:
            if self._interrupting_agent is None:
                raise StateError("no interrupted agent to receive the injected action")
            self.agents[self._interrupting_agent].apply_injected_action(self.now, injected_action)
        self._interrupt = None
        queue = self._queue
        end = self.config.end_time
        while queue:
            deliver_at = queue[0][0]
            if deliver_at >= end:
                # Anything at or past end_time never fires; it stays queued so
                # that routed messages remain accounted for at termination.
                self.now = end
                self._phase = _Phase.DONE
                return RunResult(RunStatus.DONE, self._last_raw_state)
            _, _, message = heapq.heappop(queue)
            self.now = deliver_at
            agent = self.agents[message.recipient]
            if message.payload is WAKEUP:
                agent.wakeup(deliver_at)
            else:
                agent.receive_message(deliver_at, message.sender, message.payload)
            if self._interrupt is not None:
                state = self._interrupt
                self._interrupt = None
                return RunResult(RunStatus.INTERRUPTED, state)
        self.now = end
        self._phase = _Phase.DONE
        return RunResult(RunStatus.DONE, self._last_raw_state)

    def terminate(self) -> RunLog:
        """Run the stopping and terminating hooks in roster order and collect logs."""
        if self._phase is _Phase.TERMINATED:
            raise StateError("kernel already terminated")
        for agent in self.agents:
            agent.kernel_stopping(self.now)
        logs = {agent.id: agent.kernel_terminating(self.now) for agent in self.agents}
        self._phase = _Phase.TERMINATED
        return RunLog(logs)

    # -- introspection -----------------------------------------------------
    @property
    def finished(self) -> bool:
        return self._phase is not _Phase.READY

    def pending_messages(self) -> list[tuple[int, int, int, int, Any]]:
        """Sorted snapshot (deliver_at, seq, sender, recipient, payload) of the queue."""
        return [
            (d, s, m.sender, m.recipient, m.payload)
            for d, s, m in sorted(self._queue, key=lambda e: (e[0], e[1]))
        ]
