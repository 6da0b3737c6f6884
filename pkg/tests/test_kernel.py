"""Kernel behavior: ordering, determinism, interruption, lifecycle."""
import numpy as np
import pytest

from demas.errors import ConfigError, RoutingError, SchedulingError, StateError
from demas.kernel import (
    WAKEUP,
    Agent,
    Kernel,
    KernelConfig,
    LatencyModel,
    RunStatus,
    at_time,
    duration_ns,
    fmt_time,
    hours,
    minutes,
    seconds,
)


class Recorder(Agent):
    """Logs every delivery as (kind, now, detail)."""

    def kernel_starting(self, now):
        self.log_event(("starting", now))

    def receive_message(self, now, sender, payload):
        self.log_event(("message", now, sender, payload))

    def wakeup(self, now):
        self.log_event(("wakeup", now))


class Pinger(Agent):
    """Sends one payload to a peer at start."""

    def __init__(self, peer, payload):
        super().__init__()
        self.peer = peer
        self.payload = payload

    def kernel_starting(self, now):
        self.send(self.peer, self.payload)


def build(agents, *, start=0, end=seconds(100), seed=0, latency=None):
    latency = latency or LatencyModel()
    return Kernel(KernelConfig(start_time=start, end_time=end, seed=seed, latency=latency), agents)


# -- time helpers ---------------------------------------------------------

def test_time_helpers():
    assert seconds(1) == 1_000_000_000
    assert minutes(1) == 60 * seconds(1)
    assert hours(1) == 60 * minutes(1)
    assert at_time("09:30") == 9 * hours(1) + 30 * minutes(1)
    assert at_time("16:00:30") == 16 * hours(1) + seconds(30)
    assert fmt_time(at_time("09:35")) == "09:35:00"
    assert fmt_time(seconds(1) + 2500) == "00:00:01.000002"


def test_duration_spec():
    assert duration_ns({"seconds": 60}) == minutes(1)
    assert duration_ns({"hours": 1, "seconds": 30}) == hours(1) + seconds(30)
    assert duration_ns(10) == 10
    with pytest.raises(ConfigError):
        duration_ns({"days": 1})
    with pytest.raises(ConfigError):
        duration_ns("60s")


def test_bad_clock_string():
    with pytest.raises(ConfigError):
        at_time("0930")


# -- build phase ----------------------------------------------------------

def test_build_assigns_ids_and_runs_hooks_in_roster_order():
    calls = []

    class Hooked(Agent):
        def kernel_initializing(self, kernel):
            calls.append(("init", self.id))

        def kernel_starting(self, now):
            calls.append(("start", self.id))

    build([Hooked(), Hooked(), Hooked()])
    assert calls == [("init", 0), ("init", 1), ("init", 2), ("start", 0), ("start", 1), ("start", 2)]


def test_empty_roster_rejected():
    with pytest.raises(ConfigError):
        build([])


def test_start_must_precede_end():
    with pytest.raises(ConfigError):
        build([Recorder()], start=seconds(10), end=seconds(10))


def test_agent_rng_streams_are_stable_under_roster_growth():
    """Appending an agent must not change the draws of existing agents."""
    a1, a2 = Recorder(), Recorder()
    build([a1, a2], seed=7)
    short = [a.rng.integers(0, 1 << 30) for a in (a1, a2)]

    b1, b2, b3 = Recorder(), Recorder(), Recorder()
    build([b1, b2, b3], seed=7)
    long = [a.rng.integers(0, 1 << 30) for a in (b1, b2, b3)]
    assert long[:2] == short


def test_agent_rng_streams_differ_between_agents_and_seeds():
    a1, a2 = Recorder(), Recorder()
    build([a1, a2], seed=7)
    x1, x2 = a1.rng.integers(0, 1 << 30), a2.rng.integers(0, 1 << 30)
    assert x1 != x2

    c1, _ = Recorder(), Recorder()
    build([c1, Recorder()], seed=8)
    assert c1.rng.integers(0, 1 << 30) != x1


# -- routing and latency ----------------------------------------------------

def test_fixed_latency_adds_to_send_time():
    rec = Recorder()
    k = build([Pinger(1, "hi"), rec], latency=LatencyModel(base_nanos=100), start=0)
    k.run()
    assert rec._log == [("starting", 0), ("message", 100, 0, "hi")]


def test_jitter_bounds_and_determinism():
    lat = LatencyModel(base_nanos=100, jitter_nanos_max=10)

    def delivery_time(seed):
        rec = Recorder()
        k = build([Pinger(1, "x"), rec], latency=lat, seed=seed)
        k.run()
        return rec._log[-1][1]

    times = {delivery_time(s) for s in range(40)}
    assert all(100 <= t <= 110 for t in times)
    assert len(times) > 1
    assert delivery_time(3) == delivery_time(3)


def test_pair_latency_overrides_base():
    lat = LatencyModel(base_nanos=100, pair_nanos={(0, 1): 7})
    rec = Recorder()
    k = build([Pinger(1, "x"), rec], latency=lat)
    k.run()
    assert rec._log[-1] == ("message", 7, 0, "x")


def test_negative_latency_config_rejected():
    with pytest.raises(ConfigError):
        LatencyModel(base_nanos=-1)


def test_unknown_recipient_and_sender_raise():
    k = build([Recorder(), Recorder()])
    with pytest.raises(RoutingError):
        k.route(0, 5, "x")
    with pytest.raises(RoutingError):
        k.route(-1, 1, "x")
    with pytest.raises(RoutingError):
        k.schedule_wakeup(9, seconds(1))


def test_same_time_messages_delivered_fifo():
    rec = Recorder()

    class TwoSends(Agent):
        def kernel_starting(self, now):
            self.send(1, "first")
            self.send(1, "second")

    k = build([TwoSends(), rec])
    k.run()
    tags = [e[3] for e in rec._log if e[0] == "message"]
    assert tags == ["first", "second"]


def test_delivery_clamped_to_clock():
    """A message routed with an old sent_at still lands no earlier than now."""

    class Backdater(Agent):
        def wakeup(self, now):
            self.kernel.route(self.id, 1, "late", sent_at=0)

    rec = Recorder()
    k = build([Backdater(), rec])
    k.schedule_wakeup(0, seconds(5))
    k.run()
    assert rec._log[-1] == ("message", seconds(5), 0, "late")


# -- wakeups and end time ----------------------------------------------------

def test_wakeup_has_no_latency():
    rec = Recorder()
    k = build([rec], latency=LatencyModel(base_nanos=500))
    k.schedule_wakeup(0, seconds(3))
    k.run()
    assert rec._log == [("starting", 0), ("wakeup", seconds(3))]


def test_wakeup_in_past_rejected():
    rec = Recorder()
    k = build([rec])
    k.schedule_wakeup(0, seconds(1))
    k.run()
    assert k.now == seconds(100)
    with pytest.raises(SchedulingError):
        k.schedule_wakeup(0, seconds(1) - 1)


def test_end_time_is_exclusive():
    """A delivery at exactly end_time never fires; one tick earlier does."""
    rec = Recorder()
    end = seconds(10)
    k = build([rec], end=end)
    k.schedule_wakeup(0, end - 1)
    k.schedule_wakeup(0, end)
    result = k.run()
    assert result.status is RunStatus.DONE
    assert [e for e in rec._log if e[0] == "wakeup"] == [("wakeup", end - 1)]
    assert k.now == end
    assert len(k.pending_messages()) == 1


def test_queue_exhaustion_finishes_run():
    rec = Recorder()
    k = build([rec])
    k.schedule_wakeup(0, seconds(2))
    result = k.run()
    assert result.status is RunStatus.DONE
    assert not k.pending_messages()


def test_message_conservation():
    """Every routed item is either delivered or still pending at the end."""

    class Chatter(Agent):
        def __init__(self, peer):
            super().__init__()
            self.peer = peer
            self.received = 0
            self.sent = 0

        def kernel_starting(self, now):
            for _ in range(5):
                self.send(self.peer, "m")
            self.sent += 5
            self.set_wakeup(now + seconds(99))  # past end: must stay pending

        def receive_message(self, now, sender, payload):
            self.received += 1
            if self.received < 20:
                self.send(sender, "r")
                self.sent += 1

    a, b = Chatter(1), Chatter(0)
    k = build([a, b], end=seconds(50), latency=LatencyModel(base_nanos=seconds(2)))
    assert len(k.pending_messages()) == 12  # 5 + 5 messages plus both wakeups
    k.run()
    routed = a.sent + b.sent + 2
    assert a.received + b.received + len(k.pending_messages()) == routed
    assert len(k.pending_messages()) == 2


# -- interruption ------------------------------------------------------------

class Pauser(Agent):
    """Interrupts on every wakeup, then reschedules; applies injected ints."""

    def __init__(self, period):
        super().__init__()
        self.period = period
        self.actions = []

    def kernel_starting(self, now):
        self.set_wakeup(now + self.period)

    def wakeup(self, now):
        self.set_wakeup(now + self.period)
        self.kernel.interrupt(self.id, {"time": now, "n": len(self.actions)})

    def apply_injected_action(self, now, action):
        self.actions.append((now, action))


def test_interrupt_returns_raw_state_and_resume_continues():
    p = Pauser(seconds(10))
    k = build([p], end=seconds(35))
    r1 = k.run()
    assert r1.status is RunStatus.INTERRUPTED
    assert r1.raw_state == {"time": seconds(10), "n": 0}
    r2 = k.run(injected_action=7)
    assert r2.raw_state == {"time": seconds(20), "n": 1}
    assert p.actions == [(seconds(10), 7)]
    r3 = k.run()
    assert r3.status is RunStatus.INTERRUPTED
    r4 = k.run()
    assert r4.status is RunStatus.DONE
    assert r4.raw_state == {"time": seconds(30), "n": 1}


def test_injected_action_without_prior_interrupt_rejected():
    k = build([Pauser(seconds(10))])
    with pytest.raises(StateError):
        k.run(injected_action=1)


def test_injection_to_agent_without_handler_rejected():
    class Interruptor(Agent):
        def kernel_starting(self, now):
            self.set_wakeup(now + seconds(1))

        def wakeup(self, now):
            self.kernel.interrupt(self.id, {})

    k = build([Interruptor()])
    k.run()
    with pytest.raises(StateError):
        k.run(injected_action=3)


def test_resume_after_done_rejected():
    k = build([Recorder()])
    assert k.run().status is RunStatus.DONE
    assert k.finished
    with pytest.raises(StateError):
        k.run()


# -- termination ---------------------------------------------------------

def test_terminate_collects_logs_and_runs_hooks_in_order():
    calls = []

    class Stoppable(Recorder):
        def kernel_stopping(self, now):
            calls.append(("stop", self.id))

        def kernel_terminating(self, now):
            calls.append(("term", self.id))
            return {"id": self.id}

    k = build([Stoppable(), Stoppable()])
    k.run()
    log = k.terminate()
    assert calls == [("stop", 0), ("stop", 1), ("term", 0), ("term", 1)]
    assert log.agent_logs == {0: {"id": 0}, 1: {"id": 1}}


def test_double_terminate_rejected():
    k = build([Recorder()])
    k.run()
    k.terminate()
    with pytest.raises(StateError):
        k.terminate()


def test_terminate_mid_run_allowed():
    """Termination without finishing the queue still collects logs."""
    p = Pauser(seconds(1))
    k = build([p])
    k.run()
    log = k.terminate()
    assert 0 in log.agent_logs


def test_trade_tape_accessor_finds_tape():
    class TapeHolder(Agent):
        def kernel_terminating(self, now):
            return {"trade_tape": [(1, 2, 3, 4, 5)]}

    k = build([Recorder(), TapeHolder()])
    k.run()
    assert k.terminate().trade_tape() == [(1, 2, 3, 4, 5)]


def test_default_log_is_event_list():
    rec = Recorder()
    k = build([rec])
    k.schedule_wakeup(0, seconds(1))
    k.run()
    assert k.terminate().agent_logs[0] == [("starting", 0), ("wakeup", seconds(1))]


# -- end-to-end determinism ---------------------------------------------------

class RandomWalker(Agent):
    """Wakes on a random grid and records RNG draws; exercises jitter + streams."""

    def kernel_starting(self, now):
        self.set_wakeup(now + int(self.rng.integers(1, seconds(5))))

    def wakeup(self, now):
        self.log_event((now, int(self.rng.integers(0, 1000))))
        peer = int(self.rng.integers(0, 2))
        if peer != self.id:
            self.send(peer, "tick")
        self.set_wakeup(now + int(self.rng.integers(1, seconds(5))))

    def receive_message(self, now, sender, payload):
        self.log_event((now, sender, payload))


def run_walkers(seed):
    agents = [RandomWalker(), RandomWalker()]
    k = build(agents, end=seconds(60), seed=seed, latency=LatencyModel(base_nanos=1000, jitter_nanos_max=500))
    k.run()
    return k.terminate().agent_logs


def test_identical_seed_identical_history():
    assert run_walkers(42) == run_walkers(42)


def test_different_seed_different_history():
    assert run_walkers(42) != run_walkers(43)
