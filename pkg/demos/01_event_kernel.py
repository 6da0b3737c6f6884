"""
A tour of the discrete-event kernel
===================================

Two toy agents exchange messages through the kernel's priority queue. The
point of the demo: simulated time only moves when a message is delivered,
delivery order is deterministic for a fixed seed, and a run can be paused
mid-day and resumed with an injected decision.
"""
from demas.kernel import (
    Agent,
    Kernel,
    KernelConfig,
    LatencyModel,
    at_time,
    fmt_time,
    minutes,
    seconds,
)


class Pinger(Agent):
    """Sends "ping" every wakeup and logs whatever comes back."""

    def kernel_starting(self, now):
        self.set_wakeup(now + seconds(10))

    def wakeup(self, now):
        print(f"  {fmt_time(now)}  pinger wakes and sends ping")
        self.send(1, "ping")
        if now < at_time("09:32"):
            self.set_wakeup(now + seconds(30))

    def receive_message(self, now, sender, payload):
        print(f"  {fmt_time(now)}  pinger got {payload!r} from agent {sender}")


class Ponger(Agent):
    def receive_message(self, now, sender, payload):
        self.send(sender, "pong")


class Decider(Agent):
    """Pauses the whole simulation and waits for an outside answer."""

    def kernel_starting(self, now):
        self.set_wakeup(at_time("09:31"))

    def wakeup(self, now):
        print(f"  {fmt_time(now)}  decider asks for an outside action")
        self.kernel.interrupt(self.id, {"question": "act now?"})

    def apply_injected_action(self, now, action):
        print(f"  {fmt_time(now)}  decider received injected action {action!r}")


config = KernelConfig(
    start_time=at_time("09:30"),
    end_time=at_time("09:30") + minutes(3),
    seed=7,
    latency=LatencyModel(base_nanos=seconds(1), jitter_nanos_max=seconds(1)),
)

print("running with a pause at 09:31:")
kernel = Kernel(config, [Pinger(), Ponger(), Decider()])
result = kernel.run()

# the run stops inside the decider's wakeup; state crosses the boundary as a dict
print(f"interrupted: {result.interrupted}, raw state: {result.raw_state}")

# resuming hands the action to the interrupted agent, then the day finishes
result = kernel.run(injected_action="buy")
print(f"interrupted after resume: {result.interrupted}")
kernel.terminate()

# same config and seed, same message schedule: latency jitter draws from a
# seeded stream, so reruns reproduce delivery times exactly
print("\nrerunning the same day reproduces it verbatim (try it).")
