"""
The order execution task
========================

Sell a 20000-share parent order inside a four hour window, in 50-share
children, choosing every ten seconds between a market order, a limit order at
the touch, or waiting. Rewards are the running profit against the arrival
price, scaled by the parent size; leftover shares at the deadline are
penalized per share.

Two fixed policies bracket the problem: always-MARKET finishes early and pays
the spread; always-DO-NOTHING executes nothing and eats the full penalty.
"""
from demas.envs.execution import DO_NOTHING, LIMIT, MARKET, ExecutionConfig, ExecutionEnv


def run_fixed(action, label):
    env = ExecutionEnv(ExecutionConfig())
    env.seed(11)
    env.reset()
    total, steps, done = 0.0, 0, False
    while not done:
        _, reward, done, info = env.step(action)
        total += reward
        steps += 1
    print(f"{label}:")
    print(f"  steps {steps}, executed {info['executed_qty']} of "
          f"{env.config.parent_order_size}")
    print(f"  total scaled reward {total:.3f} "
          f"(terminal update {info['terminal_update']})")
    return env


# 20000 / 50 = 400 order-placing steps; the cost is half the spread per
# share plus whatever the background flow does to the price while we sell
run_fixed(MARKET, "always MARKET")

# nothing executes, so the terminal update is the full 100-cent-per-share
# penalty in scaled units: -100
print()
run_fixed(DO_NOTHING, "always DO_NOTHING")

# a LIMIT order joins the near touch and waits; it fills only when incoming
# flow trades through it, so most of the parent order survives to the
# deadline and gets penalized
print()
run_fixed(LIMIT, "always LIMIT")
