"""Bridge agent: wakeup grid, raw-state contract, fill accounting, commands."""
import numpy as np
import pytest

from demas.book import Side
from demas.envs.markets import CancelAll, EnvAgent, Noop, PlaceLimit, PlaceMarket
from demas.errors import ConfigError, UsageError
from demas.exchange import BookSeedConfig, ExchangeAgent, MarketHours
from demas.kernel import Kernel, KernelConfig, at_time, minutes, seconds

OPEN = at_time("09:30")
FIRST = at_time("09:35")

RAW_KEYS = {
    "time", "cash", "holdings", "open_orders", "fills", "bids", "asks",
    "best_bid", "best_ask", "mid", "spread", "last_transaction",
    "mid_history", "has_market_data", "first_wakeup", "timestep",
}


def session(*, timestep=minutes(1), end=at_time("16:05"), history=4, qty_per_level=1_000):
    exchange = ExchangeAgent(
        hours=MarketHours(),
        seed_book=BookSeedConfig(qty_per_level=qty_per_level),
        validate=True,
    )
    agent = EnvAgent(0, FIRST, timestep, history=history)
    kernel = Kernel(
        KernelConfig(start_time=OPEN - minutes(2), end_time=end, seed=0),
        [exchange, agent],
    )
    return kernel, exchange, agent


def test_wakeups_form_exact_arithmetic_grid():
    kernel, _, _ = session(timestep=seconds(90), end=FIRST + seconds(90) * 10 + 1)
    times = []
    result = kernel.run()
    while result.interrupted:
        times.append(result.raw_state["time"])
        result = kernel.run(injected_action=[Noop()])
    assert times == [FIRST + n * seconds(90) for n in range(11)]


def test_raw_state_contract_before_any_trading():
    kernel, _, _ = session()
    raw = kernel.run().raw_state
    assert set(raw) == RAW_KEYS
    assert raw["time"] == FIRST
    assert raw["cash"] == 10_000_000
    assert raw["holdings"] == 0
    assert raw["open_orders"] == [] and raw["fills"] == []
    assert raw["best_bid"] == 9_995 and raw["best_ask"] == 10_005
    assert raw["mid"] == 10_000 and raw["spread"] == 10
    assert raw["bids"][0] == (9_995, 1_000) and len(raw["bids"]) == 10
    assert raw["last_transaction"] is None
    assert raw["has_market_data"] is True
    assert raw["first_wakeup"] == FIRST and raw["timestep"] == minutes(1)
    assert raw["mid_history"] == [10_000]


def test_market_buy_updates_cash_holdings_and_fills():
    kernel, _, _ = session()
    kernel.run()
    raw = kernel.run(injected_action=[PlaceMarket(Side.BUY, 50)]).raw_state
    assert raw["holdings"] == 50
    assert raw["cash"] == 10_000_000 - 50 * 10_005
    (fill,) = raw["fills"]
    assert fill["side"] == "BUY" and fill["qty"] == 50 and fill["price"] == 10_005
    # depth reflects the partial fill of the touched ask level
    assert raw["asks"][0] == (10_005, 950)
    assert raw["last_transaction"] == 10_005
    # the fills buffer drains between steps
    raw = kernel.run(injected_action=[Noop()]).raw_state
    assert raw["fills"] == []


def test_market_sell_mirrors_buy_accounting():
    kernel, _, _ = session()
    kernel.run()
    raw = kernel.run(injected_action=[PlaceMarket(Side.SELL, 30)]).raw_state
    assert raw["holdings"] == -30  # short selling is allowed
    assert raw["cash"] == 10_000_000 + 30 * 9_995


def test_resting_limit_tracked_then_cancelled():
    kernel, _, _ = session()
    kernel.run()
    raw = kernel.run(injected_action=[PlaceLimit(Side.BUY, 10, 9_900)]).raw_state
    (order,) = raw["open_orders"]
    assert order["side"] == "BUY" and order["qty"] == 10 and order["price"] == 9_900
    raw = kernel.run(injected_action=[CancelAll()]).raw_state
    assert raw["open_orders"] == []
    assert raw["holdings"] == 0


def test_marketable_limit_never_lingers_in_open_orders():
    kernel, _, _ = session()
    kernel.run()
    raw = kernel.run(injected_action=[PlaceLimit(Side.BUY, 40, 10_005)]).raw_state
    assert raw["open_orders"] == []
    assert raw["holdings"] == 40
    (fill,) = raw["fills"]
    assert fill["price"] == 10_005


def test_partially_filled_limit_shows_remaining_qty():
    kernel, _, _ = session(qty_per_level=25)
    kernel.run()
    # crosses the 25-share touch level, then 15 shares rest at the limit
    raw = kernel.run(injected_action=[PlaceLimit(Side.BUY, 40, 10_005)]).raw_state
    assert raw["holdings"] == 25
    (order,) = raw["open_orders"]
    assert order["qty"] == 15 and order["price"] == 10_005


def test_accounting_matches_fill_stream_and_tape():
    kernel, exchange, agent = session(timestep=seconds(30), qty_per_level=10_000)
    rng = np.random.default_rng(7)
    result = kernel.run()
    fills = []
    for _ in range(60):
        if not result.interrupted:
            break
        raw = result.raw_state
        fills.extend(raw["fills"])
        roll = rng.integers(0, 4)
        if roll == 0:
            cmds = [PlaceMarket(Side(rng.choice(["BUY", "SELL"])), int(rng.integers(1, 30)))]
        elif roll == 1 and raw["best_bid"] is not None:
            side = Side(rng.choice(["BUY", "SELL"]))
            price = raw["best_bid"] if side is Side.BUY else raw["best_ask"]
            cmds = [PlaceLimit(side, int(rng.integers(1, 30)), price)]
        elif roll == 2:
            cmds = [CancelAll()]
        else:
            cmds = [Noop()]
        result = kernel.run(injected_action=cmds)

    cash, holdings = 10_000_000, 0
    for f in fills:
        signed = f["qty"] if f["side"] == "BUY" else -f["qty"]
        holdings += signed
        cash -= signed * f["price"]
    assert holdings == agent.holdings
    assert cash == agent.cash

    # every fill corresponds to a tape row naming this agent
    tape = [(at, price, qty) for at, price, qty, aggr, rest in exchange.tape if 1 in (aggr, rest)]
    for f in fills:
        assert (f["at"], f["price"], f["qty"]) in tape


def test_mid_history_keeps_last_n_samples():
    kernel, _, _ = session(history=3)
    result = kernel.run()
    for _ in range(5):
        result = kernel.run(injected_action=[Noop()])
    assert len(result.raw_state["mid_history"]) == 3


def test_bad_commands_raise_usage_errors():
    kernel, _, _ = session()
    kernel.run()
    with pytest.raises(UsageError):
        kernel.run(injected_action=[PlaceMarket(Side.BUY, 0)])


def test_unknown_command_rejected():
    kernel, _, _ = session()
    kernel.run()
    with pytest.raises(UsageError):
        kernel.run(injected_action=["buy some"])


def test_config_validation():
    with pytest.raises(ConfigError):
        EnvAgent(0, FIRST, 0)
    with pytest.raises(ConfigError):
        EnvAgent(0, FIRST, minutes(1), history=1)
    exchange = ExchangeAgent(hours=MarketHours())
    early = EnvAgent(0, OPEN - minutes(10), minutes(1))
    with pytest.raises(ConfigError):
        Kernel(
            KernelConfig(start_time=OPEN - minutes(2), end_time=at_time("16:05"), seed=0),
            [exchange, early],
        )
