"""Experimental trading agent that bridges a market kernel to an environment.

The agent subscribes to full-depth market data, wakes on a fixed arithmetic
time grid, and at each wakeup queries book statistics; when the reply arrives
it assembles a raw-state dict and interrupts the kernel. Actions injected on
resume are lists of order commands translated into exchange requests.

Raw state contract (all values plain ints/floats/lists/None, safe to
serialize; the stable surface consumed by the environments and bindings):

==================  =========================================================
key                 meaning
==================  =========================================================
time                nanoseconds since midnight of this interruption
cash                integer cents
holdings            signed shares
open_orders         list of {order_id, side, qty, price} for resting orders
fills               list of {order_id, side, qty, price, at} since last step
bids / asks         full aggregated depth, best first, as (price, qty) pairs
best_bid/best_ask   integer cents or None
mid                 (best_bid + best_ask) / 2 or None
spread              best_ask - best_bid or None
last_transaction    price of the last trade anywhere in the market, or None
mid_history         mids sampled at the most recent wakeups, oldest first
has_market_data     whether any depth update has arrived yet
first_wakeup        episode grid origin, nanoseconds
timestep            grid spacing, nanoseconds
==================  =========================================================

Cash and holdings follow fills exactly: a buy fill adds qty shares and costs
price * qty cents; sells mirror.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..book import Side
from ..errors import ConfigError, UsageError
from ..exchange import (
    CancelDone,
    CancelRequest,
    Fill,
    LimitOrderRequest,
    MarketOrderRequest,
    OrderAccepted,
    StatsQuery,
    StatsReply,
    Subscribe,
    SubscriptionUpdate,
)
from ..kernel import Agent


# -- order commands ---------------------------------------------------------

@dataclass(slots=True, frozen=True)
class PlaceMarket:
    side: Side
    qty: int


@dataclass(slots=True, frozen=True)
class PlaceLimit:
    side: Side
    qty: int
    price: int


@dataclass(slots=True, frozen=True)
class CancelAll:
    pass


@dataclass(slots=True, frozen=True)
class Noop:
    pass


OrderCommand = PlaceMarket | PlaceLimit | CancelAll | Noop


class EnvAgent(Agent):
    """Wakes on a fixed grid, exports raw states, applies injected commands."""

    def __init__(
        self,
        exchange_id: int,
        first_wakeup: int,
        timestep: int,
        starting_cash: int = 10_000_000,
        history: int = 4,
    ):
        super().__init__(name="env-agent")
        if timestep <= 0:
            raise ConfigError("timestep must be positive")
        if history < 2:
            raise ConfigError("need at least two history slots to difference mids")
        self.exchange_id = exchange_id
        self.first_wakeup = first_wakeup
        self.timestep = timestep
        self.cash = starting_cash
        self.holdings = 0
        self.open_orders: dict[int, dict] = {}
        self._fills: list[dict] = []
        self._bids: list[tuple[int, int]] = []
        self._asks: list[tuple[int, int]] = []
        self._last_transaction: int | None = None
        self._has_market_data = False
        self._mid_history: deque = deque(maxlen=history)

    # -- lifecycle -------------------------------------------------------------
    def kernel_starting(self, now: int) -> None:
        if self.first_wakeup < now:
            raise ConfigError("first wakeup precedes the kernel start time")
        self.send(self.exchange_id, Subscribe(levels=None, min_interval=0))
        self.set_wakeup(self.first_wakeup)

    def wakeup(self, now: int) -> None:
        # Next grid point is scheduled before anything else so the wakeup
        # sequence stays an exact arithmetic progression whatever happens
        # during the step.
        self.set_wakeup(now + self.timestep)
        self.send(self.exchange_id, StatsQuery())

    # -- message handling ---------------------------------------------------------
    def receive_message(self, now: int, sender: int, payload) -> None:
        if isinstance(payload, SubscriptionUpdate):
            self._bids = payload.bids
            self._asks = payload.asks
            self._last_transaction = payload.last_transaction
            self._has_market_data = True
        elif isinstance(payload, StatsReply):
            self._on_stats(now, payload)
        elif isinstance(payload, Fill):
            self._on_fill(payload)
        elif isinstance(payload, OrderAccepted):
            # Acks precede the fills they trigger, so a fully marketable limit
            # is tracked here and then drained to zero by its own fills.
            if payload.kind == "limit":
                self.open_orders[payload.order_id] = {
                    "order_id": payload.order_id,
                    "side": payload.side.value,
                    "qty": payload.qty,
                    "price": payload.price,
                }
        elif isinstance(payload, CancelDone):
            self.open_orders.pop(payload.order_id, None)

    def _on_stats(self, now: int, stats: StatsReply) -> None:
        bid, ask = stats.best_bid, stats.best_ask
        mid = (bid + ask) / 2 if bid is not None and ask is not None else None
        self._mid_history.append(mid)
        if stats.last_transaction is not None:
            self._last_transaction = stats.last_transaction
        self.kernel.interrupt(self.id, self._raw_state(now, bid, ask, mid))

    def _on_fill(self, fill: Fill) -> None:
        if fill.side is Side.BUY:
            self.holdings += fill.qty
            self.cash -= fill.price * fill.qty
        else:
            self.holdings -= fill.qty
            self.cash += fill.price * fill.qty
        tracked = self.open_orders.get(fill.order_id)
        if tracked is not None:
            tracked["qty"] -= fill.qty
            if tracked["qty"] <= 0:
                del self.open_orders[fill.order_id]
        self._fills.append(
            {
                "order_id": fill.order_id,
                "side": fill.side.value,
                "qty": fill.qty,
                "price": fill.price,
                "at": fill.at,
            }
        )

    # -- raw state ------------------------------------------------------------
    def _raw_state(self, now: int, bid, ask, mid) -> dict:
        fills, self._fills = self._fills, []
        return {
            "time": now,
            "cash": self.cash,
            "holdings": self.holdings,
            "open_orders": [dict(o) for o in self.open_orders.values()],
            "fills": fills,
            "bids": list(self._bids),
            "asks": list(self._asks),
            "best_bid": bid,
            "best_ask": ask,
            "mid": mid,
            "spread": ask - bid if bid is not None and ask is not None else None,
            "last_transaction": self._last_transaction,
            "mid_history": list(self._mid_history),
            "has_market_data": self._has_market_data,
            "first_wakeup": self.first_wakeup,
            "timestep": self.timestep,
        }

    # -- actions -----------------------------------------------------------------
    def apply_injected_action(self, now: int, action) -> None:
        for command in action:
            if isinstance(command, Noop):
                continue
            elif isinstance(command, CancelAll):
                for order_id in list(self.open_orders):
                    self.send(self.exchange_id, CancelRequest(order_id))
            elif isinstance(command, PlaceMarket):
                if command.qty <= 0:
                    raise UsageError(f"market order qty must be positive, got {command.qty}")
                self.send(self.exchange_id, MarketOrderRequest(command.side, command.qty))
            elif isinstance(command, PlaceLimit):
                if command.qty <= 0 or command.price <= 0:
                    raise UsageError(f"bad limit command qty={command.qty} price={command.price}")
                self.send(self.exchange_id, LimitOrderRequest(command.side, command.qty, command.price))
            else:
                raise UsageError(f"unknown order command {command!r}")
