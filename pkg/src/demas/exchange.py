"""Exchange agent: owns the order book and speaks a message protocol.

Traders submit orders and queries as request payloads; the exchange answers
with acks, fills and snapshots. Order flow is accepted only inside market
hours. Subscribers get a depth push whenever the book changes, throttled to at
most one push per ``min_interval`` nanoseconds per subscriber.

Per accepted order the exchange sends exactly one ack, and per trade exactly
two fill messages (aggressor and resting owner), in trade order after the ack.
The exchange owns the orders used to seed the book before the open, so seed
fills are delivered to the exchange itself and land in its own fill log.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .book import BookStats, OrderBook, Side
from .errors import ConfigError, SimError
from .kernel import Agent, at_time, fmt_time


# -- request payloads ------------------------------------------------------

@dataclass(slots=True, frozen=True)
class LimitOrderRequest:
    side: Side
    qty: int
    price: int
    tag: object = None


@dataclass(slots=True, frozen=True)
class MarketOrderRequest:
    side: Side
    qty: int
    tag: object = None


@dataclass(slots=True, frozen=True)
class CancelRequest:
    order_id: int


@dataclass(slots=True, frozen=True)
class SnapshotQuery:
    levels: int | None = None


@dataclass(slots=True, frozen=True)
class StatsQuery:
    pass


@dataclass(slots=True, frozen=True)
class Subscribe:
    """Depth pushes on book changes; ``levels=None`` means full depth."""

    levels: int | None = None
    min_interval: int = 0


# -- reply payloads ----------------------------------------------------------

@dataclass(slots=True, frozen=True)
class OrderAccepted:
    order_id: int
    kind: str  # "limit" or "market"
    side: Side
    qty: int
    price: int | None
    tag: object = None


@dataclass(slots=True, frozen=True)
class OrderRejected:
    reason: str
    tag: object = None


@dataclass(slots=True, frozen=True)
class CancelDone:
    order_id: int
    cancelled_qty: int


@dataclass(slots=True, frozen=True)
class Fill:
    order_id: int
    side: Side
    qty: int
    price: int
    at: int


@dataclass(slots=True, frozen=True)
class SnapshotReply:
    bids: list[tuple[int, int]]
    asks: list[tuple[int, int]]
    last_transaction: int | None


@dataclass(slots=True, frozen=True)
class StatsReply:
    best_bid: int | None
    best_ask: int | None
    last_transaction: int | None
    total_bid_qty: int
    total_ask_qty: int


@dataclass(slots=True, frozen=True)
class SubscriptionUpdate:
    bids: list[tuple[int, int]]
    asks: list[tuple[int, int]]
    last_transaction: int | None


# -- configuration -------------------------------------------------------------

@dataclass(slots=True)
class MarketHours:
    open: int = at_time("09:30")
    close: int = at_time("16:00")

    def __post_init__(self) -> None:
        if self.open >= self.close:
            raise ConfigError("market open must precede close")

    def is_open(self, t: int) -> bool:
        return self.open <= t < self.close


@dataclass(slots=True)
class BookSeedConfig:
    """Symmetric resting depth placed before the open, owned by the exchange.

    Level i rests qty_per_level at center -/+ (half_spread + i * tick).
    """

    center: int = 10_000
    half_spread: int = 5
    tick: int = 10
    levels: int = 10
    qty_per_level: int = 1_000

    def __post_init__(self) -> None:
        if self.levels < 0 or self.qty_per_level <= 0 or self.tick <= 0:
            raise ConfigError("book seed needs positive tick and qty and non-negative levels")
        if self.center - self.half_spread - (self.levels - 1) * self.tick <= 0:
            raise ConfigError("book seed would place bids at or below zero")


@dataclass
class _Subscriber:
    levels: int | None
    min_interval: int
    last_push_at: int
    last_version: int


class ExchangeAgent(Agent):
    """Matches orders during market hours and publishes book state."""

    def __init__(
        self,
        hours: MarketHours | None = None,
        seed_book: BookSeedConfig | None = None,
        validate: bool = False,
        log_fills: bool = False,
    ):
        super().__init__(name="exchange")
        self.hours = hours or MarketHours()
        self.seed_book = seed_book
        self.validate = validate
        self.log_fills = log_fills
        self.book = OrderBook()
        self.tape: list[tuple[int, int, int, int, int]] = []
        self._subscribers: dict[int, _Subscriber] = {}
        self._version = 0
        self._fills: list[Fill] = []

    # -- lifecycle -----------------------------------------------------------
    def kernel_starting(self, now: int) -> None:
        if self.seed_book is None:
            return
        cfg = self.seed_book
        for i in range(cfg.levels):
            offset = cfg.half_spread + i * cfg.tick
            self.book.submit_limit(self.id, Side.BUY, cfg.qty_per_level, cfg.center - offset, now)
            self.book.submit_limit(self.id, Side.SELL, cfg.qty_per_level, cfg.center + offset, now)
        self._version += 1

    def kernel_terminating(self, now: int):
        snap = self.book.snapshot()
        return {
            "trade_tape": self.tape,
            "final_bids": snap.bids,
            "final_asks": snap.asks,
            "fills": self._fills if self.log_fills else [],
        }

    # -- dispatch ------------------------------------------------------------
    def receive_message(self, now: int, sender: int, payload) -> None:
        if isinstance(payload, LimitOrderRequest):
            self._on_limit(now, sender, payload)
        elif isinstance(payload, MarketOrderRequest):
            self._on_market(now, sender, payload)
        elif isinstance(payload, CancelRequest):
            self._on_cancel(now, sender, payload)
        elif isinstance(payload, SnapshotQuery):
            snap = self.book.snapshot(payload.levels)
            self.send(sender, SnapshotReply(snap.bids, snap.asks, snap.last_transaction))
        elif isinstance(payload, StatsQuery):
            s: BookStats = self.book.stats()
            self.send(
                sender,
                StatsReply(s.best_bid, s.best_ask, s.last_transaction, s.total_bid_qty, s.total_ask_qty),
            )
        elif isinstance(payload, Subscribe):
            self._subscribers[sender] = _Subscriber(
                payload.levels, payload.min_interval, last_push_at=now, last_version=self._version
            )
            self.send(sender, self._update(payload.levels))
        elif isinstance(payload, Fill):
            # Fills on the exchange's own seed orders route back to itself.
            self._fills.append(payload)
        else:
            raise SimError(f"exchange cannot handle payload {payload!r}")

    # -- order flow -------------------------------------------------------------
    def _closed_reason(self, now: int) -> str:
        return f"market closed at {fmt_time(now)}"

    def _on_limit(self, now: int, sender: int, req: LimitOrderRequest) -> None:
        if not self.hours.is_open(now):
            self.send(sender, OrderRejected(self._closed_reason(now), req.tag))
            return
        if req.qty <= 0 or req.price <= 0:
            self.send(sender, OrderRejected(f"bad limit order qty={req.qty} price={req.price}", req.tag))
            return
        order_id, trades = self.book.submit_limit(sender, req.side, req.qty, req.price, now)
        self.send(sender, OrderAccepted(order_id, "limit", req.side, req.qty, req.price, req.tag))
        rested = self.book.open_order(order_id) is not None
        self._settle(now, req.side, trades, changed=rested or bool(trades))

    def _on_market(self, now: int, sender: int, req: MarketOrderRequest) -> None:
        if not self.hours.is_open(now):
            self.send(sender, OrderRejected(self._closed_reason(now), req.tag))
            return
        if req.qty <= 0:
            self.send(sender, OrderRejected(f"bad market order qty={req.qty}", req.tag))
            return
        order_id, trades = self.book.submit_market(sender, req.side, req.qty, now)
        self.send(sender, OrderAccepted(order_id, "market", req.side, req.qty, None, req.tag))
        self._settle(now, req.side, trades, changed=bool(trades))

    def _on_cancel(self, now: int, sender: int, req: CancelRequest) -> None:
        if not self.hours.is_open(now):
            self.send(sender, OrderRejected(self._closed_reason(now)))
            return
        order = self.book.open_order(req.order_id)
        if order is None or order.owner != sender:
            # Unknown, already filled, or someone else's order: nothing cancelled.
            self.send(sender, CancelDone(req.order_id, 0))
            return
        qty = self.book.cancel(req.order_id)
        self.send(sender, CancelDone(req.order_id, qty))
        self._settle(now, None, [], changed=qty > 0)

    def _settle(self, now: int, aggressor_side: Side | None, trades, changed: bool) -> None:
        for t in trades:
            self.tape.append((t.at, t.price, t.qty, t.aggressor, t.resting_owner))
            self.send(t.aggressor, Fill(t.aggressor_order_id, aggressor_side, t.qty, t.price, t.at))
            self.send(t.resting_owner, Fill(t.resting_order_id, aggressor_side.opposite, t.qty, t.price, t.at))
        if changed:
            self._version += 1
            if self.validate and self.book.crossed():
                raise SimError("order book crossed after settlement")
            self._publish(now)

    # -- publication ----------------------------------------------------------
    def _publish(self, now: int) -> None:
        for agent_id, sub in self._subscribers.items():
            if sub.last_version == self._version:
                continue
            if now - sub.last_push_at < sub.min_interval:
                continue
            sub.last_push_at = now
            sub.last_version = self._version
            self.send(agent_id, self._update(sub.levels))

    def _update(self, levels: int | None) -> SubscriptionUpdate:
        snap = self.book.snapshot(levels)
        return SubscriptionUpdate(snap.bids, snap.asks, snap.last_transaction)
