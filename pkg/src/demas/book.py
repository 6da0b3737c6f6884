"""Price-time priority limit order book.

Prices are integer cents and quantities integer shares. Matching walks the
opposite side best-price-first, FIFO within a level, and every trade prints at
the resting order's price. Marketable limit remainders rest in the book;
market order remainders are discarded when the opposite side runs dry.
"""
from __future__ import annotations

from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass
from enum import Enum


class Side(str, Enum):
    BUY = "BUY"
    SELL = "SELL"

    @property
    def opposite(self) -> "Side":
        return Side.SELL if self is Side.BUY else Side.BUY


@dataclass(slots=True)
class Order:
    order_id: int
    owner: int
    side: Side
    qty: int  # remaining, decremented as fills occur
    price: int
    entry_seq: int


@dataclass(slots=True, frozen=True)
class Trade:
    at: int
    price: int
    qty: int
    aggressor: int
    resting_owner: int
    aggressor_order_id: int
    resting_order_id: int


@dataclass(slots=True)
class BookSnapshot:
    """Aggregated depth: bids best-first (descending price), asks best-first (ascending)."""

    bids: list[tuple[int, int]]
    asks: list[tuple[int, int]]
    last_transaction: int | None


@dataclass(slots=True)
class BookStats:
    best_bid: int | None
    best_ask: int | None
    last_transaction: int | None
    total_bid_qty: int
    total_ask_qty: int


class OrderBook:
    """One instrument's resting orders plus the matching logic."""

    def __init__(self) -> None:
        self._levels: dict[tuple[Side, int], deque[Order]] = {}
        self._level_qty: dict[tuple[Side, int], int] = {}
        self._bid_prices: list[int] = []  # ascending; best bid is the last entry
        self._ask_prices: list[int] = []  # ascending; best ask is the first entry
        self._orders: dict[int, Order] = {}
        self._next_id = 1
        self._entry_seq = 0
        self.last_transaction: int | None = None

    # -- submission --------------------------------------------------------
    def submit_limit(self, owner: int, side: Side, qty: int, price: int, at: int) -> tuple[int, list[Trade]]:
        """Match what is marketable, rest the remainder. Returns (order_id, trades)."""
        self._check_qty(qty)
        if price <= 0:
            raise ValueError(f"price must be a positive cent amount, got {price}")
        order_id = self._take_id()
        remaining, trades = self._match(owner, side, qty, price, at, order_id)
        if remaining > 0:
            self._rest(Order(order_id, owner, side, remaining, price, self._take_seq()))
        return order_id, trades

    def submit_market(self, owner: int, side: Side, qty: int, at: int) -> tuple[int, list[Trade]]:
        """Match against the opposite side until filled or it runs dry."""
        self._check_qty(qty)
        order_id = self._take_id()
        _, trades = self._match(owner, side, qty, None, at, order_id)
        return order_id, trades

    def cancel(self, order_id: int) -> int:
        """Remove an open order; returns the quantity cancelled (0 if not open)."""
        order = self._orders.pop(order_id, None)
        if order is None:
            return 0
        key = (order.side, order.price)
        level = self._levels[key]
        level.remove(order)
        self._level_qty[key] -= order.qty
        if not level:
            self._drop_level(order.side, order.price)
        return order.qty

    # -- matching ------------------------------------------------------------
    def _match(
        self, owner: int, side: Side, qty: int, limit_price: int | None, at: int, order_id: int
    ) -> tuple[int, list[Trade]]:
        trades: list[Trade] = []
        remaining = qty
        against = side.opposite
        while remaining > 0:
            best = self._best_price(against)
            if best is None:
                break
            if limit_price is not None:
                if side is Side.BUY and best > limit_price:
                    break
                if side is Side.SELL and best < limit_price:
                    break
            key = (against, best)
            level = self._levels[key]
            resting = level[0]
            fill = min(remaining, resting.qty)
            resting.qty -= fill
            remaining -= fill
            self._level_qty[key] -= fill
            if resting.qty == 0:
                level.popleft()
                del self._orders[resting.order_id]
                if not level:
                    self._drop_level(against, best)
            trades.append(Trade(at, best, fill, owner, resting.owner, order_id, resting.order_id))
            self.last_transaction = best
        return remaining, trades

    def _rest(self, order: Order) -> None:
        key = (order.side, order.price)
        level = self._levels.get(key)
        if level is None:
            self._levels[key] = deque([order])
            self._level_qty[key] = order.qty
            prices = self._bid_prices if order.side is Side.BUY else self._ask_prices
            insort(prices, order.price)
        else:
            level.append(order)
            self._level_qty[key] += order.qty
        self._orders[order.order_id] = order

    def _drop_level(self, side: Side, price: int) -> None:
        del self._levels[(side, price)]
        del self._level_qty[(side, price)]
        prices = self._bid_prices if side is Side.BUY else self._ask_prices
        prices.pop(bisect_left(prices, price))

    def _best_price(self, side: Side) -> int | None:
        prices = self._bid_prices if side is Side.BUY else self._ask_prices
        if not prices:
            return None
        return prices[-1] if side is Side.BUY else prices[0]

    # -- views ---------------------------------------------------------------
    def best_bid(self) -> int | None:
        return self._best_price(Side.BUY)

    def best_ask(self) -> int | None:
        return self._best_price(Side.SELL)

    def mid(self) -> float | None:
        bid, ask = self.best_bid(), self.best_ask()
        if bid is None or ask is None:
            return None
        return (bid + ask) / 2

    def spread(self) -> int | None:
        bid, ask = self.best_bid(), self.best_ask()
        if bid is None or ask is None:
            return None
        return ask - bid

    def snapshot(self, levels: int | None = None) -> BookSnapshot:
        """Top ``levels`` aggregated price levels per side; all levels when None."""
        bid_prices = self._bid_prices[::-1]
        ask_prices = self._ask_prices
        if levels is not None:
            bid_prices = bid_prices[:levels]
            ask_prices = ask_prices[:levels]
        bids = [(p, self._level_qty[(Side.BUY, p)]) for p in bid_prices]
        asks = [(p, self._level_qty[(Side.SELL, p)]) for p in ask_prices]
        return BookSnapshot(bids, asks, self.last_transaction)

    def stats(self) -> BookStats:
        return BookStats(
            best_bid=self.best_bid(),
            best_ask=self.best_ask(),
            last_transaction=self.last_transaction,
            total_bid_qty=sum(q for (s, _), q in self._level_qty.items() if s is Side.BUY),
            total_ask_qty=sum(q for (s, _), q in self._level_qty.items() if s is Side.SELL),
        )

    def open_order(self, order_id: int) -> Order | None:
        return self._orders.get(order_id)

    def resting_orders(self, owner: int | None = None) -> list[Order]:
        """Open orders in entry order, optionally filtered to one owner."""
        orders = sorted(self._orders.values(), key=lambda o: o.entry_seq)
        if owner is None:
            return orders
        return [o for o in orders if o.owner == owner]

    def crossed(self) -> bool:
        bid, ask = self.best_bid(), self.best_ask()
        return bid is not None and ask is not None and bid >= ask

    # -- internals -------------------------------------------------------------
    def _check_qty(self, qty: int) -> None:
        if qty <= 0:
            raise ValueError(f"qty must be a positive share count, got {qty}")

    def _take_id(self) -> int:
        oid = self._next_id
        self._next_id += 1
        return oid

    def _take_seq(self) -> int:
        self._entry_seq += 1
        return self._entry_seq
