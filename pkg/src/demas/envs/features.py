"""State features shared by the trading environments.

All helpers map degenerate market states (empty sides, no trades yet, missing
history) to fixed documented values so state vectors stay finite.
"""
from __future__ import annotations

from ..book import Side


def imbalance(bids: list[tuple[int, int]], asks: list[tuple[int, int]], levels: int | None = None) -> float:
    """Bid volume over two-sided volume within the top ``levels`` price levels.

    Empty book maps to 0.5, no bids to 0.0, no asks to 1.0.
    """
    if levels is not None:
        bids = bids[:levels]
        asks = asks[:levels]
    bid_vol = sum(q for _, q in bids)
    ask_vol = sum(q for _, q in asks)
    if bid_vol == 0 and ask_vol == 0:
        return 0.5
    if bid_vol == 0:
        return 0.0
    if ask_vol == 0:
        return 1.0
    return bid_vol / (bid_vol + ask_vol)


def mid_changes(mids: list[float | None], k: int) -> list[float]:
    """Last k consecutive mid differences, most recent first; 0 when undefined.

    Entry i is mids[-1-i] - mids[-2-i]; any missing or None operand gives 0.
    """
    out = []
    n = len(mids)
    for i in range(k):
        newer = mids[n - 1 - i] if n - 1 - i >= 0 else None
        older = mids[n - 2 - i] if n - 2 - i >= 0 else None
        out.append(float(newer - older) if newer is not None and older is not None else 0.0)
    return out


def direction_feature(mid: float | None, last_transaction: int | None) -> float:
    """Mid price minus last transaction price; 0 while either is undefined."""
    if mid is None or last_transaction is None:
        return 0.0
    return float(mid - last_transaction)


def near_touch(side: Side, best_bid: int | None, best_ask: int | None) -> int | None:
    """The passive price for ``side``: best bid for a buyer, best ask for a seller."""
    return best_bid if side is Side.BUY else best_ask
