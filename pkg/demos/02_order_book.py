"""
Price-time priority matching, step by step
==========================================

Builds a small book by hand and walks through the matching rules: best price
first, oldest order first at a price, partial fills, and trades printing at
the resting order's price. Prices are integer cents throughout.
"""
from demas.book import OrderBook, Side


def show(book):
    snap = book.snapshot(levels=5)
    print("  asks:", list(reversed(snap.asks)))
    print("  bids:", snap.bids)


book = OrderBook()

# three owners post resting liquidity; arrival order decides queue position
book.submit_limit(owner=1, side=Side.BUY, qty=100, price=9_990, at=0)
book.submit_limit(owner=2, side=Side.BUY, qty=50, price=9_990, at=1)
book.submit_limit(owner=3, side=Side.BUY, qty=80, price=9_980, at=2)
book.submit_limit(owner=4, side=Side.SELL, qty=120, price=10_010, at=3)

print("resting book ((price, qty) per level):")
show(book)

# a market sell sweeps the bid side: owner 1 fills before owner 2 at 9990
# because owner 1 arrived first, and only then does 9980 trade
print("\nsell 130 at market:")
_, trades = book.submit_market(owner=9, side=Side.SELL, qty=130, at=4)
for t in trades:
    print(f"  {t.qty} @ {t.price} (resting owner {t.resting_owner})")
show(book)

# a limit priced through the touch trades like a market order up to its
# price; whatever is left over rests in the book at that price
print("\nbuy 200 limit 10010: lifts the 120 offered, the leftover 80 rests")
_, trades = book.submit_limit(owner=9, side=Side.BUY, qty=200, price=10_010, at=5)
for t in trades:
    print(f"  {t.qty} @ {t.price}")
show(book)

print("\nstats:", book.stats())
