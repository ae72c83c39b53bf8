"""Denomination planning for multi-denomination compact wallets."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

# euro coin and note values in cents
EURO = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000)

# the worked 1267 payment uses euro values up to 1000 without the 200 note
PAYMENT_EXAMPLE = (1, 2, 5, 10, 20, 50, 100, 500, 1000)

ORACLE_LIMIT = 10**5


def euro_upto(largest: int) -> tuple:
    return tuple(d for d in EURO if d <= largest)


def check_denoms(denoms: Iterable[int]) -> tuple:
    ds = tuple(sorted(set(int(d) for d in denoms)))
    if not ds:
        raise ValueError("empty denomination set")
    if ds[0] != 1:
        raise ValueError("denomination set must contain 1")
    return ds


def greedy_decompose(price: int, denoms: Sequence[int]) -> list[tuple[int, int]]:
    """Largest-first plan as [(denomination, count), ...]."""
    if price < 1:
        raise ValueError("price must be >= 1")
    ds = check_denoms(denoms)
    plan = []
    rest = price
    for d in reversed(ds):
        if rest >= d:
            n, rest = divmod(rest, d)
            plan.append((d, n))
    return plan


def greedy_count(price: int, denoms: Sequence[int]) -> int:
    return sum(n for _, n in greedy_decompose(price, denoms))


def average_coins(denoms: Sequence[int], p_max: int) -> Fraction:
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    ds = tuple(reversed(check_denoms(denoms)))
    total = 0
    for price in range(1, p_max + 1):
        rest = price
        for d in ds:
            if rest >= d:
                n, rest = divmod(rest, d)
                total += n
    return Fraction(total, p_max)


def optimal_decompose_oracle(price: int, denoms: Sequence[int]) -> int:
    """Minimum coin count by dynamic programming (small prices only)."""
    if price < 1:
        raise ValueError("price must be >= 1")
    if price > ORACLE_LIMIT:
        raise ValueError(f"oracle limited to prices <= {ORACLE_LIMIT}")
    ds = check_denoms(denoms)
    best = [0] + [price + 1] * price
    for v in range(1, price + 1):
        best[v] = 1 + min(best[v - d] for d in ds if d <= v)
    return best[price]


def optimal_table(p_max: int, denoms: Sequence[int]) -> list[int]:
    """DP minimum counts for every price in 0..p_max."""
    if p_max > ORACLE_LIMIT:
        raise ValueError(f"oracle limited to prices <= {ORACLE_LIMIT}")
    ds = check_denoms(denoms)
    best = [0] * (p_max + 1)
    for v in range(1, p_max + 1):
        best[v] = 1 + min(best[v - d] for d in ds if d <= v)
    return best


def spend_calls(plan: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """One scheme spend per denomination, spending V = count coins."""
    return [(d, n) for d, n in plan if n > 0]


# rows of the average-coins table: (p_max, largest denomination, expected)
AVERAGE_COINS_TABLE = (
    (10, 5, 1.9),
    (100, 50, 3.4),
    (1000, 500, 5.1),
    (10000, 5000, 6.8),
    (100000, 50000, 8.5),
    (1000000, 50000, 17.5),
)
