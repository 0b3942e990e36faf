"""GF(2) linear algebra on int-encoded bit rows."""

from __future__ import annotations

from typing import Iterable


def rank(rows: Iterable[int]) -> int:
    """Rank over GF(2); each row is a Python int bitset."""
    pivots: dict[int, int] = {}
    rk = 0
    for row in rows:
        while row:
            low = row & -row
            if low in pivots:
                row ^= pivots[low]
            else:
                pivots[low] = row
                rk += 1
                break
    return rk


def decompose(rows: list[int], target: int) -> int | None:
    """Express target as a XOR of rows; returns a bitmask over row indices.

    Returns None when target is outside the rowspan.  An all-zero target
    decomposes as the empty combination (mask 0).
    """
    pivots: dict[int, tuple[int, int]] = {}
    for i, row in enumerate(rows):
        tag = 1 << i
        while row:
            low = row & -row
            if low in pivots:
                prow, ptag = pivots[low]
                row ^= prow
                tag ^= ptag
            else:
                pivots[low] = (row, tag)
                break
    tag = 0
    while target:
        low = target & -target
        if low not in pivots:
            return None
        prow, ptag = pivots[low]
        target ^= prow
        tag ^= ptag
    return tag
