"""GF(2) helpers on Python integers used as bit sets.

Bit ``k`` of an integer is entry ``k`` of the vector. Python integers are
arbitrary precision, so XOR/AND act on whole machine words at a time.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def lowest_bit(v: int) -> int:
    """Index of the least significant set bit; -1 for zero."""
    return (v & -v).bit_length() - 1


def bits(v: int) -> list[int]:
    """Indices of set bits, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of the given row vectors."""
    pivots: dict[int, int] = {}
    r = 0
    for v in rows:
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                r += 1
                break
            v ^= p
    return r


def solve_combination(target: int, rows: Sequence[int]) -> int | None:
    """Find a subset of ``rows`` XOR-ing to ``target``.

    Returns the subset as a bit mask over row indices, or ``None`` if ``target``
    is not in the row span.
    """
    # each basis entry: (vector, mask of original rows composing it)
    basis: dict[int, tuple[int, int]] = {}
    for k, v in enumerate(rows):
        m = 1 << k
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = (v, m)
                break
            bv, bm = basis[top]
            v ^= bv
            m ^= bm
    v, m = target, 0
    while v:
        top = v.bit_length() - 1
        if top not in basis:
            return None
        bv, bm = basis[top]
        v ^= bv
        m ^= bm
    return m
