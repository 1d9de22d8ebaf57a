#!/usr/bin/env python3
"""
Injective encoding of variable tuples into single integers.

A secret or observable made of several variables is reported as one value.
A single variable keeps its raw value; longer tuples are folded with the
Cantor pairing function after mapping each integer to a natural number
(0, -1, 1, -2, 2, ... become 0, 1, 2, 3, 4, ...).
"""

from typing import Sequence


def zigzag(value: int) -> int:
    return 2 * value if value >= 0 else -2 * value - 1


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def encode(values: Sequence[int]) -> int:
    """
    Encode a fixed-arity tuple of integers as one integer.

    Args:
        values: Variable values in declaration order

    Returns:
        The raw value for one variable, 0 for none, a pairing code otherwise
    """
    if not values:
        return 0
    if len(values) == 1:
        return values[0]
    code = zigzag(values[0])
    for v in values[1:]:
        code = cantor_pair(code, zigzag(v))
    return code
