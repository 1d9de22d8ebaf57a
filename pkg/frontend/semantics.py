#!/usr/bin/env python3
"""
Integer semantics shared by constant folding, interpretation and range estimation.

Arithmetic is over unbounded integers. Division truncates toward zero and
the remainder takes the sign of the dividend. Comparisons and logical
operators yield 0 or 1.
"""

from typing import Tuple

SIGNED_WIDTH = 32


def truncating_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def truncating_mod(a: int, b: int) -> int:
    return a - b * truncating_div(a, b)


def apply_binary(op: str, a: int, b: int) -> int:
    """
    Apply a binary operator to two integers.

    Raises:
        ZeroDivisionError: For ``/`` or ``%`` by zero
        ValueError: For an unknown operator
    """
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return truncating_div(a, b)
    if op == "%":
        return truncating_mod(a, b)
    if op == "xor":
        return a ^ b
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    if op == "&&":
        return int(bool(a) and bool(b))
    if op == "||":
        return int(bool(a) or bool(b))
    raise ValueError(f"unknown binary operator {op!r}")


def apply_unary(op: str, a: int) -> int:
    if op == "-":
        return -a
    if op == "!":
        return int(a == 0)
    raise ValueError(f"unknown unary operator {op!r}")


def width_range(width: int) -> Tuple[int, int]:
    """
    Value range a width tag admits.

    int1 .. int31 are unsigned; int32 is signed two's complement.
    """
    if width >= SIGNED_WIDTH:
        return -(1 << (SIGNED_WIDTH - 1)), (1 << (SIGNED_WIDTH - 1)) - 1
    return 0, (1 << width) - 1
