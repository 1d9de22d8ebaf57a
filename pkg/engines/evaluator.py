#!/usr/bin/env python3
"""
Concrete expression evaluation shared by both engines.

Variables are looked up through a callable so the precise engine can
resolve secrets from the valuation being split on while the sampler reads
a plain dictionary.
"""

from fractions import Fraction
from typing import Callable, Tuple

from exceptions import ProgramRuntimeError
from frontend.ast_nodes import (
    Binary,
    DecimalLit,
    Expr,
    Index,
    IntLit,
    LValue,
    RandomBit,
    RandomCall,
    Unary,
    Var,
    element_name,
)
from frontend.semantics import apply_binary, apply_unary

Lookup = Callable[[str], int]


def element(target: Index, lookup: Lookup, line: int) -> str:
    """Name of the array element ``target`` denotes."""
    position = evaluate(target.index, lookup, line)
    length = target.length or 0
    if not 0 <= position < length:
        raise ProgramRuntimeError(
            f"index {position} out of bounds for array '{target.name}' of length {length}", line
        )
    return element_name(target.name, position)


def target_name(target: LValue, lookup: Lookup, line: int) -> str:
    if isinstance(target, Index):
        return element(target, lookup, line)
    return target.name


def evaluate(e: Expr, lookup: Lookup, line: int = 0) -> int:
    """
    Evaluate a deterministic expression.

    Raises:
        ProgramRuntimeError: On division by zero, an out-of-bounds index or
            a probabilistic expression in a non-assignment position
    """
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Var):
        return lookup(e.name)
    if isinstance(e, Index):
        return lookup(element(e, lookup, line))
    if isinstance(e, Binary):
        left = evaluate(e.left, lookup, line)
        right = evaluate(e.right, lookup, line)
        try:
            return apply_binary(e.op, left, right)
        except ZeroDivisionError:
            raise ProgramRuntimeError(f"division by zero in '{e.op}'", line)
    if isinstance(e, Unary):
        return apply_unary(e.op, evaluate(e.operand, lookup, line))
    if isinstance(e, DecimalLit):
        raise ProgramRuntimeError("decimal literal used as an integer", line)
    raise ProgramRuntimeError("random draw used inside an expression", line)


def random_bounds(e: RandomCall, lookup: Lookup, line: int) -> Tuple[int, int]:
    lo, hi = evaluate(e.lo, lookup, line), evaluate(e.hi, lookup, line)
    if lo > hi:
        raise ProgramRuntimeError(f"empty range in random({lo}, {hi})", line)
    return lo, hi


def bit_probability(e: RandomBit, lookup: Lookup, line: int) -> Fraction:
    p = e.p.value if isinstance(e.p, DecimalLit) else Fraction(evaluate(e.p, lookup, line))
    if not 0 <= p <= 1:
        raise ProgramRuntimeError(f"randombit probability {p} outside [0, 1]", line)
    return p
