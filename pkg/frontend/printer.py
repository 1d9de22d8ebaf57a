#!/usr/bin/env python3
"""
Pretty printer producing parseable source text (used for ``.pp`` files).
"""

from fractions import Fraction
from typing import List, Optional, Tuple, Union

from frontend.ast_nodes import (
    Assign,
    Binary,
    DecimalLit,
    Expr,
    For,
    ForEach,
    If,
    Index,
    IntLit,
    Interval,
    Program,
    RandomBit,
    RandomCall,
    Return,
    Simulate,
    SimulateAbs,
    Stmt,
    Unary,
    Var,
    VarDecl,
    While,
)
from frontend.tokens import BINARY_PRECEDENCE

INDENT = "    "
_UNARY_LEVEL = len(BINARY_PRECEDENCE)
_LEVEL = {op: level for level, ops in enumerate(BINARY_PRECEDENCE) for op in ops}


def _decimal(value: Fraction) -> str:
    for digits in range(1, 31):
        scaled = value * 10 ** digits
        if scaled.denominator == 1:
            text = str(scaled.numerator).rjust(digits + 1, "0")
            return f"{text[:-digits]}.{text[-digits:]}"
    raise ValueError(f"{value} has no short decimal expansion")


def _level(e: Expr) -> int:
    if isinstance(e, Binary):
        return _LEVEL[e.op]
    if isinstance(e, Unary):
        return _UNARY_LEVEL
    return _UNARY_LEVEL + 1


def format_expr(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, DecimalLit):
        return _decimal(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{format_expr(e.index)}]"
    if isinstance(e, Unary):
        inner = format_expr(e.operand)
        if _level(e.operand) < _UNARY_LEVEL:
            inner = f"({inner})"
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        level = _LEVEL[e.op]
        left, right = format_expr(e.left), format_expr(e.right)
        if _level(e.left) < level:
            left = f"({left})"
        if _level(e.right) <= level:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    if isinstance(e, RandomCall):
        return f"random({format_expr(e.lo)}, {format_expr(e.hi)})"
    if isinstance(e, RandomBit):
        return f"randombit({format_expr(e.p)})"
    raise TypeError(f"cannot format {type(e).__name__}")


def _initializer(init: Optional[Union[Expr, Interval]]) -> str:
    if init is None:
        return ""
    if isinstance(init, Interval):
        return f" := [{format_expr(init.lo)}, {format_expr(init.hi)}]"
    return f" := {format_expr(init)}"


def format_declaration(decl: VarDecl) -> str:
    if decl.var_class == "const":
        return f"const {decl.name}{_initializer(decl.initializer)};"
    type_text = f"int{decl.width}"
    if decl.array_length is not None:
        type_text = f"array [{format_expr(decl.array_length)}] of {type_text}"
    return f"{decl.var_class} {type_text} {decl.name}{_initializer(decl.initializer)};"


def _block(stmts: Tuple[Stmt, ...], depth: int, out: List[str]) -> None:
    for stmt in stmts:
        _stmt(stmt, depth, out)


def _stmt(s: Stmt, depth: int, out: List[str]) -> None:
    pad = INDENT * depth
    if isinstance(s, Assign):
        out.append(f"{pad}{format_expr(s.target)} := {format_expr(s.value)};")
    elif isinstance(s, If):
        out.append(f"{pad}if {format_expr(s.cond)} then")
        _block(s.then, depth + 1, out)
        for cond, body in s.elifs:
            out.append(f"{pad}elif {format_expr(cond)} then")
            _block(body, depth + 1, out)
        if s.orelse:
            out.append(f"{pad}else")
            _block(s.orelse, depth + 1, out)
        out.append(f"{pad}fi")
    elif isinstance(s, For):
        out.append(f"{pad}for {s.var} in [{format_expr(s.lo)}, {format_expr(s.hi)}] do")
        _block(s.body, depth + 1, out)
        out.append(f"{pad}od")
    elif isinstance(s, ForEach):
        out.append(f"{pad}for {s.var} in {s.array} do")
        _block(s.body, depth + 1, out)
        out.append(f"{pad}od")
    elif isinstance(s, While):
        out.append(f"{pad}while {format_expr(s.cond)} do")
        _block(s.body, depth + 1, out)
        out.append(f"{pad}od")
    elif isinstance(s, Return):
        out.append(f"{pad}return;")
    elif isinstance(s, Simulate):
        out.append(f"{pad}simulate;")
    elif isinstance(s, SimulateAbs):
        out.append(f"{pad}simulate-abs;")
    else:
        raise TypeError(f"cannot format {type(s).__name__}")


def format_program(program: Program) -> str:
    """Source text that parses back to an equal Program."""
    out = [format_declaration(d) for d in program.declarations]
    if out and program.body:
        out.append("")
    _block(program.body, 0, out)
    return "\n".join(out) + "\n"
