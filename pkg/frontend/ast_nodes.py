#!/usr/bin/env python3
"""
Immutable syntax tree of the analyzer's input language.

Source positions and statement ids do not take part in equality, so two
trees with the same structure compare equal regardless of layout.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import FrozenSet, Iterator, Optional, Tuple, Union


# Expressions

@dataclass(frozen=True)
class IntLit:
    value: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DecimalLit:
    """Decimal literal; only meaningful as a randombit probability."""

    value: Fraction
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Index:
    """
    Array element access.

    Before preprocessing ``length`` is None; afterwards an Index only remains
    for indices that are not constant, and ``length`` holds the array size.
    """

    name: str
    index: "Expr"
    length: Optional[int] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RandomCall:
    """random(lo, hi): uniform over the closed interval."""

    lo: "Expr"
    hi: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RandomBit:
    """randombit(p): 1 with probability p."""

    p: "Expr"
    line: int = field(default=0, compare=False)


Expr = Union[IntLit, DecimalLit, Var, Index, Unary, Binary, RandomCall, RandomBit]
LValue = Union[Var, Index]


@dataclass(frozen=True)
class Interval:
    """Initializer ``[lo, hi]``."""

    lo: Expr
    hi: Expr


# Statements

@dataclass(frozen=True)
class Assign:
    target: LValue
    value: Expr
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Tuple["Stmt", ...]
    elifs: Tuple[Tuple[Expr, Tuple["Stmt", ...]], ...] = ()
    orelse: Tuple["Stmt", ...] = ()
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass(frozen=True)
class For:
    """``for var in [lo, hi] do ... od``; both bounds inclusive."""

    var: str
    lo: Expr
    hi: Expr
    body: Tuple["Stmt", ...]
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ForEach:
    """``for alias in array do ... od``; the alias names each element in turn."""

    var: str
    array: str
    body: Tuple["Stmt", ...]
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Tuple["Stmt", ...]
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Return:
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Simulate:
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SimulateAbs:
    line: int = field(default=0, compare=False)
    sid: int = field(default=0, compare=False)


Stmt = Union[Assign, If, For, ForEach, While, Return, Simulate, SimulateAbs]


# Declarations and programs

@dataclass(frozen=True)
class VarDecl:
    """
    One declared name.

    ``width`` is the bit width of the element type (0 for constants).
    ``initializer`` is an expression, an Interval, or None.
    """

    name: str
    var_class: str
    width: int = 0
    initializer: Optional[Union[Expr, Interval]] = None
    array_length: Optional[Expr] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    @property
    def is_array(self) -> bool:
        return self.array_length is not None


@dataclass(frozen=True)
class Program:
    declarations: Tuple[VarDecl, ...]
    body: Tuple[Stmt, ...]
    filename: str = field(default="<input>", compare=False)

    def declaration(self, name: str) -> Optional[VarDecl]:
        for decl in self.declarations:
            if decl.name == name:
                return decl
        return None

    def names(self, var_class: str) -> Tuple[str, ...]:
        return tuple(d.name for d in self.declarations if d.var_class == var_class)

    @property
    def secrets(self) -> Tuple[str, ...]:
        return self.names("secret")

    @property
    def observables(self) -> Tuple[str, ...]:
        return self.names("observable")

    @property
    def internals(self) -> Tuple[str, ...]:
        return tuple(
            d.name for d in self.declarations if d.var_class in ("public", "private")
        )


# Traversal helpers

def iter_stmts(body: Tuple[Stmt, ...]) -> Iterator[Stmt]:
    """Pre-order walk over statements, descending into nested blocks."""
    for stmt in body:
        yield stmt
        for block in child_blocks(stmt):
            yield from iter_stmts(block)


def child_blocks(stmt: Stmt) -> Tuple[Tuple[Stmt, ...], ...]:
    if isinstance(stmt, If):
        return (stmt.then,) + tuple(b for _, b in stmt.elifs) + (stmt.orelse,)
    if isinstance(stmt, (For, ForEach, While)):
        return (stmt.body,)
    return ()


@lru_cache(maxsize=None)
def free_vars(expr: Expr) -> FrozenSet[str]:
    """Variable names an expression reads; Index contributes its element names when sized."""
    if isinstance(expr, Var):
        return frozenset({expr.name})
    if isinstance(expr, Index):
        inner = free_vars(expr.index)
        if expr.length is None:
            return inner | {expr.name}
        return inner | {f"{expr.name}_{k}" for k in range(expr.length)}
    if isinstance(expr, Unary):
        return free_vars(expr.operand)
    if isinstance(expr, Binary):
        return free_vars(expr.left) | free_vars(expr.right)
    if isinstance(expr, RandomCall):
        return free_vars(expr.lo) | free_vars(expr.hi)
    if isinstance(expr, RandomBit):
        return free_vars(expr.p)
    return frozenset()


def is_random(expr: Expr) -> bool:
    return isinstance(expr, (RandomCall, RandomBit))


def element_name(array: str, position: int) -> str:
    """Name of an expanded array element."""
    return f"{array}_{position}"


def renumber(program: Program) -> Program:
    """Assign statement ids 1, 2, ... in pre-order."""
    counter = iter(range(1, 1 << 62))

    def block(stmts: Tuple[Stmt, ...]) -> Tuple[Stmt, ...]:
        return tuple(one(s) for s in stmts)

    def one(stmt: Stmt) -> Stmt:
        sid = next(counter)
        if isinstance(stmt, If):
            return replace(
                stmt,
                sid=sid,
                then=block(stmt.then),
                elifs=tuple((c, block(b)) for c, b in stmt.elifs),
                orelse=block(stmt.orelse),
            )
        if isinstance(stmt, (For, ForEach, While)):
            return replace(stmt, sid=sid, body=block(stmt.body))
        return replace(stmt, sid=sid)

    return replace(program, body=block(program.body))
