#!/usr/bin/env python3
"""
Macro substitution, loop unrolling and array expansion.

After preprocessing a program has no constants, no ``for`` loops with
constant bounds and no arrays: every array becomes one scalar per element
(``a_0``, ``a_1``, ...), constant indices become plain variables and only
data-dependent indices remain as sized Index nodes. Non-secret interval
initializers are lowered to ``random`` assignments at program start.
Running the preprocessor on its own output changes nothing.
"""

import logging
from dataclasses import replace
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Set, Tuple

from exceptions import NonConstantLoopBoundError, PreprocessError, UnboundConstError
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
    LValue,
    Program,
    RandomBit,
    RandomCall,
    Stmt,
    Unary,
    Var,
    VarDecl,
    While,
    element_name,
    free_vars,
    iter_stmts,
    renumber,
)
from frontend.semantics import apply_binary, apply_unary, width_range

logger = logging.getLogger(__name__)

MAX_DEFAULT_PRIOR_WIDTH = 16
LOOP_VARIABLE_WIDTH = 32


class Preprocessor:
    """Single-use transformer of one parsed program."""

    def __init__(self, program: Program, constants: Optional[Mapping[str, int]] = None):
        self.program = program
        self.filename = program.filename
        self.overrides = dict(constants or {})
        self.consts: Dict[str, int] = {}
        self.arrays: Dict[str, int] = {}
        self.declared: Set[str] = set()
        self.implicit: List[VarDecl] = []

    def error(self, message: str, line: int = 0, column: int = 1) -> PreprocessError:
        return PreprocessError(message, line, column, self.filename)

    # Entry point

    def run(self) -> Program:
        declarations, prelude = self.expand_declarations()
        body = prelude + self.block(self.program.body, {}, {})
        declarations = tuple(declarations) + tuple(self.implicit)
        result = renumber(replace(self.program, declarations=declarations, body=body))
        self.check_declared(result)
        return result

    # Declarations

    def resolve_constants(self) -> None:
        for decl in self.program.declarations:
            if decl.var_class != "const":
                continue
            if decl.name in self.overrides:
                self.consts[decl.name] = int(self.overrides[decl.name])
            elif decl.initializer is None:
                raise UnboundConstError(decl.name, decl.line, decl.column).with_filename(
                    self.filename
                )
            elif isinstance(decl.initializer, Interval):
                raise self.error(f"constant '{decl.name}' cannot have an interval value", decl.line, decl.column)
            else:
                self.consts[decl.name] = self.const_int(decl.initializer, decl, f"constant '{decl.name}'")

    def const_int(self, expr: Expr, decl: VarDecl, what: str) -> int:
        folded = self.expr(expr, {}, {})
        if not isinstance(folded, IntLit):
            raise self.error(f"{what} does not fold to an integer", decl.line, decl.column)
        return folded.value

    def expand_declarations(self) -> Tuple[List[VarDecl], Tuple[Stmt, ...]]:
        self.resolve_constants()
        decls: List[VarDecl] = []
        prelude: List[Stmt] = []
        for decl in self.program.declarations:
            if decl.var_class == "const":
                continue
            if decl.name in self.declared or decl.name in self.consts:
                raise self.error(f"'{decl.name}' is declared twice", decl.line, decl.column)
            if decl.is_array:
                length = self.const_int(decl.array_length, decl, f"length of array '{decl.name}'")
                if length < 1:
                    raise self.error(f"array '{decl.name}' must have a positive length", decl.line, decl.column)
                self.arrays[decl.name] = length
                self.declared.add(decl.name)
                elements = [
                    replace(decl, name=element_name(decl.name, k), array_length=None)
                    for k in range(length)
                ]
            else:
                elements = [decl]
            for element in elements:
                if element.name != decl.name and element.name in self.declared:
                    raise self.error(f"'{element.name}' is declared twice", decl.line, decl.column)
                lowered, init = self.initializer(element)
                decls.append(lowered)
                self.declared.add(lowered.name)
                if init is not None:
                    prelude.append(Assign(Var(lowered.name, line=decl.line), init, line=decl.line))
        return decls, tuple(prelude)

    def initializer(self, decl: VarDecl) -> Tuple[VarDecl, Optional[Expr]]:
        """Folded declaration plus, for non-secrets, an optional start-of-program assignment."""
        init = decl.initializer
        if decl.var_class == "secret":
            if init is None:
                if decl.width > MAX_DEFAULT_PRIOR_WIDTH:
                    raise self.error(
                        f"secret '{decl.name}' needs an initializer (width {decl.width} is too wide "
                        f"for a default uniform prior)",
                        decl.line,
                        decl.column,
                    )
                lo, hi = width_range(decl.width)
                return replace(decl, initializer=Interval(IntLit(lo), IntLit(hi))), None
            if isinstance(init, Interval):
                lo = self.const_int(init.lo, decl, f"prior bound of '{decl.name}'")
                hi = self.const_int(init.hi, decl, f"prior bound of '{decl.name}'")
                if lo > hi:
                    raise self.error(f"empty prior interval [{lo}, {hi}] for '{decl.name}'", decl.line, decl.column)
                return replace(decl, initializer=Interval(IntLit(lo), IntLit(hi))), None
            value = self.const_int(init, decl, f"initializer of secret '{decl.name}'")
            return replace(decl, initializer=IntLit(value)), None

        if init is None:
            return decl, None
        if isinstance(init, Interval):
            lo_expr, hi_expr = self.expr(init.lo, {}, {}), self.expr(init.hi, {}, {})
            return replace(decl, initializer=None), RandomCall(lo_expr, hi_expr, line=decl.line)
        folded = self.expr(init, {}, {})
        if isinstance(folded, IntLit):
            return replace(decl, initializer=folded), None
        return replace(decl, initializer=None), folded

    # Expressions

    def expr(self, e: Expr, env: Mapping[str, int], alias: Mapping[str, str]) -> Expr:
        if isinstance(e, (IntLit, DecimalLit)):
            return e
        if isinstance(e, Var):
            name = alias.get(e.name, e.name)
            if name in env:
                return IntLit(env[name], line=e.line)
            if name in self.consts:
                return IntLit(self.consts[name], line=e.line)
            if name in self.arrays:
                raise self.error(f"array '{name}' used without an index", e.line)
            return Var(name, line=e.line)
        if isinstance(e, Index):
            return self.index(e, env, alias)
        if isinstance(e, Unary):
            operand = self.expr(e.operand, env, alias)
            if isinstance(operand, IntLit):
                return IntLit(apply_unary(e.op, operand.value), line=e.line)
            return Unary(e.op, operand, line=e.line)
        if isinstance(e, Binary):
            left, right = self.expr(e.left, env, alias), self.expr(e.right, env, alias)
            if isinstance(left, IntLit) and isinstance(right, IntLit):
                try:
                    return IntLit(apply_binary(e.op, left.value, right.value), line=e.line)
                except ZeroDivisionError:
                    raise self.error("division by zero in a constant expression", e.line)
            return Binary(e.op, left, right, line=e.line)
        if isinstance(e, RandomCall):
            return RandomCall(self.expr(e.lo, env, alias), self.expr(e.hi, env, alias), line=e.line)
        if isinstance(e, RandomBit):
            p = self.expr(e.p, env, alias)
            value: Optional[Fraction] = None
            if isinstance(p, (IntLit, DecimalLit)):
                value = Fraction(p.value)
            if value is None or not (0 <= value <= 1):
                raise self.error("randombit() needs a constant probability in [0, 1]", e.line)
            return RandomBit(p, line=e.line)
        raise self.error(f"unsupported expression {type(e).__name__}")

    def index(self, e: Index, env: Mapping[str, int], alias: Mapping[str, str]) -> Expr:
        position = self.expr(e.index, env, alias)
        if e.length is not None:
            length = e.length
        elif e.name in self.arrays:
            length = self.arrays[e.name]
        else:
            raise self.error(f"'{e.name}' is not an array", e.line)
        if isinstance(position, IntLit):
            if not 0 <= position.value < length:
                raise self.error(
                    f"index {position.value} out of range for array '{e.name}' of length {length}",
                    e.line,
                )
            return Var(element_name(e.name, position.value), line=e.line)
        return Index(e.name, position, length, line=e.line)

    def lvalue(self, target: LValue, env: Mapping[str, int], alias: Mapping[str, str]) -> LValue:
        if isinstance(target, Var):
            name = alias.get(target.name, target.name)
            if name in env or name in self.consts:
                raise self.error(f"cannot assign to constant or loop index '{name}'", target.line)
            if name in self.arrays:
                raise self.error(f"array '{name}' assigned without an index", target.line)
            return Var(name, line=target.line)
        folded = self.index(target, env, alias)
        assert isinstance(folded, (Var, Index))
        return folded

    # Statements

    def block(
        self, stmts: Tuple[Stmt, ...], env: Mapping[str, int], alias: Mapping[str, str]
    ) -> Tuple[Stmt, ...]:
        out: List[Stmt] = []
        for stmt in stmts:
            out.extend(self.stmt(stmt, env, alias))
        return tuple(out)

    def stmt(self, s: Stmt, env: Mapping[str, int], alias: Mapping[str, str]) -> List[Stmt]:
        if isinstance(s, Assign):
            return [replace(s, target=self.lvalue(s.target, env, alias), value=self.expr(s.value, env, alias))]
        if isinstance(s, If):
            return self.if_stmt(s, env, alias)
        if isinstance(s, For):
            return self.for_stmt(s, env, alias)
        if isinstance(s, ForEach):
            if s.array not in self.arrays:
                raise self.error(f"'{s.array}' is not an array", s.line)
            out: List[Stmt] = []
            for k in range(self.arrays[s.array]):
                out.extend(self.block(s.body, env, {**alias, s.var: element_name(s.array, k)}))
            return out
        if isinstance(s, While):
            cond = self.expr(s.cond, env, alias)
            if isinstance(cond, IntLit) and cond.value == 0:
                return []
            return [replace(s, cond=cond, body=self.block(s.body, env, alias))]
        return [s]

    def if_stmt(self, s: If, env: Mapping[str, int], alias: Mapping[str, str]) -> List[Stmt]:
        arms: List[Tuple[Expr, Tuple[Stmt, ...]]] = []
        orelse: Tuple[Stmt, ...] = s.orelse
        for cond, body in ((s.cond, s.then),) + s.elifs:
            folded = self.expr(cond, env, alias)
            if isinstance(folded, IntLit):
                if folded.value == 0:
                    continue
                # A constant-true arm ends the chain and becomes the else branch
                orelse = body
                break
            arms.append((folded, body))
        orelse_out = self.block(orelse, env, alias)
        if not arms:
            return list(orelse_out)
        folded_arms = [(c, self.block(b, env, alias)) for c, b in arms]
        first_cond, first_body = folded_arms[0]
        return [replace(s, cond=first_cond, then=first_body, elifs=tuple(folded_arms[1:]), orelse=orelse_out)]

    def for_stmt(self, s: For, env: Mapping[str, int], alias: Mapping[str, str]) -> List[Stmt]:
        lo, hi = self.expr(s.lo, env, alias), self.expr(s.hi, env, alias)
        if isinstance(lo, IntLit) and isinstance(hi, IntLit):
            out: List[Stmt] = []
            for value in range(lo.value, hi.value + 1):
                out.extend(self.block(s.body, {**env, s.var: value}, alias))
            return out

        if self.indexes_with(s.body, s.var):
            raise NonConstantLoopBoundError(s.var, s.line, 1).with_filename(self.filename)
        if s.var in self.consts or s.var in self.arrays:
            raise self.error(f"loop index '{s.var}' shadows a constant or array", s.line)
        if s.var not in self.declared:
            self.declared.add(s.var)
            self.implicit.append(VarDecl(s.var, "public", LOOP_VARIABLE_WIDTH, None, None, s.line))
        index = Var(s.var, line=s.line)
        body = self.block(s.body, env, alias) + (
            Assign(index, Binary("+", index, IntLit(1)), line=s.line),
        )
        logger.debug(f"{self.filename}:{s.line}: loop over '{s.var}' kept as a while loop")
        return [
            Assign(index, lo, line=s.line),
            While(Binary("<=", index, hi), body, line=s.line),
        ]

    def indexes_with(self, body: Tuple[Stmt, ...], var: str) -> bool:
        for stmt in iter_stmts(body):
            exprs: List[Expr] = []
            if isinstance(stmt, Assign):
                exprs = [stmt.target, stmt.value]
            elif isinstance(stmt, If):
                exprs = [stmt.cond] + [c for c, _ in stmt.elifs]
            elif isinstance(stmt, While):
                exprs = [stmt.cond]
            elif isinstance(stmt, For):
                exprs = [stmt.lo, stmt.hi]
            for e in exprs:
                if _index_uses(e, var):
                    return True
        return False

    # Checks

    def check_declared(self, program: Program) -> None:
        known = {d.name for d in program.declarations}
        for stmt in iter_stmts(program.body):
            names: Set[str] = set()
            if isinstance(stmt, Assign):
                names = set(free_vars(stmt.value)) | set(free_vars(stmt.target))
            elif isinstance(stmt, If):
                for cond in [stmt.cond] + [c for c, _ in stmt.elifs]:
                    names |= free_vars(cond)
            elif isinstance(stmt, While):
                names = set(free_vars(stmt.cond))
            missing = sorted(names - known)
            if missing:
                raise self.error(f"undeclared variable '{missing[0]}'", stmt.line)


def _index_uses(e: Expr, var: str) -> bool:
    if isinstance(e, Index):
        return var in free_vars(e.index) or _index_uses(e.index, var)
    if isinstance(e, Unary):
        return _index_uses(e.operand, var)
    if isinstance(e, Binary):
        return _index_uses(e.left, var) or _index_uses(e.right, var)
    if isinstance(e, RandomCall):
        return _index_uses(e.lo, var) or _index_uses(e.hi, var)
    return False


def preprocess(program: Program, constants: Optional[Mapping[str, int]] = None) -> Program:
    """
    Substitute constants, unroll constant loops and expand arrays.

    Args:
        program: Parsed program
        constants: Values for ``const`` declarations, overriding the source

    Returns:
        Preprocessed program with fresh statement ids

    Raises:
        UnboundConstError: If a const has no value
        NonConstantLoopBoundError: If a loop with non-constant bounds indexes an array by its index
        PreprocessError: On any other substitution failure
    """
    result = Preprocessor(program, constants).run()
    logger.debug(
        f"{program.filename}: preprocessed to {len(result.declarations)} variables, "
        f"{sum(1 for _ in iter_stmts(result.body))} statements"
    )
    return result
