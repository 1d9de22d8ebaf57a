#!/usr/bin/env python3
"""
Recursive-descent parser producing a Program from a token list.

Binary operators are parsed by precedence climbing over BINARY_PRECEDENCE;
every level is left-associative. ``random``/``randombit`` calls may only
form the whole right-hand side of an assignment.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from exceptions import ParseError
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
    Return,
    Simulate,
    SimulateAbs,
    Stmt,
    Unary,
    Var,
    VarDecl,
    While,
    renumber,
)
from frontend.tokens import (
    BINARY_PRECEDENCE,
    UNARY_OPERATORS,
    VARIABLE_CLASSES,
    Token,
    TokenType,
)

logger = logging.getLogger(__name__)

_BLOCK_END = ("fi", "elif", "else", "od")


class Parser:
    """Cursor over a token list with accept/expect helpers."""

    def __init__(self, tokens: List[Token], filename: str = "<input>"):
        if not tokens or tokens[-1].type is not TokenType.EOF:
            raise ValueError("token list must end with an EOF token")
        self.tokens = tokens
        self.filename = filename
        self.pos = 0

    # Cursor

    @property
    def token(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.token
        return ParseError(message, tok.line, tok.column, self.filename)

    def at_keyword(self, *words: str) -> bool:
        return self.token.type is TokenType.KEYWORD and self.token.text in words

    def accept(self, token_type: TokenType) -> Optional[Token]:
        if self.token.type is token_type:
            return self.advance()
        return None

    def accept_keyword(self, word: str) -> Optional[Token]:
        if self.token.is_keyword(word):
            return self.advance()
        return None

    def expect(self, token_type: TokenType) -> Token:
        tok = self.accept(token_type)
        if tok is None:
            raise self.error(f"expected '{token_type.value}' but found {self.token.describe()}")
        return tok

    def expect_keyword(self, word: str) -> Token:
        tok = self.accept_keyword(word)
        if tok is None:
            raise self.error(f"expected '{word}' but found {self.token.describe()}")
        return tok

    def expect_ident(self) -> Token:
        tok = self.accept(TokenType.IDENT)
        if tok is None:
            raise self.error(f"expected identifier but found {self.token.describe()}")
        return tok

    # Program

    def parse_program(self) -> Program:
        declarations: List[VarDecl] = []
        body: List[Stmt] = []
        while self.token.type is not TokenType.EOF:
            if self.at_keyword(*VARIABLE_CLASSES):
                declarations.extend(self.parse_declaration())
            else:
                body.append(self.parse_statement())
        if not declarations and not body:
            raise self.error("empty program")
        return renumber(Program(tuple(declarations), tuple(body), self.filename))

    def parse_declaration(self) -> List[VarDecl]:
        head = self.advance()
        var_class = head.text
        if var_class == "const":
            name = self.expect_ident()
            value = self.parse_expression() if self.accept(TokenType.ASSIGN) else None
            self.expect(TokenType.SEMI)
            return [VarDecl(name.text, "const", 0, value, None, name.line, name.column)]

        length: Optional[Expr] = None
        if self.accept_keyword("array"):
            self.expect(TokenType.LBRACKET)
            length = self.parse_expression()
            self.expect(TokenType.RBRACKET)
            self.expect_keyword("of")
        width_tok = self.accept(TokenType.WIDTH)
        if width_tok is None:
            raise self.error(f"expected a type such as 'int32' but found {self.token.describe()}")
        width = int(width_tok.text[3:])

        decls = []
        while True:
            name = self.expect_ident()
            init: Optional[Union[Expr, Interval]] = None
            if self.accept(TokenType.ASSIGN):
                init = self.parse_initializer()
            decls.append(VarDecl(name.text, var_class, width, init, length, name.line, name.column))
            if not self.accept(TokenType.COMMA):
                break
        self.expect(TokenType.SEMI)
        return decls

    def parse_initializer(self) -> Union[Expr, Interval]:
        if self.accept(TokenType.LBRACKET):
            lo = self.parse_expression()
            self.expect(TokenType.COMMA)
            hi = self.parse_expression()
            self.expect(TokenType.RBRACKET)
            return Interval(lo, hi)
        return self.parse_expression()

    # Statements

    def parse_block(self) -> Tuple[Stmt, ...]:
        stmts = []
        while not self.at_keyword(*_BLOCK_END):
            if self.token.type is TokenType.EOF:
                raise self.error("unexpected end of input inside a block")
            if self.at_keyword(*VARIABLE_CLASSES):
                raise self.error("declarations are only allowed at the top level")
            stmts.append(self.parse_statement())
        return tuple(stmts)

    def parse_statement(self) -> Stmt:
        tok = self.token
        if self.accept_keyword("if"):
            return self.parse_if(tok)
        if self.accept_keyword("for"):
            return self.parse_for(tok)
        if self.accept_keyword("while"):
            cond = self.parse_expression()
            self.expect_keyword("do")
            body = self.parse_block()
            self.expect_keyword("od")
            return While(cond, body, line=tok.line)
        for word, node in (("return", Return), ("simulate", Simulate), ("simulate-abs", SimulateAbs)):
            if self.accept_keyword(word):
                self.expect(TokenType.SEMI)
                return node(line=tok.line)
        if tok.type is TokenType.IDENT:
            return self.parse_assignment()
        raise self.error(f"expected a statement but found {tok.describe()}")

    def parse_if(self, tok: Token) -> If:
        cond = self.parse_expression()
        self.expect_keyword("then")
        then = self.parse_block()
        elifs = []
        while self.accept_keyword("elif"):
            elif_cond = self.parse_expression()
            self.expect_keyword("then")
            elifs.append((elif_cond, self.parse_block()))
        orelse: Tuple[Stmt, ...] = ()
        if self.accept_keyword("else"):
            orelse = self.parse_block()
        self.expect_keyword("fi")
        return If(cond, then, tuple(elifs), orelse, line=tok.line)

    def parse_for(self, tok: Token) -> Stmt:
        var = self.expect_ident().text
        self.expect_keyword("in")
        if self.accept(TokenType.LBRACKET):
            lo = self.parse_expression()
            self.expect(TokenType.COMMA)
            hi = self.parse_expression()
            self.expect(TokenType.RBRACKET)
            self.expect_keyword("do")
            body = self.parse_block()
            self.expect_keyword("od")
            return For(var, lo, hi, body, line=tok.line)
        array = self.expect_ident().text
        self.expect_keyword("do")
        body = self.parse_block()
        self.expect_keyword("od")
        return ForEach(var, array, body, line=tok.line)

    def parse_assignment(self) -> Assign:
        target = self.parse_lvalue()
        self.expect(TokenType.ASSIGN)
        if self.at_keyword("random", "randombit"):
            value = self.parse_random_call()
        else:
            value = self.parse_expression()
        self.expect(TokenType.SEMI)
        return Assign(target, value, line=target.line)

    def parse_lvalue(self) -> LValue:
        name = self.expect_ident()
        if self.accept(TokenType.LBRACKET):
            index = self.parse_expression()
            self.expect(TokenType.RBRACKET)
            return Index(name.text, index, line=name.line)
        return Var(name.text, line=name.line)

    def parse_random_call(self) -> Expr:
        tok = self.advance()
        self.expect(TokenType.LPAREN)
        if tok.text == "random":
            lo = self.parse_expression()
            self.expect(TokenType.COMMA)
            hi = self.parse_expression()
            self.expect(TokenType.RPAREN)
            return RandomCall(lo, hi, line=tok.line)
        p = self.parse_expression()
        self.expect(TokenType.RPAREN)
        return RandomBit(p, line=tok.line)

    # Expressions

    def parse_expression(self, level: int = 0) -> Expr:
        if level == len(BINARY_PRECEDENCE):
            return self.parse_unary()
        ops = BINARY_PRECEDENCE[level]
        left = self.parse_expression(level + 1)
        while self._binary_op_in(ops):
            op_tok = self.advance()
            op = "xor" if op_tok.text == "^" else op_tok.text
            right = self.parse_expression(level + 1)
            left = Binary(op, left, right, line=op_tok.line)
        return left

    def _binary_op_in(self, ops: Tuple[str, ...]) -> bool:
        tok = self.token
        if tok.type is TokenType.OP:
            return tok.text in ops
        return tok.is_keyword("xor") and "xor" in ops

    def parse_unary(self) -> Expr:
        tok = self.token
        if tok.type is TokenType.OP and tok.text in UNARY_OPERATORS:
            self.advance()
            return Unary(tok.text, self.parse_unary(), line=tok.line)
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.token
        if self.accept(TokenType.INT):
            return IntLit(int(tok.text), line=tok.line)
        if self.accept(TokenType.DECIMAL):
            return DecimalLit(Fraction(tok.text), line=tok.line)
        if tok.type is TokenType.IDENT:
            return self.parse_lvalue()
        if self.accept(TokenType.LPAREN):
            inner = self.parse_expression()
            self.expect(TokenType.RPAREN)
            return inner
        if self.at_keyword("random", "randombit"):
            raise self.error(f"{tok.text}() may only form the whole right-hand side of an assignment")
        raise self.error(f"expected an expression but found {tok.describe()}")


def parse(tokens: List[Token], filename: str = "<input>") -> Program:
    """
    Build the syntax tree of a token list.

    Args:
        tokens: Output of tokenize()
        filename: Name used in error positions

    Returns:
        Program with statement ids assigned in pre-order

    Raises:
        ParseError: With the position of the first offending token
    """
    program = Parser(tokens, filename).parse_program()
    logger.debug(
        f"{filename}: parsed {len(program.declarations)} declarations, "
        f"{len(program.body)} top-level statements"
    )
    return program
