#!/usr/bin/env python3
"""
Token kinds and keyword tables of the analyzer's input language.
"""

from dataclasses import dataclass
from enum import Enum


class TokenType(str, Enum):
    """Lexical categories."""

    IDENT = "identifier"
    INT = "integer"
    DECIMAL = "decimal"
    WIDTH = "width"  # int1 .. int32
    KEYWORD = "keyword"
    ASSIGN = ":="
    SEMI = ";"
    COMMA = ","
    LPAREN = "("
    RPAREN = ")"
    LBRACKET = "["
    RBRACKET = "]"
    OP = "operator"
    EOF = "end of input"


KEYWORDS = frozenset({
    "const", "secret", "observable", "public", "private",
    "array", "of",
    "if", "then", "elif", "else", "fi",
    "for", "in", "do", "od", "while",
    "return", "simulate", "simulate-abs",
    "random", "randombit", "xor",
})

VARIABLE_CLASSES = ("const", "secret", "observable", "public", "private")

# Binary operators from loosest to tightest binding
BINARY_PRECEDENCE = (
    ("||",),
    ("&&",),
    ("xor", "^"),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)

UNARY_OPERATORS = ("-", "!")

MAX_WIDTH = 32


@dataclass(frozen=True)
class Token:
    """A lexeme with its 1-based source position."""

    type: TokenType
    text: str
    line: int
    column: int

    def is_keyword(self, word: str) -> bool:
        return self.type is TokenType.KEYWORD and self.text == word

    def is_op(self, op: str) -> bool:
        return self.type is TokenType.OP and self.text == op

    def describe(self) -> str:
        if self.type is TokenType.EOF:
            return "end of input"
        return f"'{self.text}'"
