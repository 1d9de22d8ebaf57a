#!/usr/bin/env python3
"""
Lexer for the analyzer's input language.

Comments (``// ...`` to end of line and ``/* ... */``) and whitespace are
dropped; every other lexeme becomes a Token carrying its line and column.
"""

import re
import logging
from typing import List

from exceptions import LexError
from frontend.tokens import KEYWORDS, MAX_WIDTH, Token, TokenType

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
    | (?P<newline>\n)
    | (?P<line_comment>//[^\n]*)
    | (?P<block_comment>/\*.*?\*/)
    | (?P<open_comment>/\*)
    | (?P<simulate_abs>simulate-abs\b)
    | (?P<decimal>\d+\.\d+|\.\d+)
    | (?P<int>\d+)
    | (?P<width>int\d+\b)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<assign>:=)
    | (?P<op>==|!=|<=|>=|&&|\|\||[<>+\-*/%!^])
    | (?P<punct>[;,()\[\]])
    """,
    re.VERBOSE | re.DOTALL,
)

_PUNCT = {
    ";": TokenType.SEMI,
    ",": TokenType.COMMA,
    "(": TokenType.LPAREN,
    ")": TokenType.RPAREN,
    "[": TokenType.LBRACKET,
    "]": TokenType.RBRACKET,
}


def tokenize(source: str, filename: str = "<input>") -> List[Token]:
    """
    Split source text into tokens.

    Args:
        source: Program text
        filename: Name used in error positions

    Returns:
        Tokens in order, terminated by an EOF token

    Raises:
        LexError: On an illegal character or an unterminated block comment
    """
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if match is None:
            raise LexError(f"illegal character {source[pos]!r}", line, column, filename)
        kind = match.lastgroup
        text = match.group()
        if kind == "open_comment":
            raise LexError("unterminated block comment", line, column, filename)
        if kind == "newline":
            line, line_start = line + 1, match.end()
        elif kind == "block_comment":
            breaks = text.count("\n")
            if breaks:
                line += breaks
                line_start = pos + text.rfind("\n") + 1
        elif kind == "width":
            bits = int(text[3:])
            if not 1 <= bits <= MAX_WIDTH:
                raise LexError(f"unsupported integer width {text!r}", line, column, filename)
            tokens.append(Token(TokenType.WIDTH, text, line, column))
        elif kind in ("ident", "simulate_abs"):
            token_type = TokenType.KEYWORD if text in KEYWORDS else TokenType.IDENT
            tokens.append(Token(token_type, text, line, column))
        elif kind == "int":
            tokens.append(Token(TokenType.INT, text, line, column))
        elif kind == "decimal":
            tokens.append(Token(TokenType.DECIMAL, text, line, column))
        elif kind == "assign":
            tokens.append(Token(TokenType.ASSIGN, text, line, column))
        elif kind == "op":
            tokens.append(Token(TokenType.OP, text, line, column))
        elif kind == "punct":
            tokens.append(Token(_PUNCT[text], text, line, column))
        pos = match.end()

    tokens.append(Token(TokenType.EOF, "", line, pos - line_start + 1))
    logger.debug(f"{filename}: {len(tokens) - 1} tokens")
    return tokens
