#!/usr/bin/env python3
"""
Frontend module for the leakage analyzer.
Turns ``.hyleak`` source text into preprocessed, immutable syntax trees.
"""

from pathlib import Path
from typing import Mapping, Optional

from .ast_nodes import Program
from .lexer import tokenize
from .parser import parse
from .preprocessor import preprocess
from .printer import format_program


def load_program(
    path: str, constants: Optional[Mapping[str, int]] = None, raw: bool = False
) -> Program:
    """
    Read, parse and (unless ``raw``) preprocess a source file.

    Raises:
        FileNotFoundError: If the file does not exist
        FrontendError: On lexical, syntax or preprocessing errors
    """
    source = Path(path).read_text(encoding="utf-8")
    program = parse(tokenize(source, path), path)
    return program if raw else preprocess(program, constants)


__all__ = [
    'Program',
    'format_program',
    'load_program',
    'parse',
    'preprocess',
    'tokenize',
]
