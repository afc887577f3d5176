"""Lexer, parser and surface AST."""

from .ast import Program, SourceSpan, structurally_equal
from .lexer import Token, TokenKind, tokenize
from .parser import parse_interface, parse_program

__all__ = [
    "Program",
    "SourceSpan",
    "Token",
    "TokenKind",
    "parse_interface",
    "parse_program",
    "structurally_equal",
    "tokenize",
]
