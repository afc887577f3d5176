"""Lexer for MiniMod source text.

Comments are `(* ... *)` and nest. Identifiers may contain primes after the
first character (`t'`), so a quote only starts a type variable at the start
of a token. `:=` is a single token, distinct from `:` followed by `=`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from ..errors import LexError
from .ast import SourceSpan


class TokenKind(enum.Enum):
    # keywords
    OPEN = "open"
    INCLUDE = "include"
    STRUCT = "struct"
    SIG = "sig"
    END = "end"
    MODULE = "module"
    TYPE = "type"
    LET = "let"
    REC = "rec"
    AND = "and"
    IN = "in"
    NONREC = "nonrec"
    FUNCTOR = "functor"
    EXCEPTION = "exception"
    LOCAL = "local"
    PRIVATE = "private"
    VAL = "val"
    WITH = "with"
    OF = "of"
    MATCH = "match"
    TRY = "try"
    RAISE = "raise"
    ASSERT = "assert"
    FUN = "fun"
    IF = "if"
    THEN = "then"
    ELSE = "else"
    TRUE = "true"
    FALSE = "false"
    BEGIN = "begin"
    # literals and names
    INT = "<int>"
    STRING = "<string>"
    IDENT = "<ident>"
    UIDENT = "<uident>"
    TYVAR = "<tyvar>"
    # punctuation
    LPAREN = "("
    RPAREN = ")"
    DOT = "."
    COMMA = ","
    COLON = ":"
    COLONEQ = ":="
    SEMI = ";"
    EQ = "="
    LT = "<"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    ARROW = "->"
    BANG = "!"
    BAR = "|"
    UNDERSCORE = "_"
    EOF = "<eof>"


KEYWORDS = {
    k.value: k
    for k in TokenKind
    if k.value.isalpha() and k not in (TokenKind.INT, TokenKind.STRING)
}


@dataclass
class Token:
    kind: TokenKind
    text: str
    value: object
    span: SourceSpan

    def __repr__(self):
        return "Token(%s, %r)" % (self.kind.name, self.text)


IDENT_START = set("abcdefghijklmnopqrstuvwxyz_")
UIDENT_START = set("ABCDEFGHIJKLMNOPQRSTUVWXYZ")
IDENT_CONT = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_'")


class _Scanner:
    def __init__(self, source: str, filename: str):
        self.src = source
        self.file = filename
        self.pos = 0
        self.line = 1
        self.col = 0

    def at_end(self):
        return self.pos >= len(self.src)

    def peek(self, ahead=0):
        p = self.pos + ahead
        return self.src[p] if p < len(self.src) else ""

    def advance(self):
        c = self.src[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 0
        else:
            self.col += 1
        return c

    def here(self):
        return self.line, self.col

    def span_from(self, start):
        return SourceSpan(self.file, start[0], start[1], self.line, self.col)


def tokenize(source: str, filename: str = "<input>") -> list:
    """Tokenize `source`, returning the token list without an EOF marker."""
    sc = _Scanner(source, filename)
    tokens = []
    while True:
        _skip_blanks(sc)
        if sc.at_end():
            break
        start = sc.here()
        c = sc.peek()
        if c in IDENT_START:
            text = _scan_name(sc)
            kind = KEYWORDS.get(text)
            if text == "_":
                kind = TokenKind.UNDERSCORE
            tokens.append(Token(kind or TokenKind.IDENT, text, text, sc.span_from(start)))
        elif c in UIDENT_START:
            text = _scan_name(sc)
            tokens.append(Token(TokenKind.UIDENT, text, text, sc.span_from(start)))
        elif c.isdigit():
            text = ""
            while not sc.at_end() and sc.peek().isdigit():
                text += sc.advance()
            tokens.append(Token(TokenKind.INT, text, int(text), sc.span_from(start)))
        elif c == "'":
            sc.advance()
            if sc.peek() not in IDENT_START:
                raise LexError("Illegal character '", sc.span_from(start))
            text = _scan_name(sc)
            tokens.append(Token(TokenKind.TYVAR, "'" + text, text, sc.span_from(start)))
        elif c == '"':
            tokens.append(_scan_string(sc, start))
        else:
            tokens.append(_scan_punct(sc, start))
    return tokens


def _skip_blanks(sc: _Scanner):
    while not sc.at_end():
        c = sc.peek()
        if c in " \t\r\n":
            sc.advance()
        elif c == "(" and sc.peek(1) == "*":
            _skip_comment(sc)
        else:
            return


def _skip_comment(sc: _Scanner):
    start = sc.here()
    sc.advance()
    sc.advance()
    depth = 1
    while depth > 0:
        if sc.at_end():
            raise LexError("Unterminated comment", sc.span_from(start))
        if sc.peek() == "(" and sc.peek(1) == "*":
            sc.advance()
            sc.advance()
            depth += 1
        elif sc.peek() == "*" and sc.peek(1) == ")":
            sc.advance()
            sc.advance()
            depth -= 1
        else:
            sc.advance()


def _scan_name(sc: _Scanner) -> str:
    text = sc.advance()
    while not sc.at_end() and sc.peek() in IDENT_CONT:
        text += sc.advance()
    return text


_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"'}


def _scan_string(sc: _Scanner, start) -> Token:
    sc.advance()
    chars = []
    while True:
        if sc.at_end() or sc.peek() == "\n":
            raise LexError("Unterminated string literal", sc.span_from(start))
        c = sc.advance()
        if c == '"':
            break
        if c == "\\":
            if sc.at_end():
                raise LexError("Unterminated string literal", sc.span_from(start))
            e = sc.advance()
            if e not in _ESCAPES:
                raise LexError("Illegal escape \\%s" % e, sc.span_from(start))
            chars.append(_ESCAPES[e])
        else:
            chars.append(c)
    value = "".join(chars)
    return Token(TokenKind.STRING, '"%s"' % value, value, sc.span_from(start))


_TWO_CHAR = {":=": TokenKind.COLONEQ, "->": TokenKind.ARROW}
_ONE_CHAR = {
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ".": TokenKind.DOT,
    ",": TokenKind.COMMA,
    ":": TokenKind.COLON,
    ";": TokenKind.SEMI,
    "=": TokenKind.EQ,
    "<": TokenKind.LT,
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "!": TokenKind.BANG,
    "|": TokenKind.BAR,
}


def _scan_punct(sc: _Scanner, start) -> Token:
    two = sc.peek() + sc.peek(1)
    if two in _TWO_CHAR:
        sc.advance()
        sc.advance()
        return Token(_TWO_CHAR[two], two, two, sc.span_from(start))
    c = sc.peek()
    if c in _ONE_CHAR:
        sc.advance()
        return Token(_ONE_CHAR[c], c, c, sc.span_from(start))
    sc.advance()
    raise LexError("Illegal character %r" % c, sc.span_from(start))
