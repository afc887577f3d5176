"""Error types shared by the front end, the checker and the evaluator.

Every error that points at source code carries a SourceSpan; the CLI maps
error classes to exit codes (lex/parse -> 2, checker -> 1, runtime -> 3).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


class MiniModError(Exception):
    """Base class for errors raised while processing a program."""

    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.message = message
        self.span = span


class LexError(MiniModError):
    pass


class ParseError(MiniModError):
    def __init__(self, message: str, span=None, expected: Optional[set] = None):
        super().__init__(message, span)
        self.expected = expected or set()


class CheckError(MiniModError):
    """Base class for every type checker error."""


class UnboundIdentifier(CheckError):
    pass


class UnboundModule(CheckError):
    pass


class UnifyError(CheckError):
    def __init__(self, expected, actual, span=None):
        self.expected = expected
        self.actual = actual
        super().__init__(
            "This expression has type %s but was expected of type %s"
            % (actual, expected),
            span,
        )


class OccursError(CheckError):
    pass


class ConstructorArity(CheckError):
    pass


class TypeArity(CheckError):
    pass


class RecursiveTypeAlias(CheckError):
    pass


class MatchError(CheckError):
    """Signature matching failure, naming the first failing component."""

    def __init__(self, component: str, reason: str, span=None):
        self.component = component
        self.reason = reason
        super().__init__(
            "Signature mismatch: the component %s %s" % (component, reason), span
        )


class CannotOpenFunctor(CheckError):
    pass


class NotAFunctor(CheckError):
    pass


class FunctorArgMismatch(CheckError):
    pass


class WithOnNonAbstract(CheckError):
    pass


class UnboundTypeInWith(CheckError):
    pass


@dataclass
class Victim:
    """One component that still mentions the hidden identifier."""

    kind: str  # value | type | exception | module
    name: str
    span: object
    offender: object = None  # the component Ident rendered name/stamp


class EliminationError(CheckError):
    """A hidden identifier cannot be eliminated from a signature."""

    def __init__(self, hidden, open_span, victims, introducer: str = "open"):
        self.hidden = hidden
        self.open_span = open_span
        self.victims = list(victims)
        self.introducer = introducer
        first = self.victims[0] if self.victims else None
        offender = first.offender if first is not None else hidden
        super().__init__(
            "The type %s introduced by this %s appears in the signature"
            % (offender, introducer),
            open_span,
        )
