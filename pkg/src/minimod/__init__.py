"""MiniMod: a small ML-style module language whose `open` takes arbitrary
module expressions, with dependency elimination, local/private desugarings
and a shadow-resolving signature printer."""

from .mod_typing import TypedProgram, check_program, check_source
from .syntax import parse_interface, parse_program

__all__ = [
    "TypedProgram",
    "check_program",
    "check_source",
    "parse_interface",
    "parse_program",
]
