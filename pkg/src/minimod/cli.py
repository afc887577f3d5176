"""Command-line driver: parse, check, eliminate, print or evaluate.

Exit codes: 0 success, 1 type error, 2 parse/lex error, 3 uncaught runtime
exception, 4 usage error. Artifacts (signatures, sources, program output) go
to stdout; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import desugar, evaluator, mod_typing, printer
from .errors import CheckError, LexError, MiniModError, ParseError
from .syntax.parser import parse_program

USAGE = """\
usage: minimod COMMAND FILE [options]

commands:
  check FILE                      type-check; silent on success
  infer FILE [--print-mode MODE]  print the inferred signature
                                  (MODE: plain | stamps | aliases; default aliases)
  run FILE                        type-check, then evaluate
  desugar FILE --eliminate WHAT   rewrite away a construct and print source
                                  (WHAT: local | private | open)
  elaborate FILE                  print the elaborated structure (hidden
                                  module#stamp bindings made explicit)

options:
  --no-color                      plain diagnostics
"""


@dataclass
class CliConfig:
    command: str
    path: str
    print_mode: str = "aliases"
    eliminate: str = None
    color: bool = True


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def parse_args(argv) -> CliConfig:
    parser = _Parser(prog="minimod", add_help=False)
    sub = parser.add_subparsers(dest="command")
    for name in ("check", "run", "elaborate"):
        p = sub.add_parser(name, add_help=False)
        p.add_argument("path")
        p.add_argument("--no-color", action="store_true")
    p = sub.add_parser("infer", add_help=False)
    p.add_argument("path")
    p.add_argument("--print-mode", choices=("plain", "stamps", "aliases"),
                   default="aliases")
    p.add_argument("--no-color", action="store_true")
    p = sub.add_parser("desugar", add_help=False)
    p.add_argument("path")
    p.add_argument("--eliminate", choices=("local", "private", "open"),
                   required=True)
    p.add_argument("--no-color", action="store_true")
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise _UsageError("missing command")
    return CliConfig(
        command=ns.command,
        path=ns.path,
        print_mode=getattr(ns, "print_mode", "aliases"),
        eliminate=getattr(ns, "eliminate", None),
        color=not ns.no_color,
    )


def run_cli(argv, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        config = parse_args(list(argv))
    except _UsageError as err:
        stderr.write("minimod: %s\n%s" % (err, USAGE))
        return 4
    try:
        with open(config.path, "r", encoding="utf-8") as handle:
            source = handle.read()
    except OSError as err:
        stderr.write("minimod: cannot read %s: %s\n%s" % (config.path, err, USAGE))
        return 4

    try:
        program = parse_program(source, config.path)
    except (LexError, ParseError) as err:
        stderr.write(printer.render_diagnostic(err, source, color=config.color))
        return 2

    if config.command == "desugar":
        transform = {
            "local": desugar.expand_local,
            "private": desugar.expand_private,
            "open": desugar.introduce_local,
        }[config.eliminate]
        stdout.write(desugar.print_source(transform(program.items)))
        return 0

    try:
        typed = mod_typing.check_program(program)
    except CheckError as err:
        stderr.write(printer.render_diagnostic(err, source, color=config.color))
        return 1

    if config.command == "check":
        return 0
    if config.command == "infer":
        stdout.write(
            printer.print_signature(
                typed.signature, config.print_mode, typed.root_env
            )
        )
        return 0
    if config.command == "elaborate":
        stdout.write(printer.print_elaborated(typed))
        return 0
    # run
    _, uncaught = evaluator.eval_program(typed.structure, out=stdout)
    if uncaught is not None:
        stderr.write("Fatal error: exception %s\n" % _exn_str(uncaught))
        return 3
    return 0


def _exn_str(uncaught) -> str:
    if not uncaught.payload:
        return uncaught.name
    parts = []
    for value in uncaught.payload:
        if isinstance(value, evaluator.VString):
            parts.append('"%s"' % value.value)
        elif isinstance(value, evaluator.VInt):
            parts.append(str(value.value))
        else:
            parts.append("_")
    return "%s(%s)" % (uncaught.name, ", ".join(parts))


def entry_point():
    sys.exit(run_cli(sys.argv[1:]))
