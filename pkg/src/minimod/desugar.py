"""Source-to-source transformations between `local`, `private` and the
extended `open`, a conservative free-module-name analysis, and the source
printer.

`local d1 in d2 end` expands to `include struct open struct d1 end d2 end`;
`private decl` expands to `open struct decl end`. The reverse directions
replace each non-path `open modexp` with a named module binding plus a path
open, choosing a module name `M0, M1, ...` that does not occur in the
remainder.
"""
from __future__ import annotations

import dataclasses

from .syntax import ast


# ---------------------------------------------------------------------------
# Generic AST walkers.


def _walk(node, item_fn=None, list_fn=None):
    """Rebuild `node` bottom-up, mapping item_fn over every StructItem and
    list_fn over every list of StructItems."""
    if isinstance(node, list):
        walked = [_walk(x, item_fn, list_fn) for x in node]
        if list_fn is not None and walked and all(
            isinstance(x, ast.StructItem) for x in walked
        ):
            return list_fn(walked)
        return walked
    if isinstance(node, tuple):
        return tuple(_walk(x, item_fn, list_fn) for x in node)
    if dataclasses.is_dataclass(node) and not isinstance(node, type):
        kwargs = {
            f.name: _walk(getattr(node, f.name), item_fn, list_fn)
            for f in dataclasses.fields(node)
        }
        rebuilt = type(node)(**kwargs)
        if item_fn is not None and isinstance(rebuilt, ast.StructItem):
            return item_fn(rebuilt)
        return rebuilt
    return node


def _contains(items, kind) -> bool:
    found = [False]

    def check(item):
        if isinstance(item, kind):
            found[0] = True
        return item

    _walk(list(items), item_fn=check)
    return found[0]


def contains_local(items) -> bool:
    return _contains(items, ast.SiLocal)


def contains_private(items) -> bool:
    return _contains(items, ast.SiPrivate)


def contains_nonpath_open(items) -> bool:
    found = [False]

    def check(item):
        if isinstance(item, ast.SiOpen) and not isinstance(item.modexpr, ast.MePath):
            found[0] = True
        return item

    _walk(list(items), item_fn=check)
    return found[0]


# ---------------------------------------------------------------------------
# Forward translations.


def expand_local(items: list) -> list:
    """Replace every `local d1 in d2 end` (recursively) with
    `include struct open struct d1 end d2 end`."""

    def rewrite(item):
        if isinstance(item, ast.SiLocal):
            opened = ast.SiOpen(ast.MeStruct(item.first, item.span), item.span)
            return ast.SiInclude(
                ast.MeStruct([opened] + item.second, item.span), item.span
            )
        return item

    return _walk(list(items), item_fn=rewrite)


def expand_private(items: list) -> list:
    """Replace every `private decl` (recursively) with
    `open struct decl end`."""

    def rewrite(item):
        if isinstance(item, ast.SiPrivate):
            return ast.SiOpen(ast.MeStruct([item.item], item.span), item.span)
        return item

    return _walk(list(items), item_fn=rewrite)


# ---------------------------------------------------------------------------
# Reverse translations.


def _fresh_module_name(forbidden: set) -> str:
    n = 0
    while "M%d" % n in forbidden:
        n += 1
    return "M%d" % n


def introduce_local(items: list) -> list:
    """Rewrite every non-path `open modexp; d` into
    `local module M = modexp in open M; d end` with `M` fresh for `d`.

    The path open lives at the head of the local body rather than in the
    prelude: an `open` inside `struct d1 end` would not reach `d2` once
    `local` itself is expanded to the include-open-struct form.
    """

    def rewrite_list(items):
        for i, item in enumerate(items):
            if isinstance(item, ast.SiOpen) and not isinstance(
                item.modexpr, ast.MePath
            ):
                rest = rewrite_list(items[i + 1 :])
                name = _fresh_module_name(approx_module_names(rest))
                binding = ast.SiModule(name, [], item.modexpr, span=item.span)
                reopen = ast.SiOpen(
                    ast.MePath(ast.PsId(name, item.span), item.span), item.span
                )
                local = ast.SiLocal([binding], [reopen] + rest, item.span)
                return items[:i] + [local]
        return items

    return _walk(list(items), list_fn=rewrite_list)


def introduce_private(items: list) -> list:
    """Rewrite every non-path `open modexp; d` into
    `private module M = modexp; open M; d` with `M` fresh for `d`."""

    def rewrite_list(items):
        for i, item in enumerate(items):
            if isinstance(item, ast.SiOpen) and not isinstance(
                item.modexpr, ast.MePath
            ):
                rest = rewrite_list(items[i + 1 :])
                name = _fresh_module_name(approx_module_names(rest))
                binding = ast.SiModule(name, [], item.modexpr, span=item.span)
                private = ast.SiPrivate(binding, item.span)
                reopen = ast.SiOpen(
                    ast.MePath(ast.PsId(name, item.span), item.span), item.span
                )
                return items[:i] + [private, reopen] + rest
        return items

    return _walk(list(items), list_fn=rewrite_list)


# ---------------------------------------------------------------------------
# Conservative module-name analysis.


def approx_module_names(items) -> set:
    """Every capitalized identifier occurring anywhere in `items`; a
    superset of the truly free module names (exact freeness would need the
    types of the opened modules)."""
    names = set()

    def collect(node):
        if isinstance(node, ast.PsId):
            if node.name[:1].isupper():
                names.add(node.name)
        elif isinstance(node, ast.PsDot):
            if node.name[:1].isupper():
                names.add(node.name)
            collect(node.prefix)
        elif isinstance(node, ast.PsApply):
            collect(node.func)
            collect(node.arg)
        elif isinstance(node, str):
            if node[:1].isupper():
                names.add(node)
        elif isinstance(node, (list, tuple)):
            for x in node:
                collect(x)
        elif dataclasses.is_dataclass(node) and not isinstance(node, type):
            for f in dataclasses.fields(node):
                if f.name in ("span", "name_span"):
                    continue
                value = getattr(node, f.name)
                if isinstance(value, str):
                    if value[:1].isupper():
                        names.add(value)
                else:
                    collect(value)

    collect(list(items))
    return names


# ---------------------------------------------------------------------------
# Source printer.


_SPECIALS = (
    ast.ELetIn,
    ast.ELetModuleIn,
    ast.ELetExceptionIn,
    ast.ELetOpenIn,
    ast.EMatch,
    ast.ETry,
    ast.EFun,
    ast.EIf,
)


def print_source(program) -> str:
    """Render a program (or item list) as parseable MiniMod source."""
    items = program.items if isinstance(program, ast.Program) else program
    lines = []
    for item in items:
        lines.extend(_item_lines(item, ""))
    return "".join(line + "\n" for line in lines)


def print_interface_source(items: list) -> str:
    lines = []
    for item in items:
        lines.extend(_sig_item_lines(item, ""))
    return "".join(line + "\n" for line in lines)


def _item_lines(item, ind: str) -> list:
    if isinstance(item, ast.SiLet):
        return _let_lines("let", item.rec, item.bindings, ind)
    if isinstance(item, ast.SiType):
        return [ind + _typedefs_str(item.nonrec, item.defs)]
    if isinstance(item, ast.SiModule):
        head = "module " + item.name
        for pname, ptype in item.params:
            head += " (%s : %s)" % (pname, _modtype_str(ptype))
        return _with_modexpr(ind + head + " = ", item.body, ind)
    if isinstance(item, ast.SiModType):
        return [ind + "module type %s = %s" % (item.name, _modtype_str(item.body))]
    if isinstance(item, ast.SiException):
        return [ind + _exception_str(item)]
    if isinstance(item, ast.SiOpen):
        return _with_modexpr(ind + "open ", item.modexpr, ind)
    if isinstance(item, ast.SiInclude):
        return _with_modexpr(ind + "include ", item.modexpr, ind)
    if isinstance(item, ast.SiLocal):
        lines = [ind + "local"]
        for sub in item.first:
            lines.extend(_item_lines(sub, ind + "  "))
        lines.append(ind + "in")
        for sub in item.second:
            lines.extend(_item_lines(sub, ind + "  "))
        lines.append(ind + "end")
        return lines
    if isinstance(item, ast.SiPrivate):
        inner = _item_lines(item.item, ind)
        inner[0] = ind + "private " + inner[0][len(ind) :]
        return inner
    if isinstance(item, ast.SiExpr):
        return [ind + _expr_str(item.expr, 0)]
    raise TypeError("cannot print %r" % (item,))


def _let_lines(keyword: str, rec: bool, bindings, ind: str) -> list:
    head = keyword + (" rec" if rec else "")
    lines = []
    for i, binding in enumerate(bindings):
        lead = head if i == 0 else "and"
        params = "".join(" " + _pattern_str(p) for p in binding.params)
        lines.append(
            "%s%s %s%s = %s"
            % (ind, lead, binding.name, params, _expr_str(binding.body, 0))
        )
    return lines


def _exception_str(item) -> str:
    if not item.args:
        return "exception " + item.name
    return "exception %s of %s" % (
        item.name,
        " * ".join(_type_str(a, 2) for a in item.args),
    )


def _typedefs_str(nonrec: bool, defs) -> str:
    parts = []
    for i, d in enumerate(defs):
        lead = "type" + (" nonrec" if nonrec else "") if i == 0 else "and"
        s = "%s %s%s" % (lead, _params_str(d.params), d.name)
        if d.manifest is not None:
            s += " = " + _type_str(d.manifest, 0)
        if d.variant is not None:
            s += " = " + " | ".join(_variant_case_str(c) for c in d.variant)
        parts.append(s)
    return " ".join(parts)


def _variant_case_str(case) -> str:
    name, args = case
    if not args:
        return name
    return "%s of %s" % (name, " * ".join(_type_str(a, 2) for a in args))


def _params_str(params) -> str:
    if not params:
        return ""
    if len(params) == 1:
        return "'%s " % params[0]
    return "(%s) " % ", ".join("'" + p for p in params)


def _path_str(ps) -> str:
    if isinstance(ps, ast.PsId):
        return ps.name
    if isinstance(ps, ast.PsDot):
        return "%s.%s" % (_path_str(ps.prefix), ps.name)
    return "%s(%s)" % (_path_str(ps.func), _path_str(ps.arg))


# type printing precedence: 0 whole, 1 tuple member, 2 application argument
def _type_str(tx, prec: int) -> str:
    if isinstance(tx, ast.TxVar):
        return "'" + tx.name
    if isinstance(tx, ast.TxArrow):
        s = "%s -> %s" % (_type_str(tx.lhs, 1), _type_str(tx.rhs, 0))
        return "(%s)" % s if prec > 0 else s
    if isinstance(tx, ast.TxTuple):
        s = " * ".join(_type_str(t, 2) for t in tx.items)
        return "(%s)" % s if prec > 1 else s
    if not tx.args:
        return _path_str(tx.path)
    if len(tx.args) == 1:
        return "%s %s" % (_type_str(tx.args[0], 2), _path_str(tx.path))
    return "(%s) %s" % (
        ", ".join(_type_str(a, 0) for a in tx.args),
        _path_str(tx.path),
    )


def _pattern_str(pat) -> str:
    if isinstance(pat, ast.PVar):
        if pat.annot is not None:
            return "(%s : %s)" % (pat.name, _type_str(pat.annot, 0))
        return pat.name
    if isinstance(pat, ast.PWild):
        return "_"
    if isinstance(pat, ast.PUnit):
        return "()"
    if isinstance(pat, ast.PLit):
        return _lit_str(pat.value)
    if isinstance(pat, ast.PConstr):
        base = _path_str(pat.path)
        if not pat.args:
            return base
        if len(pat.args) == 1:
            return "%s %s" % (base, _pattern_str(pat.args[0]))
        return "%s (%s)" % (base, ", ".join(_pattern_str(a) for a in pat.args))
    raise TypeError("cannot print pattern %r" % (pat,))


def _lit_str(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
    return '"%s"' % escaped


def _modexpr_lines(me, ind: str) -> list:
    if isinstance(me, ast.MePath):
        return [_path_str(me.path)]
    if isinstance(me, ast.MeStruct):
        lines = ["struct"]
        for item in me.items:
            lines.extend(_item_lines(item, "  "))
        lines.append("end")
        return lines
    if isinstance(me, ast.MeFunctor):
        head = "functor (%s : %s) -> " % (me.param, _modtype_str(me.param_type))
        body = _modexpr_lines(me.body, ind)
        body[0] = head + body[0]
        return body
    if isinstance(me, ast.MeApply):
        func = _modexpr_lines(me.func, ind)
        arg = _modexpr_lines(me.arg, ind)
        if len(func) == 1 and len(arg) == 1:
            return ["%s(%s)" % (func[0], arg[0])]
        lines = func
        lines[-1] += "("
        lines.extend(arg)
        lines[-1] += ")"
        return lines
    if isinstance(me, ast.MeAscribe):
        inner = _modexpr_lines(me.inner, ind)
        inner[0] = "(" + inner[0]
        inner[-1] += " : %s)" % _modtype_str(me.annot)
        return inner
    raise TypeError("cannot print %r" % (me,))


def _with_modexpr(prefix: str, me, ind: str) -> list:
    lines = _modexpr_lines(me, ind)
    lines[0] = prefix + lines[0]
    for i in range(1, len(lines)):
        lines[i] = ind + lines[i]
    return lines


def _modtype_str(mt) -> str:
    if isinstance(mt, ast.MtName):
        return _path_str(mt.path)
    if isinstance(mt, ast.MtSig):
        if not mt.items:
            return "sig end"
        inner = []
        for item in mt.items:
            inner.extend(_sig_item_lines(item, ""))
        return "sig %s end" % " ".join(inner)
    if isinstance(mt, ast.MtFunctor):
        return "functor (%s : %s) -> %s" % (
            mt.param,
            _modtype_str(mt.param_type),
            _modtype_str(mt.result),
        )
    if isinstance(mt, ast.MtWith):
        op = "=" if mt.mode == "equal" else ":="
        base = _modtype_str(mt.base)
        if isinstance(mt.base, ast.MtWith):
            constraint = "and type %s%s %s %s" % (
                _params_str(mt.params),
                mt.name,
                op,
                _type_str(mt.rhs, 0),
            )
            return "%s %s" % (base, constraint)
        return "%s with type %s%s %s %s" % (
            base,
            _params_str(mt.params),
            mt.name,
            op,
            _type_str(mt.rhs, 0),
        )
    raise TypeError("cannot print %r" % (mt,))


def _sig_item_lines(item, ind: str) -> list:
    if isinstance(item, ast.SgVal):
        return [ind + "val %s : %s" % (item.name, _type_str(item.annot, 0))]
    if isinstance(item, ast.SgType):
        return [ind + _typedefs_str(item.nonrec, item.defs)]
    if isinstance(item, ast.SgTypeSubst):
        return [
            ind
            + "type %s%s := %s"
            % (_params_str(item.params), item.name, _type_str(item.rhs, 0))
        ]
    if isinstance(item, ast.SgModule):
        return [ind + "module %s : %s" % (item.name, _modtype_str(item.annot))]
    if isinstance(item, ast.SgModType):
        if item.body is None:
            return [ind + "module type " + item.name]
        return [ind + "module type %s = %s" % (item.name, _modtype_str(item.body))]
    if isinstance(item, ast.SgException):
        return [ind + _exception_str(item)]
    if isinstance(item, ast.SgOpen):
        return _with_modexpr(ind + "open ", item.modexpr, ind)
    if isinstance(item, ast.SgInclude):
        return [ind + "include " + _modtype_str(item.annot)]
    if isinstance(item, ast.SgLocal):
        lines = [ind + "local"]
        for sub in item.first:
            lines.extend(_sig_item_lines(sub, ind + "  "))
        lines.append(ind + "in")
        for sub in item.second:
            lines.extend(_sig_item_lines(sub, ind + "  "))
        lines.append(ind + "end")
        return lines
    raise TypeError("cannot print %r" % (item,))


# expression precedence levels: 0 sequence, 1 :=, 2 comparisons, 3 additive,
# 4 multiplicative, 5 application, 6 atoms
_INFIX_LEVELS = {"=": 2, "<": 2, "+": 3, "-": 3, "*": 4}


def _ends_in_cases(e) -> bool:
    """Whether the rightmost spine of `e` ends in a match/try whose case
    list would swallow a following `|`."""
    if isinstance(e, (ast.EMatch, ast.ETry)):
        return True
    if isinstance(e, ast.EFun):
        return _ends_in_cases(e.body)
    if isinstance(e, (ast.ELetIn, ast.ELetModuleIn, ast.ELetExceptionIn, ast.ELetOpenIn)):
        return _ends_in_cases(e.body)
    if isinstance(e, ast.ESequence):
        return _ends_in_cases(e.second)
    if isinstance(e, ast.EIf):
        return _ends_in_cases(e.orelse if e.orelse is not None else e.then)
    return False


def _infix_parts(e):
    if (
        isinstance(e, ast.EApply)
        and isinstance(e.func, ast.EApply)
        and isinstance(e.func.func, ast.EVar)
        and isinstance(e.func.func.path, ast.PsId)
        and e.func.func.path.name in _INFIX_LEVELS
    ):
        return e.func.func.path.name, e.func.arg, e.arg
    if (
        isinstance(e, ast.EApply)
        and isinstance(e.func, ast.EApply)
        and isinstance(e.func.func, ast.EVar)
        and isinstance(e.func.func.path, ast.PsId)
        and e.func.func.path.name == ":="
    ):
        return ":=", e.func.arg, e.arg
    return None


def _expr_str(e, prec: int) -> str:
    def wrap(s, level):
        return "(%s)" % s if level < prec else s

    if isinstance(e, ast.EInt):
        if e.value < 0:
            return wrap(str(e.value), 4)
        return str(e.value)
    if isinstance(e, ast.EString):
        return _lit_str(e.value)
    if isinstance(e, ast.EBool):
        return "true" if e.value else "false"
    if isinstance(e, ast.EUnit):
        return "()"
    if isinstance(e, ast.EVar):
        if isinstance(e.path, ast.PsId) and not e.path.name[:1].isalpha() and e.path.name != "_":
            return "(%s)" % e.path.name if e.path.name != "!" else "(!)"
        return _path_str(e.path)
    if isinstance(e, ast.EConstr):
        base = _path_str(e.path)
        if e.arg is None:
            return base
        return wrap("%s %s" % (base, _expr_str(e.arg, 6)), 5)
    if isinstance(e, ast.ETuple):
        return "(%s)" % ", ".join(_expr_str(x, 0) for x in e.items)
    if isinstance(e, ast.EFun):
        return wrap("fun %s -> %s" % (_pattern_str(e.param), _expr_str(e.body, 0)), 0)
    if isinstance(e, ast.EApply):
        infix = _infix_parts(e)
        if infix is not None:
            op, lhs, rhs = infix
            if op == ":=":
                return wrap(
                    "%s := %s" % (_expr_str(lhs, 2), _expr_str(rhs, 2)), 1
                )
            level = _INFIX_LEVELS[op]
            return wrap(
                "%s %s %s"
                % (_expr_str(lhs, level), op, _expr_str(rhs, level + 1)),
                level,
            )
        if (
            isinstance(e.func, ast.EVar)
            and isinstance(e.func.path, ast.PsId)
            and e.func.path.name == "!"
        ):
            return wrap("!%s" % _expr_str(e.arg, 6), 6)
        return wrap("%s %s" % (_expr_str(e.func, 5), _expr_str(e.arg, 6)), 5)
    if isinstance(e, ast.ELetIn):
        head = "let rec" if e.rec else "let"
        parts = []
        for i, binding in enumerate(e.bindings):
            lead = head if i == 0 else "and"
            params = "".join(" " + _pattern_str(p) for p in binding.params)
            parts.append(
                "%s %s%s = %s"
                % (lead, binding.name, params, _expr_str(binding.body, 0))
            )
        return wrap("%s in %s" % (" ".join(parts), _expr_str(e.body, 0)), 0)
    if isinstance(e, ast.EMatch):
        s = "match %s with %s" % (_expr_str(e.scrutinee, 0), _cases_str(e.cases))
        return wrap(s, 0)
    if isinstance(e, ast.ETry):
        s = "try %s with %s" % (_expr_str(e.body, 0), _cases_str(e.cases))
        return wrap(s, 0)
    if isinstance(e, ast.ERaise):
        return wrap("raise %s" % _expr_str(e.arg, 5), 5)
    if isinstance(e, ast.EAssert):
        return wrap("assert %s" % _expr_str(e.arg, 5), 5)
    if isinstance(e, ast.ESequence):
        return wrap(
            "%s; %s" % (_expr_str(e.first, 1), _expr_str(e.second, 0)), 0
        )
    if isinstance(e, ast.EIf):
        s = "if %s then %s" % (_expr_str(e.cond, 1), _expr_str(e.then, 1))
        if e.orelse is not None:
            s += " else %s" % _expr_str(e.orelse, 1)
        return wrap(s, 0)
    if isinstance(e, ast.ELetModuleIn):
        me = " ".join(_modexpr_lines(e.modexpr, ""))
        return wrap(
            "let module %s = %s in %s" % (e.name, me, _expr_str(e.body, 0)), 0
        )
    if isinstance(e, ast.ELetExceptionIn):
        args = ""
        if e.args:
            args = " of " + " * ".join(_type_str(a, 2) for a in e.args)
        return wrap(
            "let exception %s%s in %s" % (e.name, args, _expr_str(e.body, 0)), 0
        )
    if isinstance(e, ast.ELetOpenIn):
        me = " ".join(_modexpr_lines(e.modexpr, ""))
        return wrap("let open %s in %s" % (me, _expr_str(e.body, 0)), 0)
    raise TypeError("cannot print %r" % (e,))


def _cases_str(cases) -> str:
    parts = []
    for i, case in enumerate(cases):
        body = _expr_str(case.body, 0)
        if i + 1 < len(cases) and _ends_in_cases(case.body):
            body = "(%s)" % body
        prefix = "exception " if case.is_exception else ""
        parts.append("| %s%s -> %s" % (prefix, _pattern_str(case.pattern), body))
    return " ".join(parts)
