"""Rendering of signatures, diagnostics and elaborated structures.

Three signature modes:

* plain: bare names; shadowed references print ambiguously (the historical
  behaviour the alias mode repairs).
* stamps: any name bound more than once in the rendered scope prints as
  name/stamp, so no two distinct identifiers render alike.
* aliases: inserts a minimal set of signature-local bindings
  (`type t' := t`) so every reference is unambiguous and the output
  re-checks against the original module.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import desugar, mod_typing
from .errors import EliminationError, MiniModError
from .semobj import (
    Env,
    MFunctor,
    MNamed,
    MSig,
    PApply,
    PDot,
    PIdent,
    SExn,
    SModType,
    SModule,
    SType,
    SVal,
    TArrow,
    TConstr,
    TTuple,
    TVar,
    resolve,
)


@dataclass
class _Scope:
    frames: list  # list of dicts: (namespace, name) -> stamp

    def push(self):
        return _Scope(self.frames + [{}])

    def bind(self, namespace, name, stamp):
        self.frames[-1][(namespace, name)] = stamp

    def lookup(self, namespace, name):
        for frame in reversed(self.frames):
            if (namespace, name) in frame:
                return frame[(namespace, name)]
        return None


def _root_scope(root_env) -> dict:
    frame = {}
    if root_env is not None:
        for name, (path, _) in root_env.types.items():
            frame[("types", name)] = _stamp_of(path)
        for name, (path, _) in root_env.modules.items():
            frame[("modules", name)] = _stamp_of(path)
    return frame


def _stamp_of(path):
    return path.ident.stamp if isinstance(path, PIdent) else None


class HiddenIdentPresent(MiniModError):
    pass


def print_signature(items, mode: str = "plain", root_env: Env = None) -> str:
    """Render an exported signature. `mode` is plain, stamps or aliases."""
    for item in items:
        if "#" in item.ident.name:
            raise HiddenIdentPresent(
                "hidden identifier %r leaked into a printed signature" % item.ident
            )
    printer = _SigPrinter(mode, root_env)
    if mode == "stamps":
        printer.collect_bindings(items)
    if mode == "aliases":
        printer.plan_aliases(items)
    lines = printer.render_items(items, _Scope([_root_scope(root_env)]))
    return "".join(line + "\n" for line in lines)


class _SigPrinter:
    def __init__(self, mode: str, root_env):
        self.mode = mode
        self.root_env = root_env
        self.name_counts = {}  # (ns, name) -> set of stamps
        self.alias_of = {}  # stamp -> alias name
        self.insertions = {}  # id(item list) -> list[(index, alias, original)]
        self.taken_type_names = set()
        self.weak_names = {}

    # -- pass 0: binding census (stamps mode and alias freshness) ----------

    def collect_bindings(self, items):
        for (ns, name), stamp in _root_scope(self.root_env).items():
            self.name_counts.setdefault((ns, name), set()).add(stamp)
        self._census_items(items)

    def _census_items(self, items):
        for item in items:
            ns = _namespace(item)
            self.name_counts.setdefault((ns, item.ident.name), set()).add(
                item.ident.stamp
            )
            if ns == "types":
                self.taken_type_names.add(item.ident.name)
            if isinstance(item, (SModule, SModType)) and item.modtype is not None:
                self._census_modtype(item.modtype)

    def _census_modtype(self, mty):
        if isinstance(mty, MSig):
            self._census_items(mty.items)
        elif isinstance(mty, MFunctor):
            self.name_counts.setdefault(
                ("modules", mty.param.name), set()
            ).add(mty.param.stamp)
            self._census_modtype(mty.param_type)
            self._census_modtype(mty.result)

    def _ambiguous(self, ns, name) -> bool:
        return len(self.name_counts.get((ns, name), ())) > 1

    # -- pass 1: plan alias insertions (aliases mode) -----------------------
    #
    # A reference to an ident whose name is shadowed at the reference point
    # gets a signature-local alias `type t' := t` inserted immediately after
    # the aliased declaration (where its name still denotes it); the alias
    # stays visible for the remainder of the signature, nested parts
    # included.

    def plan_aliases(self, items):
        self.collect_bindings(items)
        for ns, name in _root_scope(self.root_env):
            if ns == "types":
                self.taken_type_names.add(name)
        registry = {}  # stamp -> (containing item list, insertion index)
        for (ns, name), stamp in _root_scope(self.root_env).items():
            if ns == "types" and stamp is not None:
                registry[stamp] = (items, 0)
        self._plan_items(items, _Scope([_root_scope(self.root_env)]), registry)

    def _plan_items(self, items, scope, registry):
        for index, item in enumerate(items):
            # the item is in scope for its own body (recursive declarations)
            ns = _namespace(item)
            scope.bind(ns, item.ident.name, item.ident.stamp)
            if ns == "types":
                registry[item.ident.stamp] = (items, index + 1)
            self._plan_refs(item, scope, registry)

    def _plan_refs(self, item, scope, registry):
        if isinstance(item, SVal):
            self._plan_core(item.scheme.body, scope, registry)
        elif isinstance(item, SType):
            if item.decl.manifest is not None:
                self._plan_core(item.decl.manifest, scope, registry)
            if item.decl.variant is not None:
                for _, args in item.decl.variant:
                    for a in args:
                        self._plan_core(a, scope, registry)
        elif isinstance(item, SExn):
            for a in item.args:
                self._plan_core(a, scope, registry)
        elif isinstance(item, (SModule, SModType)) and item.modtype is not None:
            self._plan_modtype(item.modtype, scope, registry)

    def _plan_modtype(self, mty, scope, registry):
        if isinstance(mty, MSig):
            self._plan_items(mty.items, scope.push(), registry)
        elif isinstance(mty, MFunctor):
            self._plan_modtype(mty.param_type, scope, registry)
            inner = scope.push()
            inner.bind("modules", mty.param.name, mty.param.stamp)
            self._plan_modtype(mty.result, inner, registry)

    def _plan_core(self, t, scope, registry):
        t = resolve(t)
        if isinstance(t, TArrow):
            self._plan_core(t.lhs, scope, registry)
            self._plan_core(t.rhs, scope, registry)
        elif isinstance(t, TTuple):
            for x in t.items:
                self._plan_core(x, scope, registry)
        elif isinstance(t, TConstr):
            self._plan_path(t.path, scope, registry)
            for a in t.args:
                self._plan_core(a, scope, registry)

    def _plan_path(self, path, scope, registry):
        if not isinstance(path, PIdent):
            return
        ident = path.ident
        if scope.lookup("types", ident.name) in (ident.stamp, None):
            return
        if ident.stamp in self.alias_of or ident.stamp not in registry:
            return
        alias = ident.name + "'"
        while alias in self.taken_type_names:
            alias += "'"
        self.taken_type_names.add(alias)
        self.alias_of[ident.stamp] = alias
        decl_list, insert_index = registry[ident.stamp]
        self.insertions.setdefault(id(decl_list), []).append(
            (insert_index, alias, ident.name)
        )

    # -- pass 2: rendering ---------------------------------------------------

    def render_items(self, items, scope) -> list:
        lines = []
        pending = sorted(self.insertions.get(id(items), []), key=lambda x: x[0])
        for index, item in enumerate(items):
            while pending and pending[0][0] <= index:
                _, alias, original = pending.pop(0)
                lines.append("type %s := %s" % (alias, original))
            scope.bind(_namespace(item), item.ident.name, item.ident.stamp)
            lines.append(self.render_item(item, scope))
        for _, alias, original in pending:
            lines.append("type %s := %s" % (alias, original))
        return lines

    def render_item(self, item, scope) -> str:
        name = self._decl_name(item)
        if isinstance(item, SVal):
            return "val %s : %s" % (name, self.render_scheme(item.scheme, scope))
        if isinstance(item, SType):
            return self.render_type_decl(name, item.decl, scope)
        if isinstance(item, SModule):
            return "module %s : %s" % (name, self.render_modtype(item.modtype, scope))
        if isinstance(item, SModType):
            if item.modtype is None:
                return "module type %s" % name
            return "module type %s = %s" % (
                name,
                self.render_modtype(item.modtype, scope),
            )
        args = ""
        if item.args:
            vars_ = {}
            args = " of " + " * ".join(
                self.render_core(a, scope, vars_, 2) for a in item.args
            )
        return "exception %s%s" % (name, args)

    def _decl_name(self, item) -> str:
        name = item.ident.name
        if self.mode == "stamps" and self._ambiguous(_namespace(item), name):
            return "%s/%d" % (name, item.ident.stamp)
        return name

    def render_type_decl(self, name, decl, scope) -> str:
        vars_ = {}
        for param in decl.params:
            self._var_name(param, vars_, weak=False)
        params = ""
        if len(decl.params) == 1:
            params = self.render_core(decl.params[0], scope, vars_, 2) + " "
        elif len(decl.params) > 1:
            params = (
                "(%s) "
                % ", ".join(self.render_core(p, scope, vars_, 0) for p in decl.params)
            )
        s = "type %s%s" % (params, name)
        if decl.manifest is not None:
            s += " = " + self.render_core(decl.manifest, scope, vars_, 0)
        if decl.variant is not None:
            cases = []
            for cname, cargs in decl.variant:
                if cargs:
                    cases.append(
                        "%s of %s"
                        % (
                            cname,
                            " * ".join(
                                self.render_core(a, scope, vars_, 2) for a in cargs
                            ),
                        )
                    )
                else:
                    cases.append(cname)
            s += " = " + " | ".join(cases)
        return s

    def render_modtype(self, mty, scope) -> str:
        if isinstance(mty, MNamed):
            return self.render_module_path(mty.path, scope)
        if isinstance(mty, MFunctor):
            inner = scope.push()
            param = self.render_modtype(mty.param_type, scope)
            inner.bind("modules", mty.param.name, mty.param.stamp)
            return "functor (%s : %s) -> %s" % (
                mty.param.name,
                param,
                self.render_modtype(mty.result, inner),
            )
        if not mty.items:
            return "sig end"
        inner = scope.push()
        return "sig %s end" % " ".join(self.render_items(mty.items, inner))

    def render_scheme(self, scheme, scope) -> str:
        vars_ = {}
        for v in scheme.quantified:
            self._var_name(v, vars_, weak=False)
        return self.render_core(scheme.body, scope, vars_, 0)

    def _var_name(self, v, vars_, weak) -> str:
        if v.id not in vars_:
            if weak:
                label = self.weak_names.setdefault(
                    v.id, "'_%s" % _alpha(len(self.weak_names))
                )
            else:
                label = "'" + _alpha(len([k for k in vars_ if not str(vars_[k]).startswith("'_")]))
            vars_[v.id] = label
        return vars_[v.id]

    def render_core(self, t, scope, vars_, prec) -> str:
        t = resolve(t)
        if isinstance(t, TVar):
            if t.id in vars_:
                return vars_[t.id]
            return self._var_name(t, vars_, weak=True)
        if isinstance(t, TArrow):
            s = "%s -> %s" % (
                self.render_core(t.lhs, scope, vars_, 1),
                self.render_core(t.rhs, scope, vars_, 0),
            )
            return "(%s)" % s if prec > 0 else s
        if isinstance(t, TTuple):
            s = " * ".join(self.render_core(x, scope, vars_, 2) for x in t.items)
            return "(%s)" % s if prec > 1 else s
        path = self.render_type_path(t.path, scope)
        if not t.args:
            return path
        if len(t.args) == 1:
            return "%s %s" % (self.render_core(t.args[0], scope, vars_, 2), path)
        return "(%s) %s" % (
            ", ".join(self.render_core(a, scope, vars_, 0) for a in t.args),
            path,
        )

    def render_type_path(self, path, scope) -> str:
        if isinstance(path, PIdent):
            ident = path.ident
            visible = scope.lookup("types", ident.name)
            if visible == ident.stamp:
                if self.mode == "stamps" and self._ambiguous("types", ident.name):
                    return "%s/%d" % (ident.name, ident.stamp)
                return ident.name
            if self.mode == "aliases" and ident.stamp in self.alias_of:
                return self.alias_of[ident.stamp]
            if self.mode == "stamps":
                return "%s/%d" % (ident.name, ident.stamp)
            return ident.name
        if isinstance(path, PDot):
            return "%s.%s" % (self.render_module_path(path.prefix, scope), path.name)
        return "%s(%s)" % (
            self.render_module_path(path.func, scope),
            self.render_module_path(path.arg, scope),
        )

    def render_module_path(self, path, scope) -> str:
        if isinstance(path, PIdent):
            ident = path.ident
            if self.mode == "stamps" and self._ambiguous("modules", ident.name):
                return "%s/%d" % (ident.name, ident.stamp)
            return ident.name
        if isinstance(path, PDot):
            return "%s.%s" % (self.render_module_path(path.prefix, scope), path.name)
        return "%s(%s)" % (
            self.render_module_path(path.func, scope),
            self.render_module_path(path.arg, scope),
        )


def _alpha(k: int) -> str:
    name = chr(ord("a") + k % 26)
    return name if k < 26 else name + str(k // 26)


def _namespace(item) -> str:
    from .semobj import item_namespace

    return item_namespace(item)


# ---------------------------------------------------------------------------
# Diagnostics.


def render_diagnostic(err, source: str = None, color: bool = False) -> str:
    """Render any checker error. Elimination errors reproduce the compiler
    message block with the caret-underlined open; other errors get a span
    header and one Error line."""
    label = "\x1b[1mError:\x1b[0m" if color else "Error:"
    if isinstance(err, EliminationError):
        return _render_elimination(err, source, label)
    lines = []
    if err.span is not None:
        lines.append(
            "Line %d, characters %d-%d:"
            % (err.span.start_line, err.span.start_col, _end_col(err.span))
        )
    lines.append("%s %s" % (label, err.message))
    return "\n".join(lines) + "\n"


def _end_col(span):
    if span.end_line == span.start_line:
        return span.end_col
    return span.start_col


def _render_elimination(err: EliminationError, source, label) -> str:
    lines = []
    span = err.open_span
    if span is not None and source is not None:
        source_lines = source.splitlines()
        if 1 <= span.start_line <= len(source_lines):
            text = source_lines[span.start_line - 1]
            prefix = "%d | " % span.start_line
            end = span.end_col if span.end_line == span.start_line else len(text)
            lines.append(prefix + text)
            lines.append(
                " " * (len(prefix) + span.start_col) + "^" * max(end - span.start_col, 1)
            )
    first = err.victims[0] if err.victims else None
    offender = _render_ident(first.offender if first else err.hidden)
    lines.append(
        "%s The type %s introduced by this %s appears in the signature"
        % (label, offender, err.introducer)
    )
    for victim in err.victims:
        if victim.span is not None:
            lines.append(
                "       Line %d, characters %d-%d:"
                % (victim.span.start_line, victim.span.start_col, _end_col(victim.span))
            )
        what = ("The %s %s" % (victim.kind, victim.name)).rstrip()
        lines.append(
            "         %s has no valid type if %s is hidden"
            % (what, _render_ident(victim.offender))
        )
    return "\n".join(lines) + "\n"


def _render_ident(ident) -> str:
    if hasattr(ident, "stamp"):
        return "%s/%d" % (ident.name, ident.stamp)
    return str(ident)


# ---------------------------------------------------------------------------
# Elaborated structures.


def print_elaborated(typed: mod_typing.TypedProgram) -> str:
    hidden = set()
    _collect_hidden(typed.structure, hidden)
    lines = []
    for item in typed.structure:
        lines.extend(_elab_item_lines(item, "", hidden))
    return "".join(line + "\n" for line in lines)


def _collect_hidden(items, hidden) -> None:
    for item in items:
        if isinstance(item, mod_typing.EModuleBind):
            if item.hidden:
                hidden.add(item.ident.stamp)
            _collect_hidden_modexpr(item.modexpr, hidden)


def _collect_hidden_modexpr(me, hidden) -> None:
    if isinstance(me, mod_typing.EMStruct):
        _collect_hidden(me.items, hidden)
    elif isinstance(me, mod_typing.EMFunctor):
        _collect_hidden_modexpr(me.body, hidden)
    elif isinstance(me, mod_typing.EMApply):
        _collect_hidden_modexpr(me.func, hidden)
        _collect_hidden_modexpr(me.arg, hidden)
    elif isinstance(me, (mod_typing.EMCoerce, mod_typing.EMBindOpen)):
        _collect_hidden_modexpr(me.inner, hidden)


def _elab_item_lines(item, ind, hidden) -> list:
    if isinstance(item, mod_typing.ELet):
        return [ind + line for line in desugar._let_lines("let", item.rec, item.bindings, "")]
    if isinstance(item, mod_typing.EModuleBind):
        name = (
            "%s#%d" % (item.ident.name, item.ident.stamp)
            if item.hidden
            else item.ident.name
        )
        lines = _elab_modexpr_lines(item.modexpr, hidden)
        lines[0] = "module %s = %s" % (name, lines[0])
        return [ind + lines[0]] + [ind + line for line in lines[1:]]
    if isinstance(item, mod_typing.EOpen):
        return [ind + "open " + _elab_path(item.path, hidden)]
    if isinstance(item, mod_typing.EInclude):
        return [ind + "include " + _elab_path(item.path, hidden)]
    if isinstance(item, mod_typing.EExn):
        if item.item is not None:
            return [ind + desugar._exception_str(item.item)]
        return [ind + "exception " + item.name]
    if isinstance(item, mod_typing.EBare):
        return [ind + desugar._expr_str(item.expr, 0)]
    if isinstance(item, mod_typing.EStatic):
        return [ind + line for line in desugar._item_lines(item.item, "")]
    raise TypeError("cannot print %r" % (item,))


def _elab_modexpr_lines(me, hidden) -> list:
    if isinstance(me, mod_typing.EMPath):
        return [_elab_path(me.path, hidden)]
    if isinstance(me, mod_typing.EMStruct):
        lines = ["struct"]
        for item in me.items:
            lines.extend(_elab_item_lines(item, "  ", hidden))
        lines.append("end")
        return lines
    if isinstance(me, mod_typing.EMFunctor):
        body = _elab_modexpr_lines(me.body, hidden)
        body[0] = "functor (%s) -> %s" % (me.param, body[0])
        return body
    if isinstance(me, mod_typing.EMApply):
        func = _elab_modexpr_lines(me.func, hidden)
        arg = _elab_modexpr_lines(me.arg, hidden)
        if len(func) == 1 and len(arg) == 1:
            return ["%s(%s)" % (func[0], arg[0])]
        func[-1] += "("
        func.extend(arg)
        func[-1] += ")"
        return func
    if isinstance(me, mod_typing.EMCoerce):
        inner = _elab_modexpr_lines(me.inner, hidden)
        inner[0] = "(" + inner[0]
        inner[-1] += " : _)"
        return inner
    if isinstance(me, mod_typing.EMBindOpen):
        return _elab_modexpr_lines(me.inner, hidden)
    raise TypeError("cannot print %r" % (me,))


def _elab_path(path, hidden) -> str:
    if isinstance(path, PIdent):
        if path.ident.stamp in hidden:
            return "%s#%d" % (path.ident.name, path.ident.stamp)
        return path.ident.name
    if isinstance(path, PDot):
        return "%s.%s" % (_elab_path(path.prefix, hidden), path.name)
    return "%s(%s)" % (
        _elab_path(path.func, hidden),
        _elab_path(path.arg, hidden),
    )
