"""Big-step evaluator for elaborated programs.

Structures evaluate top to bottom; a hidden module binding evaluates its
module expression exactly once and the following open merges exactly the
statically exported names. Module expressions that only occur in type
contexts were never emitted by elaboration, so they cannot be evaluated.
Exception declarations are generative: each evaluation yields a fresh tag.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field

from . import mod_typing
from .semobj import PDot, PIdent
from .syntax import ast


class Value:
    pass


@dataclass
class VInt(Value):
    value: int


@dataclass
class VBool(Value):
    value: bool


@dataclass
class VString(Value):
    value: str


@dataclass
class VUnit(Value):
    pass


UNIT = VUnit()


@dataclass
class VClosure(Value):
    env: "RuntimeEnv"
    param: object  # pattern
    body: object  # expr


@dataclass
class VBuiltin(Value):
    name: str
    fn: object  # Run, Value -> Value


@dataclass
class VConstr(Value):
    name: str
    args: list


@dataclass
class VTuple(Value):
    items: list


@dataclass
class VRef(Value):
    cell: int


@dataclass
class VExnTag(Value):
    tag: int
    name: str


@dataclass
class VExn(Value):
    tag: VExnTag
    args: list


@dataclass
class VModule(Value):
    values: dict = field(default_factory=dict)
    exntags: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)


@dataclass
class VFunctor(Value):
    env: "RuntimeEnv"
    param: str
    body: object  # ElabModExpr


@dataclass
class RuntimeEnv:
    values: dict = field(default_factory=dict)
    exntags: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    hidden: dict = field(default_factory=dict)  # stamp -> VModule

    def child(self) -> "RuntimeEnv":
        return RuntimeEnv(
            dict(self.values), dict(self.exntags), dict(self.modules), dict(self.hidden)
        )


class MiniModRaise(Exception):
    """A MiniMod exception travelling through the evaluator."""

    def __init__(self, exn: VExn, span=None):
        super().__init__(exn.tag.name)
        self.exn = exn
        self.span = span


@dataclass
class UncaughtException:
    name: str
    payload: list
    span: object


class Run:
    """Owns the store, the tag generator and the effect counters of one
    evaluation."""

    def __init__(self, out=None):
        self.out = out if out is not None else sys.stdout
        self.store = {}
        self._cells = itertools.count(1)
        self._tags = itertools.count(1)
        self.print_count = 0
        self.assert_count = 0

    def new_cell(self, value) -> VRef:
        cell = next(self._cells)
        self.store[cell] = value
        return VRef(cell)

    def new_tag(self, name: str) -> VExnTag:
        return VExnTag(next(self._tags), name)


def initial_runtime_env(run: Run) -> RuntimeEnv:
    env = RuntimeEnv()

    def arith(fn):
        return lambda a: VBuiltin("partial", lambda b: VInt(fn(a.value, b.value)))

    def compare(fn):
        return lambda a: VBuiltin("partial", lambda b: VBool(fn(a.value, b.value)))

    def setref(a):
        def go(b):
            run.store[a.cell] = b
            return UNIT

        return VBuiltin("partial", go)

    def bump(delta):
        def go(a):
            run.store[a.cell] = VInt(run.store[a.cell].value + delta)
            return UNIT

        return go

    def do_print(a):
        run.out.write(a.value)
        run.print_count += 1
        return UNIT

    builtins = {
        "+": arith(lambda x, y: x + y),
        "-": arith(lambda x, y: x - y),
        "*": arith(lambda x, y: x * y),
        "=": compare(lambda x, y: x == y),
        "<": compare(lambda x, y: x < y),
        "not": lambda a: VBool(not a.value),
        "ref": run.new_cell,
        "!": lambda a: run.store[a.cell],
        ":=": setref,
        "incr": bump(1),
        "decr": bump(-1),
        "print": do_print,
        "string_of_int": lambda a: VString(str(a.value)),
    }
    for name, fn in builtins.items():
        env.values[name] = VBuiltin(name, fn)
    for name in ("AssertFailure", "MatchFailure"):
        env.exntags[name] = run.new_tag(name)
    return env


def eval_program(elab: list, out=None, run: Run = None):
    """Evaluate an elaborated structure; returns (RuntimeEnv, uncaught)
    where `uncaught` is None or an UncaughtException."""
    if run is None:
        run = Run(out)
    env = initial_runtime_env(run)
    try:
        env = eval_items(run, env, elab)
    except MiniModRaise as exc:
        return env, UncaughtException(exc.exn.tag.name, exc.exn.args, exc.span)
    return env, None


def eval_items(run: Run, env: RuntimeEnv, items: list) -> RuntimeEnv:
    for item in items:
        env = eval_item(run, env, item)
    return env


def eval_item(run: Run, env: RuntimeEnv, item) -> RuntimeEnv:
    """Evaluate one item against a fresh child scope, so closures capture
    the environment as it was at their definition."""
    if isinstance(item, mod_typing.ELet):
        return _eval_let(run, env, item.rec, item.bindings)
    if isinstance(item, mod_typing.EModuleBind):
        value = eval_modexpr(run, env, item.modexpr)
        env = env.child()
        if item.hidden:
            env.hidden[item.ident.stamp] = value
        else:
            env.modules[item.ident.name] = value
        return env
    if isinstance(item, (mod_typing.EOpen, mod_typing.EInclude)):
        module = _resolve_module(run, env, item.path)
        env = env.child()
        for namespace, name in item.names:
            if namespace == "values":
                env.values[name] = module.values[name]
            elif namespace == "exceptions":
                env.exntags[name] = module.exntags[name]
            elif namespace == "modules":
                env.modules[name] = module.modules[name]
        return env
    if isinstance(item, mod_typing.EExn):
        env = env.child()
        env.exntags[item.name] = run.new_tag(item.name)
        return env
    if isinstance(item, mod_typing.EBare):
        eval_expr(run, env, item.expr)
        return env
    if isinstance(item, mod_typing.EStatic):
        return env
    raise TypeError("cannot evaluate %r" % (item,))


def _eval_let(run: Run, env: RuntimeEnv, rec: bool, bindings) -> RuntimeEnv:
    out = env.child()
    if not rec:
        # bodies see the outer environment, not their siblings
        for b in bindings:
            out.values[b.name] = _eval_binding(run, env, b)
        return out
    # recursive bindings are functions; their closures share `out`, which is
    # mutated in place so mutual recursion resolves
    for b in bindings:
        out.values[b.name] = UNIT
    for b in bindings:
        out.values[b.name] = _eval_binding(run, out, b)
    return out


def _eval_binding(run: Run, env: RuntimeEnv, binding) -> Value:
    if binding.params:
        body = binding.body
        for p in reversed(binding.params[1:]):
            body = ast.EFun(p, body, binding.body.span)
        return VClosure(env, binding.params[0], body)
    return eval_expr(run, env, binding.body)


def _resolve_module(run: Run, env: RuntimeEnv, path) -> VModule:
    if isinstance(path, PIdent):
        if path.ident.stamp in env.hidden:
            return env.hidden[path.ident.stamp]
        return env.modules[path.ident.name]
    if isinstance(path, PDot):
        return _resolve_module(run, env, path.prefix).modules[path.name]
    functor = _resolve_module(run, env, path.func)
    arg = _resolve_module(run, env, path.arg)
    return _apply_functor(run, functor, arg)


def _apply_functor(run: Run, functor: VFunctor, arg: Value) -> Value:
    env = functor.env.child()
    env.modules[functor.param] = arg
    return eval_modexpr(run, env, functor.body)


def eval_modexpr(run: Run, env: RuntimeEnv, me) -> Value:
    if isinstance(me, mod_typing.EMPath):
        return _resolve_module(run, env, me.path)
    if isinstance(me, mod_typing.EMStruct):
        inner = eval_items(run, env.child(), me.items)
        module = VModule()
        for namespace, name in me.fields:
            if namespace == "values":
                module.values[name] = inner.values[name]
            elif namespace == "exceptions":
                module.exntags[name] = inner.exntags[name]
            elif namespace == "modules":
                module.modules[name] = inner.modules[name]
        return module
    if isinstance(me, mod_typing.EMFunctor):
        return VFunctor(env, me.param, me.body)
    if isinstance(me, mod_typing.EMApply):
        functor = eval_modexpr(run, env, me.func)
        arg = eval_modexpr(run, env, me.arg)
        return _apply_functor(run, functor, arg)
    if isinstance(me, mod_typing.EMCoerce):
        return _coerce(eval_modexpr(run, env, me.inner), me.spec)
    if isinstance(me, mod_typing.EMBindOpen):
        value = eval_modexpr(run, env, me.inner)
        env.hidden[me.ident.stamp] = value
        return value
    raise TypeError("cannot evaluate %r" % (me,))


def _coerce(value: Value, spec) -> Value:
    if spec is None or not isinstance(value, VModule):
        return value
    out = VModule()
    for name in spec.values:
        out.values[name] = value.values[name]
    for name in spec.exceptions:
        out.exntags[name] = value.exntags[name]
    for name, sub in spec.modules.items():
        out.modules[name] = _coerce(value.modules[name], sub)
    return out


# ---------------------------------------------------------------------------
# Expressions.


def eval_expr(run: Run, env: RuntimeEnv, e) -> Value:
    if isinstance(e, ast.EInt):
        return VInt(e.value)
    if isinstance(e, ast.EString):
        return VString(e.value)
    if isinstance(e, ast.EBool):
        return VBool(e.value)
    if isinstance(e, ast.EUnit):
        return UNIT
    if isinstance(e, ast.EVar):
        return _resolve_value(run, env, e.path)
    if isinstance(e, ast.EConstr):
        return _eval_constr(run, env, e)
    if isinstance(e, ast.ETuple):
        return VTuple([eval_expr(run, env, x) for x in e.items])
    if isinstance(e, ast.EFun):
        return VClosure(env, e.param, e.body)
    if isinstance(e, ast.EApply):
        f = eval_expr(run, env, e.func)
        arg = eval_expr(run, env, e.arg)
        return apply_value(run, f, arg, e.span)
    if isinstance(e, ast.ELetIn):
        inner = env.child()
        return eval_expr(run, _eval_let(run, inner, e.rec, e.bindings), e.body)
    if isinstance(e, ast.EMatch):
        return _eval_match(run, env, e)
    if isinstance(e, ast.ETry):
        try:
            return eval_expr(run, env, e.body)
        except MiniModRaise as exc:
            for case in e.cases:
                bound = _match_exn(run, env, case.pattern, exc.exn)
                if bound is not None:
                    return eval_expr(run, bound, case.body)
            raise
    if isinstance(e, ast.ERaise):
        value = eval_expr(run, env, e.arg)
        raise MiniModRaise(value, e.span)
    if isinstance(e, ast.EAssert):
        run.assert_count += 1
        cond = eval_expr(run, env, e.arg)
        if not cond.value:
            raise MiniModRaise(VExn(env.exntags["AssertFailure"], []), e.span)
        return UNIT
    if isinstance(e, ast.ESequence):
        eval_expr(run, env, e.first)
        return eval_expr(run, env, e.second)
    if isinstance(e, ast.EIf):
        cond = eval_expr(run, env, e.cond)
        if cond.value:
            return eval_expr(run, env, e.then)
        if e.orelse is None:
            return UNIT
        return eval_expr(run, env, e.orelse)
    if isinstance(e, ast.ELetModuleIn):
        inner = env.child()
        inner.modules[e.name] = eval_modexpr(run, env, e.elab_modexpr)
        return eval_expr(run, inner, e.body)
    if isinstance(e, ast.ELetExceptionIn):
        inner = env.child()
        inner.exntags[e.name] = run.new_tag(e.name)
        return eval_expr(run, inner, e.body)
    if isinstance(e, ast.ELetOpenIn):
        elab, names = e.elab_modexpr
        inner = env.child()
        module = eval_modexpr(run, inner, elab)
        if isinstance(module, VModule):
            for namespace, name in names:
                if namespace == "values":
                    inner.values[name] = module.values[name]
                elif namespace == "exceptions":
                    inner.exntags[name] = module.exntags[name]
                elif namespace == "modules":
                    inner.modules[name] = module.modules[name]
        return eval_expr(run, inner, e.body)
    raise TypeError("cannot evaluate %r" % (e,))


def apply_value(run: Run, f: Value, arg: Value, span=None) -> Value:
    if isinstance(f, VBuiltin):
        return f.fn(arg)
    if isinstance(f, VClosure):
        env = f.env.child()
        _bind_pattern(run, env, f.param, arg, span)
        return eval_expr(run, env, f.body)
    raise TypeError("applying a non-function value %r" % (f,))


def _bind_pattern(run: Run, env: RuntimeEnv, pat, value: Value, span=None) -> None:
    bound = _try_match(run, env, pat, value)
    if bound is None:
        raise MiniModRaise(VExn(env.exntags["MatchFailure"], []), span)
    # _try_match mutated a child env copy; merge its bindings
    env.values.update(bound.values)


def _eval_constr(run: Run, env: RuntimeEnv, e) -> Value:
    arity = getattr(e, "resolved_arity", None)
    args = []
    if e.arg is not None:
        if arity is not None and arity > 1 and isinstance(e.arg, ast.ETuple):
            args = [eval_expr(run, env, x) for x in e.arg.items]
        else:
            args = [eval_expr(run, env, e.arg)]
    if getattr(e, "is_exception", False):
        tag = _resolve_exntag(run, env, e.path)
        return VExn(tag, args)
    return VConstr(_constr_name(e.path), args)


def _constr_name(path) -> str:
    return path.name if isinstance(path, (ast.PsId, ast.PsDot)) else "?"


def _resolve_value(run: Run, env: RuntimeEnv, path) -> Value:
    if isinstance(path, ast.PsId):
        return env.values[path.name]
    module = _resolve_module_syn(run, env, path.prefix)
    return module.values[path.name]


def _resolve_exntag(run: Run, env: RuntimeEnv, path) -> VExnTag:
    if isinstance(path, ast.PsId):
        return env.exntags[path.name]
    module = _resolve_module_syn(run, env, path.prefix)
    return module.exntags[path.name]


def _resolve_module_syn(run: Run, env: RuntimeEnv, path) -> VModule:
    if isinstance(path, ast.PsId):
        return env.modules[path.name]
    if isinstance(path, ast.PsDot):
        return _resolve_module_syn(run, env, path.prefix).modules[path.name]
    functor = _resolve_module_syn(run, env, path.func)
    arg = _resolve_module_syn(run, env, path.arg)
    return _apply_functor(run, functor, arg)


def _eval_match(run: Run, env: RuntimeEnv, e) -> Value:
    value_cases = [c for c in e.cases if not c.is_exception]
    exn_cases = [c for c in e.cases if c.is_exception]
    try:
        scrutinee = eval_expr(run, env, e.scrutinee)
    except MiniModRaise as exc:
        for case in exn_cases:
            bound = _match_exn(run, env, case.pattern, exc.exn)
            if bound is not None:
                return eval_expr(run, bound, case.body)
        raise
    for case in value_cases:
        bound = _try_match(run, env, case.pattern, scrutinee)
        if bound is not None:
            return eval_expr(run, bound, case.body)
    raise MiniModRaise(VExn(env.exntags["MatchFailure"], []), e.span)


def _match_exn(run: Run, env: RuntimeEnv, pat, exn: VExn):
    """Match an exception value against a pattern; exception constructor
    patterns compare tags (generative), variables bind the whole packet."""
    if isinstance(pat, ast.PConstr):
        tag = _resolve_exntag(run, env, pat.path)
        if tag.tag != exn.tag.tag:
            return None
        return _bind_args(run, env, pat.args, exn.args)
    return _try_match(run, env, pat, exn)


def _try_match(run: Run, env: RuntimeEnv, pat, value: Value):
    if isinstance(pat, ast.PVar):
        out = env.child()
        out.values[pat.name] = value
        return out
    if isinstance(pat, ast.PWild):
        return env
    if isinstance(pat, ast.PUnit):
        return env
    if isinstance(pat, ast.PLit):
        if isinstance(value, (VInt, VBool, VString)) and value.value == pat.value:
            return env
        return None
    if isinstance(pat, ast.PConstr):
        if isinstance(value, VExn):
            return _match_exn(run, env, pat, value)
        if not isinstance(value, VConstr):
            return None
        if value.name != _constr_name(pat.path):
            return None
        return _bind_args(run, env, pat.args, value.args)
    raise TypeError("cannot match %r" % (pat,))


def _bind_args(run: Run, env: RuntimeEnv, pats, values):
    if len(pats) != len(values):
        return None
    out = env
    for pat, value in zip(pats, values):
        out = _try_match(run, out, pat, value)
        if out is None:
            return None
    return out
