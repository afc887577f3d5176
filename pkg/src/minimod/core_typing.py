"""Hindley-Milner inference for core expressions.

Unification expands manifest type aliases before giving up, so `t'` and the
outer `t` unify when `type t' = t` is in scope. Generalization quantifies
exactly the variables not free in the environment; only syntactic values
generalize (`ref e` stays monomorphic).
"""
from __future__ import annotations

from types import SimpleNamespace

from .errors import (
    CheckError,
    ConstructorArity,
    OccursError,
    TypeArity,
    UnboundIdentifier,
    UnifyError,
)
from .semobj import (
    ConstrInfo,
    Env,
    MSig,
    PApply,
    PDot,
    PIdent,
    Path,
    Scheme,
    Session,
    SExn,
    SType,
    SVal,
    SModule,
    TArrow,
    TConstr,
    TTuple,
    TVar,
    TypeDecl,
    _project,
    _projection_subst,
    expand_manifest,
    expand_modtype,
    format_type,
    instantiate,
    item_namespace,
    resolve,
    strengthen,
    subst_module,
    subst_vars,
)
from .syntax import ast


class InferState:
    """Mutable state of one inference run: the substitution lives in the
    variables' link slots; this object only allocates fresh variables and
    performs unification."""

    def __init__(self, session: Session):
        self.session = session

    def fresh(self) -> TVar:
        return self.session.fresh_var()

    def unify(self, env: Env, expected, actual, span=None) -> None:
        a = resolve(expected)
        b = resolve(actual)
        if a is b:
            return
        if isinstance(a, TVar):
            self._bind(a, b, span)
            return
        if isinstance(b, TVar):
            self._bind(b, a, span)
            return
        if isinstance(a, TArrow) and isinstance(b, TArrow):
            self.unify(env, a.lhs, b.lhs, span)
            self.unify(env, a.rhs, b.rhs, span)
            return
        if isinstance(a, TTuple) and isinstance(b, TTuple):
            if len(a.items) == len(b.items):
                for x, y in zip(a.items, b.items):
                    self.unify(env, x, y, span)
                return
        if isinstance(a, TConstr) and isinstance(b, TConstr):
            if a.path == b.path and len(a.args) == len(b.args):
                for x, y in zip(a.args, b.args):
                    self.unify(env, x, y, span)
                return
        # expand manifest aliases before reporting a clash
        if isinstance(a, TConstr):
            expanded = expand_manifest(env, a)
            if expanded is not None:
                self.unify(env, expanded, b, span)
                return
        if isinstance(b, TConstr):
            expanded = expand_manifest(env, b)
            if expanded is not None:
                self.unify(env, a, expanded, span)
                return
        raise UnifyError(format_type(a), format_type(b), span)

    def _bind(self, var: TVar, t, span) -> None:
        if _occurs(var, t):
            raise OccursError(
                "The type variable %s occurs inside %s" % (format_type(var), format_type(t)),
                span,
            )
        var.link = t


def _occurs(var: TVar, t) -> bool:
    t = resolve(t)
    if isinstance(t, TVar):
        return t is var
    if isinstance(t, TArrow):
        return _occurs(var, t.lhs) or _occurs(var, t.rhs)
    if isinstance(t, TTuple):
        return any(_occurs(var, x) for x in t.items)
    if isinstance(t, TConstr):
        return any(_occurs(var, a) for a in t.args)
    return False


def free_type_vars(t, acc=None) -> set:
    if acc is None:
        acc = set()
    t = resolve(t)
    if isinstance(t, TVar):
        acc.add(t)
    elif isinstance(t, TArrow):
        free_type_vars(t.lhs, acc)
        free_type_vars(t.rhs, acc)
    elif isinstance(t, TTuple):
        for x in t.items:
            free_type_vars(x, acc)
    elif isinstance(t, TConstr):
        for a in t.args:
            free_type_vars(a, acc)
    return acc


def _env_free_vars(env: Env) -> set:
    acc = set()
    for _, scheme in env.values.values():
        body = free_type_vars(scheme.body)
        acc |= body - set(scheme.quantified)
    for _, mty in env.modules.values():
        _modtype_free_vars(mty, acc)
    return acc


def _modtype_free_vars(mty, acc) -> None:
    if isinstance(mty, MSig):
        for item in mty.items:
            if isinstance(item, SVal):
                acc |= free_type_vars(item.scheme.body) - set(item.scheme.quantified)
            elif isinstance(item, SModule):
                _modtype_free_vars(item.modtype, acc)


def generalize(state: InferState, env: Env, t) -> Scheme:
    """Quantify the variables of `t` that are not free in `env`."""
    fvs = free_type_vars(t) - _env_free_vars(env)
    quantified = sorted(fvs, key=lambda v: v.id)
    return Scheme(quantified, t)


def is_syntactic_value(e) -> bool:
    if isinstance(e, (ast.EInt, ast.EString, ast.EBool, ast.EUnit, ast.EFun, ast.EVar)):
        return True
    if isinstance(e, ast.EConstr):
        return e.arg is None or is_syntactic_value(e.arg)
    if isinstance(e, ast.ETuple):
        return all(is_syntactic_value(x) for x in e.items)
    return False


# ---------------------------------------------------------------------------
# Builtins.


def initial_env(session: Session) -> Env:
    env = Env(session)
    b = SimpleNamespace()
    for name in ("int", "string", "bool", "unit", "exn"):
        ident = session.fresh_ident(name)
        env = env.declare_type(ident, TypeDecl([]))
        setattr(b, name, TConstr(PIdent(ident), []))
    ref_param = session.fresh_var()
    ref_ident = session.fresh_ident("ref")
    env = env.declare_type(ref_ident, TypeDecl([ref_param]))
    b.ref_path = PIdent(ref_ident)

    def ref_of(t):
        return TConstr(b.ref_path, [t])

    def poly(builder):
        v = session.fresh_var()
        return Scheme([v], builder(v))

    arith = Scheme([], TArrow(b.int, TArrow(b.int, b.int)))
    compare = Scheme([], TArrow(b.int, TArrow(b.int, b.bool)))
    schemes = {
        "+": arith,
        "-": arith,
        "*": arith,
        "=": compare,
        "<": compare,
        "not": Scheme([], TArrow(b.bool, b.bool)),
        "ref": poly(lambda v: TArrow(v, ref_of(v))),
        "!": poly(lambda v: TArrow(ref_of(v), v)),
        ":=": poly(lambda v: TArrow(ref_of(v), TArrow(v, b.unit))),
        "incr": Scheme([], TArrow(ref_of(b.int), b.unit)),
        "decr": Scheme([], TArrow(ref_of(b.int), b.unit)),
        "print": Scheme([], TArrow(b.string, b.unit)),
        "string_of_int": Scheme([], TArrow(b.int, b.string)),
    }
    for name, scheme in schemes.items():
        env = env.declare_value(session.fresh_ident(name), scheme)
    for exc in ("AssertFailure", "MatchFailure"):
        env = env.declare_exception(session.fresh_ident(exc), [])
    session.builtins = b
    return env


def builtins(env: Env) -> SimpleNamespace:
    return env.session.builtins


# ---------------------------------------------------------------------------
# Resolving surface paths.


def resolve_module_pathsyn(env: Env, ps) -> tuple:
    """Resolve a surface module path to (semantic path, module type)."""
    from .semobj import find_modtype, match_modtype
    from .errors import FunctorArgMismatch, MatchError, NotAFunctor

    if isinstance(ps, ast.PsId):
        return env.lookup_module(ps.name, ps.span)
    if isinstance(ps, ast.PsDot):
        path, mty = resolve_module_pathsyn(env, ps.prefix)
        item = _project(env, path, mty, "modules", ps.name, ps.span)
        return PDot(path, ps.name), item.modtype
    fpath, fmty = resolve_module_pathsyn(env, ps.func)
    apath, amty = resolve_module_pathsyn(env, ps.arg)
    fmty = expand_modtype(env, fmty)
    from .semobj import MFunctor

    if not isinstance(fmty, MFunctor):
        raise NotAFunctor("The module %s is not a functor" % ps.func.name
                          if isinstance(ps.func, ast.PsId)
                          else "This module is not a functor", ps.span)
    try:
        match_modtype(env, strengthen(env, amty, apath), fmty.param_type)
    except MatchError as err:
        raise FunctorArgMismatch(
            "The functor argument %s %s" % (err.component, err.reason), ps.span
        ) from None
    return PApply(fpath, apath), subst_module(fmty.result, fmty.param, apath)


def resolve_type_pathsyn(env: Env, ps) -> tuple:
    if isinstance(ps, ast.PsId):
        return env.lookup_type(ps.name, ps.span)
    if isinstance(ps, ast.PsDot):
        path, mty = resolve_module_pathsyn(env, ps.prefix)
        item = _project(env, path, mty, "types", ps.name, ps.span)
        return PDot(path, ps.name), item.decl
    raise UnboundIdentifier("Not a type path", ps.span)


def resolve_value_pathsyn(env: Env, ps) -> tuple:
    if isinstance(ps, ast.PsId):
        return env.lookup_value(ps.name, ps.span)
    if isinstance(ps, ast.PsDot):
        path, mty = resolve_module_pathsyn(env, ps.prefix)
        item = _project(env, path, mty, "values", ps.name, ps.span)
        return PDot(path, ps.name), item.scheme
    raise UnboundIdentifier("Not a value path", ps.span)


def resolve_constructor_pathsyn(env: Env, ps) -> ConstrInfo:
    if isinstance(ps, ast.PsId):
        return env.lookup_constructor(ps.name, ps.span)
    if isinstance(ps, ast.PsDot):
        path, mty = resolve_module_pathsyn(env, ps.prefix)
        mty = expand_modtype(env, mty)
        if not isinstance(mty, MSig):
            raise UnboundIdentifier("Unbound constructor %s" % ps.name, ps.span)
        proj = _projection_subst(path, mty.items)
        found = None
        for item in mty.items:
            if isinstance(item, SExn) and item.ident.name == ps.name:
                args = [proj.core(a) for a in item.args]
                found = ConstrInfo(ps.name, [], args, None, is_exception=True)
            elif isinstance(item, SType) and item.decl.variant is not None:
                for cname, cargs in item.decl.variant:
                    if cname == ps.name:
                        args = [proj.core(a) for a in cargs]
                        result = TConstr(
                            PDot(path, item.ident.name), list(item.decl.params)
                        )
                        found = ConstrInfo(ps.name, item.decl.params, args, result)
        if found is None:
            raise UnboundIdentifier("Unbound constructor %s" % ps.name, ps.span)
        return found
    raise UnboundIdentifier("Not a constructor path", ps.span)


# ---------------------------------------------------------------------------
# Surface type expressions.


def transl_type(env: Env, tx, varmap: dict, allow_new: bool):
    """Translate a surface type expression; `varmap` maps variable names to
    TVars and grows when `allow_new` (val specs quantify implicitly)."""
    if isinstance(tx, ast.TxVar):
        if tx.name not in varmap:
            if not allow_new:
                raise UnboundIdentifier("Unbound type parameter '%s" % tx.name, tx.span)
            varmap[tx.name] = env.session.fresh_var()
        return varmap[tx.name]
    if isinstance(tx, ast.TxArrow):
        return TArrow(
            transl_type(env, tx.lhs, varmap, allow_new),
            transl_type(env, tx.rhs, varmap, allow_new),
        )
    if isinstance(tx, ast.TxTuple):
        return TTuple([transl_type(env, t, varmap, allow_new) for t in tx.items])
    path, decl = resolve_type_pathsyn(env, tx.path)
    args = [transl_type(env, t, varmap, allow_new) for t in tx.args]
    if len(args) != decl.arity:
        name = _path_syn_str(tx.path)
        if decl.arity > 0 and not args:
            raise TypeArity(
                "The type %s requires a type argument, but is used without one" % name,
                tx.span,
            )
        raise TypeArity(
            "The type %s expects %d type argument(s) but is applied to %d"
            % (name, decl.arity, len(args)),
            tx.span,
        )
    return TConstr(path, args)


def _path_syn_str(ps) -> str:
    if isinstance(ps, ast.PsId):
        return ps.name
    if isinstance(ps, ast.PsDot):
        return "%s.%s" % (_path_syn_str(ps.prefix), ps.name)
    return "%s(%s)" % (_path_syn_str(ps.func), _path_syn_str(ps.arg))


# ---------------------------------------------------------------------------
# Expression inference.


def infer_expr(env: Env, state: InferState, e) -> object:
    b = builtins(env)
    if isinstance(e, ast.EInt):
        return b.int
    if isinstance(e, ast.EString):
        return b.string
    if isinstance(e, ast.EBool):
        return b.bool
    if isinstance(e, ast.EUnit):
        return b.unit
    if isinstance(e, ast.EVar):
        _, scheme = resolve_value_pathsyn(env, e.path)
        return instantiate(state.session, scheme)
    if isinstance(e, ast.EConstr):
        return _infer_constr(env, state, e)
    if isinstance(e, ast.ETuple):
        return TTuple([infer_expr(env, state, x) for x in e.items])
    if isinstance(e, ast.EFun):
        param_t = state.fresh()
        env2 = check_pattern(env, state, e.param, param_t)
        body_t = infer_expr(env2, state, e.body)
        return TArrow(param_t, body_t)
    if isinstance(e, ast.EApply):
        f_t = infer_expr(env, state, e.func)
        a_t = infer_expr(env, state, e.arg)
        res = state.fresh()
        state.unify(env, f_t, TArrow(a_t, res), e.arg.span)
        return res
    if isinstance(e, ast.ELetIn):
        bindings = infer_bindings(env, state, e.rec, e.bindings)
        env2 = env
        for name, scheme, _ in bindings:
            env2 = env2.declare_value(env.session.fresh_ident(name), scheme)
        return infer_expr(env2, state, e.body)
    if isinstance(e, ast.EMatch):
        return _infer_match(env, state, e)
    if isinstance(e, ast.ETry):
        body_t = infer_expr(env, state, e.body)
        for case in e.cases:
            env2 = check_pattern(env, state, case.pattern, b.exn)
            state.unify(env, body_t, infer_expr(env2, state, case.body), case.body.span)
        return body_t
    if isinstance(e, ast.ERaise):
        state.unify(env, b.exn, infer_expr(env, state, e.arg), e.arg.span)
        return state.fresh()
    if isinstance(e, ast.EAssert):
        state.unify(env, b.bool, infer_expr(env, state, e.arg), e.arg.span)
        return b.unit
    if isinstance(e, ast.ESequence):
        state.unify(env, b.unit, infer_expr(env, state, e.first), e.first.span)
        return infer_expr(env, state, e.second)
    if isinstance(e, ast.EIf):
        state.unify(env, b.bool, infer_expr(env, state, e.cond), e.cond.span)
        then_t = infer_expr(env, state, e.then)
        if e.orelse is None:
            state.unify(env, b.unit, then_t, e.then.span)
            return b.unit
        state.unify(env, then_t, infer_expr(env, state, e.orelse), e.orelse.span)
        return then_t
    if isinstance(e, ast.ELetModuleIn):
        return _infer_let_module(env, state, e)
    if isinstance(e, ast.ELetExceptionIn):
        args = [transl_type(env, t, {}, allow_new=False) for t in e.args]
        ident = env.session.fresh_ident(e.name)
        env2 = env.declare_exception(ident, args)
        e.exn_args = len(args)
        return infer_expr(env2, state, e.body)
    if isinstance(e, ast.ELetOpenIn):
        return _infer_let_open(env, state, e)
    raise CheckError("Cannot type this expression", e.span)


def _infer_constr(env: Env, state: InferState, e):
    b = builtins(env)
    info = resolve_constructor_pathsyn(env, e.path)
    mapping = {v.id: state.fresh() for v in info.params}
    args = [subst_vars(a, mapping) for a in info.args]
    result = b.exn if info.is_exception else subst_vars(info.result, mapping)
    e.resolved_arity = len(args)
    e.is_exception = info.is_exception
    name = info.name
    if not args:
        if e.arg is not None:
            raise ConstructorArity(
                "The constructor %s expects no argument" % name, e.span
            )
        return result
    if e.arg is None:
        raise ConstructorArity(
            "The constructor %s expects %d argument(s)" % (name, len(args)), e.span
        )
    if len(args) == 1:
        state.unify(env, args[0], infer_expr(env, state, e.arg), e.arg.span)
        return result
    if not isinstance(e.arg, ast.ETuple) or len(e.arg.items) != len(args):
        raise ConstructorArity(
            "The constructor %s expects %d arguments" % (name, len(args)), e.span
        )
    for want, item in zip(args, e.arg.items):
        state.unify(env, want, infer_expr(env, state, item), item.span)
    return result


def _infer_match(env: Env, state: InferState, e):
    b = builtins(env)
    scrut_t = infer_expr(env, state, e.scrutinee)
    result = state.fresh()
    for case in e.cases:
        against = b.exn if case.is_exception else scrut_t
        env2 = check_pattern(env, state, case.pattern, against)
        state.unify(env, result, infer_expr(env2, state, case.body), case.body.span)
    return result


def _infer_let_module(env: Env, state: InferState, e):
    from . import mod_typing, nondep

    mty, elab = mod_typing.type_module_expr(env, e.modexpr)
    ident = env.session.fresh_ident(e.name)
    env2 = env.declare_module(ident, mty)
    e.elab_modexpr = elab
    body_t = infer_expr(env2, state, e.body)
    return nondep.eliminate_core(env2, ident, body_t, e.span)


def _infer_let_open(env: Env, state: InferState, e):
    from . import mod_typing, nondep

    env2, hidden, elab = mod_typing.open_for_expr(env, e.modexpr)
    e.elab_modexpr = elab
    body_t = infer_expr(env2, state, e.body)
    if hidden is not None:
        body_t = nondep.eliminate_core(env2, hidden, body_t, e.span)
    return body_t


def check_pattern(env: Env, state: InferState, pat, expected) -> Env:
    """Type a shallow pattern against `expected`, binding its variables."""
    b = builtins(env)
    if isinstance(pat, ast.PVar):
        bound = expected
        if pat.annot is not None:
            annotated = transl_type(env, pat.annot, {}, allow_new=True)
            state.unify(env, annotated, expected, pat.span)
            bound = annotated
        return env.declare_value(env.session.fresh_ident(pat.name), Scheme([], bound))
    if isinstance(pat, ast.PWild):
        return env
    if isinstance(pat, ast.PUnit):
        state.unify(env, b.unit, expected, pat.span)
        return env
    if isinstance(pat, ast.PLit):
        lit_t = (
            b.int
            if isinstance(pat.value, int) and not isinstance(pat.value, bool)
            else b.bool
            if isinstance(pat.value, bool)
            else b.string
        )
        state.unify(env, lit_t, expected, pat.span)
        return env
    info = resolve_constructor_pathsyn(env, pat.path)
    mapping = {v.id: state.fresh() for v in info.params}
    args = [subst_vars(a, mapping) for a in info.args]
    result = b.exn if info.is_exception else subst_vars(info.result, mapping)
    state.unify(env, result, expected, pat.span)
    pat.resolved_arity = len(args)
    if len(pat.args) != len(args):
        raise ConstructorArity(
            "The constructor %s expects %d argument(s) but the pattern binds %d"
            % (info.name, len(args), len(pat.args)),
            pat.span,
        )
    env2 = env
    for sub, t in zip(pat.args, args):
        env2 = check_pattern(env2, state, sub, t)
    return env2


def infer_bindings(env: Env, state: InferState, rec: bool, bindings) -> list:
    """Infer a `let` binding group; returns (name, scheme, name_span) triples.
    Groups bind simultaneously; recursive groups see monomorphic selves."""
    results = []
    if rec:
        env2 = env
        selves = []
        for binding in bindings:
            t = state.fresh()
            selves.append(t)
            env2 = env2.declare_value(
                env.session.fresh_ident(binding.name), Scheme([], t)
            )
        for binding, self_t in zip(bindings, selves):
            t = _infer_binding_body(env2, state, binding)
            state.unify(env, self_t, t, binding.name_span)
        for binding, self_t in zip(bindings, selves):
            scheme = _maybe_generalize(env, state, binding, self_t)
            results.append((binding.name, scheme, binding.name_span))
        return results
    for binding in bindings:
        t = _infer_binding_body(env, state, binding)
        scheme = _maybe_generalize(env, state, binding, t)
        results.append((binding.name, scheme, binding.name_span))
    return results


def _infer_binding_body(env: Env, state: InferState, binding):
    env2 = env
    param_ts = []
    for p in binding.params:
        t = state.fresh()
        env2 = check_pattern(env2, state, p, t)
        param_ts.append(t)
    t = infer_expr(env2, state, binding.body)
    for pt in reversed(param_ts):
        t = TArrow(pt, t)
    return t


def _maybe_generalize(env: Env, state: InferState, binding, t) -> Scheme:
    if binding.params or is_syntactic_value(binding.body):
        return generalize(state, env, t)
    return Scheme([], t)
