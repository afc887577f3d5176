"""Type checking and elaboration of module expressions, structures and
signatures.

An extended `open modexp` elaborates to a hidden module binding plus a path
open (`module M#1 = modexp; open M#1`); once the remaining items are typed,
the hidden identifier is eliminated from their signature and the binding
never appears in the exported module type. Signatures run the same checks
but emit no elaborated artifact, so module expressions in type contexts are
never evaluated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import desugar, nondep
from .core_typing import (
    InferState,
    infer_bindings,
    infer_expr,
    initial_env,
    resolve_module_pathsyn,
    transl_type,
)
from .errors import (
    CannotOpenFunctor,
    CheckError,
    FunctorArgMismatch,
    MatchError,
    NotAFunctor,
    RecursiveTypeAlias,
    TypeArity,
    UnboundTypeInWith,
    WithOnNonAbstract,
)
from .semobj import (
    ConstrInfo,
    Env,
    Ident,
    MFunctor,
    MNamed,
    MSig,
    ModType,
    PDot,
    PIdent,
    Path,
    PathSubst,
    Scheme,
    Session,
    SExn,
    SModType,
    SModule,
    SType,
    SVal,
    TConstr,
    TypeDecl,
    _projection_subst,
    expand_manifest,
    expand_modtype,
    item_namespace,
    match_modtype,
    resolve,
    strengthen,
    subst_module,
    subst_vars,
)
from .syntax import ast
from .syntax.parser import parse_program


# ---------------------------------------------------------------------------
# Elaborated form.


@dataclass
class ELet:
    rec: bool
    bindings: list  # list[ast.LetBinding]


@dataclass
class EModuleBind:
    ident: Ident
    modexpr: "ElabModExpr"
    hidden: bool = False


@dataclass
class EOpen:
    path: Path
    names: list  # list[(namespace, name)]


@dataclass
class EInclude:
    path: Path
    names: list  # re-export list


@dataclass
class EExn:
    name: str
    arity: int
    item: object = None  # surface SiException, for printing


@dataclass
class EBare:
    expr: object


@dataclass
class EStatic:
    """A type or module type definition: printed by `elaborate`, inert at
    run time."""

    item: object


class ElabModExpr:
    pass


@dataclass
class EMPath(ElabModExpr):
    path: Path


@dataclass
class EMStruct(ElabModExpr):
    items: list
    fields: list = field(default_factory=list)  # exported (namespace, name)


@dataclass
class EMFunctor(ElabModExpr):
    param: str
    body: ElabModExpr


@dataclass
class EMApply(ElabModExpr):
    func: ElabModExpr
    arg: ElabModExpr


@dataclass
class CoercionSpec:
    values: set = field(default_factory=set)
    exceptions: set = field(default_factory=set)
    modules: dict = field(default_factory=dict)  # name -> CoercionSpec|None


@dataclass
class EMCoerce(ElabModExpr):
    inner: ElabModExpr
    spec: Optional[CoercionSpec]


@dataclass
class TypedProgram:
    structure: list  # elaborated items
    signature: list  # exported SigItems
    session: Session
    root_env: Env
    diagnostics: list = field(default_factory=list)


def coercion_spec(env: Env, mty: ModType) -> Optional[CoercionSpec]:
    mty = expand_modtype(env, mty)
    if not isinstance(mty, MSig):
        return None
    spec = CoercionSpec()
    for item in mty.items:
        if isinstance(item, SVal):
            spec.values.add(item.ident.name)
        elif isinstance(item, SExn):
            spec.exceptions.add(item.ident.name)
        elif isinstance(item, SModule):
            spec.modules[item.ident.name] = coercion_spec(env, item.modtype)
    return spec


# ---------------------------------------------------------------------------
# Opening components into an environment.


RUNTIME_NAMESPACES = ("values", "exceptions", "modules")


def open_components(env: Env, root: Path, items: list):
    """Bind every component of `items` in env, referred to through `root`.
    Returns the extended env and the bound (namespace, name) list."""
    proj = _projection_subst(root, items)
    names = []
    for item in items:
        it = proj.item(item)
        name = it.ident.name
        path = PDot(root, name)
        if isinstance(it, SVal):
            env = env.bind_value(name, path, it.scheme)
        elif isinstance(it, SType):
            env = env.bind_type(name, path, it.decl)
            if it.decl.variant is not None:
                for cname, cargs in it.decl.variant:
                    info = ConstrInfo(
                        cname,
                        it.decl.params,
                        cargs,
                        TConstr(path, list(it.decl.params)),
                    )
                    env = env.bind_constructor(cname, info)
        elif isinstance(it, SModule):
            env = env.bind_module(name, path, it.modtype)
        elif isinstance(it, SModType):
            env = env.bind_modtype(name, path, it.modtype)
        elif isinstance(it, SExn):
            env = env.bind_exception(name, path, it.args)
        names.append((item_namespace(it), name))
    return env, names


def bind_sig_item(env: Env, item) -> Env:
    """Declare an already-built signature item under its own ident."""
    if isinstance(item, SVal):
        return env.declare_value(item.ident, item.scheme)
    if isinstance(item, SType):
        env = env.declare_type(item.ident, item.decl)
        if item.decl.variant is not None:
            for cname, cargs in item.decl.variant:
                info = ConstrInfo(
                    cname,
                    item.decl.params,
                    cargs,
                    TConstr(PIdent(item.ident), list(item.decl.params)),
                )
                env = env.bind_constructor(cname, info)
        return env
    if isinstance(item, SModule):
        return env.declare_module(item.ident, item.modtype)
    if isinstance(item, SModType):
        return env.declare_modtype(item.ident, item.modtype)
    return env.declare_exception(item.ident, item.args)


def freshen_signature_items(session: Session, items: list):
    """Copies of `items` under fresh idents (same names), with internal
    references rewritten; used by `include` to re-export components."""
    mapping = {}
    fresh = {}
    for item in items:
        ni = session.fresh_ident(item.ident.name)
        fresh[item.ident.stamp] = ni
        mapping[item.ident.stamp] = PIdent(ni)
    subst = PathSubst(mapping)
    out = []
    for item in items:
        ni = fresh[item.ident.stamp]
        it = subst.item(item)
        it.ident = ni
        out.append(it)
    return out


# ---------------------------------------------------------------------------
# Module type translation.


def transl_modtype(env: Env, mtx) -> ModType:
    if isinstance(mtx, ast.MtName):
        path, _ = _resolve_modtype_pathsyn(env, mtx.path)
        return MNamed(path)
    if isinstance(mtx, ast.MtSig):
        return MSig(type_signature(env, mtx.items))
    if isinstance(mtx, ast.MtFunctor):
        param_type = transl_modtype(env, mtx.param_type)
        ident = env.session.fresh_ident(mtx.param)
        env2 = env.declare_module(ident, param_type)
        return MFunctor(ident, param_type, transl_modtype(env2, mtx.result))
    if isinstance(mtx, ast.MtWith):
        base = transl_modtype(env, mtx.base)
        return _apply_with(env, base, mtx)
    raise CheckError("Cannot interpret this module type", mtx.span)


def _resolve_modtype_pathsyn(env: Env, ps):
    from .core_typing import resolve_module_pathsyn
    from .semobj import _project

    if isinstance(ps, ast.PsId):
        return env.lookup_modtype(ps.name, ps.span)
    path, mty = resolve_module_pathsyn(env, ps.prefix)
    item = _project(env, path, mty, "modtypes", ps.name, ps.span)
    return PDot(path, ps.name), item.modtype


def _apply_with(env: Env, base: ModType, mtx: ast.MtWith) -> ModType:
    sig = expand_modtype(env, base)
    if not isinstance(sig, MSig):
        raise WithOnNonAbstract("Cannot constrain a functor type", mtx.span)
    index = None
    for i, item in enumerate(sig.items):
        if isinstance(item, SType) and item.ident.name == mtx.name:
            index = i
    if index is None:
        raise UnboundTypeInWith(
            "The signature has no type named %s" % mtx.name, mtx.span
        )
    old = sig.items[index]
    params = [env.session.fresh_var() for _ in mtx.params]
    varmap = dict(zip(mtx.params, params))
    rhs = transl_type(env, mtx.rhs, varmap, allow_new=False)
    if len(params) != old.decl.arity:
        raise TypeArity(
            "The constraint on %s has arity %d but %d was expected"
            % (mtx.name, len(params), old.decl.arity),
            mtx.span,
        )
    items = list(sig.items)
    if mtx.mode == "equal":
        if old.decl.manifest is not None or old.decl.variant is not None:
            raise WithOnNonAbstract(
                "The type %s is not abstract and cannot be constrained with ="
                % mtx.name,
                mtx.span,
            )
        new_ident = env.session.fresh_ident(mtx.name)
        new_decl = TypeDecl(params, rhs)
        env.type_store[new_ident.stamp] = new_decl
        subst = PathSubst({old.ident.stamp: PIdent(new_ident)})
        items = [subst.item(it) for it in items]
        items[index] = SType(new_ident, new_decl, old.span)
        return MSig(items)
    # destructive substitution: remove the component, replace its uses
    del items[index]
    expander = _ExpandIdent(old.ident, params, rhs)
    return MSig([expander.item(it) for it in items])


class _ExpandIdent(PathSubst):
    """Substitution that replaces `TConstr(ident, args)` by a manifest body;
    used by `with type t := e` and signature-local `type t := e`."""

    def __init__(self, ident: Ident, params, body):
        super().__init__({})
        self.ident = ident
        self.params = params
        self.body = body

    def core(self, t):
        t = resolve(t)
        if isinstance(t, TConstr) and t.path == PIdent(self.ident):
            args = [self.core(a) for a in t.args]
            return subst_vars(self.body, {p.id: a for p, a in zip(self.params, args)})
        return super().core(t)


# ---------------------------------------------------------------------------
# Signatures.


def type_signature(env: Env, items: list) -> list:
    """Type a signature body; module expressions opened here are checked but
    never evaluated (no elaborated artifact is produced)."""
    return _type_sig_items(env, list(items))


def _type_sig_items(env: Env, items: list) -> list:
    if not items:
        return []
    head, rest = items[0], items[1:]
    env2, exported, hidden, expander = _type_sig_one(env, head)
    out = _type_sig_items(env2, rest)
    if expander is not None:
        out = [expander.item(i) for i in out]
    if hidden is not None:
        out = nondep.nondep_signature(env2, hidden, out, head.span, "open")
    return exported + out


def _type_sig_one(env: Env, item):
    session = env.session
    if isinstance(item, ast.SgVal):
        varmap = {}
        body = transl_type(env, item.annot, varmap, allow_new=True)
        scheme = Scheme(sorted(varmap.values(), key=lambda v: v.id), body)
        ident = session.fresh_ident(item.name)
        env2 = env.declare_value(ident, scheme)
        return env2, [SVal(ident, scheme, item.name_span)], None, None
    if isinstance(item, ast.SgType):
        env2, sig_items = bind_typedefs(env, item.nonrec, item.defs)
        return env2, sig_items, None, None
    if isinstance(item, ast.SgTypeSubst):
        params = [session.fresh_var() for _ in item.params]
        varmap = dict(zip(item.params, params))
        rhs = transl_type(env, item.rhs, varmap, allow_new=False)
        ident = session.fresh_ident(item.name)
        env2 = env.declare_type(ident, TypeDecl(params, rhs))
        return env2, [], None, _ExpandIdent(ident, params, rhs)
    if isinstance(item, ast.SgModule):
        mty = transl_modtype(env, item.annot)
        ident = session.fresh_ident(item.name)
        env2 = env.declare_module(ident, mty)
        return env2, [SModule(ident, mty, item.name_span)], None, None
    if isinstance(item, ast.SgModType):
        body = transl_modtype(env, item.body) if item.body is not None else None
        ident = session.fresh_ident(item.name)
        env2 = env.declare_modtype(ident, body)
        return env2, [SModType(ident, body, item.name_span)], None, None
    if isinstance(item, ast.SgException):
        args = [transl_type(env, t, {}, allow_new=False) for t in item.args]
        ident = session.fresh_ident(item.name)
        env2 = env.declare_exception(ident, args)
        return env2, [SExn(ident, args, item.name_span)], None, None
    if isinstance(item, ast.SgOpen):
        if isinstance(item.modexpr, ast.MePath):
            path, mty = resolve_module_pathsyn(env, item.modexpr.path)
            sig = expand_modtype(env, mty)
            if not isinstance(sig, MSig):
                raise CannotOpenFunctor(
                    "This module is a functor; functors export no bindings",
                    item.span,
                )
            env2, _ = open_components(env, path, sig.items)
            return env2, [], None, None
        hidden, sig_items, env2, _ = type_open(env, item.modexpr)
        return env2, [], hidden, None
    if isinstance(item, ast.SgInclude):
        mty = transl_modtype(env, item.annot)
        sig = expand_modtype(env, mty)
        if not isinstance(sig, MSig):
            raise CannotOpenFunctor("Cannot include a functor type", item.span)
        fresh_items = freshen_signature_items(session, sig.items)
        env2 = env
        for it in fresh_items:
            env2 = bind_sig_item(env2, it)
        return env2, fresh_items, None, None
    if isinstance(item, ast.SgLocal):
        inner = MSig(type_signature(env, item.first))
        hidden = session.fresh_ident("M")
        strengthened = strengthen(env, inner, PIdent(hidden))
        env.register_module(hidden, strengthened)
        env2, _ = open_components(env, PIdent(hidden), strengthened.items)
        body = _type_sig_items(env2, list(item.second))
        body = nondep.nondep_signature(env2, hidden, body, item.span, "open")
        env3 = env
        for it in body:
            env3 = bind_sig_item(env3, it)
        return env3, body, None, None
    raise CheckError("Cannot interpret this signature item", item.span)


# ---------------------------------------------------------------------------
# Type declarations (shared between structures and signatures).


def bind_typedefs(env: Env, nonrec: bool, defs: list):
    session = env.session
    seen = set()
    for d in defs:
        if d.name in seen:
            raise CheckError(
                "Multiple definition of the type name %s" % d.name, d.name_span
            )
        seen.add(d.name)
    idents = [session.fresh_ident(d.name) for d in defs]
    param_vars = [[session.fresh_var() for _ in d.params] for d in defs]
    decls = [TypeDecl(pv) for pv in param_vars]

    if nonrec:
        rhs_env = env
        env2 = env
        for ident, decl in zip(idents, decls):
            env2 = env2.declare_type(ident, decl)
    else:
        env2 = env
        for ident, decl in zip(idents, decls):
            env2 = env2.declare_type(ident, decl)
        rhs_env = env2

    for d, decl, pv in zip(defs, decls, param_vars):
        varmap = dict(zip(d.params, pv))
        if d.manifest is not None:
            decl.manifest = transl_type(rhs_env, d.manifest, varmap, allow_new=False)
        if d.variant is not None:
            ctors = []
            names = set()
            for cname, cargs in d.variant:
                if cname in names:
                    raise CheckError(
                        "Two constructors are named %s" % cname, d.name_span
                    )
                names.add(cname)
                ctors.append(
                    (
                        cname,
                        [
                            transl_type(rhs_env, a, varmap, allow_new=False)
                            for a in cargs
                        ],
                    )
                )
            decl.variant = ctors

    for ident, decl in zip(idents, decls):
        _check_alias_cycle(env2, ident, decl)
    for ident, decl in zip(idents, decls):
        if decl.variant is not None:
            for cname, cargs in decl.variant:
                info = ConstrInfo(
                    cname, decl.params, cargs, TConstr(PIdent(ident), list(decl.params))
                )
                env2 = env2.bind_constructor(cname, info)
    sig_items = [
        SType(ident, decl, d.name_span) for ident, decl, d in zip(idents, decls, defs)
    ]
    return env2, sig_items


def _check_alias_cycle(env: Env, ident: Ident, decl: TypeDecl):
    t = TConstr(PIdent(ident), list(decl.params))
    seen = {PIdent(ident)}
    for _ in range(200):
        expanded = expand_manifest(env, t) if isinstance(t, TConstr) else None
        if expanded is None:
            return
        t = resolve(expanded)
        if not isinstance(t, TConstr):
            return
        if t.path in seen:
            raise RecursiveTypeAlias(
                "The type abbreviation %s is cyclic" % ident.name
            )
        seen.add(t.path)
    raise RecursiveTypeAlias("The type abbreviation %s is cyclic" % ident.name)


# ---------------------------------------------------------------------------
# Module expressions.


def type_module_expr(env: Env, me) -> tuple:
    """Type a module expression, returning its module type and elaborated
    form. Path references are strengthened at their path."""
    if isinstance(me, ast.MePath):
        path, mty = resolve_module_pathsyn(env, me.path)
        return strengthen(env, mty, path), EMPath(path)
    if isinstance(me, ast.MeStruct):
        sig_items, elab = type_structure(env, me.items)
        fields = [
            (item_namespace(it), it.ident.name)
            for it in sig_items
            if item_namespace(it) in RUNTIME_NAMESPACES
        ]
        return MSig(sig_items), EMStruct(elab, fields)
    if isinstance(me, ast.MeFunctor):
        param_type = transl_modtype(env, me.param_type)
        ident = env.session.fresh_ident(me.param)
        env2 = env.declare_module(ident, param_type)
        body_mty, body_elab = type_module_expr(env2, me.body)
        return MFunctor(ident, param_type, body_mty), EMFunctor(me.param, body_elab)
    if isinstance(me, ast.MeApply):
        return _type_apply(env, me)
    if isinstance(me, ast.MeAscribe):
        inner_mty, inner_elab = type_module_expr(env, me.inner)
        annot = transl_modtype(env, me.annot)
        match_modtype(env, inner_mty, annot)
        return annot, EMCoerce(inner_elab, coercion_spec(env, annot))
    raise CheckError("Cannot type this module expression", me.span)


def _type_apply(env: Env, me: ast.MeApply) -> tuple:
    fmty, felab = type_module_expr(env, me.func)
    amty, aelab = type_module_expr(env, me.arg)
    functor = expand_modtype(env, fmty)
    if not isinstance(functor, MFunctor):
        raise NotAFunctor("This module is not a functor; it cannot be applied", me.span)
    try:
        match_modtype(env, amty, functor.param_type)
    except MatchError as err:
        raise FunctorArgMismatch(
            "The functor argument %s %s" % (err.component, err.reason), me.arg.span
        ) from None
    elab = EMApply(felab, aelab)
    if isinstance(aelab, EMPath):
        return subst_module(functor.result, functor.param, aelab.path), elab
    hidden = env.session.fresh_ident(functor.param.name)
    env.register_module(hidden, amty)
    result = subst_module(functor.result, functor.param, PIdent(hidden))
    result = expand_modtype(env, result)
    if isinstance(result, MSig):
        items = nondep.nondep_signature(
            env, hidden, result.items, me.span, "functor application"
        )
        return MSig(items), elab
    if nondep.mentions(hidden, result):
        from .errors import EliminationError, Victim

        raise EliminationError(
            hidden,
            me.span,
            [Victim("module", "(functor result)", me.span, hidden)],
            "functor application",
        )
    return result, elab


def type_open(env: Env, me) -> tuple:
    """Type the argument of an extended open: returns the fresh hidden
    ident, the module's signature strengthened at it, the extended env and
    the elaborated module expression."""
    mty, elab = type_module_expr(env, me)
    sig = expand_modtype(env, mty)
    if not isinstance(sig, MSig):
        raise CannotOpenFunctor(
            "This module is a functor; functors export no bindings", me.span
        )
    hidden = env.session.fresh_ident("M")
    strengthened = strengthen(env, sig, PIdent(hidden))
    env.register_module(hidden, strengthened)
    env2, names = open_components(env, PIdent(hidden), strengthened.items)
    return hidden, strengthened.items, env2, (elab, names)


def open_for_expr(env: Env, me):
    """`let open me in body`: path opens extend the env directly; extended
    opens go through type_open and mark the body for elimination."""
    if isinstance(me, ast.MePath):
        path, mty = resolve_module_pathsyn(env, me.path)
        sig = expand_modtype(env, mty)
        if not isinstance(sig, MSig):
            raise CannotOpenFunctor(
                "This module is a functor; functors export no bindings", me.span
            )
        env2, names = open_components(env, path, sig.items)
        return env2, None, (EMPath(path), names)
    hidden, _, env2, (elab, names) = type_open(env, me)
    return env2, hidden, (EMBindOpen(hidden, elab), names)


@dataclass
class EMBindOpen(ElabModExpr):
    """A hidden binding opened inside an expression (`let open struct ...`)."""

    ident: Ident
    inner: ElabModExpr


# ---------------------------------------------------------------------------
# Structures.


def type_structure(env: Env, items: list) -> tuple:
    """Type a structure body; returns (signature items, elaborated items)."""
    return _type_items(env, list(items))


def _type_items(env: Env, items: list) -> tuple:
    if not items:
        return [], []
    head, rest = items[0], items[1:]
    env2, exported, elab, hidden, introducer = _type_one(env, head)
    sig_rest, elab_rest = _type_items(env2, rest)
    if hidden is not None:
        sig_rest = nondep.nondep_signature(env2, hidden, sig_rest, head.span, introducer)
    return exported + sig_rest, elab + elab_rest


def _type_one(env: Env, item):
    session = env.session
    if isinstance(item, ast.SiLet):
        state = InferState(session)
        bindings = infer_bindings(env, state, item.rec, item.bindings)
        env2 = env
        sig_items = []
        for name, scheme, name_span in bindings:
            if name == "_":
                continue  # wildcard bindings export nothing
            ident = session.fresh_ident(name)
            env2 = env2.declare_value(ident, scheme)
            sig_items.append(SVal(ident, scheme, name_span))
        return env2, sig_items, [ELet(item.rec, item.bindings)], None, None
    if isinstance(item, ast.SiType):
        env2, sig_items = bind_typedefs(env, item.nonrec, item.defs)
        return env2, sig_items, [EStatic(item)], None, None
    if isinstance(item, ast.SiModule):
        body = item.body
        for pname, ptype in reversed(item.params):
            body = ast.MeFunctor(pname, ptype, body, item.span)
        mty, elab = type_module_expr(env, body)
        ident = session.fresh_ident(item.name)
        env2 = env.declare_module(ident, mty)
        return (
            env2,
            [SModule(ident, mty, item.name_span)],
            [EModuleBind(ident, elab)],
            None,
            None,
        )
    if isinstance(item, ast.SiModType):
        mty = transl_modtype(env, item.body)
        ident = session.fresh_ident(item.name)
        env2 = env.declare_modtype(ident, mty)
        return env2, [SModType(ident, mty, item.name_span)], [EStatic(item)], None, None
    if isinstance(item, ast.SiException):
        args = [transl_type(env, t, {}, allow_new=False) for t in item.args]
        ident = session.fresh_ident(item.name)
        env2 = env.declare_exception(ident, args)
        return (
            env2,
            [SExn(ident, args, item.name_span)],
            [EExn(item.name, len(args), item)],
            None,
            None,
        )
    if isinstance(item, ast.SiOpen):
        if isinstance(item.modexpr, ast.MePath):
            path, mty = resolve_module_pathsyn(env, item.modexpr.path)
            sig = expand_modtype(env, mty)
            if not isinstance(sig, MSig):
                raise CannotOpenFunctor(
                    "This module is a functor; functors export no bindings",
                    item.span,
                )
            env2, names = open_components(env, path, sig.items)
            runtime = [n for n in names if n[0] in RUNTIME_NAMESPACES]
            return env2, [], [EOpen(path, runtime)], None, None
        hidden, _, env2, (elab, names) = type_open(env, item.modexpr)
        runtime = [n for n in names if n[0] in RUNTIME_NAMESPACES]
        elab_items = [
            EModuleBind(hidden, elab, hidden=True),
            EOpen(PIdent(hidden), runtime),
        ]
        return env2, [], elab_items, hidden, "open"
    if isinstance(item, ast.SiInclude):
        mty, elab = type_module_expr(env, item.modexpr)
        sig = expand_modtype(env, mty)
        if not isinstance(sig, MSig):
            raise CannotOpenFunctor("Cannot include a functor", item.span)
        hidden = session.fresh_ident("M")
        env.register_module(hidden, strengthen(env, sig, PIdent(hidden)))
        fresh_items = freshen_signature_items(session, sig.items)
        env2 = env
        for it in fresh_items:
            env2 = bind_sig_item(env2, it)
        runtime = [
            (item_namespace(it), it.ident.name)
            for it in fresh_items
            if item_namespace(it) in RUNTIME_NAMESPACES
        ]
        elab_items = [
            EModuleBind(hidden, elab, hidden=True),
            EInclude(PIdent(hidden), runtime),
        ]
        return env2, fresh_items, elab_items, hidden, "open"
    if isinstance(item, ast.SiLocal):
        expanded = desugar.expand_local([item])
        return _type_one(env, expanded[0])
    if isinstance(item, ast.SiPrivate):
        expanded = desugar.expand_private([item])
        return _type_one(env, expanded[0])
    if isinstance(item, ast.SiExpr):
        state = InferState(session)
        infer_expr(env, state, item.expr)
        return env, [], [EBare(item.expr)], None, None
    raise CheckError("Cannot interpret this structure item", item.span)


# ---------------------------------------------------------------------------
# Whole programs.


def check_program(program: ast.Program) -> TypedProgram:
    """Run the whole pipeline on a parsed program with a fresh session."""
    session = Session()
    env = initial_env(session)
    signature, structure = type_structure(env, program.items)
    return TypedProgram(structure, signature, session, env)


def check_source(source: str, filename: str = "<input>") -> TypedProgram:
    return check_program(parse_program(source, filename))
