"""Semantic objects: stamped identifiers, paths, core types, declarations,
signatures, module types and environments, plus the three structural
operations the module checker is built from: strengthening, path
substitution and signature matching.

Identifier equality is stamp equality and never consults the name, so a
shadowed `t` and its shadower are distinct objects that happen to print
alike. Paths are structural; `F(A).t` and `F(B).t` differ.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import (
    MatchError,
    TypeArity,
    UnboundIdentifier,
    UnboundModule,
)


# ---------------------------------------------------------------------------
# Identifiers and sessions.


class Ident:
    __slots__ = ("name", "stamp")

    def __init__(self, name: str, stamp: int):
        self.name = name
        self.stamp = stamp

    def __eq__(self, other):
        return isinstance(other, Ident) and self.stamp == other.stamp

    def __hash__(self):
        return hash(self.stamp)

    def __repr__(self):
        return "%s/%d" % (self.name, self.stamp)


class Session:
    """Owns the stamp counter of one compilation session.

    Stamps start at 1 and increase by one per fresh_ident call, which keeps
    diagnostics such as `t/5` stable across runs.
    """

    def __init__(self):
        self._stamps = itertools.count(1)
        self._varids = itertools.count(1)

    def fresh_ident(self, name: str) -> Ident:
        return Ident(name, next(self._stamps))

    def fresh_var(self) -> "TVar":
        return TVar(next(self._varids))


# ---------------------------------------------------------------------------
# Paths.


class Path:
    pass


@dataclass(frozen=True)
class PIdent(Path):
    ident: Ident

    def __repr__(self):
        return self.ident.name


@dataclass(frozen=True)
class PDot(Path):
    prefix: Path
    name: str

    def __repr__(self):
        return "%r.%s" % (self.prefix, self.name)


@dataclass(frozen=True)
class PApply(Path):
    func: Path
    arg: Path

    def __repr__(self):
        return "%r(%r)" % (self.func, self.arg)


def path_head(path: Path) -> Ident:
    while True:
        if isinstance(path, PIdent):
            return path.ident
        if isinstance(path, PDot):
            path = path.prefix
        else:
            path = path.func


def path_mentions(hidden: Ident, path: Path) -> bool:
    if isinstance(path, PIdent):
        return path.ident == hidden
    if isinstance(path, PDot):
        return path_mentions(hidden, path.prefix)
    return path_mentions(hidden, path.func) or path_mentions(hidden, path.arg)


# ---------------------------------------------------------------------------
# Core types, schemes and type declarations.


class CoreType:
    pass


class TVar(CoreType):
    __slots__ = ("id", "link")

    def __init__(self, id: int):
        self.id = id
        self.link: Optional[CoreType] = None

    def __repr__(self):
        return "'v%d" % self.id if self.link is None else repr(self.link)


@dataclass
class TArrow(CoreType):
    lhs: CoreType
    rhs: CoreType

    def __repr__(self):
        return "%r -> %r" % (self.lhs, self.rhs)


@dataclass
class TConstr(CoreType):
    path: Path
    args: list

    def __repr__(self):
        if not self.args:
            return repr(self.path)
        return "(%s) %r" % (", ".join(map(repr, self.args)), self.path)


@dataclass
class TTuple(CoreType):
    items: list

    def __repr__(self):
        return " * ".join(map(repr, self.items))


def resolve(t: CoreType) -> CoreType:
    """Follow unification links to the representative."""
    while isinstance(t, TVar) and t.link is not None:
        t = t.link
    return t


@dataclass
class Scheme:
    quantified: list  # list[TVar]
    body: CoreType

    def __repr__(self):
        return repr(self.body)


@dataclass
class TypeDecl:
    """A type declaration. `manifest` is the visible equation if any;
    `variant` lists (constructor, argument types) for datatypes. Both unset
    means abstract. Variant bodies are filled in after the declaration group
    is bound, so recursion works."""

    params: list  # list[TVar]
    manifest: Optional[CoreType] = None
    variant: Optional[list] = None  # list[(str, list[CoreType])]

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class ConstrInfo:
    """What the checker knows about a data or exception constructor."""

    name: str
    params: list  # list[TVar], copied from the declaration
    args: list  # list[CoreType]
    result: Optional[CoreType]  # None for exception constructors
    is_exception: bool = False


# ---------------------------------------------------------------------------
# Signature items and module types.


class SigItem:
    ident: Ident
    span: object


@dataclass
class SVal(SigItem):
    ident: Ident
    scheme: Scheme
    span: object = None


@dataclass
class SType(SigItem):
    ident: Ident
    decl: TypeDecl
    span: object = None


@dataclass
class SModule(SigItem):
    ident: Ident
    modtype: "ModType"
    span: object = None


@dataclass
class SModType(SigItem):
    ident: Ident
    modtype: Optional["ModType"]
    span: object = None


@dataclass
class SExn(SigItem):
    ident: Ident
    args: list  # list[CoreType]
    span: object = None


class ModType:
    pass


@dataclass
class MSig(ModType):
    items: list  # list[SigItem]


@dataclass
class MFunctor(ModType):
    param: Ident
    param_type: ModType
    result: ModType


@dataclass
class MNamed(ModType):
    path: Path


_NAMESPACE_OF_ITEM = {
    SVal: "values",
    SType: "types",
    SModule: "modules",
    SModType: "modtypes",
    SExn: "exceptions",
}


def item_namespace(item: SigItem) -> str:
    return _NAMESPACE_OF_ITEM[type(item)]


# ---------------------------------------------------------------------------
# Environments.
#
# Name lookup always returns the most recent binding. Bindings carry both a
# path (how the component is referred to from here) and its descriptor, so a
# component opened from `F(A)` and one opened from `F(B)` never collide even
# when they share stamps. PIdent-rooted descriptors live in session-wide
# stores keyed by stamp; every stamp is defined exactly once.


@dataclass
class Env:
    session: Session
    values: dict = field(default_factory=dict)  # name -> (Path, Scheme)
    types: dict = field(default_factory=dict)  # name -> (Path, TypeDecl)
    modules: dict = field(default_factory=dict)  # name -> (Path, ModType)
    modtypes: dict = field(default_factory=dict)  # name -> (Path, ModType|None)
    constructors: dict = field(default_factory=dict)  # name -> ConstrInfo
    exceptions: dict = field(default_factory=dict)  # name -> (Path, [CoreType])
    type_store: dict = field(default_factory=dict)  # stamp -> TypeDecl
    module_store: dict = field(default_factory=dict)  # stamp -> ModType
    modtype_store: dict = field(default_factory=dict)  # stamp -> ModType|None

    def _extend(self, namespace: str, name: str, binding) -> "Env":
        new = replace(self, **{namespace: {**getattr(self, namespace), name: binding}})
        return new

    # Declaring fresh idents: registers the descriptor in the session store
    # and binds the name.

    def declare_type(self, ident: Ident, decl: TypeDecl) -> "Env":
        self.type_store[ident.stamp] = decl
        return self._extend("types", ident.name, (PIdent(ident), decl))

    def declare_module(self, ident: Ident, mty: ModType) -> "Env":
        self.module_store[ident.stamp] = mty
        return self._extend("modules", ident.name, (PIdent(ident), mty))

    def register_module(self, ident: Ident, mty: ModType) -> "Env":
        """Store a module descriptor without binding a name (hidden binds)."""
        self.module_store[ident.stamp] = mty
        return self

    def declare_modtype(self, ident: Ident, mty: Optional[ModType]) -> "Env":
        self.modtype_store[ident.stamp] = mty
        return self._extend("modtypes", ident.name, (PIdent(ident), mty))

    def declare_value(self, ident: Ident, scheme: Scheme) -> "Env":
        return self._extend("values", ident.name, (PIdent(ident), scheme))

    def declare_exception(self, ident: Ident, args: list) -> "Env":
        env = self._extend("exceptions", ident.name, (PIdent(ident), args))
        info = ConstrInfo(ident.name, [], list(args), None, is_exception=True)
        return env._extend("constructors", ident.name, info)

    # Binding opened components (path-rooted, no store registration).

    def bind_value(self, name: str, path: Path, scheme: Scheme) -> "Env":
        return self._extend("values", name, (path, scheme))

    def bind_type(self, name: str, path: Path, decl: TypeDecl) -> "Env":
        return self._extend("types", name, (path, decl))

    def bind_module(self, name: str, path: Path, mty: ModType) -> "Env":
        return self._extend("modules", name, (path, mty))

    def bind_modtype(self, name: str, path: Path, mty) -> "Env":
        return self._extend("modtypes", name, (path, mty))

    def bind_constructor(self, name: str, info: ConstrInfo) -> "Env":
        return self._extend("constructors", name, info)

    def bind_exception(self, name: str, path: Path, args: list) -> "Env":
        env = self._extend("exceptions", name, (path, args))
        info = ConstrInfo(name, [], list(args), None, is_exception=True)
        return env._extend("constructors", name, info)

    # Lookups by name.

    def lookup_value(self, name: str, span=None):
        try:
            return self.values[name]
        except KeyError:
            raise UnboundIdentifier("Unbound value %s" % name, span) from None

    def lookup_type(self, name: str, span=None):
        try:
            return self.types[name]
        except KeyError:
            raise UnboundIdentifier("Unbound type constructor %s" % name, span) from None

    def lookup_module(self, name: str, span=None):
        try:
            return self.modules[name]
        except KeyError:
            raise UnboundModule("Unbound module %s" % name, span) from None

    def lookup_modtype(self, name: str, span=None):
        try:
            return self.modtypes[name]
        except KeyError:
            raise UnboundModule("Unbound module type %s" % name, span) from None

    def lookup_constructor(self, name: str, span=None) -> ConstrInfo:
        try:
            return self.constructors[name]
        except KeyError:
            raise UnboundIdentifier("Unbound constructor %s" % name, span) from None


# ---------------------------------------------------------------------------
# Path substitution: rebase every path rooted at given stamps.


class PathSubst:
    def __init__(self, mapping: dict):
        # stamp -> Path
        self.mapping = mapping

    def path(self, p: Path) -> Path:
        if isinstance(p, PIdent):
            return self.mapping.get(p.ident.stamp, p)
        if isinstance(p, PDot):
            return PDot(self.path(p.prefix), p.name)
        return PApply(self.path(p.func), self.path(p.arg))

    def core(self, t: CoreType) -> CoreType:
        t = resolve(t)
        if isinstance(t, TVar):
            return t
        if isinstance(t, TArrow):
            return TArrow(self.core(t.lhs), self.core(t.rhs))
        if isinstance(t, TTuple):
            return TTuple([self.core(x) for x in t.items])
        return TConstr(self.path(t.path), [self.core(a) for a in t.args])

    def scheme(self, s: Scheme) -> Scheme:
        return Scheme(s.quantified, self.core(s.body))

    def decl(self, d: TypeDecl) -> TypeDecl:
        manifest = self.core(d.manifest) if d.manifest is not None else None
        variant = None
        if d.variant is not None:
            variant = [(c, [self.core(a) for a in args]) for c, args in d.variant]
        return TypeDecl(d.params, manifest, variant)

    def item(self, item: SigItem) -> SigItem:
        if isinstance(item, SVal):
            return SVal(item.ident, self.scheme(item.scheme), item.span)
        if isinstance(item, SType):
            return SType(item.ident, self.decl(item.decl), item.span)
        if isinstance(item, SModule):
            return SModule(item.ident, self.modtype(item.modtype), item.span)
        if isinstance(item, SModType):
            body = self.modtype(item.modtype) if item.modtype is not None else None
            return SModType(item.ident, body, item.span)
        return SExn(item.ident, [self.core(a) for a in item.args], item.span)

    def modtype(self, mty: ModType) -> ModType:
        if isinstance(mty, MSig):
            return MSig([self.item(i) for i in mty.items])
        if isinstance(mty, MFunctor):
            return MFunctor(
                mty.param, self.modtype(mty.param_type), self.modtype(mty.result)
            )
        return MNamed(self.path(mty.path))


def subst_module(mty: ModType, frm: Ident, to: Path) -> ModType:
    """Rebase every path rooted at `frm` inside `mty` onto `to`."""
    return PathSubst({frm.stamp: to}).modtype(mty)


def subst_vars(t: CoreType, mapping: dict) -> CoreType:
    """Replace type variables (by id) with core types; used to instantiate
    declaration parameters and schemes."""
    t = resolve(t)
    if isinstance(t, TVar):
        return mapping.get(t.id, t)
    if isinstance(t, TArrow):
        return TArrow(subst_vars(t.lhs, mapping), subst_vars(t.rhs, mapping))
    if isinstance(t, TTuple):
        return TTuple([subst_vars(x, mapping) for x in t.items])
    return TConstr(t.path, [subst_vars(a, mapping) for a in t.args])


def instantiate(session: Session, scheme: Scheme) -> CoreType:
    mapping = {v.id: session.fresh_var() for v in scheme.quantified}
    return subst_vars(scheme.body, mapping)


def core_mentions(hidden: Ident, t) -> bool:
    """True iff a path rooted at `hidden` occurs syntactically in a core
    type or module type (after following unification links)."""
    if isinstance(t, CoreType):
        t = resolve(t)
        if isinstance(t, TVar):
            return False
        if isinstance(t, TArrow):
            return core_mentions(hidden, t.lhs) or core_mentions(hidden, t.rhs)
        if isinstance(t, TTuple):
            return any(core_mentions(hidden, x) for x in t.items)
        return path_mentions(hidden, t.path) or any(
            core_mentions(hidden, a) for a in t.args
        )
    if isinstance(t, Scheme):
        return core_mentions(hidden, t.body)
    if isinstance(t, TypeDecl):
        if t.manifest is not None and core_mentions(hidden, t.manifest):
            return True
        if t.variant is not None:
            return any(
                core_mentions(hidden, a) for _, args in t.variant for a in args
            )
        return False
    if isinstance(t, MSig):
        return any(core_mentions(hidden, i) for i in t.items)
    if isinstance(t, MFunctor):
        return core_mentions(hidden, t.param_type) or core_mentions(hidden, t.result)
    if isinstance(t, MNamed):
        return path_mentions(hidden, t.path)
    if isinstance(t, SVal):
        return core_mentions(hidden, t.scheme)
    if isinstance(t, SType):
        return core_mentions(hidden, t.decl)
    if isinstance(t, (SModule, SModType)):
        return t.modtype is not None and core_mentions(hidden, t.modtype)
    if isinstance(t, SExn):
        return any(core_mentions(hidden, a) for a in t.args)
    raise TypeError("core_mentions: unexpected %r" % (t,))


# ---------------------------------------------------------------------------
# Resolving paths against an environment.


def expand_modtype(env: Env, mty: ModType) -> ModType:
    """Chase MNamed references until a signature or functor appears."""
    seen = 0
    while isinstance(mty, MNamed):
        body = find_modtype(env, mty.path)
        if body is None:
            raise UnboundModule("The module type %r is abstract" % mty.path)
        mty = body
        seen += 1
        if seen > 100:
            raise UnboundModule("Cyclic module type %r" % mty)
    return mty


def _projection_subst(root: Path, items: list) -> PathSubst:
    # Later items shadow earlier ones of the same name; only the visible
    # (last) item of each name is rerooted, the rest resolve by stamp.
    last = {}
    for item in items:
        last[(item_namespace(item), item.ident.name)] = item.ident.stamp
    mapping = {}
    for item in items:
        ns = item_namespace(item)
        if last[(ns, item.ident.name)] == item.ident.stamp and ns in (
            "types",
            "modules",
            "modtypes",
        ):
            mapping[item.ident.stamp] = PDot(root, item.ident.name)
    return PathSubst(mapping)


def _project(env: Env, root: Path, mty: ModType, namespace: str, name: str, span=None):
    mty = expand_modtype(env, mty)
    if not isinstance(mty, MSig):
        raise UnboundModule("%r is a functor, not a structure" % root, span)
    found = None
    for item in mty.items:
        if item_namespace(item) == namespace and item.ident.name == name:
            found = item
    if found is None:
        raise UnboundIdentifier(
            "Unbound %s %r.%s" % (namespace[:-1], root, name), span
        )
    return _projection_subst(root, mty.items).item(found)


def find_module(env: Env, path: Path, span=None) -> ModType:
    if isinstance(path, PIdent):
        try:
            return env.module_store[path.ident.stamp]
        except KeyError:
            raise UnboundModule("Unbound module %r" % path, span) from None
    if isinstance(path, PDot):
        parent = find_module(env, path.prefix, span)
        item = _project(env, path.prefix, parent, "modules", path.name, span)
        return item.modtype
    fmty = expand_modtype(env, find_module(env, path.func, span))
    if not isinstance(fmty, MFunctor):
        raise UnboundModule("%r is not a functor" % path.func, span)
    return subst_module(fmty.result, fmty.param, path.arg)


def find_type(env: Env, path: Path, span=None) -> TypeDecl:
    if isinstance(path, PIdent):
        try:
            return env.type_store[path.ident.stamp]
        except KeyError:
            raise UnboundIdentifier("Unbound type %r" % path, span) from None
    if isinstance(path, PDot):
        parent = find_module(env, path.prefix, span)
        item = _project(env, path.prefix, parent, "types", path.name, span)
        return item.decl
    raise UnboundIdentifier("Not a type path: %r" % path, span)


def find_modtype(env: Env, path: Path, span=None):
    if isinstance(path, PIdent):
        try:
            return env.modtype_store[path.ident.stamp]
        except KeyError:
            raise UnboundModule("Unbound module type %r" % path, span) from None
    if isinstance(path, PDot):
        parent = find_module(env, path.prefix, span)
        item = _project(env, path.prefix, parent, "modtypes", path.name, span)
        return item.modtype
    raise UnboundModule("Not a module type path: %r" % path, span)


def expand_manifest(env: Env, t: TConstr):
    """One-step expansion of a manifest alias; None when `t` is not an
    alias, is abstract, or the manifest points back to the same path."""
    try:
        decl = find_type(env, t.path)
    except (UnboundIdentifier, UnboundModule):
        return None
    if decl.manifest is None:
        return None
    if len(decl.params) != len(t.args):
        return None
    m = resolve(decl.manifest)
    if isinstance(m, TConstr) and m.path == t.path:
        return None
    return subst_vars(decl.manifest, {v.id: a for v, a in zip(decl.params, t.args)})


# ---------------------------------------------------------------------------
# Strengthening: give path-rooted module types manifest equalities.


def strengthen(env: Env, mty: ModType, at: Path) -> ModType:
    """Rewrite abstract (and datatype) components of `mty` so they carry a
    manifest equation to their name under `at`, recursively through
    submodules. Functors are unchanged."""
    mty = expand_modtype(env, mty)
    if not isinstance(mty, MSig):
        return mty
    items = []
    for item in mty.items:
        if isinstance(item, SType):
            decl = item.decl
            if decl.manifest is None:
                eq = TConstr(PDot(at, item.ident.name), list(decl.params))
                decl = TypeDecl(decl.params, eq, decl.variant)
            items.append(SType(item.ident, decl, item.span))
        elif isinstance(item, SModule):
            inner = strengthen(env, item.modtype, PDot(at, item.ident.name))
            items.append(SModule(item.ident, inner, item.span))
        else:
            items.append(item)
    return MSig(items)


# ---------------------------------------------------------------------------
# Type equality up to manifest expansion (both sides rigid).


def equal_types(env: Env, a: CoreType, b: CoreType) -> bool:
    a = resolve(a)
    b = resolve(b)
    if isinstance(a, TVar) or isinstance(b, TVar):
        return a is b
    if isinstance(a, TArrow) and isinstance(b, TArrow):
        return equal_types(env, a.lhs, b.lhs) and equal_types(env, a.rhs, b.rhs)
    if isinstance(a, TTuple) and isinstance(b, TTuple):
        return len(a.items) == len(b.items) and all(
            equal_types(env, x, y) for x, y in zip(a.items, b.items)
        )
    if isinstance(a, TConstr) and isinstance(b, TConstr):
        if a.path == b.path and len(a.args) == len(b.args):
            if all(equal_types(env, x, y) for x, y in zip(a.args, b.args)):
                return True
    for first, second, flip in ((a, b, False), (b, a, True)):
        if isinstance(first, TConstr):
            expanded = expand_manifest(env, first)
            if expanded is not None:
                return (
                    equal_types(env, second, expanded)
                    if flip
                    else equal_types(env, expanded, second)
                )
    return False


# ---------------------------------------------------------------------------
# Signature matching.


def register_sig_items(env: Env, items: list) -> Env:
    """Make the idents of `items` resolvable by stamp; used when matching
    binds candidate components."""
    for item in items:
        if isinstance(item, SType):
            env.type_store.setdefault(item.ident.stamp, item.decl)
        elif isinstance(item, SModule):
            env.module_store.setdefault(item.ident.stamp, item.modtype)
        elif isinstance(item, SModType):
            env.modtype_store.setdefault(item.ident.stamp, item.modtype)
    return env


def match_modtype(env: Env, candidate: ModType, target: ModType) -> None:
    """Check that `candidate` is usable where `target` is expected.

    Components are paired by name (the most recent candidate binding wins);
    values must be at least as general, type declarations equal up to the
    path equalities visible in env (an abstract target matches any declaration
    of the same arity), modules match recursively and functor parameters are
    contravariant. Raises MatchError naming the first failing component.
    """
    candidate = expand_modtype(env, candidate)
    target = expand_modtype(env, target)
    if isinstance(target, MFunctor):
        if not isinstance(candidate, MFunctor):
            raise MatchError("(functor)", "is not a functor")
        match_modtype(env, target.param_type, candidate.param_type)
        env2 = env.register_module(
            target.param, target.param_type
        )
        cand_result = subst_module(
            candidate.result, candidate.param, PIdent(target.param)
        )
        match_modtype(env2, cand_result, target.result)
        return
    if not isinstance(candidate, MSig):
        raise MatchError("(signature)", "is a functor, not a structure")

    env2 = register_sig_items(env, candidate.items)
    latest = {}
    for item in candidate.items:
        latest[(item_namespace(item), item.ident.name)] = item

    pairs = []
    mapping = {}
    for titem in target.items:
        key = (item_namespace(titem), titem.ident.name)
        citem = latest.get(key)
        if citem is None:
            raise MatchError(
                "%s %s" % (key[0][:-1], titem.ident.name), "is missing", titem.span
            )
        mapping[titem.ident.stamp] = PIdent(citem.ident)
        pairs.append((citem, titem))
    subst = PathSubst(mapping)

    for citem, titem in pairs:
        titem = subst.item(titem)
        name = titem.ident.name
        if isinstance(titem, SVal):
            if not scheme_at_least_as_general(env2, citem.scheme, titem.scheme):
                raise MatchError("value %s" % name, "is not general enough", titem.span)
        elif isinstance(titem, SType):
            _match_type_decl(env2, citem, titem)
        elif isinstance(titem, SModule):
            try:
                match_modtype(env2, citem.modtype, titem.modtype)
            except MatchError as err:
                raise MatchError(
                    "module %s: %s" % (name, err.component), err.reason, titem.span
                ) from None
        elif isinstance(titem, SModType):
            if titem.modtype is not None:
                if citem.modtype is None:
                    raise MatchError(
                        "module type %s" % name, "is abstract in the candidate"
                    )
                match_modtype(env2, citem.modtype, titem.modtype)
                match_modtype(env2, titem.modtype, citem.modtype)
        elif isinstance(titem, SExn):
            if len(citem.args) != len(titem.args) or not all(
                equal_types(env2, a, b) for a, b in zip(citem.args, titem.args)
            ):
                raise MatchError(
                    "exception %s" % name, "has a different argument type", titem.span
                )


def _match_type_decl(env: Env, citem: SType, titem: SType) -> None:
    cd, td = citem.decl, titem.decl
    name = titem.ident.name
    if cd.arity != td.arity:
        raise MatchError(
            "type %s" % name,
            "has arity %d but %d was expected" % (cd.arity, td.arity),
            titem.span,
        )
    # The candidate viewed through its own identity; expansion chases its
    # manifest chain, so a manifest target can match the candidate itself.
    mapping = {v.id: c for v, c in zip(td.params, cd.params)}
    self_type = TConstr(PIdent(citem.ident), list(cd.params))
    if td.manifest is not None:
        want = subst_vars(td.manifest, mapping)
        if not equal_types(env, self_type, want):
            raise MatchError(
                "type %s" % name, "does not match its manifest equation", titem.span
            )
    if td.variant is not None:
        cv = _variant_of(env, cd, self_type)
        if cv is None:
            raise MatchError(
                "type %s" % name, "is not a datatype but one was expected", titem.span
            )
        want = [(c, [subst_vars(a, mapping) for a in args]) for c, args in td.variant]
        if [c for c, _ in cv] != [c for c, _ in want]:
            raise MatchError(
                "type %s" % name, "declares different constructors", titem.span
            )
        for (c, cargs), (_, targs) in zip(cv, want):
            if len(cargs) != len(targs) or not all(
                equal_types(env, x, y) for x, y in zip(cargs, targs)
            ):
                raise MatchError(
                    "type %s" % name,
                    "constructor %s has a different argument type" % c,
                    titem.span,
                )


def _variant_of(env: Env, decl: TypeDecl, self_type: TConstr):
    """The constructor list denoted by a declaration, chasing manifests."""
    seen = 0
    t = self_type
    while True:
        if decl.variant is not None:
            if t is not self_type:
                # rebase constructor arguments onto the use-site parameters
                mapping = {v.id: a for v, a in zip(decl.params, t.args)}
                return [
                    (c, [subst_vars(a, mapping) for a in args])
                    for c, args in decl.variant
                ]
            return decl.variant
        expanded = expand_manifest(env, t) if isinstance(t, TConstr) else None
        if expanded is None:
            return None
        t = resolve(expanded)
        if not isinstance(t, TConstr):
            return None
        try:
            decl = find_type(env, t.path)
        except (UnboundIdentifier, UnboundModule):
            return None
        seen += 1
        if seen > 100:
            return None


def scheme_at_least_as_general(env: Env, candidate: Scheme, target: Scheme) -> bool:
    """True when `candidate` instantiates to `target` with the target's own
    quantified variables held rigid (skolemized as fresh abstract types)."""
    from .core_typing import InferState

    skolems = {}
    for v in target.quantified:
        sk = env.session.fresh_ident("$" + str(v.id))
        env.type_store[sk.stamp] = TypeDecl([])
        skolems[v.id] = TConstr(PIdent(sk), [])
    want = subst_vars(target.body, skolems)
    got = instantiate(env.session, candidate)
    state = InferState(env.session)
    try:
        state.unify(env, want, got)
    except Exception:
        return False
    return True


def format_type(t: CoreType) -> str:
    """Plain, context-free rendering used in error messages."""
    names = {}

    def var_name(v: TVar) -> str:
        if v.id not in names:
            k = len(names)
            names[v.id] = "'" + chr(ord("a") + k % 26) + ("" if k < 26 else str(k // 26))
        return names[v.id]

    def path_str(p: Path) -> str:
        if isinstance(p, PIdent):
            return p.ident.name
        if isinstance(p, PDot):
            return "%s.%s" % (path_str(p.prefix), p.name)
        return "%s(%s)" % (path_str(p.func), path_str(p.arg))

    def go(t, prec=0) -> str:
        t = resolve(t)
        if isinstance(t, TVar):
            return var_name(t)
        if isinstance(t, TArrow):
            s = "%s -> %s" % (go(t.lhs, 1), go(t.rhs, 0))
            return "(%s)" % s if prec > 0 else s
        if isinstance(t, TTuple):
            s = " * ".join(go(x, 2) for x in t.items)
            return "(%s)" % s if prec > 1 else s
        if not t.args:
            return path_str(t.path)
        if len(t.args) == 1:
            return "%s %s" % (go(t.args[0], 2), path_str(t.path))
        return "(%s) %s" % (", ".join(go(a, 0) for a in t.args), path_str(t.path))

    return go(t)
