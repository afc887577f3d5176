"""Dependency elimination: compute a supertype of a signature in which a
given identifier does not occur.

Rewriting strategy, in order: (1) expand manifest aliases whose expansion
removes the hidden root (e.g. `hidden.t' = outer_t`), (2) reorient an
equality through a visible alias declared earlier in the same signature
(`type u = hidden.t` lets a later `hidden.t` become `u`), (3) give up.
Giving up abstracts a type's manifest but is a hard error for values,
exceptions and datatype constructor arguments.
"""
from __future__ import annotations

from .errors import EliminationError, Victim
from .semobj import (
    CoreType,
    Env,
    Ident,
    MFunctor,
    MNamed,
    MSig,
    ModType,
    PIdent,
    Scheme,
    SExn,
    SModType,
    SModule,
    SType,
    SVal,
    TArrow,
    TConstr,
    TTuple,
    TVar,
    TypeDecl,
    core_mentions,
    expand_manifest,
    path_mentions,
    resolve,
    subst_vars,
)


def mentions(hidden: Ident, t) -> bool:
    """Syntactic occurrence check for paths rooted at `hidden` (after
    following unification links)."""
    return core_mentions(hidden, t)


class _Rewriter:
    def __init__(self, env: Env, hidden: Ident):
        self.env = env
        self.hidden = hidden
        self.aliases = {}  # hidden-rooted Path -> Path of a visible alias

    def core(self, t: CoreType, use_aliases: bool = True):
        """Rewrite a core type; None when an occurrence is unremovable.
        Manifest equations are rewritten with `use_aliases` off: equalities
        through the hidden name are discarded, not reoriented."""
        t = resolve(t)
        if isinstance(t, TVar):
            return t
        if isinstance(t, TArrow):
            lhs = self.core(t.lhs, use_aliases)
            rhs = self.core(t.rhs, use_aliases)
            return None if lhs is None or rhs is None else TArrow(lhs, rhs)
        if isinstance(t, TTuple):
            items = [self.core(x, use_aliases) for x in t.items]
            return None if any(x is None for x in items) else TTuple(items)
        args = [self.core(a, use_aliases) for a in t.args]
        if any(a is None for a in args):
            return None
        if not path_mentions(self.hidden, t.path):
            return TConstr(t.path, args)
        expanded = expand_manifest(self.env, TConstr(t.path, args))
        if expanded is not None:
            out = self.core(expanded, use_aliases)
            if out is not None and not core_mentions(self.hidden, out):
                return out
        if use_aliases:
            alias = self.aliases.get(t.path)
            if alias is not None:
                return TConstr(alias, args)
        return None

    def offender(self, t: CoreType):
        """The first hidden-rooted constructor path in `t`, for diagnostics."""
        t = resolve(t)
        if isinstance(t, TVar):
            return None
        if isinstance(t, TArrow):
            return self.offender(t.lhs) or self.offender(t.rhs)
        if isinstance(t, TTuple):
            for x in t.items:
                found = self.offender(x)
                if found:
                    return found
            return None
        if path_mentions(self.hidden, t.path):
            return t.path
        for a in t.args:
            found = self.offender(a)
            if found:
                return found
        return None


def _offender_ident(env: Env, rewriter: _Rewriter, t) -> object:
    """Resolve the offending path to the component ident inside the hidden
    module, so the message can show the paper's `t/89` form."""
    from .semobj import PDot, expand_modtype

    path = rewriter.offender(t)
    if not isinstance(path, PDot):
        return rewriter.hidden
    comps = []
    q = path
    while isinstance(q, PDot):
        comps.append(q.name)
        q = q.prefix
    if not isinstance(q, PIdent):
        return rewriter.hidden
    comps.reverse()
    try:
        mty = expand_modtype(env, env.module_store[rewriter.hidden.stamp])
    except Exception:
        return rewriter.hidden
    ident = rewriter.hidden
    for comp in comps:
        if not isinstance(mty, MSig):
            return rewriter.hidden
        found = None
        for item in mty.items:
            if item.ident.name == comp:
                found = item
        if found is None:
            return rewriter.hidden
        ident = found.ident
        mty = getattr(found, "modtype", None)
        if mty is not None:
            try:
                mty = expand_modtype(env, mty)
            except Exception:
                mty = None
    return ident


def nondep_signature(
    env: Env, hidden: Ident, items: list, open_span=None, introducer: str = "open"
) -> list:
    """Return a copy of `items` that never mentions `hidden`, or raise
    EliminationError listing every component that still does."""
    rewriter = _Rewriter(env, hidden)
    victims = []
    out = _rewrite_items(env, rewriter, items, victims)
    if victims:
        raise EliminationError(hidden, open_span, victims, introducer)
    return out


def _rewrite_items(env: Env, rewriter: _Rewriter, items, victims) -> list:
    out = []
    for item in items:
        if isinstance(item, SVal):
            body = rewriter.core(item.scheme.body)
            if body is None:
                victims.append(
                    Victim(
                        "value",
                        item.ident.name,
                        item.span,
                        _offender_ident(env, rewriter, item.scheme.body),
                    )
                )
                out.append(item)
                continue
            out.append(SVal(item.ident, Scheme(item.scheme.quantified, body), item.span))
        elif isinstance(item, SType):
            out.append(_rewrite_type_item(env, rewriter, item, victims))
        elif isinstance(item, SExn):
            args = [rewriter.core(a) for a in item.args]
            if any(a is None for a in args):
                bad = next(a for a, r in zip(item.args, args) if r is None)
                victims.append(
                    Victim(
                        "exception",
                        item.ident.name,
                        item.span,
                        _offender_ident(env, rewriter, bad),
                    )
                )
                out.append(item)
                continue
            out.append(SExn(item.ident, args, item.span))
        elif isinstance(item, SModule):
            mty = _rewrite_modtype(env, rewriter, item.modtype, item, victims)
            out.append(SModule(item.ident, mty, item.span))
        elif isinstance(item, SModType):
            if item.modtype is None or not core_mentions(rewriter.hidden, item.modtype):
                out.append(item)
            else:
                mty = _rewrite_modtype(env, rewriter, item.modtype, item, victims)
                out.append(SModType(item.ident, mty, item.span))
        else:
            out.append(item)
    return out


def _rewrite_type_item(env: Env, rewriter: _Rewriter, item: SType, victims) -> SType:
    decl = item.decl
    hidden = rewriter.hidden
    manifest = decl.manifest
    original_manifest = resolve(manifest) if manifest is not None else None
    if manifest is not None and core_mentions(hidden, manifest):
        # unrewritable equations are discarded: the declaration turns abstract
        manifest = rewriter.core(manifest, use_aliases=False)
    variant = decl.variant
    if variant is not None:
        new_variant = []
        for cname, cargs in variant:
            new_args = []
            for a in cargs:
                r = rewriter.core(a)
                if r is None:
                    victims.append(
                        Victim(
                            "type",
                            item.ident.name,
                            item.span,
                            _offender_ident(env, rewriter, a),
                        )
                    )
                    r = a
                new_args.append(r)
            new_variant.append((cname, new_args))
        variant = new_variant
    out = SType(item.ident, TypeDecl(decl.params, manifest, variant), item.span)
    # Record this component as a reorientation target when its original
    # equation pointed straight into the hidden module.
    if (
        isinstance(original_manifest, TConstr)
        and path_mentions(hidden, original_manifest.path)
        and len(original_manifest.args) == len(decl.params)
        and all(
            resolve(a) is p for a, p in zip(original_manifest.args, decl.params)
        )
    ):
        rewriter.aliases.setdefault(original_manifest.path, PIdent(item.ident))
    return out


def _rewrite_modtype(env: Env, rewriter: _Rewriter, mty: ModType, item, victims):
    if isinstance(mty, MNamed):
        if path_mentions(rewriter.hidden, mty.path):
            victims.append(
                Victim("module", item.ident.name, item.span, rewriter.hidden)
            )
        return mty
    if isinstance(mty, MSig):
        return MSig(_rewrite_items(env, rewriter, mty.items, victims))
    param_type = _rewrite_modtype(env, rewriter, mty.param_type, item, victims)
    result = _rewrite_modtype(env, rewriter, mty.result, item, victims)
    return MFunctor(mty.param, param_type, result)


def eliminate_core(env: Env, hidden: Ident, t: CoreType, span) -> CoreType:
    """Eliminate `hidden` from one core type (used for `let open` and
    `let module` bodies); raises EliminationError when impossible."""
    rewriter = _Rewriter(env, hidden)
    out = rewriter.core(t)
    if out is None:
        victims = [
            Victim("expression", "", span, _offender_ident(env, rewriter, t))
        ]
        raise EliminationError(hidden, span, victims, "open")
    return out
