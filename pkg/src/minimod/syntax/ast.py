"""Surface abstract syntax for MiniMod.

Every node carries exactly one SourceSpan. Lines are 1-based, columns
0-based, matching the diagnostic format "Line 2, characters 4-5".
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        return SourceSpan(
            self.file, self.start_line, self.start_col, other.end_line, other.end_col
        )

    def __str__(self):
        return "Line %d, characters %d-%d" % (
            self.start_line,
            self.start_col,
            self.end_col if self.end_line == self.start_line else self.start_col,
        )


NO_SPAN = SourceSpan("<none>", 1, 0, 1, 0)


class Node:
    """Base class; subclasses are dataclasses with a trailing span field."""

    span: SourceSpan


# ---------------------------------------------------------------------------
# Paths as written in source: A, A.B, F(M).t prefixes.


class PathSyn(Node):
    pass


@dataclass
class PsId(PathSyn):
    name: str
    span: SourceSpan = NO_SPAN


@dataclass
class PsDot(PathSyn):
    prefix: PathSyn
    name: str
    span: SourceSpan = NO_SPAN


@dataclass
class PsApply(PathSyn):
    func: PathSyn
    arg: PathSyn
    span: SourceSpan = NO_SPAN


# ---------------------------------------------------------------------------
# Type expressions.


class TypeExpr(Node):
    pass


@dataclass
class TxVar(TypeExpr):
    name: str  # without the leading quote
    span: SourceSpan = NO_SPAN


@dataclass
class TxConstr(TypeExpr):
    path: PathSyn
    args: list  # list[TypeExpr]
    span: SourceSpan = NO_SPAN


@dataclass
class TxArrow(TypeExpr):
    lhs: TypeExpr
    rhs: TypeExpr
    span: SourceSpan = NO_SPAN


@dataclass
class TxTuple(TypeExpr):
    items: list
    span: SourceSpan = NO_SPAN


# ---------------------------------------------------------------------------
# Patterns (shallow by construction).


class Pattern(Node):
    pass


@dataclass
class PVar(Pattern):
    name: str
    annot: Optional[TypeExpr] = None
    span: SourceSpan = NO_SPAN


@dataclass
class PWild(Pattern):
    span: SourceSpan = NO_SPAN


@dataclass
class PUnit(Pattern):
    span: SourceSpan = NO_SPAN


@dataclass
class PLit(Pattern):
    value: object  # int | str | bool
    span: SourceSpan = NO_SPAN


@dataclass
class PConstr(Pattern):
    path: PathSyn
    args: list  # [] or list of PVar/PWild (a tuple of variables)
    span: SourceSpan = NO_SPAN


# ---------------------------------------------------------------------------
# Expressions.


class Expr(Node):
    pass


@dataclass
class EInt(Expr):
    value: int
    span: SourceSpan = NO_SPAN


@dataclass
class EString(Expr):
    value: str
    span: SourceSpan = NO_SPAN


@dataclass
class EBool(Expr):
    value: bool
    span: SourceSpan = NO_SPAN


@dataclass
class EUnit(Expr):
    span: SourceSpan = NO_SPAN


@dataclass
class EVar(Expr):
    path: PathSyn
    span: SourceSpan = NO_SPAN


@dataclass
class EConstr(Expr):
    path: PathSyn
    arg: Optional[Expr]
    span: SourceSpan = NO_SPAN


@dataclass
class ETuple(Expr):
    items: list
    span: SourceSpan = NO_SPAN


@dataclass
class EFun(Expr):
    param: Pattern
    body: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class EApply(Expr):
    func: Expr
    arg: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class ELetIn(Expr):
    rec: bool
    bindings: list  # list[LetBinding]
    body: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class ECase:
    """One match/try case; pattern may be flagged as an exception pattern."""

    pattern: Pattern
    body: Expr
    is_exception: bool = False


@dataclass
class EMatch(Expr):
    scrutinee: Expr
    cases: list  # list[ECase]
    span: SourceSpan = NO_SPAN


@dataclass
class ETry(Expr):
    body: Expr
    cases: list
    span: SourceSpan = NO_SPAN


@dataclass
class ERaise(Expr):
    arg: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class EAssert(Expr):
    arg: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class ESequence(Expr):
    first: Expr
    second: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class EIf(Expr):
    cond: Expr
    then: Expr
    orelse: Optional[Expr]
    span: SourceSpan = NO_SPAN


@dataclass
class ELetModuleIn(Expr):
    name: str
    modexpr: "ModExpr"
    body: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class ELetExceptionIn(Expr):
    name: str
    args: list  # list[TypeExpr]
    body: Expr
    span: SourceSpan = NO_SPAN


@dataclass
class ELetOpenIn(Expr):
    modexpr: "ModExpr"
    body: Expr
    span: SourceSpan = NO_SPAN


# ---------------------------------------------------------------------------
# Module expressions and module types.


class ModExpr(Node):
    pass


@dataclass
class MePath(ModExpr):
    path: PathSyn
    span: SourceSpan = NO_SPAN


@dataclass
class MeStruct(ModExpr):
    items: list  # list[StructItem]
    span: SourceSpan = NO_SPAN


@dataclass
class MeFunctor(ModExpr):
    param: str
    param_type: "ModTypeExpr"
    body: ModExpr
    span: SourceSpan = NO_SPAN


@dataclass
class MeApply(ModExpr):
    func: ModExpr
    arg: ModExpr
    span: SourceSpan = NO_SPAN


@dataclass
class MeAscribe(ModExpr):
    inner: ModExpr
    annot: "ModTypeExpr"
    span: SourceSpan = NO_SPAN


class ModTypeExpr(Node):
    pass


@dataclass
class MtName(ModTypeExpr):
    path: PathSyn
    span: SourceSpan = NO_SPAN


@dataclass
class MtSig(ModTypeExpr):
    items: list  # list[SigItemSurface]
    span: SourceSpan = NO_SPAN


@dataclass
class MtFunctor(ModTypeExpr):
    param: str
    param_type: ModTypeExpr
    result: ModTypeExpr
    span: SourceSpan = NO_SPAN


@dataclass
class MtWith(ModTypeExpr):
    base: ModTypeExpr
    params: list  # list[str], type variable names
    name: str
    mode: str  # "equal" | "substitute"
    rhs: TypeExpr
    span: SourceSpan = NO_SPAN


# ---------------------------------------------------------------------------
# Structure and signature items.


@dataclass
class LetBinding:
    name: str
    params: list  # list[Pattern]
    body: Expr
    name_span: SourceSpan = NO_SPAN


@dataclass
class TypeDefn:
    params: list  # list[str]
    name: str
    manifest: Optional[TypeExpr]
    variant: Optional[list]  # list[(str, list[TypeExpr])]
    name_span: SourceSpan = NO_SPAN


class StructItem(Node):
    pass


@dataclass
class SiLet(StructItem):
    rec: bool
    bindings: list  # list[LetBinding]
    span: SourceSpan = NO_SPAN


@dataclass
class SiType(StructItem):
    nonrec: bool
    defs: list  # list[TypeDefn]
    span: SourceSpan = NO_SPAN


@dataclass
class SiModule(StructItem):
    name: str
    params: list  # list[(str, ModTypeExpr)] functor parameter sugar
    body: ModExpr
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SiModType(StructItem):
    name: str
    body: ModTypeExpr
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SiException(StructItem):
    name: str
    args: list  # list[TypeExpr]
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SiOpen(StructItem):
    modexpr: ModExpr
    span: SourceSpan = NO_SPAN


@dataclass
class SiInclude(StructItem):
    modexpr: ModExpr
    span: SourceSpan = NO_SPAN


@dataclass
class SiLocal(StructItem):
    first: list  # list[StructItem]
    second: list
    span: SourceSpan = NO_SPAN


@dataclass
class SiPrivate(StructItem):
    item: StructItem
    span: SourceSpan = NO_SPAN


@dataclass
class SiExpr(StructItem):
    expr: Expr
    span: SourceSpan = NO_SPAN


class SigItemSurface(Node):
    pass


@dataclass
class SgVal(SigItemSurface):
    name: str
    annot: TypeExpr
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SgType(SigItemSurface):
    nonrec: bool
    defs: list  # list[TypeDefn]
    span: SourceSpan = NO_SPAN


@dataclass
class SgTypeSubst(SigItemSurface):
    params: list
    name: str
    rhs: TypeExpr
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SgModule(SigItemSurface):
    name: str
    annot: ModTypeExpr
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SgModType(SigItemSurface):
    name: str
    body: Optional[ModTypeExpr]
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SgException(SigItemSurface):
    name: str
    args: list
    name_span: SourceSpan = NO_SPAN
    span: SourceSpan = NO_SPAN


@dataclass
class SgOpen(SigItemSurface):
    modexpr: ModExpr
    span: SourceSpan = NO_SPAN


@dataclass
class SgInclude(SigItemSurface):
    annot: ModTypeExpr
    span: SourceSpan = NO_SPAN


@dataclass
class SgLocal(SigItemSurface):
    first: list
    second: list
    span: SourceSpan = NO_SPAN


@dataclass
class Program:
    items: list  # list[StructItem], source order
    span: SourceSpan = NO_SPAN


def structurally_equal(a, b) -> bool:
    """Structural AST equality ignoring spans (and name spans)."""
    if type(a) is not type(b):
        return False
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(
            structurally_equal(x, y) for x, y in zip(a, b)
        )
    if isinstance(a, SourceSpan):
        return True
    if hasattr(a, "__dataclass_fields__"):
        for name in a.__dataclass_fields__:
            if name in ("span", "name_span"):
                continue
            if not structurally_equal(getattr(a, name), getattr(b, name)):
                return False
        return True
    return a == b
