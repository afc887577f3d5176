"""Recursive descent parser for MiniMod programs and interfaces.

`open` and `include` accept any module expression in structures; in
signatures `open` accepts a module expression and `include` a module type.
Operator precedence, loosest first:

    ;  then  :=  then  = <  then  + -  then  *  then application, prefix !

`fun`, `match`/`try` cases and `let ... in` bodies extend as far right as
possible (including `;`); `if` branches stop before `;`.
"""
from __future__ import annotations

from ..errors import ParseError
from . import ast
from .ast import SourceSpan
from .lexer import Token, TokenKind as T, tokenize


def parse_program(source: str, filename: str = "<input>") -> ast.Program:
    """Parse a whole MiniMod program (a list of structure items)."""
    p = _Parser(source, filename)
    items = p.struct_items(stop={T.EOF})
    p.expect(T.EOF)
    return ast.Program(items, p.whole_span(items))


def parse_interface(source: str, filename: str = "<input>") -> list:
    """Parse a bare signature body (a list of signature items)."""
    p = _Parser(source, filename)
    items = p.sig_items(stop={T.EOF})
    p.expect(T.EOF)
    return items


_EXPR_START = {
    T.INT,
    T.STRING,
    T.TRUE,
    T.FALSE,
    T.LPAREN,
    T.IDENT,
    T.UIDENT,
    T.FUN,
    T.MATCH,
    T.TRY,
    T.IF,
    T.RAISE,
    T.ASSERT,
    T.BANG,
    T.BEGIN,
    T.MINUS,
}

_ATOM_START = {
    T.INT,
    T.STRING,
    T.TRUE,
    T.FALSE,
    T.LPAREN,
    T.IDENT,
    T.UIDENT,
    T.BANG,
    T.BEGIN,
}


_ITEM_STARTABLE = {
    T.LET,
    T.TYPE,
    T.MODULE,
    T.OPEN,
    T.INCLUDE,
    T.EXCEPTION,
    T.LOCAL,
    T.PRIVATE,
    T.INT,
    T.STRING,
    T.TRUE,
    T.FALSE,
    T.LPAREN,
    T.IDENT,
    T.UIDENT,
    T.FUN,
    T.MATCH,
    T.TRY,
    T.IF,
    T.RAISE,
    T.ASSERT,
    T.BANG,
    T.BEGIN,
}


class _Parser:
    def __init__(self, source: str, filename: str):
        self.file = filename
        self.tokens = tokenize(source, filename)
        eof_span = (
            self.tokens[-1].span if self.tokens else SourceSpan(filename, 1, 0, 1, 0)
        )
        self.tokens.append(Token(T.EOF, "", None, eof_span))
        self.pos = 0
        # Structure items are newline-delimited: an application does not
        # continue onto a new line with a token that could begin an item,
        # except inside parentheses (each struct/sig body opens a new frame).
        self.groups = [0]

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead=0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, *kinds) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not T.EOF:
            self.pos += 1
        return tok

    def expect(self, kind) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            self.fail(tok, {kind})
        return self.advance()

    def fail(self, tok, expected):
        msg = "Syntax error"
        raise ParseError(msg, tok.span, expected={k.value for k in expected})

    def line_continues(self) -> bool:
        """Whether the next token may continue the current application."""
        if self.groups[-1] > 0:
            return True
        prev = self.tokens[max(self.pos - 1, 0)]
        nxt = self.peek()
        if nxt.span.start_line == prev.span.end_line:
            return True
        return nxt.kind not in _ITEM_STARTABLE

    def whole_span(self, items) -> SourceSpan:
        if not items:
            return SourceSpan(self.file, 1, 0, 1, 0)
        return items[0].span.merge(items[-1].span)

    # -- structures --------------------------------------------------------

    def struct_items(self, stop) -> list:
        self.groups.append(0)
        try:
            items = []
            while not self.at(*stop):
                items.append(self.struct_item())
            return items
        finally:
            self.groups.pop()

    def struct_item(self) -> ast.StructItem:
        tok = self.peek()
        if tok.kind is T.LET:
            return self.let_item()
        if tok.kind is T.TYPE:
            return self.type_item()
        if tok.kind is T.MODULE:
            if self.peek(1).kind is T.TYPE:
                return self.modtype_item()
            return self.module_item()
        if tok.kind is T.EXCEPTION:
            return self.exception_item(ast.SiException)
        if tok.kind is T.OPEN:
            self.advance()
            m = self.mod_expr()
            return ast.SiOpen(m, tok.span.merge(m.span))
        if tok.kind is T.INCLUDE:
            self.advance()
            m = self.mod_expr()
            return ast.SiInclude(m, tok.span.merge(m.span))
        if tok.kind is T.LOCAL:
            self.advance()
            first = self.struct_items(stop={T.IN, T.EOF})
            self.expect(T.IN)
            second = self.struct_items(stop={T.END, T.EOF})
            end = self.expect(T.END)
            return ast.SiLocal(first, second, tok.span.merge(end.span))
        if tok.kind is T.PRIVATE:
            self.advance()
            item = self.struct_item()
            return ast.SiPrivate(item, tok.span.merge(item.span))
        if tok.kind in _EXPR_START:
            e = self.expr()
            return ast.SiExpr(e, e.span)
        self.fail(tok, _EXPR_START | {T.LET, T.TYPE, T.MODULE, T.OPEN})

    def let_item(self) -> ast.SiLet:
        start = self.expect(T.LET)
        rec = bool(self.at(T.REC)) and bool(self.advance())
        bindings = [self.let_binding()]
        while self.at(T.AND):
            self.advance()
            bindings.append(self.let_binding())
        span = start.span.merge(bindings[-1].body.span)
        return ast.SiLet(rec, bindings, span)

    def let_binding(self) -> ast.LetBinding:
        if self.at(T.UNDERSCORE):
            name = self.advance()
            name_text = "_"
        else:
            name = self.expect(T.IDENT)
            name_text = name.value
        params = []
        while not self.at(T.EQ):
            params.append(self.param_pattern())
        self.expect(T.EQ)
        body = self.expr()
        return ast.LetBinding(name_text, params, body, name.span)

    def param_pattern(self) -> ast.Pattern:
        tok = self.peek()
        if tok.kind is T.IDENT:
            self.advance()
            return ast.PVar(tok.value, None, tok.span)
        if tok.kind is T.UNDERSCORE:
            self.advance()
            return ast.PWild(tok.span)
        if tok.kind is T.UIDENT:
            path, span = self.upath()
            return ast.PConstr(path, [], span)
        if tok.kind is T.LPAREN:
            self.advance()
            if self.at(T.RPAREN):
                close = self.advance()
                return ast.PUnit(tok.span.merge(close.span))
            inner = self.pattern()
            if self.at(T.COLON) and isinstance(inner, ast.PVar):
                self.advance()
                inner.annot = self.type_expr()
            close = self.expect(T.RPAREN)
            inner.span = tok.span.merge(close.span)
            return inner
        self.fail(tok, {T.IDENT, T.UNDERSCORE, T.LPAREN, T.UIDENT})

    def type_item(self) -> ast.SiType:
        start = self.expect(T.TYPE)
        nonrec = bool(self.at(T.NONREC)) and bool(self.advance())
        defs = [self.type_defn()]
        while self.at(T.AND):
            self.advance()
            defs.append(self.type_defn())
        return ast.SiType(nonrec, defs, start.span.merge(self.prev_span()))

    def prev_span(self) -> SourceSpan:
        return self.tokens[max(self.pos - 1, 0)].span

    def type_params(self) -> list:
        if self.at(T.TYVAR):
            return [self.advance().value]
        if self.at(T.LPAREN) and self.peek(1).kind is T.TYVAR:
            self.advance()
            params = [self.expect(T.TYVAR).value]
            while self.at(T.COMMA):
                self.advance()
                params.append(self.expect(T.TYVAR).value)
            self.expect(T.RPAREN)
            return params
        return []

    def type_defn(self) -> ast.TypeDefn:
        params = self.type_params()
        name = self.expect(T.IDENT)
        manifest = None
        variant = None
        if self.at(T.EQ):
            self.advance()
            if self.at(T.BAR) or (
                self.at(T.UIDENT) and self.peek(1).kind is not T.DOT
            ):
                variant = self.variant_cases()
            else:
                manifest = self.type_expr()
                if self.at(T.EQ):
                    # re-exported datatype: type t = A.t = C | D
                    self.advance()
                    variant = self.variant_cases()
        return ast.TypeDefn(params, name.value, manifest, variant, name.span)

    def variant_cases(self) -> list:
        if self.at(T.BAR):
            self.advance()
        cases = [self.variant_case()]
        while self.at(T.BAR):
            self.advance()
            cases.append(self.variant_case())
        return cases

    def variant_case(self):
        name = self.expect(T.UIDENT)
        args = []
        if self.at(T.OF):
            self.advance()
            args.append(self.type_app())
            while self.at(T.STAR):
                self.advance()
                args.append(self.type_app())
        return (name.value, args)

    def module_item(self) -> ast.SiModule:
        start = self.expect(T.MODULE)
        name = self.expect(T.UIDENT)
        params = []
        while self.at(T.LPAREN):
            self.advance()
            pname = self.expect(T.UIDENT)
            self.expect(T.COLON)
            ptype = self.mod_type()
            self.expect(T.RPAREN)
            params.append((pname.value, ptype))
        annot = None
        if self.at(T.COLON):
            self.advance()
            annot = self.mod_type()
        self.expect(T.EQ)
        body = self.mod_expr()
        if annot is not None:
            body = ast.MeAscribe(body, annot, body.span)
        return ast.SiModule(
            name.value, params, body, name.span, start.span.merge(body.span)
        )

    def modtype_item(self) -> ast.SiModType:
        start = self.expect(T.MODULE)
        self.expect(T.TYPE)
        name = self.expect(T.UIDENT)
        self.expect(T.EQ)
        body = self.mod_type()
        return ast.SiModType(name.value, body, name.span, start.span.merge(body.span))

    def exception_item(self, ctor):
        start = self.expect(T.EXCEPTION)
        name = self.expect(T.UIDENT)
        args = []
        if self.at(T.OF):
            self.advance()
            args.append(self.type_app())
            while self.at(T.STAR):
                self.advance()
                args.append(self.type_app())
        return ctor(name.value, args, name.span, start.span.merge(self.prev_span()))

    # -- signatures ----------------------------------------------------------

    def sig_items(self, stop) -> list:
        items = []
        while not self.at(*stop):
            items.append(self.sig_item())
        return items

    def sig_item(self) -> ast.SigItemSurface:
        tok = self.peek()
        if tok.kind is T.VAL:
            self.advance()
            name = self.expect(T.IDENT)
            self.expect(T.COLON)
            annot = self.type_expr()
            return ast.SgVal(name.value, annot, name.span, tok.span.merge(annot.span))
        if tok.kind is T.TYPE:
            return self.sig_type_item()
        if tok.kind is T.MODULE:
            if self.peek(1).kind is T.TYPE:
                return self.sig_modtype_item()
            self.advance()
            name = self.expect(T.UIDENT)
            self.expect(T.COLON)
            annot = self.mod_type()
            return ast.SgModule(
                name.value, annot, name.span, tok.span.merge(annot.span)
            )
        if tok.kind is T.EXCEPTION:
            return self.exception_item(ast.SgException)
        if tok.kind is T.OPEN:
            self.advance()
            m = self.mod_expr()
            return ast.SgOpen(m, tok.span.merge(m.span))
        if tok.kind is T.INCLUDE:
            self.advance()
            mt = self.mod_type()
            return ast.SgInclude(mt, tok.span.merge(mt.span))
        if tok.kind is T.LOCAL:
            self.advance()
            first = self.sig_items(stop={T.IN, T.EOF})
            self.expect(T.IN)
            second = self.sig_items(stop={T.END, T.EOF})
            end = self.expect(T.END)
            return ast.SgLocal(first, second, tok.span.merge(end.span))
        self.fail(tok, {T.VAL, T.TYPE, T.MODULE, T.EXCEPTION, T.OPEN, T.INCLUDE})

    def sig_type_item(self):
        start = self.expect(T.TYPE)
        nonrec = bool(self.at(T.NONREC)) and bool(self.advance())
        mark = self.pos
        params = self.type_params()
        name = self.expect(T.IDENT)
        if self.at(T.COLONEQ):
            self.advance()
            rhs = self.type_expr()
            return ast.SgTypeSubst(
                params, name.value, rhs, name.span, start.span.merge(rhs.span)
            )
        self.pos = mark
        defs = [self.type_defn()]
        while self.at(T.AND):
            self.advance()
            defs.append(self.type_defn())
        return ast.SgType(nonrec, defs, start.span.merge(self.prev_span()))

    def sig_modtype_item(self):
        start = self.expect(T.MODULE)
        self.expect(T.TYPE)
        name = self.expect(T.UIDENT)
        body = None
        if self.at(T.EQ):
            self.advance()
            body = self.mod_type()
        return ast.SgModType(
            name.value, body, name.span, start.span.merge(self.prev_span())
        )

    # -- module expressions --------------------------------------------------

    def mod_expr(self) -> ast.ModExpr:
        me = self.mod_expr_atom()
        while self.at(T.LPAREN):
            self.advance()
            arg = self.mod_expr()
            close = self.expect(T.RPAREN)
            me = ast.MeApply(me, arg, me.span.merge(close.span))
        return me

    def mod_expr_atom(self) -> ast.ModExpr:
        tok = self.peek()
        if tok.kind is T.UIDENT:
            path, span = self.dotted_upath()
            return ast.MePath(path, span)
        if tok.kind is T.STRUCT:
            self.advance()
            items = self.struct_items(stop={T.END, T.EOF})
            end = self.expect(T.END)
            return ast.MeStruct(items, tok.span.merge(end.span))
        if tok.kind is T.FUNCTOR:
            self.advance()
            self.expect(T.LPAREN)
            pname = self.expect(T.UIDENT)
            self.expect(T.COLON)
            ptype = self.mod_type()
            self.expect(T.RPAREN)
            self.expect(T.ARROW)
            body = self.mod_expr()
            return ast.MeFunctor(pname.value, ptype, body, tok.span.merge(body.span))
        if tok.kind is T.LPAREN:
            self.advance()
            inner = self.mod_expr()
            if self.at(T.COLON):
                self.advance()
                annot = self.mod_type()
                close = self.expect(T.RPAREN)
                return ast.MeAscribe(inner, annot, tok.span.merge(close.span))
            close = self.expect(T.RPAREN)
            inner.span = tok.span.merge(close.span)
            return inner
        self.fail(tok, {T.UIDENT, T.STRUCT, T.FUNCTOR, T.LPAREN})

    def dotted_upath(self):
        """A dotted module path: A or A.B.C (no applications)."""
        name = self.expect(T.UIDENT)
        path: ast.PathSyn = ast.PsId(name.value, name.span)
        span = name.span
        while self.at(T.DOT) and self.peek(1).kind is T.UIDENT:
            self.advance()
            comp = self.expect(T.UIDENT)
            span = span.merge(comp.span)
            path = ast.PsDot(path, comp.value, span)
        return path, span

    def upath(self):
        """A (possibly dotted) capitalized path; used for constructors."""
        return self.dotted_upath()

    def module_path(self):
        """A module path that may embed applications: A.F(B).C."""
        name = self.expect(T.UIDENT)
        path: ast.PathSyn = ast.PsId(name.value, name.span)
        span = name.span
        while True:
            if self.at(T.DOT) and self.peek(1).kind is T.UIDENT:
                self.advance()
                comp = self.expect(T.UIDENT)
                span = span.merge(comp.span)
                path = ast.PsDot(path, comp.value, span)
            elif self.at(T.LPAREN) and self.peek(1).kind is T.UIDENT:
                self.advance()
                arg, _ = self.module_path()
                close = self.expect(T.RPAREN)
                span = span.merge(close.span)
                path = ast.PsApply(path, arg, span)
            else:
                return path, span

    # -- module types ----------------------------------------------------------

    def mod_type(self) -> ast.ModTypeExpr:
        mt = self.mod_type_atom()
        while self.at(T.WITH):
            self.advance()
            mt = self.with_constraint(mt)
            while self.at(T.AND):
                self.advance()
                mt = self.with_constraint(mt)
        return mt

    def with_constraint(self, base) -> ast.MtWith:
        self.expect(T.TYPE)
        params = self.type_params()
        name = self.expect(T.IDENT)
        if self.at(T.COLONEQ):
            self.advance()
            mode = "substitute"
        else:
            self.expect(T.EQ)
            mode = "equal"
        rhs = self.type_expr()
        return ast.MtWith(base, params, name.value, mode, rhs, base.span.merge(rhs.span))

    def mod_type_atom(self) -> ast.ModTypeExpr:
        tok = self.peek()
        if tok.kind is T.UIDENT:
            path, span = self.dotted_upath()
            return ast.MtName(path, span)
        if tok.kind is T.SIG:
            self.advance()
            items = self.sig_items(stop={T.END, T.EOF})
            end = self.expect(T.END)
            return ast.MtSig(items, tok.span.merge(end.span))
        if tok.kind is T.FUNCTOR:
            self.advance()
            self.expect(T.LPAREN)
            pname = self.expect(T.UIDENT)
            self.expect(T.COLON)
            ptype = self.mod_type()
            self.expect(T.RPAREN)
            self.expect(T.ARROW)
            result = self.mod_type()
            return ast.MtFunctor(
                pname.value, ptype, result, tok.span.merge(result.span)
            )
        if tok.kind is T.LPAREN:
            self.advance()
            inner = self.mod_type()
            close = self.expect(T.RPAREN)
            inner.span = tok.span.merge(close.span)
            return inner
        self.fail(tok, {T.UIDENT, T.SIG, T.FUNCTOR, T.LPAREN})

    # -- core type expressions ---------------------------------------------------

    def type_expr(self) -> ast.TypeExpr:
        lhs = self.type_tuple()
        if self.at(T.ARROW):
            self.advance()
            rhs = self.type_expr()
            return ast.TxArrow(lhs, rhs, lhs.span.merge(rhs.span))
        return lhs

    def type_tuple(self) -> ast.TypeExpr:
        first = self.type_app()
        if not self.at(T.STAR):
            return first
        items = [first]
        while self.at(T.STAR):
            self.advance()
            items.append(self.type_app())
        return ast.TxTuple(items, items[0].span.merge(items[-1].span))

    def type_app(self) -> ast.TypeExpr:
        t = self.type_atom()
        while self.at(T.IDENT) or (self.at(T.UIDENT) and self._peek_type_path()):
            path, span = self.type_path()
            t = ast.TxConstr(path, [t], t.span.merge(span))
        return t

    def _peek_type_path(self) -> bool:
        # A capitalized token continues a type application only as a module
        # prefix of a dotted lowercase name (e.g. `int Option.t`).
        mark = self.pos
        try:
            self.type_path()
            return True
        except ParseError:
            return False
        finally:
            self.pos = mark

    def type_path(self):
        """Path of a type constructor: t, M.t, F(M).t."""
        if self.at(T.IDENT):
            tok = self.advance()
            return ast.PsId(tok.value, tok.span), tok.span
        mpath, span = self.module_path()
        self.expect(T.DOT)
        comp = self.expect(T.IDENT)
        return ast.PsDot(mpath, comp.value, span.merge(comp.span)), span.merge(
            comp.span
        )

    def type_atom(self) -> ast.TypeExpr:
        tok = self.peek()
        if tok.kind is T.TYVAR:
            self.advance()
            return ast.TxVar(tok.value, tok.span)
        if tok.kind in (T.IDENT, T.UIDENT):
            path, span = self.type_path()
            return ast.TxConstr(path, [], span)
        if tok.kind is T.LPAREN:
            self.advance()
            args = [self.type_expr()]
            while self.at(T.COMMA):
                self.advance()
                args.append(self.type_expr())
            close = self.expect(T.RPAREN)
            if len(args) == 1:
                args[0].span = tok.span.merge(close.span)
                return args[0]
            path, span = self.type_path()
            return ast.TxConstr(path, args, tok.span.merge(span))
        self.fail(tok, {T.TYVAR, T.IDENT, T.UIDENT, T.LPAREN})

    # -- patterns -------------------------------------------------------------

    def pattern(self) -> ast.Pattern:
        tok = self.peek()
        if tok.kind is T.UIDENT:
            path, span = self.upath()
            args = []
            if self.at(T.IDENT, T.UNDERSCORE):
                args = [self.param_pattern()]
            elif self.at(T.LPAREN) and self.peek(1).kind in (
                T.IDENT,
                T.UNDERSCORE,
            ):
                self.advance()
                args = [self.param_pattern()]
                while self.at(T.COMMA):
                    self.advance()
                    args.append(self.param_pattern())
                close = self.expect(T.RPAREN)
                span = span.merge(close.span)
            return ast.PConstr(path, args, span)
        if tok.kind is T.INT:
            self.advance()
            return ast.PLit(tok.value, tok.span)
        if tok.kind is T.STRING:
            self.advance()
            return ast.PLit(tok.value, tok.span)
        if tok.kind in (T.TRUE, T.FALSE):
            self.advance()
            return ast.PLit(tok.kind is T.TRUE, tok.span)
        return self.param_pattern()

    # -- expressions ------------------------------------------------------------

    def expr(self, allow_semi: bool = True) -> ast.Expr:
        tok = self.peek()
        if tok.kind is T.FUN:
            return self.fun_expr()
        if tok.kind is T.LET:
            return self.let_expr()
        if tok.kind is T.MATCH:
            return self.match_expr()
        if tok.kind is T.TRY:
            return self.try_expr()
        if tok.kind is T.IF:
            return self.if_expr(allow_semi)
        first = self.assign_expr()
        if allow_semi and self.at(T.SEMI):
            self.advance()
            rest = self.expr()
            return ast.ESequence(first, rest, first.span.merge(rest.span))
        return first

    def fun_expr(self) -> ast.Expr:
        start = self.expect(T.FUN)
        params = [self.param_pattern()]
        while not self.at(T.ARROW):
            params.append(self.param_pattern())
        self.expect(T.ARROW)
        body = self.expr()
        for p in reversed(params):
            body = ast.EFun(p, body, start.span.merge(body.span))
        return body

    def let_expr(self) -> ast.Expr:
        start = self.expect(T.LET)
        if self.at(T.MODULE):
            self.advance()
            name = self.expect(T.UIDENT)
            self.expect(T.EQ)
            me = self.mod_expr()
            self.expect(T.IN)
            body = self.expr()
            return ast.ELetModuleIn(name.value, me, body, start.span.merge(body.span))
        if self.at(T.EXCEPTION):
            self.advance()
            name = self.expect(T.UIDENT)
            args = []
            if self.at(T.OF):
                self.advance()
                args.append(self.type_app())
                while self.at(T.STAR):
                    self.advance()
                    args.append(self.type_app())
            self.expect(T.IN)
            body = self.expr()
            return ast.ELetExceptionIn(
                name.value, args, body, start.span.merge(body.span)
            )
        if self.at(T.OPEN):
            self.advance()
            me = self.mod_expr()
            self.expect(T.IN)
            body = self.expr()
            return ast.ELetOpenIn(me, body, start.span.merge(body.span))
        rec = bool(self.at(T.REC)) and bool(self.advance())
        bindings = [self.let_binding()]
        while self.at(T.AND):
            self.advance()
            bindings.append(self.let_binding())
        self.expect(T.IN)
        body = self.expr()
        return ast.ELetIn(rec, bindings, body, start.span.merge(body.span))

    def match_expr(self) -> ast.Expr:
        start = self.expect(T.MATCH)
        scrutinee = self.expr()
        self.expect(T.WITH)
        cases = self.cases()
        span = start.span.merge(cases[-1].body.span)
        return ast.EMatch(scrutinee, cases, span)

    def try_expr(self) -> ast.Expr:
        start = self.expect(T.TRY)
        body = self.expr()
        self.expect(T.WITH)
        cases = self.cases()
        span = start.span.merge(cases[-1].body.span)
        return ast.ETry(body, cases, span)

    def cases(self) -> list:
        if self.at(T.BAR):
            self.advance()
        cases = [self.case()]
        while self.at(T.BAR):
            self.advance()
            cases.append(self.case())
        return cases

    def case(self) -> ast.ECase:
        is_exception = False
        if self.at(T.EXCEPTION):
            self.advance()
            is_exception = True
        pat = self.pattern()
        self.expect(T.ARROW)
        body = self.expr()
        return ast.ECase(pat, body, is_exception)

    def if_expr(self, allow_semi: bool) -> ast.Expr:
        start = self.expect(T.IF)
        cond = self.expr(allow_semi=False)
        self.expect(T.THEN)
        then = self.expr(allow_semi=False)
        orelse = None
        span = start.span.merge(then.span)
        if self.at(T.ELSE):
            self.advance()
            orelse = self.expr(allow_semi=False)
            span = start.span.merge(orelse.span)
        result: ast.Expr = ast.EIf(cond, then, orelse, span)
        if allow_semi and self.at(T.SEMI):
            self.advance()
            rest = self.expr()
            result = ast.ESequence(result, rest, result.span.merge(rest.span))
        return result

    def assign_expr(self) -> ast.Expr:
        lhs = self.cmp_expr()
        if self.at(T.COLONEQ):
            op = self.advance()
            rhs = (
                self.expr(allow_semi=False)
                if self.peek().kind in (T.FUN, T.LET, T.MATCH, T.TRY, T.IF)
                else self.assign_expr()
            )
            return self.infix(":=", op.span, lhs, rhs)
        return lhs

    def cmp_expr(self) -> ast.Expr:
        lhs = self.add_expr()
        while self.at(T.EQ, T.LT):
            op = self.advance()
            rhs = self.add_expr()
            lhs = self.infix(op.text, op.span, lhs, rhs)
        return lhs

    def add_expr(self) -> ast.Expr:
        lhs = self.mul_expr()
        while self.at(T.PLUS, T.MINUS):
            op = self.advance()
            rhs = self.mul_expr()
            lhs = self.infix(op.text, op.span, lhs, rhs)
        return lhs

    def mul_expr(self) -> ast.Expr:
        lhs = self.app_expr()
        while self.at(T.STAR):
            op = self.advance()
            rhs = self.app_expr()
            lhs = self.infix(op.text, op.span, lhs, rhs)
        return lhs

    def infix(self, op: str, op_span, lhs, rhs) -> ast.Expr:
        span = lhs.span.merge(rhs.span)
        f = ast.EVar(ast.PsId(op, op_span), op_span)
        return ast.EApply(ast.EApply(f, lhs, span), rhs, span)

    def app_expr(self) -> ast.Expr:
        if self.at(T.RAISE):
            tok = self.advance()
            arg = self.app_expr()
            return ast.ERaise(arg, tok.span.merge(arg.span))
        if self.at(T.ASSERT):
            tok = self.advance()
            arg = self.app_expr()
            return ast.EAssert(arg, tok.span.merge(arg.span))
        f = self.atom_expr()
        while self.peek().kind in _ATOM_START and self.line_continues():
            arg = self.atom_expr()
            f = ast.EApply(f, arg, f.span.merge(arg.span))
        return f

    def atom_expr(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind is T.INT:
            self.advance()
            return ast.EInt(tok.value, tok.span)
        if tok.kind is T.MINUS:
            self.advance()
            num = self.expect(T.INT)
            return ast.EInt(-num.value, tok.span.merge(num.span))
        if tok.kind is T.STRING:
            self.advance()
            return ast.EString(tok.value, tok.span)
        if tok.kind in (T.TRUE, T.FALSE):
            self.advance()
            return ast.EBool(tok.kind is T.TRUE, tok.span)
        if tok.kind is T.BANG:
            self.advance()
            arg = self.atom_expr()
            f = ast.EVar(ast.PsId("!", tok.span), tok.span)
            return ast.EApply(f, arg, tok.span.merge(arg.span))
        if tok.kind is T.IDENT:
            self.advance()
            return ast.EVar(ast.PsId(tok.value, tok.span), tok.span)
        if tok.kind is T.UIDENT:
            return self.long_ident_expr()
        if tok.kind is T.BEGIN:
            self.advance()
            self.groups[-1] += 1
            try:
                inner = self.expr()
            finally:
                self.groups[-1] -= 1
            close = self.expect(T.END)
            inner.span = tok.span.merge(close.span)
            return inner
        if tok.kind is T.LPAREN:
            self.advance()
            if self.at(T.RPAREN):
                close = self.advance()
                return ast.EUnit(tok.span.merge(close.span))
            self.groups[-1] += 1
            try:
                items = [self.expr()]
                while self.at(T.COMMA):
                    self.advance()
                    items.append(self.expr())
            finally:
                self.groups[-1] -= 1
            close = self.expect(T.RPAREN)
            if len(items) == 1:
                items[0].span = tok.span.merge(close.span)
                return items[0]
            return ast.ETuple(items, tok.span.merge(close.span))
        self.fail(tok, _ATOM_START)

    def long_ident_expr(self) -> ast.Expr:
        """A qualified name: M.x is a variable, M.C (or bare C) a constructor."""
        name = self.expect(T.UIDENT)
        path: ast.PathSyn = ast.PsId(name.value, name.span)
        span = name.span
        while self.at(T.DOT):
            self.advance()
            comp = self.peek()
            if comp.kind is T.IDENT:
                self.advance()
                span = span.merge(comp.span)
                return ast.EVar(ast.PsDot(path, comp.value, span), span)
            comp = self.expect(T.UIDENT)
            span = span.merge(comp.span)
            path = ast.PsDot(path, comp.value, span)
        if self.peek().kind in _ATOM_START and self.line_continues():
            arg = self.atom_expr()
            return ast.EConstr(path, arg, span.merge(arg.span))
        return ast.EConstr(path, None, span)
