"""Bidirectional checking engine shared by every calculus.

Each calculus subclasses :class:`Checker`, lists the constructors it admits and
adds ``_infer_<Constructor>`` / ``_check_<Constructor>`` methods for its modal
rules.  Graded calculi pass the judgement's grade ``m`` through every rule; the
ungraded ones leave it ``None``.

Both directions return an *elaborated* copy of the term in which every lambda,
injection and abort carries its type annotation, every ``lift`` records its
domain and every ``bind`` records its result type.  Translations and the
observer interpreter rely on those annotations.
"""

from __future__ import annotations

from enum import Enum

from .errors import (
    ConstructorNotInCalculus,
    MissingAnnotation,
    TypeMismatch,
    UnboundVariable,
)
from .syntax import (
    PLAIN_CONSTRUCTORS,
    Abort,
    App,
    Case,
    Entry,
    Fun,
    Inj,
    Lam,
    Pair,
    Prod,
    Proj,
    Sum,
    Term,
    Type,
    Unit,
    UnitVal,
    Var,
    Void,
    lookup,
    print_term,
)


class Calculus(str, Enum):
    GMC = "gmc"
    GCC = "gcc"
    GMCC = "gmcc"
    DCC = "dcc"
    DCCE = "dcce"
    LCIRC = "lcirc"
    GMCCE = "gmcce"

    @property
    def graded(self) -> bool:
        return self in (Calculus.LCIRC, Calculus.GMCCE)


class Checker:
    calculus: Calculus
    admitted: frozenset = frozenset(PLAIN_CONSTRUCTORS)
    graded = False

    def __init__(self, algebra):
        self.algebra = algebra

    # ------------------------------------------------------------ entry points

    def infer(self, ctx: tuple, t: Term, m=None) -> tuple[Type, Term]:
        self._admit(t)
        return getattr(self, "_infer_" + type(t).__name__)(ctx, t, m)

    def check(self, ctx: tuple, t: Term, ty: Type, m=None) -> Term:
        self._admit(t)
        rule = getattr(self, "_check_" + type(t).__name__, None)
        if rule is not None:
            return rule(ctx, t, ty, m)
        found, out = self.infer(ctx, t, m)
        self.expect(ty, found, ctx, t)
        return out

    # ------------------------------------------------------------ helpers

    def _admit(self, t: Term):
        if type(t) not in self.admitted:
            raise ConstructorNotInCalculus(type(t).__name__, self.calculus.value)

    def where(self, ctx, t) -> str:
        return print_term(t, [e.name for e in ctx])

    def expect(self, expected: Type, found: Type, ctx, t):
        if expected != found:
            raise TypeMismatch(expected, found, self.where(ctx, t))

    def extend(self, ctx, name: str, ty: Type, m) -> tuple:
        return ctx + (Entry(name, ty, m if self.graded else None),)

    def var_grade(self, ctx, t, entry: Entry, m):
        """Graded calculi decide here whether a variable is visible at ``m``."""

    def needs_domain(self, t: Term) -> bool:
        """True when ``t`` is a function whose domain cannot be inferred from ``t`` alone."""
        return isinstance(t, Lam) and t.annot is None

    def infer_with_domain(self, ctx, fn: Term, dom: Type, m) -> tuple[Type, Term]:
        """Infer the type of a function ``fn`` once its domain is known."""
        if isinstance(fn, Lam) and fn.annot is None:
            self._admit(fn)
            cod, body = self.infer(self.extend(ctx, fn.binder, dom, m), fn.body, m)
            return Fun(dom, cod), Lam(dom, body, fn.binder)
        fty, out = self.infer(ctx, fn, m)
        if not isinstance(fty, Fun):
            raise TypeMismatch("a function type", fty, self.where(ctx, fn))
        self.expect(dom, fty.dom, ctx, fn)
        return fty, out

    # ------------------------------------------------------------ lambda core

    def _infer_Var(self, ctx, t: Var, m):
        entry = lookup(ctx, t.index)
        if entry is None:
            raise UnboundVariable(t.index)
        self.var_grade(ctx, t, entry, m)
        return entry.type, t

    def _infer_Lam(self, ctx, t: Lam, m):
        if t.annot is None:
            raise MissingAnnotation(self.where(ctx, t))
        cod, body = self.infer(self.extend(ctx, t.binder, t.annot, m), t.body, m)
        return Fun(t.annot, cod), Lam(t.annot, body, t.binder)

    def _check_Lam(self, ctx, t: Lam, ty, m):
        if not isinstance(ty, Fun):
            raise TypeMismatch(ty, "a function", self.where(ctx, t))
        if t.annot is not None:
            self.expect(ty.dom, t.annot, ctx, t)
        body = self.check(self.extend(ctx, t.binder, ty.dom, m), t.body, ty.cod, m)
        return Lam(ty.dom, body, t.binder)

    def _infer_App(self, ctx, t: App, m):
        if self.needs_domain(t.fn):
            aty, arg = self.infer(ctx, t.arg, m)
            fty, fn = self.infer_with_domain(ctx, t.fn, aty, m)
            return fty.cod, App(fn, arg)
        fty, fn = self.infer(ctx, t.fn, m)
        if not isinstance(fty, Fun):
            raise TypeMismatch("a function type", fty, self.where(ctx, t.fn))
        arg = self.check(ctx, t.arg, fty.dom, m)
        return fty.cod, App(fn, arg)

    def _check_App(self, ctx, t: App, ty, m):
        if self.needs_domain(t.fn):
            aty, arg = self.infer(ctx, t.arg, m)
            fn = self.check(ctx, t.fn, Fun(aty, ty), m)
            return App(fn, arg)
        found, out = self._infer_App(ctx, t, m)
        self.expect(ty, found, ctx, t)
        return out

    def _infer_Pair(self, ctx, t: Pair, m):
        a, fst = self.infer(ctx, t.fst, m)
        b, snd = self.infer(ctx, t.snd, m)
        return Prod(a, b), Pair(fst, snd)

    def _check_Pair(self, ctx, t: Pair, ty, m):
        if not isinstance(ty, Prod):
            raise TypeMismatch(ty, "a pair", self.where(ctx, t))
        return Pair(self.check(ctx, t.fst, ty.left, m), self.check(ctx, t.snd, ty.right, m))

    def _infer_Proj(self, ctx, t: Proj, m):
        pty, arg = self.infer(ctx, t.arg, m)
        if not isinstance(pty, Prod):
            raise TypeMismatch("a product type", pty, self.where(ctx, t.arg))
        return (pty.left if t.i == 1 else pty.right), Proj(t.i, arg)

    def _infer_Inj(self, ctx, t: Inj, m):
        if t.annot is None:
            raise MissingAnnotation(self.where(ctx, t))
        return t.annot, self._check_Inj(ctx, t, t.annot, m)

    def _check_Inj(self, ctx, t: Inj, ty, m):
        if not isinstance(ty, Sum):
            raise TypeMismatch(ty, "an injection", self.where(ctx, t))
        if t.annot is not None:
            self.expect(ty, t.annot, ctx, t)
        arg = self.check(ctx, t.arg, ty.left if t.i == 1 else ty.right, m)
        return Inj(t.i, arg, ty)

    def _scrutinee(self, ctx, t: Case, m) -> tuple[Sum, Term]:
        sty, scrut = self.infer(ctx, t.scrut, m)
        if not isinstance(sty, Sum):
            raise TypeMismatch("a sum type", sty, self.where(ctx, t.scrut))
        return sty, scrut

    def _infer_Case(self, ctx, t: Case, m):
        sty, scrut = self._scrutinee(ctx, t, m)
        fty, left = self.infer_with_domain(ctx, t.left, sty.left, m)
        right = self.check(ctx, t.right, Fun(sty.right, fty.cod), m)
        return fty.cod, Case(scrut, left, right)

    def _check_Case(self, ctx, t: Case, ty, m):
        sty, scrut = self._scrutinee(ctx, t, m)
        left = self.check(ctx, t.left, Fun(sty.left, ty), m)
        right = self.check(ctx, t.right, Fun(sty.right, ty), m)
        return Case(scrut, left, right)

    def _infer_Abort(self, ctx, t: Abort, m):
        if t.annot is None:
            raise MissingAnnotation(self.where(ctx, t))
        return t.annot, self._check_Abort(ctx, t, t.annot, m)

    def _check_Abort(self, ctx, t: Abort, ty, m):
        if t.annot is not None:
            self.expect(ty, t.annot, ctx, t)
        return Abort(self.check(ctx, t.arg, Void(), m), ty)

    def _infer_UnitVal(self, ctx, t, m):
        return Unit(), t
