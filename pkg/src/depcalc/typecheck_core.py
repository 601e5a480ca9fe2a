"""Checkers for the graded monadic (GMC), comonadic (GCC) and combined (GMCC) calculi."""

from __future__ import annotations

from .checker import Calculus, Checker
from .errors import GradeNotLeq, TypeMismatch
from .syntax import (
    PLAIN_CONSTRUCTORS,
    Extr,
    Fork,
    Fun,
    Join,
    Lift,
    Modal,
    Ret,
    Term,
    Type,
    Up,
)

_MONADIC = {Ret, Lift, Join, Up}
_COMONADIC = {Extr, Lift, Fork, Up}

ADMITTED = {
    Calculus.GMC: frozenset(PLAIN_CONSTRUCTORS) | _MONADIC,
    Calculus.GCC: frozenset(PLAIN_CONSTRUCTORS) | _COMONADIC,
    Calculus.GMCC: frozenset(PLAIN_CONSTRUCTORS) | _MONADIC | _COMONADIC,
}


class CoreChecker(Checker):
    def __init__(self, algebra, calculus: Calculus = Calculus.GMCC):
        super().__init__(algebra)
        if calculus not in ADMITTED:
            raise ValueError(f"{calculus} is not one of gmc, gcc, gmcc")
        self.calculus = calculus
        self.admitted = ADMITTED[calculus]

    def modal(self, ty, grade, ctx, t) -> Type:
        """Body of ``ty`` after insisting it is ``S[grade] _``."""
        if not isinstance(ty, Modal) or ty.grade != grade:
            want = f"S[{grade}] _"
            raise TypeMismatch(want, ty, self.where(ctx, t))
        return ty.body

    def needs_domain(self, t: Term) -> bool:
        if isinstance(t, Lift):
            return self.needs_domain(t.fn)
        return super().needs_domain(t)

    def infer_with_domain(self, ctx, fn, dom, m):
        if isinstance(fn, Lift) and self.needs_domain(fn):
            self._admit(fn)
            inner = self.modal(dom, fn.grade, ctx, fn)
            fty, f = self.infer_with_domain(ctx, fn.fn, inner, m)
            g = fn.grade
            return Fun(Modal(g, fty.dom), Modal(g, fty.cod)), Lift(g, f, fty.dom)
        return super().infer_with_domain(ctx, fn, dom, m)

    # ret / extr

    def _infer_Ret(self, ctx, t: Ret, m):
        a, arg = self.infer(ctx, t.arg, m)
        return Modal(self.algebra.unit, a), Ret(arg)

    def _check_Ret(self, ctx, t: Ret, ty, m):
        body = self.modal(ty, self.algebra.unit, ctx, t)
        return Ret(self.check(ctx, t.arg, body, m))

    def _infer_Extr(self, ctx, t: Extr, m):
        a, arg = self.infer(ctx, t.arg, m)
        return self.modal(a, self.algebra.unit, ctx, t.arg), Extr(arg)

    def _check_Extr(self, ctx, t: Extr, ty, m):
        return Extr(self.check(ctx, t.arg, Modal(self.algebra.unit, ty), m))

    # lift

    def _infer_Lift(self, ctx, t: Lift, m):
        self.algebra.require(t.grade)
        fty, fn = self.infer(ctx, t.fn, m)
        if not isinstance(fty, Fun):
            raise TypeMismatch("a function type", fty, self.where(ctx, t.fn))
        g = t.grade
        return Fun(Modal(g, fty.dom), Modal(g, fty.cod)), Lift(g, fn, fty.dom)

    def _check_Lift(self, ctx, t: Lift, ty, m):
        self.algebra.require(t.grade)
        if not isinstance(ty, Fun):
            raise TypeMismatch(ty, "a lifted function", self.where(ctx, t))
        dom = self.modal(ty.dom, t.grade, ctx, t)
        cod = self.modal(ty.cod, t.grade, ctx, t)
        return Lift(t.grade, self.check(ctx, t.fn, Fun(dom, cod), m), dom)

    # join / fork

    def _infer_Join(self, ctx, t: Join, m):
        g = self.algebra.op(t.g1, t.g2)
        a, arg = self.infer(ctx, t.arg, m)
        inner = self.modal(self.modal(a, t.g1, ctx, t.arg), t.g2, ctx, t.arg)
        return Modal(g, inner), Join(t.g1, t.g2, arg)

    def _check_Join(self, ctx, t: Join, ty, m):
        body = self.modal(ty, self.algebra.op(t.g1, t.g2), ctx, t)
        arg = self.check(ctx, t.arg, Modal(t.g1, Modal(t.g2, body)), m)
        return Join(t.g1, t.g2, arg)

    def _infer_Fork(self, ctx, t: Fork, m):
        g = self.algebra.op(t.g1, t.g2)
        a, arg = self.infer(ctx, t.arg, m)
        body = self.modal(a, g, ctx, t.arg)
        return Modal(t.g1, Modal(t.g2, body)), Fork(t.g1, t.g2, arg)

    def _check_Fork(self, ctx, t: Fork, ty, m):
        g = self.algebra.op(t.g1, t.g2)
        body = self.modal(self.modal(ty, t.g1, ctx, t), t.g2, ctx, t)
        return Fork(t.g1, t.g2, self.check(ctx, t.arg, Modal(g, body), m))

    # up

    def _up_ok(self, ctx, t: Up):
        if not self.algebra.leq(t.g1, t.g2):
            raise GradeNotLeq(t.g1, t.g2, self.where(ctx, t))

    def _infer_Up(self, ctx, t: Up, m):
        self._up_ok(ctx, t)
        a, arg = self.infer(ctx, t.arg, m)
        return Modal(t.g2, self.modal(a, t.g1, ctx, t.arg)), Up(t.g1, t.g2, arg)

    def _check_Up(self, ctx, t: Up, ty, m):
        self._up_ok(ctx, t)
        body = self.modal(ty, t.g2, ctx, t)
        return Up(t.g1, t.g2, self.check(ctx, t.arg, Modal(t.g1, body), m))


def elaborate_core(algebra, calculus, ctx, t, expected: Type | None = None):
    """Return ``(type, elaborated term)``; with ``expected`` the term is checked against it."""
    checker = CoreChecker(algebra, Calculus(calculus))
    if expected is not None:
        return expected, checker.check(tuple(ctx), t, expected)
    return checker.infer(tuple(ctx), t)


def infer_core(algebra, calculus, ctx, t) -> Type:
    return elaborate_core(algebra, calculus, ctx, t)[0]


def check_core(algebra, calculus, ctx, t, expected: Type) -> None:
    elaborate_core(algebra, calculus, ctx, t, expected)
