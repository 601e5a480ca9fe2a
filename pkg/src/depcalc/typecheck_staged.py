"""Graded-context checkers: the staged calculus λ° and GMCC_e.

Both judge ``ctx ⊢ t :^m A``.  A variable bound at grade ``m1`` is visible at
``m`` when ``m1 ≤ m``; over the naturals the order is discrete, which gives λ°
its "only at your own time" variable rule.  ``merge`` has to recover the grade
of its argument from the grade of the result, so the checker tries the
maximal candidates (subtraction over the naturals).
"""

from __future__ import annotations

from .algebra import NATURALS
from .checker import Calculus, Checker
from .errors import GradeNotLeq, TimeMismatch, TypeCheckError, TypeMismatch
from .syntax import (
    PLAIN_CONSTRUCTORS,
    Abort,
    Merge,
    Modal,
    Next,
    Pair,
    Prev,
    Proj,
    Split,
    Type,
    Up,
)


class GradedChecker(Checker):
    graded = True

    def grade_error(self, found, m, where):
        return GradeNotLeq(found, m, where)

    def var_grade(self, ctx, t, entry, m):
        if not self.algebra.leq(entry.grade, m):
            raise self.grade_error(entry.grade, m, self.where(ctx, t))

    def modal(self, ty, grade, ctx, t):
        if not isinstance(ty, Modal) or ty.grade != grade:
            raise TypeMismatch(f"S[{grade}] _", ty, self.where(ctx, t))
        return ty.body

    def merge_candidates(self, g, m) -> list:
        """Grades ``m1`` with ``m1·g ≤ m``, keeping only the maximal ones."""
        alg = self.algebra
        if not alg.is_finite:
            return [m - g] if m >= g else []
        fits = [c for c in alg.elements if alg.leq(alg.op(c, g), m)]
        return [c for c in fits if not any(alg.leq(c, d) and not alg.leq(d, c) for d in fits)]

    def _try_merge(self, ctx, t, m, run):
        errors = []
        for m1 in self.merge_candidates(t.grade, m):
            try:
                return run(m1)
            except TypeCheckError as exc:
                errors.append(exc)
        if errors:
            raise errors[0]
        raise self.grade_error(t.grade, m, self.where(ctx, t))


class GmcceChecker(GradedChecker):
    calculus = Calculus.GMCCE
    admitted = frozenset(PLAIN_CONSTRUCTORS) | {Split, Merge, Up}

    def _infer_Split(self, ctx, t: Split, m):
        inner = self.algebra.op(m, t.grade)
        a, arg = self.infer(ctx, t.arg, inner)
        return Modal(t.grade, a), Split(t.grade, arg)

    def _check_Split(self, ctx, t: Split, ty, m):
        body = self.modal(ty, t.grade, ctx, t)
        return Split(t.grade, self.check(ctx, t.arg, body, self.algebra.op(m, t.grade)))

    def _infer_Merge(self, ctx, t: Merge, m):
        def run(m1):
            a, arg = self.infer(ctx, t.arg, m1)
            return self.modal(a, t.grade, ctx, t.arg), Merge(t.grade, arg)

        return self._try_merge(ctx, t, m, run)

    def _check_Merge(self, ctx, t: Merge, ty, m):
        def run(m1):
            return Merge(t.grade, self.check(ctx, t.arg, Modal(t.grade, ty), m1))

        return self._try_merge(ctx, t, m, run)

    def _up_ok(self, ctx, t: Up, m):
        if not self.algebra.leq(t.g1, t.g2):
            raise GradeNotLeq(t.g1, t.g2, self.where(ctx, t))
        if not self.algebra.leq(t.g2, m):
            raise GradeNotLeq(t.g2, m, self.where(ctx, t))

    def _infer_Up(self, ctx, t: Up, m):
        self._up_ok(ctx, t, m)
        a, arg = self.infer(ctx, t.arg, t.g1)
        return a, Up(t.g1, t.g2, arg)

    def _check_Up(self, ctx, t: Up, ty, m):
        self._up_ok(ctx, t, m)
        return Up(t.g1, t.g2, self.check(ctx, t.arg, ty, t.g1))


class LcircChecker(GradedChecker):
    calculus = Calculus.LCIRC
    admitted = frozenset(PLAIN_CONSTRUCTORS) - {Pair, Proj, Abort} | {Next, Prev}

    def __init__(self):
        super().__init__(NATURALS)

    def grade_error(self, found, m, where):
        return TimeMismatch(m, found, where)

    def _infer_Next(self, ctx, t: Next, n):
        a, arg = self.infer(ctx, t.arg, n + 1)
        return Modal(1, a), Next(arg)

    def _check_Next(self, ctx, t: Next, ty, n):
        body = self.modal(ty, 1, ctx, t)
        return Next(self.check(ctx, t.arg, body, n + 1))

    def _infer_Prev(self, ctx, t: Prev, n):
        if n < 1:
            raise TimeMismatch("a positive time", n, self.where(ctx, t))
        a, arg = self.infer(ctx, t.arg, n - 1)
        return self.modal(a, 1, ctx, t.arg), Prev(arg)

    def _check_Prev(self, ctx, t: Prev, ty, n):
        if n < 1:
            raise TimeMismatch("a positive time", n, self.where(ctx, t))
        return Prev(self.check(ctx, t.arg, Modal(1, ty), n - 1))


def _run(checker, ctx, t, m, expected):
    checker.algebra.require(m)
    ctx = tuple(ctx)
    for e in ctx:
        checker.algebra.require(e.grade)
    if expected is not None:
        return expected, checker.check(ctx, t, expected, m)
    return checker.infer(ctx, t, m)


def elaborate_lcirc(ctx, t, n: int, expected: Type | None = None):
    return _run(LcircChecker(), ctx, t, n, expected)


def infer_lcirc(ctx, t, n: int) -> Type:
    return elaborate_lcirc(ctx, t, n)[0]


def check_lcirc(ctx, t, n: int, expected: Type) -> None:
    elaborate_lcirc(ctx, t, n, expected)


def elaborate_gmcce(algebra, ctx, t, m, expected: Type | None = None):
    return _run(GmcceChecker(algebra), ctx, t, m, expected)


def infer_gmcce(algebra, ctx, t, m) -> Type:
    return elaborate_gmcce(algebra, ctx, t, m)[0]


def check_gmcce(algebra, ctx, t, m, expected: Type) -> None:
    elaborate_gmcce(algebra, ctx, t, m, expected)
