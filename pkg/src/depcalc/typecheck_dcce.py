"""DCC and DCC_e: the protection judgement, bind/eta typing and the ``j`` synthesizer.

Two protection procedures live here.  Plain DCC is the syntax-directed
recursion over the four original rules.  The extended system adds a rule for
the least level and a rule closing protecting levels under binary joins; with
the second rule the set of levels protecting a type is a principal ideal, so
the decision reduces to comparing against its top element ``principal_level``.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

from .checker import Calculus, Checker
from .errors import (
    InfiniteCarrier,
    NotProtected,
    ProtectionFailure,
    RequiresSemilattice,
    TypeMismatch,
)
from .syntax import (
    PLAIN_CONSTRUCTORS,
    App,
    Base,
    Bind,
    Eta,
    Extr,
    Fork,
    Fun,
    Join,
    Lam,
    Lift,
    Modal,
    Pair,
    Prod,
    Proj,
    Sum,
    Term,
    Type,
    Unit,
    Up,
    Var,
    Void,
)


class ProtectionMode(str, Enum):
    PLAIN = "plain"
    EXTENDED = "extended"


def _require_semilattice(algebra, mode: ProtectionMode):
    if not algebra.is_finite and mode is ProtectionMode.EXTENDED:
        raise InfiniteCarrier(f"algebra {algebra.name} cannot be enumerated")
    if not algebra.is_semilattice:
        raise RequiresSemilattice(f"algebra {algebra.name} is not a join-semilattice")


@lru_cache(maxsize=None)
def _principal(algebra, ty: Type):
    if isinstance(ty, Fun):
        return _principal(algebra, ty.cod)
    if isinstance(ty, Modal):
        return algebra.op(ty.grade, _principal(algebra, ty.body))
    if isinstance(ty, Prod):
        a, b = _principal(algebra, ty.left), _principal(algebra, ty.right)
        return algebra.join(*algebra.lower_bounds(a, b))
    if isinstance(ty, (Unit, Void, Base, Sum)):
        return algebra.unit
    raise TypeError(f"not a type: {ty!r}")


def principal_level(algebra, ty: Type):
    """The greatest level protecting ``ty`` under the extended rules."""
    _require_semilattice(algebra, ProtectionMode.EXTENDED)
    return _principal(algebra, ty)


def _plain(algebra, level, ty: Type) -> bool:
    if isinstance(ty, Prod):
        return _plain(algebra, level, ty.left) and _plain(algebra, level, ty.right)
    if isinstance(ty, Fun):
        return _plain(algebra, level, ty.cod)
    if isinstance(ty, Modal):
        return algebra.leq(level, ty.grade) or _plain(algebra, level, ty.body)
    return False


def protected(algebra, mode, level, ty: Type) -> bool:
    mode = ProtectionMode(mode)
    _require_semilattice(algebra, mode)
    algebra.require(level)
    if mode is ProtectionMode.PLAIN:
        return _plain(algebra, level, ty)
    return algebra.leq(level, _principal(algebra, ty))


# ---------------------------------------------------------------- typing


class DccChecker(Checker):
    admitted = frozenset(PLAIN_CONSTRUCTORS) | {Eta, Bind}

    def __init__(self, algebra, mode=ProtectionMode.EXTENDED):
        super().__init__(algebra)
        self.mode = ProtectionMode(mode)
        self.calculus = Calculus.DCCE if self.mode is ProtectionMode.EXTENDED else Calculus.DCC
        _require_semilattice(algebra, self.mode)

    def _infer_Eta(self, ctx, t: Eta, m):
        self.algebra.require(t.grade)
        a, arg = self.infer(ctx, t.arg, m)
        return Modal(t.grade, a), Eta(t.grade, arg)

    def _check_Eta(self, ctx, t: Eta, ty, m):
        if not isinstance(ty, Modal) or ty.grade != t.grade:
            raise TypeMismatch(ty, f"T[{t.grade}] _", self.where(ctx, t))
        return Eta(t.grade, self.check(ctx, t.arg, ty.body, m))

    def _bound(self, ctx, t: Bind, m):
        self.algebra.require(t.grade)
        aty, bound = self.infer(ctx, t.bound, m)
        if not isinstance(aty, Modal) or aty.grade != t.grade:
            raise TypeMismatch(f"S[{t.grade}] _", aty, self.where(ctx, t.bound))
        return aty.body, bound

    def _protect(self, level, ty):
        if not protected(self.algebra, self.mode, level, ty):
            raise ProtectionFailure(level, ty)

    def _infer_Bind(self, ctx, t: Bind, m):
        a, bound = self._bound(ctx, t, m)
        b, body = self.infer(self.extend(ctx, t.binder, a, m), t.body, m)
        self._protect(t.grade, b)
        return b, Bind(t.grade, t.binder, bound, body, b)

    def _check_Bind(self, ctx, t: Bind, ty, m):
        a, bound = self._bound(ctx, t, m)
        body = self.check(self.extend(ctx, t.binder, a, m), t.body, ty, m)
        self._protect(t.grade, ty)
        return Bind(t.grade, t.binder, bound, body, ty)


def elaborate_dcc(algebra, mode, ctx, t, expected: Type | None = None):
    checker = DccChecker(algebra, mode)
    if expected is not None:
        return expected, checker.check(tuple(ctx), t, expected)
    return checker.infer(tuple(ctx), t)


def infer_dcc(algebra, mode, ctx, t) -> Type:
    return elaborate_dcc(algebra, mode, ctx, t)[0]


def check_dcc(algebra, mode, ctx, t, expected: Type) -> None:
    elaborate_dcc(algebra, mode, ctx, t, expected)


# ---------------------------------------------------------------- j synthesis


def synthesize_j(algebra, level, ty: Type) -> Term:
    """A closed GMCC term of type ``S[level] ty -> ty`` whose erasure is the identity.

    Requires ``level`` to protect ``ty`` in the extended system.  When several
    rules apply the choice is, in order: least level, monad, already, product,
    function, and the join rule last.
    """
    if not protected(algebra, ProtectionMode.EXTENDED, level, ty):
        raise NotProtected(level, ty)
    return _j(algebra, level, ty)


@lru_cache(maxsize=None)
def _j(algebra, level, ty: Type) -> Term:
    src = Modal(level, ty)
    x = Var(0)
    if level == algebra.bottom:
        return Lam(src, Extr(x), "x")
    if isinstance(ty, Modal) and algebra.leq(level, ty.grade):
        return Lam(src, Join(level, ty.grade, x), "x")
    if isinstance(ty, Modal) and protected(algebra, ProtectionMode.EXTENDED, level, ty.body):
        inner = _j(algebra, level, ty.body)
        lifted = Lift(ty.grade, inner, Modal(level, ty.body))
        return Lam(src, App(lifted, Fork(ty.grade, level, Join(level, ty.grade, x))), "x")
    if isinstance(ty, Prod):
        parts = []
        for i, comp in ((1, ty.left), (2, ty.right)):
            proj = Lift(level, Lam(ty, Proj(i, Var(0)), "y"), ty)
            parts.append(App(_j(algebra, level, comp), App(proj, Var(0))))
        return Lam(src, Pair(*parts), "z")
    if isinstance(ty, Fun):
        apply_to_y = Lift(level, Lam(ty, App(Var(0), Var(1)), "x"), ty)
        body = App(_j(algebra, level, ty.cod), App(apply_to_y, Var(1)))
        return Lam(src, Lam(ty.dom, body, "y"), "z")
    if isinstance(ty, Modal):
        # level sits below grade ∨ p(body) but below neither part alone
        l1 = ty.grade
        l2 = _principal(algebra, ty.body)
        top = algebra.op(l1, l2)
        j1 = _j(algebra, l1, ty)
        j2 = _j(algebra, l2, ty)
        inner = App(Lift(l1, j2, Modal(l2, ty)), Fork(l1, l2, Up(level, top, x)))
        return Lam(src, App(j1, inner), "x")
    raise NotProtected(level, ty)
