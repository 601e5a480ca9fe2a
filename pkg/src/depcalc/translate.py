"""Translations between calculi.

``overline``  GMCC  -> DCC_e
``underline`` DCC_e -> GMCC
``tilde``     GMCC  -> GMCC_e (judgement at the least grade)
``hat``       λ°    -> GMCC_e over the naturals

All four first elaborate their input with the source checker, so ill-typed
input raises ``NotWellTyped``, and the translations can read the annotations
the checker fills in (lift domains, bind result types).  Types are shared
between calculi: the one ``Modal`` constructor is read as whichever modality
the target calculus has, so type translation is the identity.
"""

from __future__ import annotations

from .errors import NotWellTyped, TypeCheckError
from .rewrite import synth_type
from .syntax import (
    App,
    Bind,
    Entry,
    Eta,
    Extr,
    Fork,
    Join,
    Lam,
    Lift,
    Merge,
    Modal,
    Next,
    Prev,
    Ret,
    Split,
    Term,
    Up,
    Var,
    map_children,
    shift,
)
from .typecheck_core import elaborate_core
from .typecheck_dcce import ProtectionMode, elaborate_dcc, synthesize_j
from .typecheck_staged import elaborate_lcirc


def _elaborate(run, *args):
    try:
        return run(*args)
    except TypeCheckError as exc:
        raise NotWellTyped(str(exc)) from exc


# ---------------------------------------------------------------- GMCC -> DCC_e


def overline(algebra, t: Term, ctx=(), calculus="gmcc") -> Term:
    _, elab = _elaborate(elaborate_core, algebra, calculus, ctx, t)
    return _over(algebra, elab)


def _over(alg, t: Term) -> Term:
    bot = alg.bottom
    if isinstance(t, Ret):
        return Eta(bot, _over(alg, t.arg))
    if isinstance(t, Lift):
        body = Bind(t.grade, "y", Var(0), Eta(t.grade, App(shift(_over(alg, t.fn), 2), Var(0))))
        return Lam(Modal(t.grade, t.dom), body, "x")
    if isinstance(t, Join):
        inner = Bind(t.g2, "y", Var(0), Eta(alg.op(t.g1, t.g2), Var(0)))
        return Bind(t.g1, "x", _over(alg, t.arg), inner)
    if isinstance(t, Up):
        return Bind(t.g1, "x", _over(alg, t.arg), Eta(t.g2, Var(0)))
    if isinstance(t, Extr):
        return Bind(bot, "x", _over(alg, t.arg), Var(0))
    if isinstance(t, Fork):
        return Bind(alg.op(t.g1, t.g2), "x", _over(alg, t.arg), Eta(t.g1, Eta(t.g2, Var(0))))
    return map_children(t, lambda c, b: _over(alg, c))


# ---------------------------------------------------------------- DCC_e -> GMCC


def underline(algebra, t: Term, ctx=()) -> Term:
    _, elab = _elaborate(elaborate_dcc, algebra, ProtectionMode.EXTENDED, ctx, t)
    return _under(algebra, elab, tuple(ctx))


def _under(alg, t: Term, ctx: tuple) -> Term:
    if isinstance(t, Eta):
        return Up(alg.bottom, t.grade, Ret(_under(alg, t.arg, ctx)))
    if isinstance(t, Bind):
        bound_ty = synth_type(ctx, t.bound, alg)
        if not isinstance(bound_ty, Modal) or t.ty is None:
            raise NotWellTyped("bind without a recorded type")
        a = bound_ty.body
        body = _under(alg, t.body, ctx + (Entry(t.binder, a),))
        j = synthesize_j(alg, t.grade, t.ty)
        lifted = Lift(t.grade, Lam(a, body, t.binder), a)
        return App(j, App(lifted, _under(alg, t.bound, ctx)))
    if isinstance(t, Lam):
        return Lam(t.annot, _under(alg, t.body, ctx + (Entry(t.binder, t.annot),)), t.binder)
    return map_children(t, lambda c, b: _under(alg, c, ctx))


# ---------------------------------------------------------------- GMCC -> GMCC_e


def tilde(algebra, t: Term, ctx=(), calculus="gmcc") -> Term:
    _, elab = _elaborate(elaborate_core, algebra, calculus, ctx, t)
    return _tilde(algebra, elab)


def bottom_context(algebra, ctx) -> tuple:
    """Grade every entry of an ungraded context at the unit grade."""
    return tuple(Entry(e.name, e.type, algebra.unit) for e in ctx)


def _tilde(alg, t: Term) -> Term:
    unit, op = alg.unit, alg.op
    if isinstance(t, Ret):
        return Split(unit, _tilde(alg, t.arg))
    if isinstance(t, Extr):
        return Merge(unit, _tilde(alg, t.arg))
    if isinstance(t, Join):
        return Split(op(t.g1, t.g2), Merge(t.g2, Merge(t.g1, _tilde(alg, t.arg))))
    if isinstance(t, Fork):
        return Split(t.g1, Split(t.g2, Merge(op(t.g1, t.g2), _tilde(alg, t.arg))))
    if isinstance(t, Lift):
        f = shift(_tilde(alg, t.fn), 1)
        return Lam(Modal(t.grade, t.dom), Split(t.grade, App(f, Merge(t.grade, Var(0)))), "x")
    if isinstance(t, Up):
        return Split(t.g2, Merge(t.g1, _tilde(alg, t.arg)))
    return map_children(t, lambda c, b: _tilde(alg, c))


# ---------------------------------------------------------------- λ° -> GMCC_e


def hat(t: Term, ctx=(), n: int = 0) -> Term:
    _, elab = _elaborate(elaborate_lcirc, ctx, t, n)
    return _hat(elab)


def _hat(t: Term) -> Term:
    if isinstance(t, Next):
        return Split(1, _hat(t.arg))
    if isinstance(t, Prev):
        return Merge(1, _hat(t.arg))
    return map_children(t, lambda c, b: _hat(c))
