"""Normalization and equality.

* ``normalize_lambda``: normal-order beta to a normal form, then eta-contraction.
* ``cbv_eval``: left-to-right call-by-value small-step evaluation of closed
  DCC_e terms, reducing under ``eta`` but never under a lambda.
* ``modal_normalize``: a bottom-up rewriting engine for the oriented modal
  equations (plus beta and eta), used to decide equality in GMCC and GMCC_e.
* ``decide_equal``: full equality when the rewrite system decides it,
  otherwise equality of erasures.

The typed eta law for ``Unit`` (every term of type ``Unit`` equals ``unit``)
is applied when the caller supplies a typing context, since it needs types.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import FuelExhausted, Stuck
from .syntax import (
    Abort,
    App,
    Base,
    Bind,
    Case,
    Entry,
    Eta,
    Extr,
    Fork,
    Fun,
    Inj,
    Join,
    Lam,
    Lift,
    Merge,
    Modal,
    Next,
    Pair,
    Prev,
    Prod,
    Proj,
    Ret,
    Split,
    Sum,
    Term,
    Type,
    Unit,
    UnitVal,
    Up,
    Var,
    Void,
    erase,
    erase_type,
    instantiate,
    lookup,
    map_children,
    occurs_free,
    shift,
    strip_annotations,
)

DEFAULT_FUEL = 100_000


class _Fuel:
    def __init__(self, budget: int):
        self.budget = budget
        self.left = budget

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted(self.budget)


# ---------------------------------------------------------------- plain lambda terms


def _whnf(t: Term, fuel: _Fuel) -> Term:
    while True:
        if isinstance(t, App):
            fn = _whnf(t.fn, fuel)
            if isinstance(fn, Lam):
                fuel.tick()
                t = instantiate(fn.body, t.arg)
                continue
            return App(fn, t.arg)
        if isinstance(t, Proj):
            arg = _whnf(t.arg, fuel)
            if isinstance(arg, Pair):
                fuel.tick()
                t = arg.fst if t.i == 1 else arg.snd
                continue
            return Proj(t.i, arg)
        if isinstance(t, Case):
            scrut = _whnf(t.scrut, fuel)
            if isinstance(scrut, Inj):
                fuel.tick()
                t = App(t.left if scrut.i == 1 else t.right, scrut.arg)
                continue
            return Case(scrut, t.left, t.right)
        return t


def _beta_normal(t: Term, fuel: _Fuel) -> Term:
    w = _whnf(t, fuel)
    return map_children(w, lambda c, b: _beta_normal(c, fuel))


def _eta_root(t: Term) -> Term | None:
    if isinstance(t, Lam) and isinstance(t.body, App) and t.body.arg == Var(0):
        if not occurs_free(t.body.fn, 0):
            return shift(t.body.fn, -1)
    if (isinstance(t, Pair) and isinstance(t.fst, Proj) and isinstance(t.snd, Proj)
            and t.fst.i == 1 and t.snd.i == 2 and t.fst.arg == t.snd.arg):
        return t.fst.arg
    return None


def eta_contract(t: Term, fuel: _Fuel | None = None) -> Term:
    t = map_children(t, lambda c, b: eta_contract(c, fuel))
    while (r := _eta_root(t)) is not None:
        if fuel is not None:
            fuel.tick()
        t = r
    return t


def normalize_lambda(t: Term, fuel: int = DEFAULT_FUEL, ctx=None) -> Term:
    """Beta-normal form by normal-order reduction, then eta-contraction.

    With a context of (erased) types, the typed eta law for ``Unit`` is applied
    as a final step.
    """
    f = _Fuel(fuel)
    out = eta_contract(_beta_normal(t, f), f)
    if ctx is not None:
        out = _unit_eta(out, tuple(ctx), False, None)
    return out


# ---------------------------------------------------------------- CBV for DCC_e


def is_value(t: Term) -> bool:
    if isinstance(t, (Lam, UnitVal)):
        return True
    if isinstance(t, Pair):
        return is_value(t.fst) and is_value(t.snd)
    if isinstance(t, (Inj, Eta)):
        return is_value(t.arg)
    return False


def cbv_step(t: Term) -> Term | None:
    """One left-to-right CBV step; ``None`` when ``t`` is a value."""
    if is_value(t):
        return None
    if isinstance(t, App):
        if not is_value(t.fn):
            return App(cbv_step(t.fn), t.arg)
        if not is_value(t.arg):
            return App(t.fn, cbv_step(t.arg))
        if isinstance(t.fn, Lam):
            return instantiate(t.fn.body, t.arg)
        raise Stuck(t)
    if isinstance(t, Pair):
        if not is_value(t.fst):
            return Pair(cbv_step(t.fst), t.snd)
        return Pair(t.fst, cbv_step(t.snd))
    if isinstance(t, Proj):
        if not is_value(t.arg):
            return Proj(t.i, cbv_step(t.arg))
        if isinstance(t.arg, Pair):
            return t.arg.fst if t.i == 1 else t.arg.snd
        raise Stuck(t)
    if isinstance(t, Inj):
        return Inj(t.i, cbv_step(t.arg), t.annot)
    if isinstance(t, Eta):
        return Eta(t.grade, cbv_step(t.arg))
    if isinstance(t, Case):
        if not is_value(t.scrut):
            return Case(cbv_step(t.scrut), t.left, t.right)
        if isinstance(t.scrut, Inj):
            return App(t.left if t.scrut.i == 1 else t.right, t.scrut.arg)
        raise Stuck(t)
    if isinstance(t, Bind):
        if not is_value(t.bound):
            return Bind(t.grade, t.binder, cbv_step(t.bound), t.body, t.ty)
        if isinstance(t.bound, Eta) and t.bound.grade == t.grade:
            return instantiate(t.body, t.bound.arg)
        raise Stuck(t)
    if isinstance(t, Abort):
        if not is_value(t.arg):
            return Abort(cbv_step(t.arg), t.annot)
    raise Stuck(t)


def cbv_trace(t: Term, fuel: int = DEFAULT_FUEL) -> list[Term]:
    out = [t]
    f = _Fuel(fuel)
    while (nxt := cbv_step(out[-1])) is not None:
        f.tick()
        out.append(nxt)
    return out


def cbv_eval(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    f = _Fuel(fuel)
    while (nxt := cbv_step(t)) is not None:
        f.tick()
        t = nxt
    return t


# ---------------------------------------------------------------- modal rewriting


class ModalRewriter:
    """Bottom-up normalizer for the oriented rule set.

    Each ``rule_*`` method inspects the root of an already-normalized term and
    returns a replacement or ``None``.  Rule names double as the vocabulary of
    :attr:`fired`, which counts how often each rule was used.
    """

    def __init__(self, algebra, fuel: int = DEFAULT_FUEL):
        self.algebra = algebra
        self.fuel = _Fuel(fuel)
        self.fired: dict[str, int] = {}
        self.rules = [getattr(self, n) for n in sorted(dir(self)) if n.startswith("rule_")]

    def normalize(self, t: Term) -> Term:
        t = map_children(t, lambda c, b: self.normalize(c))
        for rule in self.rules:
            out = rule(t)
            if out is not None:
                self.fuel.tick()
                name = rule.__name__[5:]
                self.fired[name] = self.fired.get(name, 0) + 1
                return self.normalize(out)
        return t

    @property
    def unit(self):
        return self.algebra.unit

    # beta and eta

    def rule_a_beta(self, t):
        if isinstance(t, App) and isinstance(t.fn, Lam):
            return instantiate(t.fn.body, t.arg)
        if isinstance(t, Proj) and isinstance(t.arg, Pair):
            return t.arg.fst if t.i == 1 else t.arg.snd
        if isinstance(t, Case) and isinstance(t.scrut, Inj):
            return App(t.left if t.scrut.i == 1 else t.right, t.scrut.arg)
        if isinstance(t, Bind) and isinstance(t.bound, Eta) and t.bound.grade == t.grade:
            return instantiate(t.body, t.bound.arg)
        return None

    def rule_b_eta(self, t):
        return _eta_root(t)

    # inverse pairs

    def rule_c_cancel(self, t):
        a = getattr(t, "arg", None)
        pairs = ((Extr, Ret), (Ret, Extr), (Next, Prev), (Prev, Next))
        for outer, inner in pairs:
            if isinstance(t, outer) and isinstance(a, inner):
                return a.arg
        if isinstance(t, (Split, Merge)) and isinstance(a, (Split, Merge)):
            if type(t) is not type(a) and t.grade == a.grade:
                return a.arg
        if isinstance(t, (Fork, Join)) and isinstance(a, (Fork, Join)):
            if type(t) is not type(a) and (t.g1, t.g2) == (a.g1, a.g2):
                return a.arg
        return None

    # up

    def rule_d_up(self, t):
        if not isinstance(t, Up):
            return None
        if t.g1 == t.g2:
            return t.arg
        if isinstance(t.arg, Up) and t.arg.g2 == t.g1:
            return Up(t.arg.g1, t.g2, t.arg.arg)
        return None

    # lift

    def rule_e_lift(self, t):
        if isinstance(t, Lift):
            dom = Modal(t.grade, t.dom) if t.dom is not None else None
            if t.grade == self.unit:
                # at the unit grade, lift f = \x. ret (f (extr x))
                return Lam(dom, Ret(App(shift(t.fn, 1), Extr(Var(0)))), "x")
            if isinstance(t.fn, Lam) and t.fn.body == Var(0):
                return Lam(dom, Var(0), t.fn.binder)
            return None
        if not (isinstance(t, App) and isinstance(t.fn, Lift)):
            return None
        g, f = t.fn.grade, t.fn.fn
        inner = t.arg
        if isinstance(inner, App) and isinstance(inner.fn, Lift) and inner.fn.grade == g:
            h = inner.fn.fn
            composed = Lam(inner.fn.dom, App(shift(f, 1), App(shift(h, 1), Var(0))), "x")
            return App(Lift(g, composed, inner.fn.dom), inner.arg)
        if isinstance(inner, Up) and inner.g2 == g:
            # naturality of up: lift f after up = up after lift f
            return Up(inner.g1, g, App(Lift(inner.g1, f, t.fn.dom), inner.arg))
        return None

    # monad laws and naturality of join

    def rule_f_join(self, t):
        if not isinstance(t, Join):
            return None
        op = self.algebra.op
        g1, g2, a = t.g1, t.g2, t.arg
        if g1 == self.unit and isinstance(a, Ret):
            return a.arg
        if isinstance(a, Up) and a.g2 == g1:
            return Up(op(a.g1, g2), op(g1, g2), Join(a.g1, g2, a.arg))
        if isinstance(a, App) and isinstance(a.fn, Lift) and a.fn.grade == g1:
            f, x = a.fn.fn, a.arg
            if isinstance(x, Up) and x.g2 == g1:
                lifted = Lift(x.g1, f, a.fn.dom)
                return Up(op(x.g1, g2), op(g1, g2), Join(x.g1, g2, App(lifted, x.arg)))
            if isinstance(f, Lam) and isinstance(f.body, Up) and f.body.g2 == g2:
                m2 = f.body.g1
                body = Lam(f.annot, f.body.arg, f.binder)
                return Up(op(g1, m2), op(g1, g2), Join(g1, m2, App(Lift(g1, body, a.fn.dom), x)))
            if g2 == self.unit and isinstance(f, Lam) and isinstance(f.body, Ret):
                return App(Lift(g1, Lam(f.annot, f.body.arg, f.binder), a.fn.dom), x)
        return None

    # comonad laws and naturality of fork

    def rule_g_fork(self, t):
        if isinstance(t, Extr) and isinstance(t.arg, Fork) and t.arg.g1 == self.unit:
            return t.arg.arg
        if (isinstance(t, App) and isinstance(t.fn, Lift) and isinstance(t.arg, Fork)
                and t.arg.g1 == t.fn.grade and t.arg.g2 == self.unit):
            f = t.fn.fn
            if isinstance(f, Lam) and f.body == Extr(Var(0)):
                return t.arg.arg
        if isinstance(t, Fork) and isinstance(t.arg, Up) and self.algebra.is_finite:
            alg = self.algebra
            g1p, g2, up = t.g1, t.g2, t.arg
            if up.g2 != alg.op(g1p, g2):
                return None
            for m1 in alg.elements:
                if alg.op(m1, g2) == up.g1 and alg.leq(m1, g1p):
                    return Up(m1, g1p, Fork(m1, g2, up.arg))
        return None


def _unit_like(ty: Type | None, gmcce: bool) -> bool:
    if isinstance(ty, Unit):
        return True
    if isinstance(ty, Prod):
        return _unit_like(ty.left, gmcce) and _unit_like(ty.right, gmcce)
    if isinstance(ty, Fun):
        return _unit_like(ty.cod, gmcce)
    if isinstance(ty, Modal) and gmcce:
        return _unit_like(ty.body, gmcce)
    return False


def _canonical(ty: Type) -> Term:
    if isinstance(ty, Unit):
        return UnitVal()
    if isinstance(ty, Prod):
        return Pair(_canonical(ty.left), _canonical(ty.right))
    if isinstance(ty, Fun):
        return Lam(ty.dom, _canonical(ty.cod), "_")
    return Split(ty.grade, _canonical(ty.body))


def synth_type(ctx: tuple, t: Term, algebra=None) -> Type | None:
    """Best-effort type of an annotated term; ``None`` when annotations are missing."""
    s = lambda u: synth_type(ctx, u, algebra)  # noqa: E731
    if isinstance(t, Var):
        e = lookup(ctx, t.index)
        return e.type if e is not None else None
    if isinstance(t, UnitVal):
        return Unit()
    if isinstance(t, Lam):
        if t.annot is None:
            return None
        cod = synth_type(ctx + (Entry(t.binder, t.annot),), t.body, algebra)
        return Fun(t.annot, cod) if cod is not None else None
    if isinstance(t, App):
        f = s(t.fn)
        return f.cod if isinstance(f, Fun) else None
    if isinstance(t, Pair):
        a, b = s(t.fst), s(t.snd)
        return Prod(a, b) if a is not None and b is not None else None
    if isinstance(t, Proj):
        p = s(t.arg)
        return (p.left if t.i == 1 else p.right) if isinstance(p, Prod) else None
    if isinstance(t, (Inj, Abort)):
        return t.annot
    if isinstance(t, Case):
        f = s(t.left)
        return f.cod if isinstance(f, Fun) else None
    if isinstance(t, Bind):
        return t.ty
    a = s(t.arg) if hasattr(t, "arg") else None
    if a is None and not isinstance(t, Lift):
        return None
    if isinstance(t, (Eta, Split)):
        return Modal(t.grade, a)
    if isinstance(t, Next):
        return Modal(1, a)
    if isinstance(t, Ret):
        return Modal(algebra.unit, a) if algebra is not None else None
    if isinstance(t, (Extr, Merge, Prev)):
        return a.body if isinstance(a, Modal) else None
    if isinstance(t, Up):
        return Modal(t.g2, a.body) if isinstance(a, Modal) else a
    if isinstance(t, Join):
        if algebra is None or not (isinstance(a, Modal) and isinstance(a.body, Modal)):
            return None
        return Modal(algebra.op(t.g1, t.g2), a.body.body)
    if isinstance(t, Fork):
        return Modal(t.g1, Modal(t.g2, a.body)) if isinstance(a, Modal) else None
    if isinstance(t, Lift):
        f = s(t.fn)
        return Fun(Modal(t.grade, f.dom), Modal(t.grade, f.cod)) if isinstance(f, Fun) else None
    return None


def _unit_eta(t: Term, ctx: tuple, gmcce: bool, algebra) -> Term:
    ty = synth_type(ctx, t, algebra)
    if ty is not None and _unit_like(ty, gmcce):
        return _canonical(ty)
    if isinstance(t, Lam):
        inner = ctx + (Entry(t.binder, t.annot),)
        return Lam(t.annot, _unit_eta(t.body, inner, gmcce, algebra), t.binder)
    if isinstance(t, Bind):
        bty = synth_type(ctx, t.bound, algebra)
        entry = Entry(t.binder, bty.body if isinstance(bty, Modal) else None)
        return Bind(t.grade, t.binder, _unit_eta(t.bound, ctx, gmcce, algebra),
                    _unit_eta(t.body, ctx + (entry,), gmcce, algebra), t.ty)
    return map_children(t, lambda c, b: _unit_eta(c, ctx, gmcce, algebra))


def _uses_split_merge(t: Term) -> bool:
    from .syntax import subterms

    return any(isinstance(s, (Split, Merge)) for s in subterms(t))


def modal_normalize(algebra, t: Term, fuel: int = DEFAULT_FUEL, ctx=None,
                    gmcce: bool | None = None) -> Term:
    """Normal form under the oriented rule set.

    ``ctx`` (a tuple of :class:`Entry`) enables the typed unit eta law;
    ``gmcce`` says whether modal types over ``Unit`` also collapse, which holds
    in GMCC_e.  By default it is inferred from the presence of split/merge.
    """
    rw = ModalRewriter(algebra, fuel)
    out = rw.normalize(t)
    if ctx is None:
        return out
    if gmcce is None:
        gmcce = _uses_split_merge(t)
    for _ in range(8):
        nxt = rw.normalize(_unit_eta(out, tuple(ctx), gmcce, algebra))
        if nxt == out:
            break
        out = nxt
    return out


# ---------------------------------------------------------------- equality


class Verdict(str, Enum):
    EQUAL_FULL = "EqualFull"
    EQUAL_UP_TO_ERASURE = "EqualUpToErasure"
    NOT_EQUAL = "NotEqual"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class EqualityVerdict:
    verdict: Verdict
    reason: str = ""

    @property
    def up_to_erasure(self) -> bool:
        return self.verdict in (Verdict.EQUAL_FULL, Verdict.EQUAL_UP_TO_ERASURE)

    def __str__(self):
        return self.verdict.value + (f" ({self.reason})" if self.reason else "")


def _erased_ctx(ctx):
    return tuple(Entry(e.name, erase_type(e.type) if e.type is not None else None) for e in ctx)


def erasure_equal(t1: Term, t2: Term, fuel: int = DEFAULT_FUEL, ctx=None) -> bool:
    ectx = _erased_ctx(ctx) if ctx is not None else None
    n1 = strip_annotations(normalize_lambda(erase(t1), fuel, ectx))
    n2 = strip_annotations(normalize_lambda(erase(t2), fuel, ectx))
    return n1 == n2


def decide_equal(algebra, t1: Term, t2: Term, calculus=None, ctx=None,
                 fuel: int = DEFAULT_FUEL) -> EqualityVerdict:
    """Compare two terms typed at the same judgement.

    ``calculus`` selects whether modal types over ``Unit`` collapse (GMCC_e).
    """
    from .checker import Calculus

    gmcce = None if calculus is None else Calculus(calculus) in (Calculus.GMCCE, Calculus.LCIRC)
    try:
        n1 = modal_normalize(algebra, t1, fuel, ctx, gmcce)
        n2 = modal_normalize(algebra, t2, fuel, ctx, gmcce)
        if strip_annotations(n1) == strip_annotations(n2):
            return EqualityVerdict(Verdict.EQUAL_FULL)
    except FuelExhausted as exc:
        full_reason = str(exc)
    else:
        full_reason = ""
    try:
        same = erasure_equal(t1, t2, fuel, ctx)
    except FuelExhausted as exc:
        return EqualityVerdict(Verdict.UNDECIDED, str(exc))
    if same:
        return EqualityVerdict(Verdict.EQUAL_UP_TO_ERASURE, full_reason)
    return EqualityVerdict(Verdict.NOT_EQUAL)
