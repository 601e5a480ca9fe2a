"""Presence-absence interpretation and the noninterference harness.

An observer at level ``ℓ`` sees ``T[ℓ'] A`` as ``A`` when ``ℓ' ≤ ℓ`` and as a
one-point set otherwise; the point is :data:`BLANK`.  Interpreting a program
this way and getting an answer shows the answer never needed what was blanked.

The stage-0 observer for λ° works the same way with ``○A`` always blanked.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .algebra import NATURALS
from .checker import Calculus
from .errors import (
    IllTyped,
    NoCanonical,
    PreconditionFailure,
    TypeCheckError,
)
from .generators import GenConfig, TermGenerator
from .judgements import elaborate_judgement
from .rewrite import DEFAULT_FUEL, cbv_eval, normalize_lambda
from .syntax import (
    BOOL,
    Abort,
    App,
    Bind,
    Case,
    Entry,
    Eta,
    Fun,
    Inj,
    Lam,
    Modal,
    Next,
    Pair,
    Prev,
    Prod,
    Proj,
    Term,
    Type,
    Unit,
    UnitVal,
    Var,
    erase,
    is_closed,
    occurs_free,
    print_term,
    print_type,
    size,
    strip_annotations,
)
from .typecheck_dcce import ProtectionMode, protected

# ---------------------------------------------------------------- values


class ObserverValue:
    __slots__ = ()


@dataclass(frozen=True)
class UnitV(ObserverValue):
    pass


@dataclass(frozen=True)
class InjV(ObserverValue):
    i: int
    arg: ObserverValue


@dataclass(frozen=True)
class PairV(ObserverValue):
    fst: ObserverValue
    snd: ObserverValue


@dataclass(frozen=True, eq=False)
class ClosureV(ObserverValue):
    """Functions are only ever compared by applying them."""

    env: tuple
    binder: str
    body: Term


@dataclass(frozen=True)
class BlankV(ObserverValue):
    def __repr__(self):
        return "★"


BLANK = BlankV()


def reify(v: ObserverValue) -> Term:
    """The closed term denoted by a first-order value."""
    if isinstance(v, UnitV):
        return UnitVal()
    if isinstance(v, InjV):
        return Inj(v.i, reify(v.arg))
    if isinstance(v, PairV):
        return Pair(reify(v.fst), reify(v.snd))
    raise ValueError(f"no term for {v!r}")


def value_of(t: Term) -> ObserverValue:
    """The first-order value of a closed normal term (unit, injections, pairs)."""
    if isinstance(t, UnitVal):
        return UnitV()
    if isinstance(t, Inj):
        return InjV(t.i, value_of(t.arg))
    if isinstance(t, Pair):
        return PairV(value_of(t.fst), value_of(t.snd))
    raise ValueError(f"not a first-order value: {print_term(t)}")


# ---------------------------------------------------------------- configs


class ObserverMode(str, Enum):
    DCCE = "dcce"
    LCIRC = "lcirc"


@dataclass(frozen=True)
class ObserverConfig:
    mode: ObserverMode
    algebra: object = None
    level: object = None

    @staticmethod
    def dcce(algebra, level) -> "ObserverConfig":
        algebra.require(level)
        if not algebra.is_semilattice:
            raise IllTyped(f"algebra {algebra.name} is not a join-semilattice")
        return ObserverConfig(ObserverMode.DCCE, algebra, level)

    @staticmethod
    def stage0() -> "ObserverConfig":
        return ObserverConfig(ObserverMode.LCIRC, NATURALS, 0)


# ---------------------------------------------------------------- interpretation


def canonical(algebra, ty: Type, level) -> ObserverValue:
    """The single element of a type that collapses under the observer."""
    if isinstance(ty, Unit):
        return UnitV()
    if isinstance(ty, Prod):
        return PairV(canonical(algebra, ty.left, level), canonical(algebra, ty.right, level))
    if isinstance(ty, Fun):
        # \_. c, with c held in the closure environment
        return ClosureV((canonical(algebra, ty.cod, level),), "_", Var(1))
    if isinstance(ty, Modal):
        if algebra.leq(ty.grade, level):
            return canonical(algebra, ty.body, level)
        return BLANK
    raise NoCanonical(ty)


class _Interp:
    def __init__(self, config: ObserverConfig):
        self.config = config
        self.alg = config.algebra

    def apply(self, f: ObserverValue, a: ObserverValue) -> ObserverValue:
        if not isinstance(f, ClosureV):
            raise IllTyped(f"applying a non-function {f!r}")
        return self.run(f.env + (a,), f.body)

    def run(self, env: tuple, t: Term) -> ObserverValue:
        if isinstance(t, Var):
            if t.index >= len(env):
                raise IllTyped(f"unbound variable #{t.index}")
            return env[len(env) - 1 - t.index]
        if isinstance(t, Lam):
            return ClosureV(env, t.binder, t.body)
        if isinstance(t, App):
            f = self.run(env, t.fn)
            return self.apply(f, self.run(env, t.arg))
        if isinstance(t, UnitVal):
            return UnitV()
        if isinstance(t, Pair):
            return PairV(self.run(env, t.fst), self.run(env, t.snd))
        if isinstance(t, Proj):
            p = self.run(env, t.arg)
            if not isinstance(p, PairV):
                raise IllTyped(f"projection from {p!r}")
            return p.fst if t.i == 1 else p.snd
        if isinstance(t, Inj):
            return InjV(t.i, self.run(env, t.arg))
        if isinstance(t, Case):
            s = self.run(env, t.scrut)
            if not isinstance(s, InjV):
                raise IllTyped(f"case on {s!r}")
            return self.apply(self.run(env, t.left if s.i == 1 else t.right), s.arg)
        if isinstance(t, Abort):
            raise IllTyped("abort reached at run time")
        return self.modal(env, t)

    def modal(self, env, t):
        alg, level = self.alg, self.config.level
        if self.config.mode is ObserverMode.LCIRC:
            if isinstance(t, Next):
                return BLANK
            if isinstance(t, Prev):
                raise IllTyped("prev at stage 0")
            raise IllTyped(f"{type(t).__name__} is not a λ° constructor")
        if isinstance(t, Eta):
            return self.run(env, t.arg) if alg.leq(t.grade, level) else BLANK
        if isinstance(t, Bind):
            if alg.leq(t.grade, level):
                return self.run(env + (self.run(env, t.bound),), t.body)
            if t.ty is None:
                raise IllTyped("bind without a recorded result type; elaborate first")
            return canonical(alg, t.ty, level)
        raise IllTyped(f"{type(t).__name__} is not a DCC_e constructor")


def interpret(config: ObserverConfig, env, t: Term) -> ObserverValue:
    """Meaning of an *elaborated* term under ``config``; ``env`` lists values innermost last.

    ``env`` may also be a mapping from names to values together with a term
    whose free variables were parsed against those names in insertion order.
    """
    if isinstance(env, dict):
        env = tuple(env.values())
    return _Interp(config).run(tuple(env), t)


def interpret_dcce(algebra, level, t: Term, ctx=(), env=()) -> ObserverValue:
    """Elaborate in extended DCC and interpret under the observer at ``level``."""
    try:
        _, elab = elaborate_judgement(algebra, Calculus.DCCE, ctx, t)
    except TypeCheckError as exc:
        raise IllTyped(str(exc)) from exc
    return interpret(ObserverConfig.dcce(algebra, level), env, elab)


def interpret_stage0(t: Term, ctx=(), env=()) -> ObserverValue:
    try:
        _, elab = elaborate_judgement(NATURALS, Calculus.LCIRC, ctx, t, 0)
    except TypeCheckError as exc:
        raise IllTyped(str(exc)) from exc
    return interpret(ObserverConfig.stage0(), env, elab)


# ---------------------------------------------------------------- noninterference


@dataclass(frozen=True)
class NIVerdict:
    passed: bool
    value1: Term
    value2: Term
    observer_agrees: bool
    observed1: ObserverValue
    observed2: ObserverValue
    adequate: bool  # observer value matches the evaluator's on both runs

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "value1": print_term(self.value1),
            "value2": print_term(self.value2),
            "observer_agrees": self.observer_agrees,
            "observed1": repr(self.observed1),
            "observed2": repr(self.observed2),
            "adequate": self.adequate,
        }


def _closed_type(algebra, calculus, t, m=None, expected=None, what="term"):
    if not is_closed(t):
        raise PreconditionFailure([f"{what} is not closed"])
    try:
        return elaborate_judgement(algebra, calculus, (), t, m, expected)
    except TypeCheckError as exc:
        raise PreconditionFailure([f"{what} is ill-typed: {exc}"]) from exc


def ni_check_dcce(algebra, f: Term, a1: Term, a2: Term, level, fuel: int = DEFAULT_FUEL) -> NIVerdict:
    """Run ``f a1`` and ``f a2`` where the argument type is protected at ``level``."""
    fty, f_el = _closed_type(algebra, Calculus.DCCE, f, what="f")
    reasons = []
    if not isinstance(fty, Fun):
        raise PreconditionFailure([f"f has type {print_type(fty)}, not a function"])
    a, result = fty.dom, fty.cod
    if result == BOOL:
        observer = algebra.bottom
        if algebra.leq(level, observer):
            reasons.append(f"level {level} is the least level")
    elif isinstance(result, Modal) and result.body == BOOL:
        observer = result.grade
        if algebra.leq(level, observer):
            reasons.append(f"{level} ≤ {observer}")
    else:
        raise PreconditionFailure([f"result type {print_type(result)} is neither Bool nor T[l] Bool"])
    if not protected(algebra, ProtectionMode.EXTENDED, level, a):
        reasons.append(f"{level} does not protect {print_type(a)}")
    els = []
    for name, arg in (("a1", a1), ("a2", a2)):
        try:
            els.append(_closed_type(algebra, Calculus.DCCE, arg, expected=a, what=name)[1])
        except PreconditionFailure as exc:
            reasons.extend(exc.reasons)
    if reasons:
        raise PreconditionFailure(reasons)
    v1 = strip_annotations(cbv_eval(App(f_el, els[0]), fuel))
    v2 = strip_annotations(cbv_eval(App(f_el, els[1]), fuel))
    config = ObserverConfig.dcce(algebra, observer)
    o1 = interpret(config, (), App(f_el, els[0]))
    o2 = interpret(config, (), App(f_el, els[1]))
    adequate = all(_agrees(o, v) for o, v in ((o1, v1), (o2, v2)))
    return NIVerdict(v1 == v2, v1, v2, o1 == o2, o1, o2, adequate)


def _agrees(observed: ObserverValue, value: Term) -> bool:
    """Does an observation at a level seeing the result match a CBV value?"""
    while isinstance(value, Eta):
        value = value.arg
    try:
        return observed == value_of(value)
    except ValueError:
        return False


def ni_check_lcirc(f: Term, b1: Term, b2: Term, fuel: int = DEFAULT_FUEL) -> NIVerdict:
    """Run ``f b1`` and ``f b2`` at stage 0 where the argument lives at the next stage."""
    fty, f_el = _closed_type(NATURALS, Calculus.LCIRC, f, 0, what="f")
    reasons = []
    if not (isinstance(fty, Fun) and isinstance(fty.dom, Modal) and fty.cod == BOOL):
        raise PreconditionFailure([f"f has type {print_type(fty)}, not ○A -> Bool"])
    els = []
    for name, arg in (("b1", b1), ("b2", b2)):
        try:
            els.append(_closed_type(NATURALS, Calculus.LCIRC, arg, 0, fty.dom, what=name)[1])
        except PreconditionFailure as exc:
            reasons.extend(exc.reasons)
    if reasons:
        raise PreconditionFailure(reasons)
    v1 = strip_annotations(normalize_lambda(erase(App(f_el, els[0])), fuel))
    v2 = strip_annotations(normalize_lambda(erase(App(f_el, els[1])), fuel))
    config = ObserverConfig.stage0()
    o1 = interpret(config, (), App(f_el, els[0]))
    o2 = interpret(config, (), App(f_el, els[1]))
    adequate = _agrees(o1, v1) and _agrees(o2, v2)
    return NIVerdict(v1 == v2, v1, v2, o1 == o2, o1, o2, adequate)


# ---------------------------------------------------------------- fuzzing


@dataclass
class FuzzReport:
    mode: str
    algebra: str
    trials: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)  # list of dicts
    observer_disagreements: int = 0
    inadequate: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.observer_disagreements and not self.inadequate

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "algebra": self.algebra,
            "trials": self.trials,
            "skipped": self.skipped,
            "failures": self.failures,
            "observer_disagreements": self.observer_disagreements,
            "inadequate": self.inadequate,
            "ok": self.ok,
        }


def _subterm_candidates(t: Term):
    """Smaller terms: each child not under a binder, and ``t`` with one child shrunk."""
    for k, b in zip(t.KIDS, t.BINDS):
        if b == 0:
            yield getattr(t, k)
    for i, (k, b) in enumerate(zip(t.KIDS, t.BINDS)):
        for c in _subterm_candidates(getattr(t, k)):
            kids = list(t.children())
            kids[i] = c
            yield t.rebuild(*kids)


def shrink(t: Term, still_fails, max_rounds: int = 200) -> Term:
    """Greedy shrinking: keep any strictly smaller variant for which ``still_fails`` holds."""
    for _ in range(max_rounds):
        for cand in sorted(_subterm_candidates(t), key=size):
            if size(cand) >= size(t):
                continue
            try:
                if still_fails(cand):
                    t = cand
                    break
            except Exception:
                continue
        else:
            return t
    return t


def _protected_arg_types(gen: TermGenerator, algebra):
    """A random argument type together with a non-least level protecting it."""
    for _ in range(100):
        a = gen.random_type(3)
        levels = [l for l in algebra.elements
                  if l != algebra.bottom and protected(algebra, ProtectionMode.EXTENDED, l, a)]
        if levels:
            return a, gen.rng.choice(levels)
    return None


def _using_function(gen: TermGenerator, dom: Type, cod: Type, m=None, tries: int = 20):
    """A generated ``λx:dom. body`` whose body mentions ``x`` when that can be found."""
    ctx = (Entry("x", dom, m),)
    fallback = None
    for _ in range(tries):
        body = gen.term(ctx, cod, m)
        if body is None:
            continue
        if occurs_free(body, 0):
            return Lam(dom, body, "x")
        fallback = fallback or body
    return None if fallback is None else Lam(dom, fallback, "x")


def _dcce_triple(gen: TermGenerator, algebra):
    picked = _protected_arg_types(gen, algebra)
    if picked is None:
        return None
    a, level = picked
    observers = [l for l in algebra.elements if not algebra.leq(level, l)]
    result = BOOL if gen.rng.random() < 0.4 else Modal(gen.rng.choice(observers), BOOL)
    f = _using_function(gen, a, result)
    a1 = gen.term((), a)
    a2 = gen.term((), a)
    if f is None or a1 is None or a2 is None:
        return None
    return f, a1, a2, level


def _lcirc_triple(gen: TermGenerator):
    a = gen.random_type(2)
    f = _using_function(gen, Modal(1, a), BOOL, 0)
    b1 = gen.term((), Modal(1, a), 0)
    b2 = gen.term((), Modal(1, a), 0)
    if f is None or b1 is None or b2 is None:
        return None
    return f, b1, b2


def _record(report, terms, names, extra, out_dir: Path | None):
    idx = len(report.failures)
    entry = {name: print_term(t) for name, t in zip(names, terms)}
    entry.update(extra)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, t in zip(names, terms):
            path = out_dir / f"{report.mode}_{idx}_{name}.dep"
            path.write_text(f"term {print_term(t)}\n")
            entry[name + "_file"] = str(path)
    report.failures.append(entry)


def fuzz_ni_dcce(algebra, trials: int, seed: int = 0, out_dir=None,
                 config: GenConfig | None = None) -> FuzzReport:
    gen = TermGenerator(algebra, Calculus.DCCE, seed, config or GenConfig(size=5))
    report = FuzzReport("dcce", algebra.name)
    out_dir = Path(out_dir) if out_dir else None
    while report.trials < trials:
        triple = _dcce_triple(gen, algebra)
        if triple is None:
            report.skipped += 1
            continue
        f, a1, a2, level = triple
        report.trials += 1
        v = ni_check_dcce(algebra, f, a1, a2, level)
        report.observer_disagreements += not v.observer_agrees
        report.inadequate += not v.adequate
        if not v.passed:
            def fails(cand, a1=a1, a2=a2, level=level):
                return not ni_check_dcce(algebra, cand, a1, a2, level).passed
            small = shrink(f, fails)
            _record(report, (small, a1, a2), ("f", "a1", "a2"), {"level": str(level)}, out_dir)
    if out_dir is not None:
        _write_report(report, out_dir)
    return report


def fuzz_ni_lcirc(trials: int, seed: int = 0, out_dir=None,
                  config: GenConfig | None = None) -> FuzzReport:
    gen = TermGenerator(NATURALS, Calculus.LCIRC, seed, config or GenConfig(size=5))
    report = FuzzReport("lcirc", NATURALS.name)
    out_dir = Path(out_dir) if out_dir else None
    while report.trials < trials:
        triple = _lcirc_triple(gen)
        if triple is None:
            report.skipped += 1
            continue
        f, b1, b2 = triple
        report.trials += 1
        v = ni_check_lcirc(f, b1, b2)
        report.observer_disagreements += not v.observer_agrees
        report.inadequate += not v.adequate
        if not v.passed:
            def fails(cand, b1=b1, b2=b2):
                return not ni_check_lcirc(cand, b1, b2).passed
            small = shrink(f, fails)
            _record(report, (small, b1, b2), ("f", "b1", "b2"), {}, out_dir)
    if out_dir is not None:
        _write_report(report, out_dir)
    return report


def _write_report(report: FuzzReport, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"ni_{report.mode}_{report.algebra}.json"
    path.write_text(json.dumps(report.to_json(), indent=2))


# ---------------------------------------------------------------- adequacy


def closed_bool_corpus(algebra, calculus, n: int, seed: int = 0,
                       config: GenConfig | None = None) -> list[Term]:
    """Closed terms of type Bool (at stage 0 for λ°) that pass the checker."""
    cal = Calculus(calculus)
    gen = TermGenerator(algebra, cal, random.Random(seed), config or GenConfig(size=5))
    m = 0 if cal is Calculus.LCIRC else None
    out = []
    while len(out) < n:
        t = gen.term((), BOOL, m)
        if t is not None:
            elaborate_judgement(algebra, cal, (), t, m, BOOL)
            out.append(t)
    return out
