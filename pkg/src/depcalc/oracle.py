"""Brute-force derivation search, kept deliberately naive.

These searches read the inference rules off directly and try every instance
within a height bound.  They share no code with the optimized checkers beyond
the term and type datatypes and the algebra tables, so agreement between the
two is real evidence.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .checker import Calculus
from .syntax import (
    BOOL,
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
    subterms,
)

PROTECTION_DEPTH = 8
TYPING_DEPTH = 6


# ---------------------------------------------------------------- protection


def protection_search(algebra, mode, level, ty: Type, depth: int = PROTECTION_DEPTH) -> bool:
    """Is there a derivation of ``level ⊑ ty`` of height at most ``depth``?"""
    extended = str(getattr(mode, "value", mode)) == "extended"
    return _prot(algebra, extended, level, ty, depth)


@lru_cache(maxsize=None)
def _prot(alg, extended: bool, l, ty: Type, d: int) -> bool:
    if d <= 0:
        return False
    # Prot-Minimum
    if extended and l == alg.bottom:
        return True
    # Prot-Prod
    if isinstance(ty, Prod):
        if _prot(alg, extended, l, ty.left, d - 1) and _prot(alg, extended, l, ty.right, d - 1):
            return True
    # Prot-Fun
    if isinstance(ty, Fun) and _prot(alg, extended, l, ty.cod, d - 1):
        return True
    if isinstance(ty, Modal):
        # Prot-Monad
        if alg.leq(l, ty.grade):
            return True
        # Prot-Already
        if _prot(alg, extended, l, ty.body, d - 1):
            return True
    # Prot-Combine, over every pair of levels
    if extended:
        for l1, l2 in _combine_pairs(alg, l):
            if _prot(alg, extended, l1, ty, d - 1) and _prot(alg, extended, l2, ty, d - 1):
                return True
    return False


@lru_cache(maxsize=None)
def _combine_pairs(alg, l) -> tuple:
    """Every ``(l1, l2)`` with ``l ≤ l1 ∨ l2``."""
    return tuple((l1, l2) for l1, l2 in product(alg.elements, repeat=2) if alg.leq(l, alg.op(l1, l2)))


def protection_height(algebra, mode, level, ty: Type, limit: int = 32) -> int | None:
    """Height of the shortest derivation of ``level ⊑ ty``, or ``None`` within ``limit``."""
    for d in range(1, limit + 1):
        if protection_search(algebra, mode, level, ty, d):
            return d
    return None


# ---------------------------------------------------------------- typing


def _atoms(ty: Type, out: set):
    out.add(ty)
    for attr in ("left", "right", "dom", "cod", "body"):
        sub = getattr(ty, attr, None)
        if isinstance(sub, Type):
            _atoms(sub, out)


def type_universe(ctx, t: Term, extra=()) -> frozenset:
    """Candidate types for positions no annotation pins down.

    Every type mentioned in the context or in an annotation, its subtypes,
    and the small atoms.  Deliberately finite: the search is bounded anyway.
    """
    out: set = {Unit(), Void(), BOOL}
    for e in ctx:
        _atoms(e.type, out)
    for s in subterms(t):
        for attr in ("annot", "dom"):
            ty = getattr(s, attr, None)
            if isinstance(ty, Type):
                _atoms(ty, out)
    for ty in extra:
        _atoms(ty, out)
    return frozenset(out)


class _Search:
    def __init__(self, algebra, calculus: Calculus, universe: frozenset):
        self.alg = algebra
        self.cal = calculus
        self.universe = universe
        self.memo: dict = {}

    # grades the judgement may range over
    def grades(self, m):
        alg = self.alg
        if self.cal is Calculus.LCIRC:
            return [m]
        if self.cal is Calculus.GMCCE:
            return [g for g in alg.elements if alg.leq(g, m)]  # E-Up
        return [m]

    def types(self, ctx, t, m, d) -> frozenset:
        if d <= 0:
            return frozenset()
        key = (ctx, t, m, d)
        if key not in self.memo:
            out = set()
            for m1 in self.grades(m):
                out |= self.rule(ctx, t, m1, d)
            self.memo[key] = frozenset(out)
        return self.memo[key]

    def admits(self, t: Term) -> bool:
        c = self.cal
        core = (Var, Lam, App, Pair, Proj, Inj, Case, Abort, UnitVal)
        extra = {
            Calculus.GMC: (Ret, Lift, Join, Up),
            Calculus.GCC: (Extr, Lift, Fork, Up),
            Calculus.GMCC: (Ret, Extr, Lift, Join, Fork, Up),
            Calculus.DCC: (Eta, Bind),
            Calculus.DCCE: (Eta, Bind),
            Calculus.LCIRC: (Next, Prev),
            Calculus.GMCCE: (Split, Merge, Up),
        }[c]
        if c is Calculus.LCIRC:
            core = (Var, Lam, App, Inj, Case, UnitVal)
        return isinstance(t, core + extra)

    def bind(self, ctx, name, ty, m):
        return ctx + (Entry(name, ty, m),)

    def rule(self, ctx, t, m, d) -> set:
        if not self.admits(t):
            return set()
        alg, sub = self.alg, d - 1
        T = lambda c, s, g=m: self.types(c, s, g, sub)  # noqa: E731
        if isinstance(t, Var):
            if t.index >= len(ctx):
                return set()
            e = ctx[len(ctx) - 1 - t.index]
            if self.cal.graded and e.grade != m:
                return set()
            return {e.type}
        if isinstance(t, UnitVal):
            return {Unit()}
        if isinstance(t, Lam):
            doms = [t.annot] if t.annot is not None else self.universe
            return {Fun(a, b) for a in doms for b in T(self.bind(ctx, t.binder, a, m), t.body)}
        if isinstance(t, App):
            args = T(ctx, t.arg)
            return {f.cod for f in T(ctx, t.fn) if isinstance(f, Fun) and f.dom in args}
        if isinstance(t, Pair):
            return {Prod(a, b) for a in T(ctx, t.fst) for b in T(ctx, t.snd)}
        if isinstance(t, Proj):
            return {(p.left if t.i == 1 else p.right) for p in T(ctx, t.arg) if isinstance(p, Prod)}
        if isinstance(t, Inj):
            out = set()
            for a in T(ctx, t.arg):
                others = self.universe if t.annot is None else [
                    (t.annot.right if t.i == 1 else t.annot.left)] if isinstance(t.annot, Sum) else []
                for b in others:
                    s = Sum(a, b) if t.i == 1 else Sum(b, a)
                    if t.annot is None or s == t.annot:
                        out.add(s)
            return out
        if isinstance(t, Case):
            out = set()
            lefts, rights = T(ctx, t.left), T(ctx, t.right)
            for s in T(ctx, t.scrut):
                if not isinstance(s, Sum):
                    continue
                for f in lefts:
                    if isinstance(f, Fun) and f.dom == s.left:
                        if Fun(s.right, f.cod) in rights:
                            out.add(f.cod)
            return out
        if isinstance(t, Abort):
            if Void() not in T(ctx, t.arg):
                return set()
            return {t.annot} if t.annot is not None else set(self.universe)
        return self.modal_rule(ctx, t, m, d, T)

    def modal_rule(self, ctx, t, m, d, T) -> set:
        alg = self.alg
        if isinstance(t, Ret):
            return {Modal(alg.unit, a) for a in T(ctx, t.arg)}
        if isinstance(t, Extr):
            return {a.body for a in T(ctx, t.arg) if isinstance(a, Modal) and a.grade == alg.unit}
        if isinstance(t, Lift):
            return {Fun(Modal(t.grade, f.dom), Modal(t.grade, f.cod))
                    for f in T(ctx, t.fn) if isinstance(f, Fun)}
        if isinstance(t, Join):
            return {Modal(alg.op(t.g1, t.g2), a.body.body) for a in T(ctx, t.arg)
                    if isinstance(a, Modal) and a.grade == t.g1
                    and isinstance(a.body, Modal) and a.body.grade == t.g2}
        if isinstance(t, Fork):
            g = alg.op(t.g1, t.g2)
            return {Modal(t.g1, Modal(t.g2, a.body)) for a in T(ctx, t.arg)
                    if isinstance(a, Modal) and a.grade == g}
        if isinstance(t, Up):
            if not alg.leq(t.g1, t.g2):
                return set()
            if self.cal is Calculus.GMCCE:
                if not alg.leq(t.g2, m):
                    return set()
                return set(T(ctx, t.arg, t.g1))
            return {Modal(t.g2, a.body) for a in T(ctx, t.arg)
                    if isinstance(a, Modal) and a.grade == t.g1}
        if isinstance(t, Eta):
            return {Modal(t.grade, a) for a in T(ctx, t.arg)}
        if isinstance(t, Bind):
            mode = "extended" if self.cal is Calculus.DCCE else "plain"
            out = set()
            for a in T(ctx, t.bound):
                if not (isinstance(a, Modal) and a.grade == t.grade):
                    continue
                for b in T(self.bind(ctx, t.binder, a.body, m), t.body):
                    if protection_search(alg, mode, t.grade, b):
                        out.add(b)
            return out
        if isinstance(t, Next):
            return {Modal(1, a) for a in T(ctx, t.arg, m + 1)}
        if isinstance(t, Prev):
            if m < 1:
                return set()
            return {a.body for a in T(ctx, t.arg, m - 1) if isinstance(a, Modal) and a.grade == 1}
        if isinstance(t, Split):
            return {Modal(t.grade, a) for a in T(ctx, t.arg, alg.op(m, t.grade))}
        if isinstance(t, Merge):
            out = set()
            for m1 in self.merge_sources(t.grade, m):
                out |= {a.body for a in T(ctx, t.arg, m1)
                        if isinstance(a, Modal) and a.grade == t.grade}
            return out
        return set()

    def merge_sources(self, g, m):
        """Every ``m1`` with ``m1·g = m`` exactly."""
        alg = self.alg
        if not alg.is_finite:
            return [m - g] if m >= g else []
        return [m1 for m1 in alg.elements if alg.op(m1, g) == m]


def term_height(t: Term) -> int:
    """Height of the syntax tree, which bounds the height of any typing derivation."""
    kids = t.children()
    return 1 + (max(term_height(c) for c in kids) if kids else 0)


def _context(calculus: Calculus, ctx, m):
    out = []
    for e in ctx:
        g = e.grade
        if calculus.graded and g is None:
            g = m
        out.append(Entry(e.name, e.type, g if calculus.graded else None))
    return tuple(out)


def typing_search(algebra, calculus, ctx, t: Term, depth: int = TYPING_DEPTH, m=None,
                  universe=None) -> set:
    """Every type derivable for ``t`` with a derivation of height at most ``depth``."""
    cal = Calculus(calculus)
    if cal.graded and m is None:
        m = 0 if cal is Calculus.LCIRC else algebra.unit
    ctx = _context(cal, ctx, m)
    uni = universe if universe is not None else type_universe(ctx, t)
    return set(_Search(algebra, cal, frozenset(uni)).types(ctx, t, m, depth))


def grade_search(algebra, ctx, t: Term, depth: int = TYPING_DEPTH, grades=None) -> dict:
    """For GMCC_e: each grade at which ``t`` has a type, with the types found."""
    cal = Calculus.GMCCE
    grades = list(algebra.elements) if grades is None else list(grades)
    uni = type_universe(ctx, t)
    out = {}
    for m in grades:
        found = _Search(algebra, cal, uni).types(_context(cal, ctx, m), t, m, depth)
        if found:
            out[m] = set(found)
    return out


# ---------------------------------------------------------------- enumeration


def enumerate_types(algebra, max_depth: int, atoms=(Unit(), BOOL), binary=(Prod, Fun)):
    """All types up to ``max_depth`` built from ``atoms``, the modalities and ``binary``."""
    levels: list[list[Type]] = [[], list(atoms)]
    for d in range(2, max_depth + 1):
        below = [t for lv in levels[: d] for t in lv]
        fresh: list[Type] = []
        newest = levels[d - 1]
        for g in algebra.elements:
            fresh.extend(Modal(g, t) for t in newest)
        for ctor in binary:
            for a in below:
                for b in below:
                    if a in newest or b in newest:
                        fresh.append(ctor(a, b))
        levels.append(fresh)
    return [t for lv in levels for t in lv]


def base_types(names=("A", "B")) -> list[Type]:
    return [Base(n) for n in names]
