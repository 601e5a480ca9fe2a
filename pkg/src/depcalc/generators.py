"""Type-directed random generation of well-typed terms for every calculus.

Generation works backwards from a goal type: each step picks a rule whose
conclusion matches the goal and recurses on its premises, backtracking when a
premise has no inhabitant in the current context (comonadic calculi, for
instance, cannot build a closed term of modal type).  Output is well-typed by
construction; callers still re-check it with the real checker, since the
generator is a test input source, not an oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .checker import Calculus
from .syntax import (
    BOOL,
    App,
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
)
from .typecheck_dcce import ProtectionMode, protected

_NAMES = "xyzuvwpqrst"


class _OutOfBudget(Exception):
    pass


@dataclass
class GenConfig:
    size: int = 6
    type_depth: int = 3
    budget: int = 800  # rule attempts per top-level request


class TermGenerator:
    def __init__(self, algebra, calculus, rng: random.Random | int | None = None,
                 config: GenConfig | None = None):
        self.algebra = algebra
        self.calculus = Calculus(calculus)
        self.rng = rng if isinstance(rng, random.Random) else random.Random(rng)
        self.config = config or GenConfig()
        self._left = 0
        c = self.calculus
        self.monadic = c in (Calculus.GMC, Calculus.GMCC)
        self.comonadic = c in (Calculus.GCC, Calculus.GMCC)
        self.graded = c.graded
        self.products = c is not Calculus.LCIRC

    # ------------------------------------------------------------ grades and types

    @property
    def grades(self) -> list:
        if self.calculus is Calculus.LCIRC:
            return [1]
        if not self.algebra.is_finite:
            return [0, 1, 2]
        return list(self.algebra.elements)

    def random_type(self, depth: int | None = None, modal: bool = True) -> Type:
        depth = self.config.type_depth if depth is None else depth
        r = self.rng
        if depth <= 1 or r.random() < 0.25:
            return r.choice([Unit(), BOOL])
        kinds = ["fun", "modal", "modal"] if modal else ["fun"]
        if self.products:
            kinds.append("prod")
        kinds.append("sum")
        k = r.choice(kinds)
        if k == "fun":
            return Fun(self.random_type(depth - 1, modal), self.random_type(depth - 1, modal))
        if k == "prod":
            return Prod(self.random_type(depth - 1, modal), self.random_type(depth - 1, modal))
        if k == "sum":
            return Sum(r.choice([Unit(), BOOL]), r.choice([Unit(), BOOL]))
        return Modal(r.choice(self.grades), self.random_type(depth - 1, modal))

    def random_context(self, max_len: int = 2, grade=None) -> tuple:
        # without a monad, modal values can only come from the context
        only_comonad = self.comonadic and not self.monadic
        n = self.rng.randint(1 if only_comonad else 0, max_len)
        out = []
        for i in range(n):
            g = None
            if self.graded:
                g = grade if grade is not None and self.rng.random() < 0.7 else self.rng.choice(self.grades)
            ty = self.random_type(2)
            if only_comonad and self.rng.random() < 0.6:
                ty = Modal(self.rng.choice(self.grades), self.random_type(2))
            out.append(Entry(_NAMES[i + 5], ty, g))
        return tuple(out)

    # ------------------------------------------------------------ entry point

    def term(self, ctx, ty: Type, m=None, size: int | None = None) -> Term | None:
        """A term with ``ctx ⊢ t : ty`` (at grade ``m`` for graded calculi), or ``None``."""
        self._left = self.config.budget
        try:
            return self._gen(tuple(ctx), ty, self.config.size if size is None else size, m)
        except _OutOfBudget:
            return None

    # ------------------------------------------------------------ core search

    def visible(self, entry: Entry, m) -> bool:
        if not self.graded:
            return True
        return self.algebra.leq(entry.grade, m)

    def bind(self, ctx, ty, m) -> tuple:
        return ctx + (Entry(_NAMES[len(ctx) % len(_NAMES)], ty, m if self.graded else None),)

    def _gen(self, ctx, ty, size, m) -> Term | None:
        self._left -= 1
        if self._left < 0:
            raise _OutOfBudget
        options: list[tuple[float, object]] = []
        for i, e in enumerate(reversed(ctx)):
            if not self.visible(e, m):
                continue
            if e.type == ty:
                options.append((3.0, lambda i=i: Var(i)))
            if size > 0:
                options.extend(self._var_elims(ctx, i, e.type, ty, size, m))
        options.extend(self._intros(ctx, ty, size, m))
        if size > 0:
            options.extend(self._elims(ctx, ty, size, m))
        # weighted shuffle
        keyed = sorted(options, key=lambda o: -self.rng.random() ** (1.0 / o[0]))
        for _, thunk in keyed:
            out = thunk()
            if out is not None:
                return out
        return None

    def _sub(self, ctx, ty, size, m):
        return self._gen(ctx, ty, size - 1, m)

    def _var_elims(self, ctx, i, vty, goal, size, m):
        out = []
        if isinstance(vty, Fun) and vty.cod == goal:
            out.append((2.0, lambda: self._app(Var(i), ctx, vty.dom, size, m)))
        if isinstance(vty, Prod):
            for k, comp in ((1, vty.left), (2, vty.right)):
                if comp == goal:
                    out.append((2.0, lambda k=k: Proj(k, Var(i))))
        if isinstance(vty, Sum):
            out.append((1.0, lambda: self._case(Var(i), vty, ctx, goal, size, m)))
        if self.calculus is Calculus.DCCE and isinstance(vty, Modal):
            if protected(self.algebra, ProtectionMode.EXTENDED, vty.grade, goal):
                out.append((3.0, lambda: self._bind_on(Var(i), vty, ctx, goal, size, m)))
        return out

    def _app(self, fn, ctx, dom, size, m):
        arg = self._sub(ctx, dom, size, m)
        return None if arg is None else App(fn, arg)

    def _case(self, scrut, sty, ctx, goal, size, m):
        left = self._sub(ctx, Fun(sty.left, goal), size, m)
        if left is None:
            return None
        right = self._sub(ctx, Fun(sty.right, goal), size, m)
        return None if right is None else Case(scrut, left, right)

    def _bind_on(self, bound, bty, ctx, goal, size, m):
        body = self._sub(self.bind(ctx, bty.body, m), goal, size, m)
        return None if body is None else Bind(bty.grade, "y", bound, body)

    # ------------------------------------------------------------ introductions

    def _intros(self, ctx, ty, size, m):
        out = []
        sub = self._sub
        if isinstance(ty, Unit):
            out.append((1.0, lambda: UnitVal()))
        elif isinstance(ty, Sum):
            for k, comp in ((1, ty.left), (2, ty.right)):
                out.append((1.0, lambda k=k, comp=comp: self._wrap(
                    sub(ctx, comp, size, m), lambda a, k=k: Inj(k, a, ty))))
        elif isinstance(ty, Prod) and self.products:
            out.append((1.0, lambda: self._pair(ctx, ty, size, m)))
        elif isinstance(ty, Fun):
            out.append((2.0, lambda: self._wrap(
                sub(self.bind(ctx, ty.dom, m), ty.cod, size, m),
                lambda b: Lam(ty.dom, b, _NAMES[len(ctx) % len(_NAMES)]))))
        elif isinstance(ty, Modal):
            out.extend(self._modal_intros(ctx, ty, size, m))
        return out

    def _wrap(self, t, build):
        return None if t is None else build(t)

    def _pair(self, ctx, ty, size, m):
        a = self._sub(ctx, ty.left, size, m)
        if a is None:
            return None
        b = self._sub(ctx, ty.right, size, m)
        return None if b is None else Pair(a, b)

    def _modal_intros(self, ctx, ty: Modal, size, m):
        alg, g, body = self.algebra, ty.grade, ty.body
        c = self.calculus
        sub, wrap = self._sub, self._wrap
        out = []
        if c is Calculus.DCCE:
            out.append((2.0, lambda: wrap(sub(ctx, body, size, m), lambda a: Eta(g, a))))
            return out
        if c is Calculus.LCIRC:
            out.append((2.0, lambda: wrap(sub(ctx, body, size, m + 1), Next)))
            return out
        if c is Calculus.GMCCE:
            out.append((2.0, lambda: wrap(sub(ctx, body, size, alg.op(m, g)),
                                          lambda a: Split(g, a))))
            return out
        if self.monadic and g == alg.unit:
            out.append((2.0, lambda: wrap(sub(ctx, body, size, m), Ret)))
        if alg.is_finite:
            below = [h for h in alg.elements if h != g and alg.leq(h, g)]
            if below:
                h = self.rng.choice(below)
                out.append((1.0, lambda: wrap(sub(ctx, Modal(h, body), size, m),
                                              lambda a: Up(h, g, a))))
        if size > 1:
            if self.monadic and alg.is_finite:
                splits = [(a, b) for a in alg.elements for b in alg.elements if alg.op(a, b) == g]
                g1, g2 = self.rng.choice(splits)
                out.append((1.0, lambda g1=g1, g2=g2: wrap(
                    sub(ctx, Modal(g1, Modal(g2, body)), size, m), lambda a: Join(g1, g2, a))))
            if self.comonadic and isinstance(body, Modal):
                h2 = body.grade
                out.append((1.5, lambda: wrap(sub(ctx, Modal(alg.op(g, h2), body.body), size, m),
                                              lambda a: Fork(g, h2, a))))
            x = self.random_type(2, modal=False)
            out.append((1.0, lambda: self._lift_app(ctx, g, x, body, size, m)))
        return out

    def _lift_app(self, ctx, g, x, body, size, m):
        f = self._sub(ctx, Fun(x, body), size, m)
        if f is None:
            return None
        a = self._sub(ctx, Modal(g, x), size, m)
        return None if a is None else App(Lift(g, f), a)

    # ------------------------------------------------------------ eliminations

    def _elims(self, ctx, ty, size, m):
        out = []
        alg, c = self.algebra, self.calculus
        sub, wrap = self._sub, self._wrap
        x = self.random_type(2)
        out.append((0.7, lambda: self._app_any(ctx, x, ty, size, m)))
        out.append((0.4, lambda: self._case_any(ctx, ty, size, m)))
        if self.products:
            other = self.random_type(1)
            out.append((0.3, lambda: wrap(sub(ctx, Prod(ty, other), size, m),
                                          lambda p: Proj(1, p))))
        if self.comonadic:
            out.append((0.8, lambda: wrap(sub(ctx, Modal(alg.unit, ty), size, m), Extr)))
        if c is Calculus.DCCE:
            levels = [l for l in alg.elements
                      if protected(alg, ProtectionMode.EXTENDED, l, ty)]
            l = self.rng.choice(levels)
            inner = self.random_type(2)
            out.append((1.0, lambda: self._bind_any(ctx, l, inner, ty, size, m)))
        if c is Calculus.LCIRC and m >= 1:
            out.append((0.8, lambda: wrap(sub(ctx, Modal(1, ty), size, m - 1), Prev)))
        if c is Calculus.GMCCE:
            g = self.rng.choice(self.grades)
            cands = [h for h in self.grades if alg.leq(alg.op(h, g), m)]
            if cands:
                h = self.rng.choice(cands)
                out.append((0.8, lambda: wrap(sub(ctx, Modal(g, ty), size, h),
                                              lambda a: Merge(g, a))))
            lows = [(a, b) for a in self.grades for b in self.grades
                    if a != b and alg.leq(a, b) and alg.leq(b, m)]
            if lows:
                g1, g2 = self.rng.choice(lows)
                out.append((0.3, lambda: wrap(sub(ctx, ty, size, g1), lambda a: Up(g1, g2, a))))
        return out

    def _app_any(self, ctx, x, ty, size, m):
        f = self._sub(ctx, Fun(x, ty), size, m)
        return None if f is None else self._app(f, ctx, x, size, m)

    def _case_any(self, ctx, ty, size, m):
        sty = Sum(self.rng.choice([Unit(), BOOL]), self.rng.choice([Unit(), BOOL]))
        s = self._sub(ctx, sty, size, m)
        return None if s is None else self._case(s, sty, ctx, ty, size, m)

    def _bind_any(self, ctx, level, inner, ty, size, m):
        bound = self._sub(ctx, Modal(level, inner), size, m)
        if bound is None:
            return None
        return self._bind_on(bound, Modal(level, inner), ctx, ty, size, m)


def generate_corpus(algebra, calculus, n: int, seed: int = 0, closed: bool = False,
                    config: GenConfig | None = None, grade=None, max_tries: int | None = None):
    """``n`` random judgements ``(ctx, term, type, grade)`` that pass the real checker."""
    from .judgements import infer_judgement

    gen = TermGenerator(algebra, calculus, seed, config)
    cal = Calculus(calculus)
    out = []
    tries = 0
    limit = max_tries if max_tries is not None else n * 50
    while len(out) < n and tries < limit:
        tries += 1
        m = grade
        if cal.graded and m is None:
            m = gen.rng.choice(gen.grades)
        ctx = () if closed else gen.random_context(2, m)
        ty = gen.random_type()
        t = gen.term(ctx, ty, m)
        if t is None:
            continue
        try:
            found = infer_judgement(algebra, cal, ctx, t, m, expected=ty)
        except Exception as exc:  # the generator disagreeing with the checker is a bug
            raise AssertionError(f"generated term failed to check: {exc}") from exc
        out.append((ctx, t, found, m))
    return out
