"""Abstract syntax for every calculus, with parser, printer, substitution and erasure.

Binding is nameless: ``Var(i)`` points ``i`` binders outwards, and binder names
are kept only as printing hints (they take no part in equality).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import ClassVar, Iterator, Optional, Sequence

from .errors import ParseError, UnknownGrade

# ---------------------------------------------------------------- types


class Type:
    __slots__ = ()

    def __str__(self):
        return print_type(self)


@dataclass(frozen=True, slots=True)
class Unit(Type):
    pass


@dataclass(frozen=True, slots=True)
class Void(Type):
    pass


@dataclass(frozen=True, slots=True)
class Base(Type):
    name: str


@dataclass(frozen=True, slots=True)
class Prod(Type):
    left: Type
    right: Type


@dataclass(frozen=True, slots=True)
class Sum(Type):
    left: Type
    right: Type


@dataclass(frozen=True, slots=True)
class Fun(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True, slots=True)
class Modal(Type):
    grade: object
    body: Type


BOOL = Sum(Unit(), Unit())


def type_depth(t: Type) -> int:
    """Height of the type tree; atoms have depth 1."""
    if isinstance(t, (Prod, Sum, Fun)):
        a, b = (t.left, t.right) if not isinstance(t, Fun) else (t.dom, t.cod)
        return 1 + max(type_depth(a), type_depth(b))
    if isinstance(t, Modal):
        return 1 + type_depth(t.body)
    return 1


# ---------------------------------------------------------------- terms


class Term:
    __slots__ = ()
    KIDS: ClassVar[tuple[str, ...]] = ()
    BINDS: ClassVar[tuple[int, ...]] = ()

    def children(self) -> tuple:
        return tuple(getattr(self, k) for k in self.KIDS)

    def rebuild(self, *kids) -> "Term":
        raise NotImplementedError

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Var(Term):
    index: int

    def rebuild(self):
        return self


@dataclass(frozen=True, slots=True)
class Lam(Term):
    annot: Optional[Type]
    body: Term
    binder: str = field(default="x", compare=False)
    KIDS = ("body",)
    BINDS = (1,)

    def rebuild(self, body):
        return Lam(self.annot, body, self.binder)


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term
    KIDS = ("fn", "arg")
    BINDS = (0, 0)

    def rebuild(self, fn, arg):
        return App(fn, arg)


@dataclass(frozen=True, slots=True)
class Pair(Term):
    fst: Term
    snd: Term
    KIDS = ("fst", "snd")
    BINDS = (0, 0)

    def rebuild(self, fst, snd):
        return Pair(fst, snd)


@dataclass(frozen=True, slots=True)
class Proj(Term):
    i: int
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Proj(self.i, arg)


@dataclass(frozen=True, slots=True)
class Inj(Term):
    i: int
    arg: Term
    annot: Optional[Type] = None  # the whole sum type, when known
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Inj(self.i, arg, self.annot)


@dataclass(frozen=True, slots=True)
class Case(Term):
    """``case s of b1 ; b2`` where both branches are functions."""

    scrut: Term
    left: Term
    right: Term
    KIDS = ("scrut", "left", "right")
    BINDS = (0, 0, 0)

    def rebuild(self, scrut, left, right):
        return Case(scrut, left, right)


@dataclass(frozen=True, slots=True)
class Abort(Term):
    arg: Term
    annot: Optional[Type] = None
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Abort(arg, self.annot)


@dataclass(frozen=True, slots=True)
class UnitVal(Term):
    def rebuild(self):
        return self


@dataclass(frozen=True, slots=True)
class Ret(Term):
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Ret(arg)


@dataclass(frozen=True, slots=True)
class Extr(Term):
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Extr(arg)


@dataclass(frozen=True, slots=True)
class Lift(Term):
    grade: object
    fn: Term
    dom: Optional[Type] = field(default=None, compare=False)  # filled by the checkers
    KIDS = ("fn",)
    BINDS = (0,)

    def rebuild(self, fn):
        return Lift(self.grade, fn, self.dom)


@dataclass(frozen=True, slots=True)
class Join(Term):
    g1: object
    g2: object
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Join(self.g1, self.g2, arg)


@dataclass(frozen=True, slots=True)
class Fork(Term):
    g1: object
    g2: object
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Fork(self.g1, self.g2, arg)


@dataclass(frozen=True, slots=True)
class Up(Term):
    g1: object
    g2: object
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Up(self.g1, self.g2, arg)


@dataclass(frozen=True, slots=True)
class Eta(Term):
    grade: object
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Eta(self.grade, arg)


@dataclass(frozen=True, slots=True)
class Bind(Term):
    grade: object
    binder: str = field(compare=False)
    bound: Term
    body: Term
    ty: Optional[Type] = field(default=None, compare=False)  # result type, filled by the checker
    KIDS = ("bound", "body")
    BINDS = (0, 1)

    def rebuild(self, bound, body):
        return Bind(self.grade, self.binder, bound, body, self.ty)


@dataclass(frozen=True, slots=True)
class Next(Term):
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Next(arg)


@dataclass(frozen=True, slots=True)
class Prev(Term):
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Prev(arg)


@dataclass(frozen=True, slots=True)
class Split(Term):
    grade: object
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Split(self.grade, arg)


@dataclass(frozen=True, slots=True)
class Merge(Term):
    grade: object
    arg: Term
    KIDS = ("arg",)
    BINDS = (0,)

    def rebuild(self, arg):
        return Merge(self.grade, arg)


TRUE = Inj(1, UnitVal(), BOOL)
FALSE = Inj(2, UnitVal(), BOOL)

PLAIN_CONSTRUCTORS = (Var, Lam, App, Pair, Proj, Inj, Case, Abort, UnitVal)

# ---------------------------------------------------------------- contexts


@dataclass(frozen=True, slots=True)
class Entry:
    name: str
    type: Type
    grade: object = None


Context = tuple  # of Entry, innermost last


def lookup(ctx: Context, index: int) -> Entry | None:
    if 0 <= index < len(ctx):
        return ctx[len(ctx) - 1 - index]
    return None


# ---------------------------------------------------------------- nameless operations


def map_children(t: Term, f) -> Term:
    """Rebuild ``t`` with ``f(child, binders)`` applied to each child."""
    if not t.KIDS:
        return t
    return t.rebuild(*(f(getattr(t, k), b) for k, b in zip(t.KIDS, t.BINDS)))


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0:
        return t
    if isinstance(t, Var):
        return Var(t.index + d) if t.index >= cutoff else t
    return map_children(t, lambda c, b: shift(c, d, cutoff + b))


def subst(t: Term, j: int, s: Term) -> Term:
    """Replace free ``Var(j)`` by ``s`` (which lives in the same scope as ``t``)."""
    if isinstance(t, Var):
        return s if t.index == j else t
    return map_children(t, lambda c, b: subst(c, j + b, shift(s, b)) if b else subst(c, j, s))


def instantiate(body: Term, s: Term) -> Term:
    """Substitute ``s`` for the variable bound just outside ``body``."""

    def go(t, k):
        if isinstance(t, Var):
            if t.index == k:
                return shift(s, k)
            return Var(t.index - 1) if t.index > k else t
        return map_children(t, lambda c, b: go(c, k + b))

    return go(body, 0)


def free_vars(t: Term, depth: int = 0) -> set[int]:
    if isinstance(t, Var):
        return {t.index - depth} if t.index >= depth else set()
    out: set[int] = set()
    for k, b in zip(t.KIDS, t.BINDS):
        out |= free_vars(getattr(t, k), depth + b)
    return out


def occurs_free(t: Term, index: int) -> bool:
    if isinstance(t, Var):
        return t.index == index
    return any(occurs_free(getattr(t, k), index + b) for k, b in zip(t.KIDS, t.BINDS))


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in t.children():
        yield from subterms(c)


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in t.children())


def alpha_equal(t1: Term, t2: Term) -> bool:
    """Nameless structural equality; binder names never participate."""
    return t1 == t2


def strip_annotations(t: Term) -> Term:
    """Drop the optional type annotations on lambdas, injections and aborts."""
    if isinstance(t, Lam):
        return Lam(None, strip_annotations(t.body), t.binder)
    if isinstance(t, Inj):
        return Inj(t.i, strip_annotations(t.arg))
    if isinstance(t, Abort):
        return Abort(strip_annotations(t.arg))
    return map_children(t, lambda c, b: strip_annotations(c))


_DROPPED = (Ret, Extr, Join, Fork, Up, Eta, Next, Prev, Split, Merge)


def erase_type(ty: Type | None) -> Type | None:
    """Drop every modality from a type."""
    if ty is None or isinstance(ty, (Unit, Void, Base)):
        return ty
    if isinstance(ty, Modal):
        return erase_type(ty.body)
    if isinstance(ty, Fun):
        return Fun(erase_type(ty.dom), erase_type(ty.cod))
    return type(ty)(erase_type(ty.left), erase_type(ty.right))


def erase(t: Term) -> Term:
    """Strip every modal constructor and grade, leaving a plain lambda term.

    Type annotations survive with their modalities erased.
    """
    if isinstance(t, _DROPPED):
        return erase(t.arg)
    if isinstance(t, Lift):
        return erase(t.fn)
    if isinstance(t, Bind):
        return instantiate(erase(t.body), erase(t.bound))
    if isinstance(t, Lam):
        return Lam(erase_type(t.annot), erase(t.body), t.binder)
    if isinstance(t, Inj):
        return Inj(t.i, erase(t.arg), erase_type(t.annot))
    if isinstance(t, Abort):
        return Abort(erase(t.arg), erase_type(t.annot))
    return map_children(t, lambda c, b: erase(c))


def is_plain(t: Term) -> bool:
    return all(isinstance(s, PLAIN_CONSTRUCTORS) for s in subterms(t))


# ---------------------------------------------------------------- printing


def _grade(g) -> str:
    return str(g)


def print_type(t: Type, prec: int = 0) -> str:
    def paren(s, need):
        return f"({s})" if need else s

    if isinstance(t, Unit):
        return "Unit"
    if isinstance(t, Void):
        return "Void"
    if isinstance(t, Base):
        return t.name
    if t == BOOL:
        return "Bool"
    if isinstance(t, Fun):
        return paren(f"{print_type(t.dom, 1)} -> {print_type(t.cod, 0)}", prec > 0)
    if isinstance(t, Sum):
        return paren(f"{print_type(t.left, 2)} + {print_type(t.right, 1)}", prec > 1)
    if isinstance(t, Prod):
        return paren(f"{print_type(t.left, 3)} * {print_type(t.right, 2)}", prec > 2)
    if isinstance(t, Modal):
        return paren(f"S[{_grade(t.grade)}] {print_type(t.body, 3)}", prec > 3)
    raise TypeError(f"not a type: {t!r}")


_PREFIX_ONE = {Ret: "ret", Extr: "extr", Next: "next", Prev: "prev"}
_PREFIX_GRADE = {Lift: "lift", Eta: "eta", Split: "split", Merge: "merge"}
_PREFIX_TWO = {Join: "join", Fork: "fork", Up: "up"}


def _fresh(hint: str, taken: Sequence[str]) -> str:
    base = hint or "x"
    if base not in taken:
        return base
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def _open_tail(t: Term) -> bool:
    if isinstance(t, Case):
        return True
    if isinstance(t, (Lam, Bind)):
        return _open_tail(t.body)
    return False


def print_term(t: Term, names: Sequence[str] = ()) -> str:
    """Render ``t``; ``names`` lists the free variables, outermost first."""
    return _pt(t, list(names), 0)


def _pt(t: Term, names: list[str], level: int) -> str:
    def paren(s, need):
        return f"({s})" if need else s

    if isinstance(t, Var):
        if t.index < len(names):
            return names[len(names) - 1 - t.index]
        return f"#{t.index - len(names)}"
    if isinstance(t, UnitVal):
        return "unit"
    if isinstance(t, Pair):
        return f"({_pt(t.fst, names, 0)}, {_pt(t.snd, names, 0)})"
    if isinstance(t, Lam):
        x = _fresh(t.binder, names)
        ann = f":{print_type(t.annot)}" if t.annot is not None else ""
        return paren(f"\\{x}{ann}. {_pt(t.body, names + [x], 0)}", level > 0)
    if isinstance(t, Bind):
        x = _fresh(t.binder, names)
        s = (f"bind[{_grade(t.grade)}] {x} = {_pt(t.bound, names, 0)} in "
             f"{_pt(t.body, names + [x], 0)}")
        return paren(s, level > 0)
    if isinstance(t, Case):
        left = _pt(t.left, names, 0)
        if _open_tail(t.left):
            left = f"({left})"
        s = f"case {_pt(t.scrut, names, 0)} of {left} ; {_pt(t.right, names, 0)}"
        return paren(s, level > 0)
    if isinstance(t, App):
        return paren(f"{_pt(t.fn, names, 1)} {_pt(t.arg, names, 3)}", level > 1)
    if isinstance(t, Inj):
        if t.annot == BOOL and isinstance(t.arg, UnitVal):
            return "true" if t.i == 1 else "false"
        ann = f"[{print_type(t.annot)}]" if t.annot is not None else ""
        return paren(f"inj{t.i}{ann} {_pt(t.arg, names, 3)}", level > 2)
    if isinstance(t, Abort):
        ann = f"[{print_type(t.annot)}]" if t.annot is not None else ""
        return paren(f"abort{ann} {_pt(t.arg, names, 3)}", level > 2)
    if isinstance(t, Proj):
        return paren(f"proj{t.i} {_pt(t.arg, names, 3)}", level > 2)
    kind = type(t)
    if kind in _PREFIX_ONE:
        head = _PREFIX_ONE[kind]
    elif kind in _PREFIX_GRADE:
        head = f"{_PREFIX_GRADE[kind]}[{_grade(t.grade)}]"
    elif kind in _PREFIX_TWO:
        head = f"{_PREFIX_TWO[kind]}[{_grade(t.g1)},{_grade(t.g2)}]"
    else:
        raise TypeError(f"not a term: {t!r}")
    arg = t.fn if isinstance(t, Lift) else t.arg
    return paren(f"{head} {_pt(arg, names, 3)}", level > 2)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r\n]+|--[^\n]*)
      |(?P<arrow>->|→)
      |(?P<sym>[\\λ.:(),;\[\]=*×+])
      |(?P<int>\d+)
      |(?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_PREFIX_KEYWORDS = {
    "ret": (Ret, 0), "extr": (Extr, 0), "next": (Next, 0), "prev": (Prev, 0),
    "lift": (Lift, 1), "eta": (Eta, 1), "split": (Split, 1), "merge": (Merge, 1),
    "join": (Join, 2), "fork": (Fork, 2), "up": (Up, 2),
    "proj1": (Proj, 0), "proj2": (Proj, 0), "inj1": (Inj, 0), "inj2": (Inj, 0),
    "abort": (Abort, 0),
}
KEYWORDS = set(_PREFIX_KEYWORDS) | {"bind", "in", "case", "of", "unit", "true", "false"}
_MODAL_HEADS = {"S", "T", "D"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Tok]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group()
        if m.lastgroup != "ws":
            kind = m.lastgroup
            if kind == "arrow":
                text = "->"
            elif text == "λ":
                text = "\\"
            elif text == "×":
                text = "*"
            out.append(_Tok(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    out.append(_Tok("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, src: str, algebra, names: Sequence[str]):
        self.toks = _tokenize(src)
        self.i = 0
        self.algebra = algebra
        self.names = list(names)

    # token helpers

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def take(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = text if text is not None else kind
            found = t.text or "end of input"
            raise ParseError(f"expected {want!r}, found {found!r}", t.line, t.col)
        self.i += 1
        return t

    def error(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    # grades

    def grade_atom(self):
        t = self.tok
        if t.kind not in ("ident", "int"):
            self.error("expected a grade")
        self.i += 1
        if self.algebra is None:
            raise ParseError("grades need an algebra", t.line, t.col)
        try:
            return self.algebra.parse_grade(t.text)
        except UnknownGrade:
            raise UnknownGrade(t.text, t.line, t.col) from None

    def grade(self):
        g = self.grade_atom()
        while self.at("*"):
            self.take("*")
            g = self.algebra.op(g, self.grade_atom())
        return g

    def grades(self, n: int) -> list:
        self.take("[")
        out = [self.grade()]
        while self.at(","):
            self.take(",")
            out.append(self.grade())
        self.take("]")
        if len(out) != n:
            self.error(f"expected {n} grade(s), found {len(out)}")
        return out

    # types

    def type(self) -> Type:
        left = self.sum_type()
        if self.at("->"):
            self.take("->")
            return Fun(left, self.type())
        return left

    def sum_type(self) -> Type:
        left = self.prod_type()
        if self.at("+"):
            self.take("+")
            return Sum(left, self.sum_type())
        return left

    def prod_type(self) -> Type:
        left = self.prefix_type()
        if self.at("*"):
            self.take("*")
            return Prod(left, self.prod_type())
        return left

    def prefix_type(self) -> Type:
        t = self.tok
        if t.kind == "ident" and t.text in _MODAL_HEADS and self.peek().text == "[":
            self.i += 1
            (g,) = self.grades(1)
            return Modal(g, self.prefix_type())
        if t.kind == "ident" and t.text == "O":
            self.i += 1
            if self.algebra is None:
                raise ParseError("`O` needs the nat algebra", t.line, t.col)
            try:
                one = self.algebra.parse_grade("1")
            except UnknownGrade:
                raise ParseError("`O` is only meaningful over the nat algebra", t.line, t.col)
            return Modal(one, self.prefix_type())
        return self.atom_type()

    def atom_type(self) -> Type:
        t = self.tok
        if t.text == "(":
            self.take("(")
            ty = self.type()
            self.take(")")
            return ty
        if t.kind != "ident":
            self.error(f"expected a type, found {t.text or 'end of input'!r}")
        self.i += 1
        if t.text == "Unit":
            return Unit()
        if t.text == "Void":
            return Void()
        if t.text == "Bool":
            return BOOL
        return Base(t.text)

    # terms

    def starts_binder_form(self) -> bool:
        return self.at("\\") or self.at("bind") or self.at("case")

    def starts_prefix(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in ("bind", "in", "case", "of")
        return t.text == "(" and t.kind == "sym"

    def term(self) -> Term:
        if self.at("\\"):
            self.take("\\")
            name = self.take(kind="ident").text
            if name in KEYWORDS:
                self.error(f"{name!r} is a keyword")
            annot = None
            if self.at(":"):
                self.take(":")
                annot = self.type()
            self.take(".")
            self.names.append(name)
            body = self.term()
            self.names.pop()
            return Lam(annot, body, name)
        if self.at("bind"):
            self.take("bind")
            (g,) = self.grades(1)
            name = self.take(kind="ident").text
            self.take("=")
            bound = self.term()
            self.take("in")
            self.names.append(name)
            body = self.term()
            self.names.pop()
            return Bind(g, name, bound, body)
        if self.at("case"):
            self.take("case")
            scrut = self.term()
            self.take("of")
            left = self.term()
            self.take(";")
            right = self.term()
            return Case(scrut, left, right)
        return self.application()

    def application(self) -> Term:
        head = self.prefix()
        while True:
            if self.starts_binder_form():
                return App(head, self.term())
            if not self.starts_prefix():
                return head
            head = App(head, self.prefix())

    def prefix_arg(self) -> Term:
        return self.term() if self.starts_binder_form() else self.prefix()

    def prefix(self) -> Term:
        t = self.tok
        if t.kind == "ident" and t.text in _PREFIX_KEYWORDS:
            self.i += 1
            cls, ngrades = _PREFIX_KEYWORDS[t.text]
            gs = self.grades(ngrades) if ngrades else []
            annot = None
            if cls in (Inj, Abort) and self.at("["):
                self.take("[")
                annot = self.type()
                self.take("]")
            arg = self.prefix_arg()
            if cls is Proj:
                return Proj(int(t.text[-1]), arg)
            if cls is Inj:
                return Inj(int(t.text[-1]), arg, annot)
            if cls is Abort:
                return Abort(arg, annot)
            return cls(*gs, arg)
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        if t.text == "(" and t.kind == "sym":
            self.take("(")
            first = self.term()
            if self.at(","):
                self.take(",")
                second = self.term()
                self.take(")")
                return Pair(first, second)
            self.take(")")
            return first
        if t.kind == "ident":
            if t.text == "unit":
                self.i += 1
                return UnitVal()
            if t.text == "true":
                self.i += 1
                return TRUE
            if t.text == "false":
                self.i += 1
                return FALSE
            if t.text in KEYWORDS:
                self.error(f"unexpected keyword {t.text!r}")
            self.i += 1
            for k in range(len(self.names) - 1, -1, -1):
                if self.names[k] == t.text:
                    return Var(len(self.names) - 1 - k)
            raise ParseError(f"unbound variable {t.text!r}", t.line, t.col)
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def finish(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")


def parse_term(source: str, algebra=None, names: Sequence[str] = ()) -> Term:
    """Parse a term; ``names`` are the free variables in scope, outermost first."""
    p = _Parser(source, algebra, names)
    t = p.term()
    p.finish()
    return t


def parse_type(source: str, algebra=None) -> Type:
    p = _Parser(source, algebra, ())
    t = p.type()
    p.finish()
    return t
