"""One entry point for every calculus's checker, plus the judgement file format.

A judgement file lists context entries, an optional expected type and grade,
and a term::

    -- comments run to end of line
    var x : S[Secret] Bool
    var y @ 2 : Unit          (graded calculi: entry grade after '@')
    grade 0                   (graded calculi: grade of the judgement)
    type Bool                 (optional: check instead of infer)
    term bind[Secret] z = x in
         z

The ``term`` directive swallows every following line.  A file with no
directives at all is read as a bare closed term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import NATURALS
from .checker import Calculus
from .errors import ParseError
from .syntax import Entry, Term, Type, parse_term, parse_type
from .typecheck_core import elaborate_core
from .typecheck_dcce import ProtectionMode, elaborate_dcc
from .typecheck_staged import elaborate_gmcce, elaborate_lcirc

_CORE = (Calculus.GMC, Calculus.GCC, Calculus.GMCC)


def elaborate_judgement(algebra, calculus, ctx, t: Term, m=None, expected: Type | None = None):
    """``(type, elaborated term)`` for ``ctx ⊢ t`` in ``calculus``."""
    cal = Calculus(calculus)
    if cal in _CORE:
        return elaborate_core(algebra, cal, ctx, t, expected)
    if cal is Calculus.DCC:
        return elaborate_dcc(algebra, ProtectionMode.PLAIN, ctx, t, expected)
    if cal is Calculus.DCCE:
        return elaborate_dcc(algebra, ProtectionMode.EXTENDED, ctx, t, expected)
    if cal is Calculus.LCIRC:
        return elaborate_lcirc(ctx, t, 0 if m is None else m, expected)
    return elaborate_gmcce(algebra, ctx, t, algebra.unit if m is None else m, expected)


def infer_judgement(algebra, calculus, ctx, t: Term, m=None, expected: Type | None = None) -> Type:
    return elaborate_judgement(algebra, calculus, ctx, t, m, expected)[0]


def algebra_for(calculus, algebra):
    """λ° always runs over the naturals whatever algebra was requested."""
    return NATURALS if Calculus(calculus) is Calculus.LCIRC else algebra


@dataclass(frozen=True)
class Judgement:
    ctx: tuple = ()
    term: Term | None = None
    type: Type | None = None
    grade: object = None
    names: tuple = field(default=(), compare=False)


def _strip(line: str) -> str:
    at = line.find("--")
    return line if at < 0 else line[:at]


def parse_judgement(source: str, algebra) -> Judgement:
    lines = source.splitlines()
    if not any(_strip(l).split()[:1] and _strip(l).split()[0] in ("var", "term", "type", "grade")
               for l in lines):
        return Judgement(term=parse_term(source, algebra))
    ctx, names = [], []
    ty = grade = None
    term_src = None
    for n, raw in enumerate(lines, start=1):
        line = _strip(raw).strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "term":
            term_src = "\n".join([rest] + [_strip(l) for l in lines[n:]])
            break
        if head == "var":
            lhs, sep, rhs = rest.partition(":")
            if not sep:
                raise ParseError("expected 'var name : type'", n, 1)
            name, _, g = lhs.partition("@")
            name = name.strip()
            eg = algebra.parse_grade(g.strip()) if g.strip() else None
            ctx.append(Entry(name, parse_type(rhs, algebra), eg))
            names.append(name)
        elif head == "type":
            ty = parse_type(rest, algebra)
        elif head == "grade":
            grade = algebra.parse_grade(rest.strip())
        else:
            raise ParseError(f"unknown directive {head!r}", n, 1)
    if term_src is None:
        raise ParseError("judgement has no 'term' directive", len(lines), 1)
    term = parse_term(term_src, algebra, names)
    return Judgement(tuple(ctx), term, ty, grade, tuple(names))


def graded_context(ctx, default):
    """Give ungraded entries the default grade (graded calculi only)."""
    return tuple(e if e.grade is not None else Entry(e.name, e.type, default) for e in ctx)
