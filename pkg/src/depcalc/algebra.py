"""Grade structures: finite preordered monoids, finite join-semilattices and the naturals.

Finite algebras are given as explicit tables and every law is checked by
enumeration.  The naturals are built in; their laws are trusted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Union

from .errors import ForeignGrade, InfiniteCarrier, MalformedTable, RequiresSemilattice

Grade = Union[str, int]


class Kind(str, Enum):
    FINITE_MONOID = "monoid"
    FINITE_JOIN_SEMILATTICE = "semilattice"
    NATURALS = "naturals"


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple

    def __str__(self):
        return f"{self.law}: {', '.join(map(str, self.witness))}"


@dataclass(frozen=True, eq=False)
class GradeAlgebra:
    """A preordered monoid ``(M, op, unit, leq)``.

    For the naturals ``elements`` is ``None`` and the operations are built in.
    Tables map ordered pairs of element names.
    """

    name: str
    kind: Kind
    elements: tuple[str, ...] | None
    unit: Grade
    op_table: dict = field(default_factory=dict, repr=False)
    leq_pairs: frozenset = field(default_factory=frozenset, repr=False)

    # membership

    @property
    def is_finite(self) -> bool:
        return self.kind is not Kind.NATURALS

    @property
    def is_semilattice(self) -> bool:
        return self.kind is Kind.FINITE_JOIN_SEMILATTICE

    def contains(self, g) -> bool:
        if self.kind is Kind.NATURALS:
            return isinstance(g, int) and not isinstance(g, bool) and g >= 0
        return isinstance(g, str) and g in self.elements

    def require(self, g) -> Grade:
        if not self.contains(g):
            raise ForeignGrade(g, self.name)
        return g

    def carrier(self) -> tuple[str, ...]:
        if not self.is_finite:
            raise InfiniteCarrier(f"algebra {self.name} has an infinite carrier")
        return self.elements

    # structure

    def op(self, m1, m2) -> Grade:
        self.require(m1)
        self.require(m2)
        if self.kind is Kind.NATURALS:
            return m1 + m2
        return self.op_table[(m1, m2)]

    def leq(self, m1, m2) -> bool:
        self.require(m1)
        self.require(m2)
        if self.kind is Kind.NATURALS:
            return m1 == m2
        return (m1, m2) in self.leq_pairs

    @property
    def bottom(self) -> Grade:
        if not self.is_semilattice:
            raise RequiresSemilattice(f"algebra {self.name} is not a join-semilattice")
        return self.unit

    def join(self, *grades) -> Grade:
        if not self.is_semilattice:
            raise RequiresSemilattice(f"algebra {self.name} is not a join-semilattice")
        acc = self.unit
        for g in grades:
            acc = self.op(acc, g)
        return acc

    def lower_bounds(self, *grades) -> list[str]:
        return [c for c in self.carrier() if all(self.leq(c, g) for g in grades)]

    def parse_grade(self, text: str) -> Grade:
        from .errors import UnknownGrade

        if self.kind is Kind.NATURALS:
            if text.isdigit():
                return int(text)
            raise UnknownGrade(text)
        if text in self.elements:
            return text
        raise UnknownGrade(text)

    def __str__(self):
        return self.name


def op(algebra: GradeAlgebra, m1, m2) -> Grade:
    return algebra.op(m1, m2)


def leq(algebra: GradeAlgebra, m1, m2) -> bool:
    return algebra.leq(m1, m2)


def validate(algebra: GradeAlgebra) -> list[Violation]:
    """Check every law by enumeration; an empty list means the algebra is valid."""
    if algebra.kind is Kind.NATURALS:
        return []
    els = algebra.elements
    declared = set(els)
    if len(declared) != len(els):
        raise MalformedTable("duplicate element names")
    if algebra.unit not in declared:
        raise MalformedTable(f"unit {algebra.unit!r} is not a declared element")
    for (a, b), c in algebra.op_table.items():
        for x in (a, b, c):
            if x not in declared:
                raise MalformedTable(f"op table mentions undeclared element {x!r}")
    for a, b in algebra.leq_pairs:
        for x in (a, b):
            if x not in declared:
                raise MalformedTable(f"leq table mentions undeclared element {x!r}")
    for a, b in itertools.product(els, repeat=2):
        if (a, b) not in algebra.op_table:
            raise MalformedTable(f"op table has no entry for ({a}, {b})")

    o, le = algebra.op, algebra.leq
    out: list[Violation] = []
    for a, b, c in itertools.product(els, repeat=3):
        if o(o(a, b), c) != o(a, o(b, c)):
            out.append(Violation("associativity", (a, b, c)))
    for a in els:
        if o(algebra.unit, a) != a or o(a, algebra.unit) != a:
            out.append(Violation("unit", (a,)))
        if not le(a, a):
            out.append(Violation("reflexivity", (a,)))
    for a, b, c in itertools.product(els, repeat=3):
        if le(a, b) and le(b, c) and not le(a, c):
            out.append(Violation("transitivity", (a, b, c)))
    for a, a2, b, b2 in itertools.product(els, repeat=4):
        if le(a, a2) and le(b, b2) and not le(o(a, b), o(a2, b2)):
            out.append(Violation("monotonicity", (a, a2, b, b2)))
    if algebra.kind is Kind.FINITE_JOIN_SEMILATTICE:
        for a in els:
            if o(a, a) != a:
                out.append(Violation("idempotence", (a,)))
            if not le(algebra.unit, a):
                out.append(Violation("unit is least", (a,)))
        for a, b in itertools.product(els, repeat=2):
            if o(a, b) != o(b, a):
                out.append(Violation("commutativity", (a, b)))
            if le(a, b) != (o(a, b) == b):
                out.append(Violation("antisymmetry/semilattice-order mismatch", (a, b)))
    return out


# construction helpers


def finite_monoid(name: str, elements: Iterable[str], unit: str, op_table: dict,
                  leq_pairs: Iterable[tuple[str, str]]) -> GradeAlgebra:
    return GradeAlgebra(name, Kind.FINITE_MONOID, tuple(elements), unit,
                        dict(op_table), frozenset(leq_pairs))


def semilattice_from_order(name: str, elements: Iterable[str],
                           covers: Iterable[tuple[str, str]]) -> GradeAlgebra:
    """Build a join-semilattice from a Hasse diagram given as ``(lower, upper)`` pairs.

    The join is the least upper bound computed from the reflexive-transitive
    closure; a missing or non-unique bound raises ``MalformedTable``.
    """
    els = tuple(elements)
    order = {(a, a) for a in els} | set(covers)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(order), repeat=2):
            if b == c and (a, d) not in order:
                order.add((a, d))
                changed = True
    table = {}
    for a, b in itertools.product(els, repeat=2):
        ubs = [u for u in els if (a, u) in order and (b, u) in order]
        least = [u for u in ubs if all((u, v) in order for v in ubs)]
        if len(least) != 1:
            raise MalformedTable(f"no unique join for ({a}, {b})")
        table[(a, b)] = least[0]
    bottoms = [u for u in els if all((u, v) in order for v in els)]
    if len(bottoms) != 1:
        raise MalformedTable("no least element")
    return GradeAlgebra(name, Kind.FINITE_JOIN_SEMILATTICE, els, bottoms[0], table,
                        frozenset(order))


NATURALS = GradeAlgebra("nat", Kind.NATURALS, None, 0)

L2 = semilattice_from_order("l2", ["Public", "Secret"], [("Public", "Secret")])

DIAMOND = semilattice_from_order(
    "diamond",
    ["bot", "l11", "l12", "l21", "l22", "l3", "top"],
    [("bot", "l11"), ("bot", "l12"), ("l11", "l21"), ("l12", "l22"),
     ("l21", "l3"), ("l22", "l3"), ("l3", "top")],
)

TRIVIAL = semilattice_from_order("trivial", ["one"], [])

BUILTINS = {"l2": L2, "diamond": DIAMOND, "nat": NATURALS, "trivial": TRIVIAL}


def parse_algebra(text: str, name: str = "custom") -> GradeAlgebra:
    """Read the declarative algebra format.

    Lines are ``kind monoid|semilattice``, ``elements a b c``, ``unit a``,
    ``op a b = c`` (the ``=`` is optional) and ``leq a b``.  ``--`` starts a
    comment.  A semilattice may omit ``leq`` rows, in which case the order is
    read off the join table.
    """
    kind = None
    elements: list[str] = []
    unit = None
    table: dict = {}
    pairs: set = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("--", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        rest = [w for w in rest if w != "="]
        if head == "kind":
            if rest not in (["monoid"], ["semilattice"]):
                raise MalformedTable(f"line {lineno}: kind must be monoid or semilattice")
            kind = Kind(rest[0])
        elif head == "elements":
            elements.extend(rest)
        elif head == "unit":
            if len(rest) != 1:
                raise MalformedTable(f"line {lineno}: unit takes one element")
            unit = rest[0]
        elif head == "op":
            if len(rest) != 3:
                raise MalformedTable(f"line {lineno}: op rows are `op a b = c`")
            table[(rest[0], rest[1])] = rest[2]
        elif head == "leq":
            if len(rest) != 2:
                raise MalformedTable(f"line {lineno}: leq rows are `leq a b`")
            pairs.add((rest[0], rest[1]))
        else:
            raise MalformedTable(f"line {lineno}: unknown directive {head!r}")
    if kind is None or not elements or unit is None:
        raise MalformedTable("kind, elements and unit are all required")
    if kind is Kind.FINITE_JOIN_SEMILATTICE and not pairs:
        pairs = {(a, b) for (a, b), c in table.items() if c == b}
    return GradeAlgebra(name, kind, tuple(elements), unit, table, frozenset(pairs))


def load_algebra(spec: str) -> GradeAlgebra:
    """Resolve a built-in name or read an algebra file."""
    if spec in BUILTINS:
        return BUILTINS[spec]
    path = Path(spec)
    return parse_algebra(path.read_text(encoding="utf-8"), name=path.stem)
