import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depcalc.algebra import DIAMOND, L2, NATURALS
from depcalc.errors import ParseError, UnknownGrade
from depcalc.syntax import (
    BOOL,
    App,
    Base,
    Bind,
    Case,
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
    Unit,
    UnitVal,
    Up,
    Var,
    Void,
    alpha_equal,
    erase,
    instantiate,
    is_plain,
    parse_term,
    parse_type,
    print_term,
    print_type,
)

from golden import propiso_witnesses

A = Base("A")


def test_parse_identity():
    assert parse_term(r"\x:Unit. x", L2) == Lam(Unit(), Var(0))


def test_parse_bind_with_free_variable():
    t = parse_term("bind[Secret] y = x in y", L2, ["x"])
    assert t == Bind("Secret", "y", Var(0), Var(0))


def test_parse_join():
    t = parse_term("join[l11,l12] x", DIAMOND, ["x"])
    assert t == Join("l11", "l12", Var(0))


def test_print_examples():
    assert print_term(Lam(Unit(), Var(0))) == r"\x:Unit. x"
    assert print_term(Split("Secret", UnitVal())) == "split[Secret] unit"


def test_types():
    assert parse_type("Bool", L2) == Sum(Unit(), Unit()) == BOOL
    assert parse_type("S[Secret] A -> A * Void", L2) == Fun(Modal("Secret", A), Prod(A, Void()))
    assert parse_type("O Bool", NATURALS) == Modal(1, BOOL)
    assert parse_type("T[Public] A", L2) == parse_type("D[Public] A", L2) == Modal("Public", A)


def test_print_type_round_trip():
    for src in ("S[l3] (A -> B) -> S[l3] A", "(A + Unit) * Void", "A -> B -> A"):
        ty = parse_type(src, DIAMOND)
        assert parse_type(print_type(ty), DIAMOND) == ty


def test_comments_and_newlines_are_ignored():
    src = "-- identity\n\\x:Unit.\n  x -- body\n"
    assert parse_term(src, L2) == Lam(Unit(), Var(0))


def test_parse_errors():
    with pytest.raises(ParseError) as info:
        parse_term(r"\x:Unit. (x", L2)
    assert info.value.line >= 1
    with pytest.raises(UnknownGrade):
        parse_term("eta[Top] unit", L2)
    with pytest.raises(ParseError):
        parse_term("y", L2)


def test_propiso_witness_round_trips():
    for m in DIAMOND.elements:
        for f, g, _, _ in propiso_witnesses(DIAMOND, m):
            for t in (f, g):
                assert alpha_equal(parse_term(print_term(t), DIAMOND), t)


def test_alpha_equal_examples():
    assert alpha_equal(parse_term(r"\x. x", L2), parse_term(r"\y. y", L2))
    assert not alpha_equal(parse_term(r"\x. \y. x", L2), parse_term(r"\x. \y. y", L2))
    a = UnitVal()
    assert not alpha_equal(Eta("Public", a), Eta("Secret", a))


def test_erase_examples():
    a = Pair(Var(0), UnitVal())
    assert erase(Eta("Secret", a)) == erase(a)
    assert erase(Join("Public", "Secret", a)) == erase(a)
    bind = Bind("Secret", "y", Var(0), Pair(Var(0), Var(1)))
    assert erase(bind) == Pair(Var(0), Var(0))
    assert erase(Lift("Secret", Lam(A, Var(0)))) == Lam(A, Var(0))
    assert erase(Lam(Modal("Secret", A), Var(0))) == Lam(A, Var(0))


# generated syntax

GRADES = L2.elements


def types(depth=3):
    leaves = st.sampled_from([Unit(), Void(), A, Base("B")])
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Prod, inner, inner), st.builds(Sum, inner, inner),
            st.builds(Fun, inner, inner), st.builds(Modal, st.sampled_from(GRADES), inner)),
        max_leaves=depth * 2)


@st.composite
def terms(draw, scope=0, depth=4):
    """Arbitrary (not necessarily well-typed) terms with free indices below ``scope``."""
    leaves = [UnitVal()] + [Var(i) for i in range(scope)]
    if depth == 0 or draw(st.integers(0, 4)) == 0:
        return draw(st.sampled_from(leaves))
    g = st.sampled_from(GRADES)
    sub = lambda k=0: terms(scope + k, depth - 1)  # noqa: E731
    kind = draw(st.sampled_from(
        ["lam", "app", "pair", "proj", "inj", "case", "ret", "extr", "lift", "join", "fork",
         "up", "eta", "bind", "next", "prev", "split", "merge"]))
    if kind == "lam":
        return Lam(draw(st.none() | types()), draw(sub(1)), draw(st.sampled_from("xyz")))
    if kind == "app":
        return App(draw(sub()), draw(sub()))
    if kind == "pair":
        return Pair(draw(sub()), draw(sub()))
    if kind == "proj":
        return Proj(draw(st.sampled_from([1, 2])), draw(sub()))
    if kind == "inj":
        return Inj(draw(st.sampled_from([1, 2])), draw(sub()))
    if kind == "case":
        return Case(draw(sub()), draw(sub()), draw(sub()))
    if kind == "bind":
        return Bind(draw(g), draw(st.sampled_from("xyz")), draw(sub()), draw(sub(1)))
    if kind == "lift":
        return Lift(draw(g), draw(sub()))
    if kind in ("join", "fork", "up"):
        cls = {"join": Join, "fork": Fork, "up": Up}[kind]
        return cls(draw(g), draw(g), draw(sub()))
    if kind in ("eta", "split", "merge"):
        cls = {"eta": Eta, "split": Split, "merge": Merge}[kind]
        return cls(draw(g), draw(sub()))
    cls = {"ret": Ret, "extr": Extr, "next": Next, "prev": Prev}[kind]
    return cls(draw(sub()))


FREE = ["p", "q"]


@given(terms(scope=2))
@settings(max_examples=300, deadline=None)
def test_parse_print_round_trip(t):
    assert alpha_equal(parse_term(print_term(t, FREE), L2, FREE), t)


@given(types())
@settings(max_examples=200, deadline=None)
def test_type_round_trip(ty):
    assert parse_type(print_type(ty), L2) == ty


@given(terms(scope=2))
@settings(max_examples=300, deadline=None)
def test_erase_is_plain_and_idempotent(t):
    e = erase(t)
    assert is_plain(e)
    assert alpha_equal(erase(e), e)


@given(terms(scope=1), terms(scope=0))
@settings(max_examples=300, deadline=None)
def test_erase_commutes_with_substitution(body, s):
    assert alpha_equal(erase(instantiate(body, s)), instantiate(erase(body), erase(s)))
