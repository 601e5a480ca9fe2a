import pytest

from depcalc.algebra import DIAMOND, L2, NATURALS
from depcalc.errors import ParseError, UnknownGrade
from depcalc.judgements import graded_context, parse_judgement
from depcalc.syntax import Base, Entry, Modal, Var, parse_term

A = Base("A")


def test_bare_term():
    j = parse_judgement("eta[Secret] unit -- a comment", L2)
    assert j.ctx == () and j.term == parse_term("eta[Secret] unit", L2)


def test_directives():
    src = """
    -- two variables
    var x @ l11 : S[l12] A
    var y : A
    grade l3
    type A
    term merge[l12]
      x
    """
    j = parse_judgement(src, DIAMOND)
    assert j.ctx == (Entry("x", Modal("l12", A), "l11"), Entry("y", A))
    assert j.grade == "l3" and j.type == A
    assert j.names == ("x", "y")
    assert j.term == parse_term("merge[l12] x", DIAMOND, ["x", "y"])


def test_stage_grades_are_numbers():
    j = parse_judgement("var x @ 2 : A\nterm x", NATURALS)
    assert j.ctx[0].grade == 2


def test_errors_carry_the_line():
    with pytest.raises(ParseError) as info:
        parse_judgement("var x : A\nvar y A\nterm x", L2)
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_judgement("var x : A", L2)
    with pytest.raises(UnknownGrade):
        parse_judgement("grade top\nterm unit", L2)


def test_graded_context_fills_defaults():
    ctx = (Entry("x", A), Entry("y", A, "Secret"))
    assert graded_context(ctx, "Public") == (Entry("x", A, "Public"), Entry("y", A, "Secret"))


def test_free_variables_need_a_declaration():
    with pytest.raises(ParseError):
        parse_judgement("term x", L2)
    assert parse_judgement("var x : A\nterm x", L2).term == Var(0)
