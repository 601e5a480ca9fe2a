import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depcalc.algebra import DIAMOND, L2, NATURALS
from depcalc.errors import (
    ConstructorNotInCalculus,
    GradeNotLeq,
    MissingAnnotation,
    TimeMismatch,
    TypeMismatch,
)
from depcalc.generators import generate_corpus
from depcalc.syntax import Base, Entry, Fun, Modal, Next, Prev, Var, parse_term, parse_type
from depcalc.typecheck_staged import check_gmcce, check_lcirc, infer_gmcce, infer_lcirc

from golden import propiso_witnesses

A = Base("A")


def test_next_and_prev():
    assert infer_lcirc((Entry("x", A, 1),), Next(Var(0)), 0) == Modal(1, A)
    assert infer_lcirc((Entry("x", Modal(1, A), 0),), Prev(Var(0)), 1) == A
    check_lcirc((), parse_term(r"\x:O A. x", NATURALS), 0, Fun(Modal(1, A), Modal(1, A)))


def test_variables_are_bound_to_their_time():
    with pytest.raises(TimeMismatch):
        infer_lcirc((Entry("x", A, 1),), Var(0), 0)
    with pytest.raises(TimeMismatch):
        infer_lcirc((Entry("x", A, 0),), Var(0), 1)


def test_prev_needs_a_later_time():
    with pytest.raises(TimeMismatch):
        infer_lcirc((Entry("x", Modal(1, A), 0),), Prev(Var(0)), 0)


def test_lcirc_admission_and_annotations():
    with pytest.raises(ConstructorNotInCalculus):
        infer_lcirc((), parse_term("(unit, unit)", NATURALS), 0)
    with pytest.raises(MissingAnnotation):
        infer_lcirc((), parse_term(r"\x. x", NATURALS), 0)


def test_lcirc_case_with_function_branches():
    t = parse_term(r"\b:Bool. case b of (\u:Unit. false) ; (\u:Unit. true)", NATURALS)
    assert infer_lcirc((), t, 3) == parse_type("Bool -> Bool", NATURALS)


def test_merge_example():
    ctx = (Entry("x", Modal("l12", A), "l11"),)
    assert infer_gmcce(DIAMOND, ctx, parse_term("merge[l12] x", DIAMOND, ["x"]), "l3") == A


def test_split_example():
    ctx = (Entry("x", A, "Secret"),)
    assert infer_gmcce(L2, ctx, parse_term("split[Secret] x", L2, ["x"]), "Public") == Modal("Secret", A)


def test_variable_subsumption():
    assert infer_gmcce(L2, (Entry("x", A, "Public"),), Var(0), "Secret") == A
    with pytest.raises(GradeNotLeq):
        infer_gmcce(L2, (Entry("x", A, "Secret"),), Var(0), "Public")
    with pytest.raises(GradeNotLeq):
        infer_gmcce(DIAMOND, (Entry("x", A, "l21"),), Var(0), "l22")


def test_explicit_up():
    ctx = (Entry("x", A, "l11"),)
    t = parse_term("up[l11,l21] x", DIAMOND, ["x"])
    assert infer_gmcce(DIAMOND, ctx, t, "l3") == A
    with pytest.raises(GradeNotLeq):
        infer_gmcce(DIAMOND, ctx, parse_term("up[l21,l11] x", DIAMOND, ["x"]), "top")
    with pytest.raises(GradeNotLeq):
        infer_gmcce(DIAMOND, ctx, t, "l11")


def test_merge_rejects_a_mismatched_modality():
    ctx = (Entry("x", Modal("l11", A), "bot"),)
    with pytest.raises(TypeMismatch):
        infer_gmcce(DIAMOND, ctx, parse_term("merge[l12] x", DIAMOND, ["x"]), "l3")


@pytest.mark.parametrize("alg", [L2, DIAMOND], ids=lambda a: a.name)
def test_propiso_witnesses_check_at_every_grade(alg):
    for m in alg.elements:
        for f, g, x, y in propiso_witnesses(alg, m):
            for grade in alg.elements:
                check_gmcce(alg, (), f, grade, Fun(x, y))
                check_gmcce(alg, (), g, grade, Fun(y, x))


def _shift_ctx(ctx, k):
    return tuple(Entry(e.name, e.type, e.grade + k) for e in ctx)


@given(st.integers(0, 10_000), st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_lcirc_time_translation(seed, k):
    for ctx, t, ty, n in generate_corpus(NATURALS, "lcirc", 6, seed=seed):
        assert infer_lcirc(_shift_ctx(ctx, k), t, n + k) == ty


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_prev_next_round_trips_type_check(seed):
    for ctx, t, ty, n in generate_corpus(NATURALS, "lcirc", 6, seed=seed):
        later = _shift_ctx(ctx, 1)
        assert infer_lcirc(later, Prev(Next(t)), n + 1) == ty
        if isinstance(ty, Modal):
            assert infer_lcirc(ctx, Next(Prev(t)), n) == ty


@given(st.integers(0, 10_000), st.sampled_from([L2, DIAMOND]))
@settings(max_examples=40, deadline=None)
def test_gmcce_judgements_survive_raising_the_grade(seed, alg):
    for ctx, t, ty, m in generate_corpus(alg, "gmcce", 6, seed=seed):
        for higher in alg.elements:
            if alg.leq(m, higher):
                assert infer_gmcce(alg, ctx, t, higher) == ty
