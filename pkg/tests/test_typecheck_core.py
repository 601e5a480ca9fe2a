import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depcalc.algebra import DIAMOND, L2, TRIVIAL
from depcalc.errors import (
    ConstructorNotInCalculus,
    GradeNotLeq,
    MissingAnnotation,
    TypeMismatch,
    UnboundVariable,
)
from depcalc.generators import generate_corpus
from depcalc.syntax import Base, Entry, Modal, Type, Unit, Var, map_children, parse_term, parse_type
from depcalc.typecheck_core import check_core, infer_core

from golden import GOLDEN, run_golden

A = Base("A")


@pytest.mark.parametrize("g", GOLDEN, ids=lambda g: g.name)
def test_golden_judgement(g):
    assert run_golden(g)


def test_return_unit():
    assert infer_core(L2, "gmc", (), parse_term("ret unit", L2)) == Modal("Public", Unit())


def test_join_and_fork():
    ctx = (Entry("x", Modal("l11", Modal("l12", A))),)
    assert infer_core(DIAMOND, "gmc", ctx, Var(0)) == ctx[0].type
    j = parse_term("join[l11,l12] x", DIAMOND, ["x"])
    assert infer_core(DIAMOND, "gmc", ctx, j) == Modal("l3", A)
    back = parse_term("fork[l11,l12] (join[l11,l12] x)", DIAMOND, ["x"])
    assert infer_core(DIAMOND, "gmcc", ctx, back) == ctx[0].type


def test_up_requires_order():
    ctx = (Entry("x", Modal("Secret", A)),)
    with pytest.raises(GradeNotLeq):
        infer_core(L2, "gmc", ctx, parse_term("up[Secret,Public] x", L2, ["x"]))
    ctx = (Entry("x", Modal("Public", A)),)
    assert infer_core(L2, "gmc", ctx, parse_term("up[Public,Secret] x", L2, ["x"])) == Modal("Secret", A)


def test_check_core_examples():
    t = parse_term(r"\x:S[Public] A. ret (extr x)", L2)
    check_core(L2, "gmcc", (), t, parse_type("S[Public] A -> S[Public] A", L2))
    with pytest.raises(TypeMismatch):
        check_core(L2, "gmcc", (), parse_term("ret unit", L2), Modal("Secret", Unit()))


def test_constructor_admission():
    with pytest.raises(ConstructorNotInCalculus):
        infer_core(L2, "gmc", (Entry("x", Modal("Public", A)),), parse_term("extr x", L2, ["x"]))
    with pytest.raises(ConstructorNotInCalculus):
        infer_core(L2, "gcc", (), parse_term("ret unit", L2))
    with pytest.raises(ConstructorNotInCalculus):
        infer_core(L2, "gmcc", (), parse_term("eta[Public] unit", L2))


def test_unbound_and_unannotated():
    with pytest.raises(UnboundVariable):
        infer_core(L2, "gmcc", (), Var(0))
    with pytest.raises(MissingAnnotation):
        infer_core(L2, "gmcc", (), parse_term(r"\x. x", L2))


def test_lift_maps_functions_under_the_modality():
    t = parse_term(r"lift[Secret] (\y:A. (y, y))", L2)
    assert infer_core(L2, "gmc", (), t) == parse_type("S[Secret] A -> S[Secret] (A * A)", L2)


def test_abort_is_ex_falso():
    t = parse_term(r"\v:Void. abort[A] v", L2)
    assert infer_core(L2, "gmc", (), t) == parse_type("Void -> A", L2)


# properties over generated corpora


@given(st.integers(0, 10_000), st.sampled_from(["gmc", "gcc"]), st.sampled_from([L2, DIAMOND]))
@settings(max_examples=25, deadline=None)
def test_fragments_embed_in_gmcc(seed, calculus, alg):
    for ctx, t, ty, _ in generate_corpus(alg, calculus, 8, seed=seed):
        assert infer_core(alg, "gmcc", ctx, t) == ty


def _regrade_type(ty, f):
    if not isinstance(ty, Type):
        return ty
    changes = {}
    for fld in dataclasses.fields(ty):
        v = getattr(ty, fld.name)
        if fld.name == "grade":
            changes[fld.name] = f(v)
        elif isinstance(v, Type):
            changes[fld.name] = _regrade_type(v, f)
    return dataclasses.replace(ty, **changes) if changes else ty


def _regrade(t, f):
    t = map_children(t, lambda c, b: _regrade(c, f))
    changes = {}
    for fld in dataclasses.fields(t):
        v = getattr(t, fld.name)
        if fld.name in ("grade", "g1", "g2"):
            changes[fld.name] = f(v)
        elif isinstance(v, Type):
            changes[fld.name] = _regrade_type(v, f)
    return dataclasses.replace(t, **changes) if changes else t


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_trivial_algebra_never_rejects_on_grades(seed):
    """Collapsing every grade to one point keeps each judgement derivable."""
    one = lambda g: "one"  # noqa: E731
    for ctx, t, ty, _ in generate_corpus(DIAMOND, "gmcc", 8, seed=seed):
        flat_ctx = tuple(Entry(e.name, _regrade_type(e.type, one)) for e in ctx)
        flat = _regrade(t, one)
        assert infer_core(TRIVIAL, "gmcc", flat_ctx, flat) == _regrade_type(ty, one)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_inference_is_deterministic(seed):
    for ctx, t, ty, _ in generate_corpus(L2, "gmcc", 5, seed=seed):
        assert infer_core(L2, "gmcc", ctx, t) == infer_core(L2, "gmcc", ctx, t) == ty
