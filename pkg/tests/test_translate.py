import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depcalc.algebra import DIAMOND, L2, NATURALS
from depcalc.errors import NotWellTyped
from depcalc.generators import generate_corpus
from depcalc.judgements import infer_judgement
from depcalc.rewrite import decide_equal, erasure_equal
from depcalc.syntax import Entry, Modal, parse_term, parse_type, strip_annotations
from depcalc.translate import bottom_context, hat, overline, tilde, underline

ALGS = st.sampled_from([L2, DIAMOND])
CTX = tuple(Entry(n, parse_type(ty, DIAMOND)) for n, ty in
            (("a", "S[l3] A"), ("b", "A"), ("e", "S[bot] A")))
NAMES = [e.name for e in CTX]


def t(src):
    return parse_term(src, DIAMOND, NAMES)


def same(got, src):
    return strip_annotations(got) == strip_annotations(t(src))


def test_overline_clauses():
    assert same(overline(DIAMOND, t("ret b"), CTX), "eta[bot] b")
    assert same(overline(DIAMOND, t("extr e"), CTX, "gmcc"), "bind[bot] x = e in x")
    assert same(overline(DIAMOND, t("fork[l11,l12] a"), CTX, "gmcc"),
                "bind[l3] x = a in eta[l11] (eta[l12] x)")
    assert same(overline(DIAMOND, t("up[l3,top] a"), CTX), "bind[l3] x = a in eta[top] x")


def test_overline_is_homomorphic_on_the_lambda_core():
    src = r"(\z:A. (z, inj1[A + Unit] z)) b"
    assert same(overline(DIAMOND, t(src), CTX), src)


def test_underline_clauses():
    assert same(underline(DIAMOND, t("eta[l11] b"), CTX), "up[bot,l11] (ret b)")
    assert same(underline(DIAMOND, t("bind[bot] x = e in x"), CTX),
                r"(\x. extr x) ((lift[bot] (\x. x)) e)")


def test_tilde_clauses():
    assert same(tilde(DIAMOND, t("ret b"), CTX), "split[bot] b")
    assert same(tilde(DIAMOND, t("extr e"), CTX, "gmcc"), "merge[bot] e")
    assert same(tilde(DIAMOND, t("up[l3,top] a"), CTX), "split[top] (merge[l3] a)")
    assert same(tilde(DIAMOND, t("join[l11,l12] (fork[l11,l12] a)"), CTX, "gmcc"),
                "split[l3] (merge[l12] (merge[l11] (split[l11] (split[l12] (merge[l3] a)))))")


def test_hat_clauses():
    c1 = (Entry("c", parse_type("A", NATURALS), 1),)
    nxt = hat(parse_term("next c", NATURALS, ["c"]), c1, 0)
    assert strip_annotations(nxt) == strip_annotations(parse_term("split[1] c", NATURALS, ["c"]))
    c0 = (Entry("c", parse_type("O A", NATURALS), 0),)
    prv = hat(parse_term("prev c", NATURALS, ["c"]), c0, 1)
    assert strip_annotations(prv) == strip_annotations(parse_term("merge[1] c", NATURALS, ["c"]))
    ident = hat(parse_term(r"\x:O A. x", NATURALS))
    assert infer_judgement(NATURALS, "gmcce", (), ident, 0) == parse_type("S[1] A -> S[1] A", NATURALS)


def test_ill_typed_sources_are_refused():
    with pytest.raises(NotWellTyped):
        overline(DIAMOND, t("extr b"), CTX, "gmcc")
    with pytest.raises(NotWellTyped):
        underline(L2, parse_term(r"\x:T[Secret] Bool. bind[Secret] y = x in y", L2))
    with pytest.raises(NotWellTyped):
        hat(parse_term("prev unit", NATURALS))


def test_underline_of_the_diamond_program_needs_combine():
    ctx = (Entry("x", Modal("l3", parse_type("A", DIAMOND))),)
    src = parse_term("bind[l3] y = x in eta[l11] (eta[l12] y)", DIAMOND, ["x"])
    out = underline(DIAMOND, src, ctx)
    assert infer_judgement(DIAMOND, "gmcc", ctx, out) == parse_type("S[l11] S[l12] A", DIAMOND)
    assert erasure_equal(out, src, ctx=ctx)


@given(st.integers(0, 10_000), ALGS, st.sampled_from(["gmc", "gcc", "gmcc"]))
@settings(max_examples=30, deadline=None)
def test_overline_preserves_types_and_meaning(seed, alg, calculus):
    for ctx, a, ty, _ in generate_corpus(alg, calculus, 6, seed=seed):
        out = overline(alg, a, ctx, calculus)
        assert infer_judgement(alg, "dcce", ctx, out, expected=ty) == ty
        assert erasure_equal(out, a, ctx=ctx)


@given(st.integers(0, 10_000), ALGS)
@settings(max_examples=30, deadline=None)
def test_underline_preserves_types_and_meaning(seed, alg):
    for ctx, a, ty, _ in generate_corpus(alg, "dcce", 6, seed=seed):
        out = underline(alg, a, ctx)
        assert infer_judgement(alg, "gmcc", ctx, out, expected=ty) == ty
        assert erasure_equal(out, a, ctx=ctx)


@given(st.integers(0, 10_000), ALGS)
@settings(max_examples=30, deadline=None)
def test_tilde_lands_at_the_unit_grade(seed, alg):
    for ctx, a, ty, _ in generate_corpus(alg, "gmcc", 6, seed=seed):
        out = tilde(alg, a, ctx)
        assert infer_judgement(alg, "gmcce", bottom_context(alg, ctx), out, alg.unit, ty) == ty


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_hat_keeps_the_time(seed):
    for ctx, a, ty, n in generate_corpus(NATURALS, "lcirc", 6, seed=seed):
        assert infer_judgement(NATURALS, "gmcce", ctx, hat(a, ctx, n), n, ty) == ty


@given(st.integers(0, 10_000), ALGS)
@settings(max_examples=30, deadline=None)
def test_round_trip_is_equal_up_to_erasure(seed, alg):
    for ctx, a, _, _ in generate_corpus(alg, "gmcc", 6, seed=seed):
        back = underline(alg, overline(alg, a, ctx), ctx)
        assert decide_equal(alg, a, back, "gmcc", ctx).up_to_erasure
