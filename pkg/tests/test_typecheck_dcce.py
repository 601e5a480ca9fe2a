import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depcalc.algebra import DIAMOND, L2, NATURALS, finite_monoid
from depcalc.errors import (
    InfiniteCarrier,
    NotProtected,
    ProtectionFailure,
    RequiresSemilattice,
    TypeMismatch,
)
from depcalc.generators import generate_corpus
from depcalc.oracle import enumerate_types
from depcalc.rewrite import normalize_lambda
from depcalc.syntax import (
    BOOL,
    Base,
    Entry,
    Fun,
    Modal,
    Prod,
    Sum,
    Unit,
    Void,
    erase,
    parse_term,
    parse_type,
    strip_annotations,
)
from depcalc.typecheck_core import check_core
from depcalc.typecheck_dcce import (
    ProtectionMode,
    check_dcc,
    infer_dcc,
    principal_level,
    protected,
    synthesize_j,
)

A = Base("A")
PLAIN, EXT = ProtectionMode.PLAIN, ProtectionMode.EXTENDED
IDENTITY = strip_annotations(parse_term(r"\x. x"))


def test_bottom_protects_everything_when_extended():
    for ty in (A, BOOL, Void(), Fun(A, Sum(A, A))):
        assert protected(L2, EXT, "Public", ty)
        assert not protected(L2, PLAIN, "Public", ty)


def test_join_of_two_levels_protects_nested_modalities():
    assert protected(DIAMOND, EXT, "l3", parse_type("T[l11] T[l12] A", DIAMOND))
    assert not protected(DIAMOND, PLAIN, "l3", parse_type("T[l11] T[l12] A", DIAMOND))
    assert protected(DIAMOND, EXT, "l3", parse_type("T[l11] T[l12] Bool", DIAMOND))


def test_l2_nested_modality_is_already_plain():
    # With Public and Secret the outer layer is redundant: Secret protects the inner one.
    ty = parse_type("T[Public] T[Secret] A", L2)
    assert protected(L2, EXT, "Secret", ty)
    assert protected(L2, PLAIN, "Secret", ty)


def test_plain_rules():
    assert protected(L2, PLAIN, "Secret", Prod(Modal("Secret", A), Fun(A, Modal("Secret", A))))
    assert not protected(L2, PLAIN, "Secret", Prod(Modal("Secret", A), A))
    assert not protected(L2, PLAIN, "Secret", Modal("Public", A))
    assert not protected(L2, PLAIN, "Public", Unit())


def test_principal_levels():
    p = lambda src: principal_level(DIAMOND, parse_type(src, DIAMOND))  # noqa: E731
    assert p("Bool") == "bot"
    assert p("A -> T[l21] A") == "l21"
    assert p("T[l11] T[l12] A") == "l3"
    assert p("T[l21] A * T[l22] A") == "bot"
    assert p("T[l3] A * T[top] A") == "l3"


def test_algebra_requirements():
    z2 = finite_monoid("z2", ["0", "1"], "0",
                       {(a, b): str((int(a) + int(b)) % 2) for a in "01" for b in "01"},
                       [("0", "0"), ("1", "1")])
    with pytest.raises(RequiresSemilattice):
        protected(z2, PLAIN, "0", A)
    with pytest.raises(InfiniteCarrier):
        protected(NATURALS, EXT, 0, A)


def test_principal_level_decides_protection_exhaustively():
    for alg in (L2, DIAMOND):
        for ty in enumerate_types(alg, 3):
            p = principal_level(alg, ty)
            for level in alg.elements:
                assert protected(alg, EXT, level, ty) == alg.leq(level, p)


def test_infer_dcc_examples():
    ctx = (Entry("x", Modal("Public", A)),)
    t = parse_term("bind[Public] y = x in y", L2, ["x"])
    assert infer_dcc(L2, EXT, ctx, t) == A
    with pytest.raises(ProtectionFailure):
        infer_dcc(L2, PLAIN, ctx, t)
    assert infer_dcc(L2, PLAIN, (), parse_term("eta[Secret] unit", L2)) == Modal("Secret", Unit())


def test_bind_level_must_match_the_bound_modality():
    ctx = (Entry("x", Modal("Secret", A)),)
    with pytest.raises(TypeMismatch):
        infer_dcc(L2, EXT, ctx, parse_term("bind[Public] y = x in eta[Secret] y", L2, ["x"]))


def test_check_dcc_against_expected_type():
    ctx = (Entry("x", Modal("l3", A)),)
    t = parse_term("bind[l3] y = x in eta[l11] (eta[l12] y)", DIAMOND, ["x"])
    check_dcc(DIAMOND, EXT, ctx, t, parse_type("T[l11] T[l12] A", DIAMOND))


def test_j_examples():
    assert strip_annotations(synthesize_j(L2, "Public", A)) == \
        strip_annotations(parse_term(r"\x. extr x", L2))
    assert strip_annotations(synthesize_j(DIAMOND, "l11", Modal("l21", A))) == \
        strip_annotations(parse_term(r"\x. join[l11,l21] x", DIAMOND))


def test_j_requires_protection():
    with pytest.raises(NotProtected):
        synthesize_j(L2, "Secret", BOOL)


def test_j_for_every_case_shape():
    cases = [
        (DIAMOND, "l11", parse_type("T[l12] T[l21] A", DIAMOND)),  # already
        (DIAMOND, "l11", parse_type("T[l21] A * T[l3] Bool", DIAMOND)),  # product
        (DIAMOND, "l11", parse_type("Bool -> T[l11] A", DIAMOND)),  # function
        (DIAMOND, "l3", parse_type("T[l11] T[l12] A", DIAMOND)),  # combine
        (DIAMOND, "l3", parse_type("T[l21] (Unit -> T[l22] Bool)", DIAMOND)),
    ]
    for alg, level, ty in cases:
        j = synthesize_j(alg, level, ty)
        check_core(alg, "gmcc", (), j, Fun(Modal(level, ty), ty))
        assert strip_annotations(normalize_lambda(erase(j))) == IDENTITY


def diamond_types():
    leaves = st.sampled_from([Unit(), A, BOOL])
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Prod, inner, inner), st.builds(Fun, inner, inner),
            st.builds(Modal, st.sampled_from(DIAMOND.elements), inner)),
        max_leaves=6)


@given(diamond_types(), st.sampled_from(DIAMOND.elements))
@settings(max_examples=300, deadline=None)
def test_j_checks_and_erases_to_identity(ty, level):
    if not protected(DIAMOND, EXT, level, ty):
        return
    j = synthesize_j(DIAMOND, level, ty)
    check_core(DIAMOND, "gmcc", (), j, Fun(Modal(level, ty), ty))
    assert strip_annotations(normalize_lambda(erase(j))) == IDENTITY


@given(diamond_types(), st.sampled_from(DIAMOND.elements))
@settings(max_examples=300, deadline=None)
def test_plain_protection_implies_extended(ty, level):
    if protected(DIAMOND, PLAIN, level, ty):
        assert protected(DIAMOND, EXT, level, ty)


@given(diamond_types(), st.sampled_from(DIAMOND.elements), st.sampled_from(DIAMOND.elements))
@settings(max_examples=200, deadline=None)
def test_protection_is_downward_closed(ty, lo, hi):
    if DIAMOND.leq(lo, hi) and protected(DIAMOND, EXT, hi, ty):
        assert protected(DIAMOND, EXT, lo, ty)


@given(st.integers(0, 10_000), st.sampled_from([L2, DIAMOND]))
@settings(max_examples=20, deadline=None)
def test_plain_accepts_fewer_terms(seed, alg):
    for ctx, t, ty, _ in generate_corpus(alg, "dcce", 10, seed=seed):
        try:
            plain = infer_dcc(alg, PLAIN, ctx, t)
        except ProtectionFailure:
            continue
        assert plain == infer_dcc(alg, EXT, ctx, t) == ty


def test_some_generated_terms_need_the_extension():
    rejected = 0
    for ctx, t, _, _ in generate_corpus(DIAMOND, "dcce", 200, seed=3):
        try:
            infer_dcc(DIAMOND, PLAIN, ctx, t)
        except ProtectionFailure:
            rejected += 1
    assert rejected > 0


def test_protected_pairs_match_the_rule_table_on_l2_atoms():
    atoms = [Unit(), A, BOOL]
    for ty, level in itertools.product(atoms, L2.elements):
        assert protected(L2, EXT, level, ty) == (level == "Public")
