import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hqft.evaluator import (
    EvaluationError, check_moves, contraction_oracle, duality_matrices, eval_generator, evaluate,
    punctured_torus, sphere, torus,
)
from hqft.exactlin import GF, QQ, ExactMatrix, identity
from hqft.groupoid import cyclic_group, symmetric_group, trivial_group, two_object_z2
from hqft.gvcat import dual_morphism, groupoid_algebra, identity_crossing, twisted_example
from hqft.surface import (
    B, C, D, GlueMismatch, Swap, dualize, enumerate_expressions, generator_signature, parse,
    typecheck,
)

Z2, Z3, S3, TWO = cyclic_group(2), cyclic_group(3), symmetric_group(3), two_object_z2()
SIGNS = (-1, 1)

KZ2 = groupoid_algebra(Z2, QQ)
KS3 = groupoid_algebra(S3, QQ)
TW_Z2 = twisted_example(Z2, QQ)
TW_S3 = twisted_example(S3, QQ, seed=3)


def all_generators(g, labels=None, paths=None):
    """Every B, C and D generator over the given labels."""
    loops = labels or [m.id for m in g.loops()]
    paths = paths or g.ids
    out = [B(s, x) for s in SIGNS for x in g.objects]
    for e, m in itertools.product(SIGNS, SIGNS):
        out += [C(e, m, a, b) for a in loops for b in paths
                if g.mor(b).tgt == g.mor(a).src]
    for e, m, n in itertools.product(SIGNS, repeat=3):
        for a, b, r, d in itertools.product(loops, loops, paths, paths):
            if g.mor(r).tgt == g.mor(a).src and g.mor(d).tgt == g.mor(b).src \
                    and g.mor(r).src == g.mor(d).src:
                out.append(D(e, m, n, a, b, r, d))
    return out


# -- generators --------------------------------------------------------------------

def test_groupoid_algebra_generators_are_nonzero_scalars():
    # every circle carries a one-dimensional L_a, so B has one side empty and C, D are 1x1
    for gen in all_generators(Z2):
        mat = eval_generator(gen, KZ2)
        assert mat.shape == (1, 1)
        assert mat[0, 0] != 0, gen


@pytest.mark.parametrize("cfd,g", [(TW_Z2, Z2), (KS3, S3)], ids=["twisted-Z2", "K[S3]"])
def test_generator_shapes_match_signatures(cfd, g):
    for gen in all_generators(g, paths=[g.identity("x").id, g.ids[1]]):
        i, o = generator_signature(gen, g)
        mat = eval_generator(gen, cfd)
        rows = cols = 1
        for m in o:
            rows *= cfd.base.dim(m)
        for m in i:
            cols *= cfd.base.dim(m)
        assert mat.shape == (rows, cols)


def test_id_and_swap():
    assert evaluate(parse("id(a,e)", Z2), TW_Z2) == identity(4, QQ)
    s = evaluate(parse("swap(a,e)", Z2), TW_Z2)
    assert evaluate(parse("swap(a,e) ; swap(e,a)", Z2), TW_Z2) == identity(4, QQ)
    assert s != identity(4, QQ)


def test_ill_typed_expression_is_rejected():
    with pytest.raises(GlueMismatch):
        evaluate(parse("B+(x) ; C(-,+)(a;e)", Z2), KZ2)


# -- oracle ------------------------------------------------------------------------

S3_ALPHABET = [B(1, "x"), B(-1, "x"), C(-1, 1, "c01", "c012"), C(1, 1, "c01", "e"),
               C(-1, -1, "c012", "c01"), C(1, -1, "c01", "c12"),
               D(-1, -1, 1, "c01", "c12", "e", "c02"), D(1, 1, -1, "c012", "c01", "c01", "e"),
               D(-1, 1, 1, "c01", "c01", "e", "e"), Swap("c01", "c012"), Swap("c012", "c01")]
S3_EXPRS = list(enumerate_expressions(S3_ALPHABET, S3, 3, max_width=2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(S3_EXPRS), st.sampled_from([KS3, TW_S3]))
def test_evaluate_matches_contraction_oracle(e, cfd):
    assert evaluate(e, cfd) == contraction_oracle(e, cfd)


def test_oracle_on_every_z2_generator():
    for gen in all_generators(Z2):
        assert evaluate(gen, TW_Z2) == contraction_oracle(gen, TW_Z2)


def test_oracle_on_two_object_groupoid():
    cfd = twisted_example(TWO, QQ, seed=1)
    gens = all_generators(TWO, labels=["x_x.a", "y_y.a"], paths=["x_x.e", "y_x.a", "y_y.e"])
    for gen in gens[::5]:
        assert evaluate(gen, cfd) == contraction_oracle(gen, cfd)


# -- closed surfaces ---------------------------------------------------------------

def test_closed_surfaces_over_groupoid_algebra():
    assert evaluate(sphere("x"), KZ2) == ExactMatrix.scalar(1)
    for a, b in itertools.product(Z2.ids, repeat=2):
        assert evaluate(torus(Z2, a, b), KZ2) == ExactMatrix.scalar(1)


@pytest.mark.parametrize("seed", [1, 2])
def test_closed_surfaces_are_gauge_invariant(seed):
    other = twisted_example(S3, QQ, seed=seed)
    assert evaluate(sphere("x"), other) == evaluate(sphere("x"), TW_S3)
    for a, b in itertools.product(S3.ids, repeat=2):
        if S3.compose(a, b) == S3.compose(b, a):
            for form in ("alpha", "beta"):
                assert evaluate(torus(S3, a, b, form), other) == evaluate(torus(S3, a, b), TW_S3)


def test_named_surface_errors():
    with pytest.raises(EvaluationError):
        torus(S3, "c01", "c12")
    with pytest.raises(EvaluationError):
        punctured_torus(TWO, "x_x.a", "y_y.a")
    with pytest.raises(ValueError):
        punctured_torus(S3, "c01", "c12", form="gamma")


def test_punctured_torus_boundary():
    i, o = typecheck(punctured_torus(S3, "c01", "c12"), S3)
    assert [m.id for m in i] == [S3.compose("c01", "c12", "c01", "c12").id] and o == ()


# -- duality -----------------------------------------------------------------------

DUAL_CASES = ["C(-,+)(c01;c012)", "D(-,-,+)(c01,c12;e,c02)", "B+(x)", "B-(x)",
              "swap(c01,c012)", "D(+,+,-)(c012,c01;c01,e) ; swap(c01,c012)"]


@pytest.mark.parametrize("text", DUAL_CASES)
def test_dualize_matches_dual_morphism(text):
    e = parse(text, S3)
    m0, m1 = typecheck(e, S3)
    want = dual_morphism(evaluate(e, TW_S3), duality_matrices(TW_S3, m0), duality_matrices(TW_S3, m1))
    assert evaluate(dualize(e, S3), TW_S3) == want
    assert evaluate(dualize(dualize(e, S3), S3), TW_S3) == evaluate(e, TW_S3)


# -- move harness ------------------------------------------------------------------

@pytest.mark.parametrize("cfd", [KZ2, groupoid_algebra(Z3, QQ), TW_Z2, groupoid_algebra(TWO, QQ),
                                 twisted_example(Z3, GF(7), seed=2)],
                         ids=["K[Z2]", "K[Z3]", "twisted-Z2", "K[two-object]", "twisted-Z3-GF7"])
def test_moves_hold(cfd):
    rep = check_moves(cfd)
    assert rep.passed, rep.format_summary()
    assert "inner_switch" in rep.checks() and "punctured_torus" in rep.checks()


def test_identity_crossing_breaks_inner_switch():
    rep = check_moves(identity_crossing(KS3))
    bad = {tuple(m.id for m in e.instance) for e in rep.of("inner_switch") if not e.passed}
    assert ("c01", "c12") in bad
    assert all(S3.compose(a, b) != S3.compose(b, a) for a, b in bad)


def test_sampling_is_seeded_and_recorded():
    cfd = TW_Z2
    r1 = check_moves(cfd, seed=5, trials=3, cap=2)
    r2 = check_moves(cfd, seed=5, trials=3, cap=2)
    assert r1.to_json() == r2.to_json()
    assert r1.meta["sampled"]["glue.CC"] == {"space": 8, "checked": 3}
    assert len(r1.of("glue.CC.-+")) == 3


def test_dictionary_spot_values_over_z2():
    one = ExactMatrix.scalar(1)
    assert eval_generator(C(-1, 1, "a", "e"), KZ2) == one
    assert eval_generator(B(1, "x"), KZ2) == one
    assert eval_generator(D(-1, -1, 1, "a", "a", "e", "e"), KZ2) == one


@pytest.mark.parametrize("label", ["c01", "c012"])
def test_dualized_identity_is_identity_on_inverse(label):
    inv = S3.inverse(label).id
    for cfd in (KS3, TW_S3):
        assert evaluate(dualize(parse(f"id({label})", S3), S3), cfd) == evaluate(parse(f"id({inv})", S3), cfd)


def test_punctured_torus_at_identity_and_trivial_group():
    assert [m.id for m in typecheck(punctured_torus(S3, "e", "e"), S3)[0]] == ["e"]
    assert check_moves(groupoid_algebra(trivial_group(), QQ)).passed


def test_both_torus_cuts_agree_over_s3():
    for a, b in itertools.product(S3.ids, repeat=2):
        assert evaluate(punctured_torus(S3, a, b, "alpha"), KS3) == \
            evaluate(punctured_torus(S3, a, b, "beta"), KS3)
