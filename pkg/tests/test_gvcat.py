import itertools
import json
import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hqft.exactlin import GF, QQ, ExactLinError, ExactMatrix, compose, identity, tensor
from hqft.groupoid import (
    cyclic_group, disjoint_union, symmetric_group, trivial_group, two_object_z2,
)
from hqft.gvcat import (
    ALL, LOOPS, MODES, CategoryError, CrossedFrobData, GVCategory, MissingBlock,
    category_from_json, category_to_json, check_axioms, check_crossing, delta_alternative,
    derive_delta_nu, derive_eta_coev, dual_morphism, groupoid_algebra,
    groupoid_algebra_category, identity_crossing, partial_trace, random_gauge,
    twisted_example,
)

Z2, Z3, S3 = cyclic_group(2), cyclic_group(3), symmetric_group(3)
CRITERION_GROUPOIDS = [Z2, Z3, S3, two_object_z2(), disjoint_union(Z2, two_object_z2())]
ONE = ExactMatrix.scalar(1)


@pytest.mark.parametrize("g", CRITERION_GROUPOIDS, ids=repr)
@pytest.mark.parametrize("grading", [ALL, LOOPS])
def test_groupoid_algebra_passes_every_mode(g, grading):
    cat = groupoid_algebra_category(g, QQ, grading)
    rep = check_axioms(cat, MODES)
    assert rep.passed, rep.format_summary()
    assert {c.split(".")[0] for c in rep.checks()} == set(MODES)


@pytest.mark.parametrize("g", CRITERION_GROUPOIDS, ids=repr)
def test_groupoid_algebra_crossing(g):
    rep = check_crossing(groupoid_algebra(g, QQ))
    assert rep.passed, rep.format_summary()
    assert len(rep.of("LF3.torus")) == sum(len(g.loops_at(x)) ** 2 for x in g.objects)


def test_scaled_unit_fails_with_witness():
    cat = groupoid_algebra_category(Z2, QQ)
    bad = replace(cat, j={"x": ExactMatrix.scalar(2)})
    rep = check_axioms(bad, {"category"})
    fails = {(e.check, e.instance[0].id) for e in rep.failures}
    assert ("category.unit_left", "a") in fails and ("category.unit_right", "e") in fails
    e = rep.failures[0]
    assert e.lhs == ExactMatrix.scalar(2) and e.rhs == ONE
    assert not rep.of("category.associativity")[0].lhs  # passing entries carry no witness


def test_missing_block_is_an_error():
    cat = replace(groupoid_algebra_category(Z2, QQ), delta=None, nu=None)
    with pytest.raises(MissingBlock):
        check_axioms(cat, {"frobenius"})
    with pytest.raises(CategoryError):
        check_axioms(cat, {"bogus"})


def test_shape_validation():
    cat = groupoid_algebra_category(Z2, QQ)
    with pytest.raises(CategoryError):
        replace(cat, m={**cat.m, ("a", "a"): ExactMatrix.zeros(1, 2)})
    with pytest.raises(CategoryError):
        replace(cat, dims={"e": 1, "a": 2})  # m shapes no longer fit
    with pytest.raises(CategoryError):
        GVCategory(Z2, "sideways", QQ, cat.dims, cat.m, cat.j)
    g2 = two_object_z2()
    with pytest.raises(CategoryError):
        # loops-only m may not mention a non-loop
        GVCategory(g2, LOOPS, QQ, {a.id: 1 for a in g2.loops()},
                   {("x_y.e", "y_x.e"): ONE}, {x: ONE for x in g2.objects})


def test_identity_crossing_breaks_lf3_on_s3():
    rep = check_crossing(identity_crossing(groupoid_algebra(S3, QQ)))
    bad = {tuple(x.id for x in e.instance) for e in rep.failures if e.check == "LF3.swap"}
    assert ("c01", "c012") in bad
    # commuting pairs are untouched
    assert ("c012", "c021") not in bad


def test_trivial_group_is_scalar_frobenius():
    c = groupoid_algebra(trivial_group(), QQ)
    assert check_crossing(c).passed and check_axioms(c).passed
    for table in (c.base.m, c.base.j, c.base.delta, c.base.nu, c.base.eta, c.base.coev, c.phi):
        assert set(table.values()) == {ONE}


def test_derived_eta_on_z2():
    cat = replace(groupoid_algebra_category(Z2, QQ), eta=None, coev=None)
    eta, coev = derive_eta_coev(cat)
    # nu(m(l_a (x) l_a)) = nu(l_e) = 1
    assert eta["a"] == ONE and coev["a"] == ONE
    with pytest.raises(MissingBlock):
        derive_eta_coev(replace(cat, nu=None))


def test_derived_eta_on_s3_is_inner_product():
    cat = replace(groupoid_algebra_category(S3, QQ), eta=None, coev=None)
    eta, coev = derive_eta_coev(cat)
    assert check_axioms(replace(cat, eta=eta, coev=coev), {"inner_product", "coev_unique"}).passed


@pytest.mark.parametrize("g", CRITERION_GROUPOIDS, ids=repr)
def test_round_trip_recovers_delta_nu(g):
    for cat in (groupoid_algebra_category(g, QQ), twisted_example(g, QQ, seed=5).base):
        eta, coev = derive_eta_coev(cat)
        delta, nu = derive_delta_nu(replace(cat, eta=eta, coev=coev, delta=None, nu=None))
        assert delta == cat.delta and nu == cat.nu
        for a, b in cat.pairs():
            assert delta_alternative(cat, a, b) == cat.D(a, b)


def test_derive_delta_nu_trivial():
    cat = replace(groupoid_algebra_category(trivial_group(), QQ), delta=None, nu=None)
    delta, nu = derive_delta_nu(cat)
    assert delta == {("e", "e"): ONE} and nu == {"x": ONE}


def test_consistency_catches_mismatched_pairs():
    cat = groupoid_algebra_category(Z3, QQ)
    bad = replace(cat, eta={**cat.eta, "a": ExactMatrix.scalar(3)})
    rep = check_axioms(bad, {"consistency"})
    assert {e.instance[0].id for e in rep.failures if e.check == "consistency.eta"} == {"a"}


def test_coev_unique_detects_degenerate_pairing():
    base = twisted_example(Z2, QQ, seed=1).base
    rep = check_axioms(base, {"coev_unique"})
    assert rep.passed
    # a rank-one pairing cannot have a unique (or any) coevaluation
    d = base.dim("a")
    flat = ExactMatrix(1, d * d, [1] + [0] * (d * d - 1))
    bad = replace(base, eta={**base.eta, "a": flat}, coev={**base.coev})
    assert not check_axioms(bad, {"coev_unique"}).passed


# -- partial trace ------------------------------------------------------------

def test_partial_trace_scalar():
    c = groupoid_algebra(Z2, QQ)
    f = ExactMatrix.scalar(Fraction(7, 3))
    assert partial_trace(c, "e", "a", f) == f


def test_partial_trace_of_multiplication_on_z2():
    c = groupoid_algebra(Z2, QQ)
    assert partial_trace(c, "e", "a", c.base.M("e", "a")) == ONE
    with pytest.raises(ExactLinError):
        partial_trace(c, "e", "a", ExactMatrix.zeros(1, 2))


def _trace_oracle(c, alpha, beta, f):
    base = c.base
    bi = base.groupoid.inverse(beta)
    da, db, dbi = base.dim(alpha), base.dim(beta), base.dim(bi)
    C, E = base.C(bi), base.E(beta)  # C: I -> L_b (x) L_b^-1
    out = []
    for i in range(da):
        s = 0
        for p, q, r in itertools.product(range(db), range(dbi), range(db)):
            s += C[p * dbi + q, 0] * f[r, i * db + p] * E[0, r * dbi + q]
        out.append(s)
    return ExactMatrix(1, da, out)


def test_partial_trace_matches_basis_sum():
    c = twisted_example(Z3, QQ, seed=2)
    rng = random.Random(0)
    for alpha, beta in itertools.product(Z3.morphisms, repeat=2):
        da, db = c.base.dim(alpha), c.base.dim(beta)
        f = ExactMatrix(db, da * db, [rng.randint(-3, 3) for _ in range(da * db * db)])
        assert partial_trace(c, alpha, beta, f) == _trace_oracle(c, alpha, beta, f)


# -- duals ----------------------------------------------------------------------

def _std_duality(n, field=QQ):
    ev = ExactMatrix(1, n * n, [1 if k // n == k % n else 0 for k in range(n * n)], field)
    return ev, ev.transpose()


def test_dual_of_identity_and_transpose():
    d3 = _std_duality(3)
    assert dual_morphism(identity(3), d3, d3) == identity(3)
    f = ExactMatrix.from_rows([[1, 2, 0], [Fraction(1, 2), -1, 4]])  # 3 -> 2
    assert dual_morphism(f, d3, _std_duality(2)) == f.transpose()


def test_dual_reverses_composition_and_satisfies_defining_equations():
    rng = random.Random(4)
    # non-standard dualities from a gauged example
    c = twisted_example(Z2, QQ, seed=8).base
    dual = (c.E("a"), c.C("a"))
    f = ExactMatrix(2, 2, [rng.randint(-3, 3) for _ in range(4)])
    g = ExactMatrix(2, 2, [rng.randint(-3, 3) for _ in range(4)])
    fs, gs = dual_morphism(f, dual, dual), dual_morphism(g, dual, dual)
    assert dual_morphism(compose(f, g), dual, dual) == compose(gs, fs)
    ev, coev = dual
    I2 = identity(2)
    assert compose(coev, tensor(fs, I2)) == compose(coev, tensor(I2, f))
    assert compose(tensor(I2, fs), ev) == compose(tensor(f, I2), ev)


def test_dual_rejects_bad_pairing():
    ev, coev = _std_duality(2)
    with pytest.raises(ExactLinError):
        dual_morphism(identity(2), (ev.scale(2), coev), (ev, coev))


# -- constructions and JSON -------------------------------------------------------

@pytest.mark.parametrize("field", [QQ, GF(5)], ids=str)
def test_twisted_examples_satisfy_everything(field):
    for g in (S3, two_object_z2()):
        c = twisted_example(g, field, seed=11)
        assert max(c.base.dims.values()) == 2
        assert check_axioms(c).passed
        assert check_crossing(c).passed


def test_json_round_trip_both_kinds():
    for obj in (groupoid_algebra(two_object_z2(), QQ), twisted_example(Z3, GF(7), seed=3),
                groupoid_algebra_category(S3, QQ)):
        data = json.loads(json.dumps(category_to_json(obj, embed_groupoid=True)))
        back = category_from_json(data)
        assert type(back) is type(obj)
        assert category_to_json(back, True) == data


def test_json_errors():
    data = category_to_json(groupoid_algebra(Z2, QQ))
    with pytest.raises(CategoryError):
        category_from_json(data)  # no groupoid anywhere
    bad = dict(data, m={"e;a": [[1]]})
    with pytest.raises(CategoryError):
        category_from_json(bad, Z2)
    with pytest.raises(CategoryError):
        category_from_json(dict(data, phi={}), Z2)


def test_json_phi_only_fills_eta_coev():
    data = category_to_json(groupoid_algebra(Z3, QQ))
    del data["eta"], data["coev"]
    c = category_from_json(data, Z3)
    assert isinstance(c, CrossedFrobData) and c.base.eta["a"] == ONE


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["m", "delta", "phi"]), st.data())
def test_any_single_entry_perturbation_is_caught(seed, block, data):
    c = twisted_example(Z3, QQ, seed=seed)
    table = c.phi if block == "phi" else getattr(c.base, block)
    key = data.draw(st.sampled_from(sorted(table)))
    mat = table[key]
    i = data.draw(st.integers(0, mat.rows - 1))
    j = data.draw(st.integers(0, mat.cols - 1))
    rows = mat.to_rows()
    rows[i][j] += 1
    new = {**table, key: ExactMatrix.from_rows(rows)}
    if block == "phi":
        bad = CrossedFrobData(c.base, new)
    else:
        bad = CrossedFrobData(replace(c.base, **{block: new}), c.phi)
    assert not (check_axioms(bad).passed and check_crossing(bad).passed)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([QQ, GF(3), GF(7)]))
def test_gauge_preserves_all_identities(seed, field):
    c = random_gauge(twisted_example(two_object_z2(), field, seed=seed), seed + 1)
    assert check_axioms(c).passed and check_crossing(c).passed
