from fractions import Fraction
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from hqft.exactlin import (
    GF, QQ, DimensionMismatch, ExactLinError, ExactMatrix, FieldMismatch, FieldSpec,
    compose, identity, matrix_from_json, matrix_to_json, permutation, symmetry, tensor,
)


def rand_matrix(rng, r, c, field=QQ, lo=-4, hi=4):
    vals = [Fraction(rng.randint(lo, hi), rng.randint(1, 3)) for _ in range(r * c)]
    if not field.is_rational:
        vals = [rng.randrange(field.p) for _ in range(r * c)]
    return ExactMatrix(r, c, vals, field)


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, rows=None, cols=None):
    r = draw(st.integers(0, 3)) if rows is None else rows
    c = draw(st.integers(0, 3)) if cols is None else cols
    return ExactMatrix(r, c, draw(st.lists(small, min_size=r * c, max_size=r * c)))


def test_field_spec_validation():
    with pytest.raises(ValueError):
        FieldSpec("prime-field", 4)
    with pytest.raises(ValueError):
        FieldSpec("reals")
    assert GF(5).coerce(7) == 2
    assert GF(5).coerce(Fraction(1, 2)) == 3
    assert QQ.coerce("3/6") == Fraction(1, 2)
    assert FieldSpec.from_json({"kind": "prime-field", "p": 7}) == GF(7)
    assert FieldSpec.from_json("rationals") == QQ


def test_entries_are_canonical():
    m = ExactMatrix(1, 2, ["2/4", Fraction(-3, -6)])
    assert m.entries == (Fraction(1, 2), Fraction(1, 2))
    assert ExactMatrix(1, 2, [-1, 12], GF(5)).entries == (4, 2)
    with pytest.raises(DimensionMismatch):
        ExactMatrix(2, 2, [1, 2, 3])


def test_identity_small_cases():
    assert identity(0).shape == (0, 0)
    assert identity(1) == ExactMatrix.scalar(1)
    assert compose(identity(2), identity(2)) == identity(2)


def test_compose_unit_law_and_errors():
    rng = random.Random(1)
    f = rand_matrix(rng, 3, 2)
    assert compose(f, identity(3)) == f
    assert compose(identity(2), f) == f
    with pytest.raises(DimensionMismatch):
        compose(f, f)
    with pytest.raises(FieldMismatch):
        compose(identity(2), identity(2, GF(3)))


def test_compose_matches_triple_loop_oracle():
    rng = random.Random(7)
    for _ in range(20):
        f = rand_matrix(rng, 2, 3)  # 3 -> 2
        g = rand_matrix(rng, 3, 2)  # 2 -> 3
        got = compose(f, g)  # 3 -> 3, equals g.f
        want = [[sum(g[i, k] * f[k, j] for k in range(2)) for j in range(3)] for i in range(3)]
        assert got.to_rows() == want


def test_compose_over_prime_field():
    f = ExactMatrix.from_rows([[3, 4]], GF(5))
    g = ExactMatrix.from_rows([[2], [4]], GF(5))
    assert compose(g, f) == ExactMatrix.scalar((3 * 2 + 4 * 4) % 5, GF(5))


def test_tensor_units_and_scalars():
    assert tensor(identity(2), identity(3)) == identity(6)
    a, b = ExactMatrix.scalar(Fraction(2, 3)), ExactMatrix.scalar(-5)
    assert tensor(a, b) == ExactMatrix.scalar(Fraction(-10, 3))


def test_tensor_index_convention():
    f = ExactMatrix.from_rows([[1, 2], [3, 4]])
    g = ExactMatrix.from_rows([[5, 6, 7]])
    t = tensor(f, g)
    assert t.shape == (2, 6)
    for i in range(2):
        for j in range(2):
            for k in range(1):
                for l in range(3):
                    assert t[i * 1 + k, j * 3 + l] == f[i, j] * g[k, l]


def test_interchange_law_entrywise():
    rng = random.Random(3)
    for _ in range(10):
        f, g, f2, g2 = (rand_matrix(rng, 2, 2) for _ in range(4))
        lhs = compose(tensor(f2, g2), tensor(f, g))
        rhs = tensor(compose(f2, f), compose(g2, g))
        assert lhs == rhs
        # expanded entrywise: (f.f2 (x) g.g2)[(i,k),(j,l)]
        ff = [[sum(f[a, m] * f2[m, b] for m in range(2)) for b in range(2)] for a in range(2)]
        gg = [[sum(g[a, m] * g2[m, b] for m in range(2)) for b in range(2)] for a in range(2)]
        for i, k, j, l in itertools.product(range(2), repeat=4):
            assert lhs[2 * i + k, 2 * j + l] == ff[i][j] * gg[k][l]


def test_symmetry_basics():
    assert symmetry(1, 3) == identity(3)
    s22 = symmetry(2, 2)
    want = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
    assert s22.to_rows() == want
    for m, n in [(2, 3), (3, 1), (0, 2)]:
        assert compose(symmetry(m, n), symmetry(n, m)) == identity(m * n)


def test_symmetry_naturality():
    rng = random.Random(11)
    f = rand_matrix(rng, 3, 2)  # 2 -> 3
    g = rand_matrix(rng, 1, 2)  # 2 -> 1
    lhs = compose(tensor(f, g), symmetry(3, 1))
    rhs = compose(symmetry(2, 2), tensor(g, f))
    assert lhs == rhs


def test_permutation_cycle():
    dims = [2, 3, 1]
    p = permutation(dims, [1, 2, 0])
    assert p == symmetry(2, 3)
    back = permutation([3, 1, 2], [2, 0, 1])
    assert compose(p, back) == identity(6)
    with pytest.raises(ExactLinError):
        permutation([2, 2], [0, 0])


def test_inverse_rank_nullspace():
    m = ExactMatrix.from_rows([[2, 1], [1, 1]])
    assert compose(m.inverse(), m) == identity(2)
    s = ExactMatrix.from_rows([[1, 2], [2, 4]])
    assert s.rank() == 1
    (v,) = s.nullspace()
    assert (s @ v).is_zero()
    with pytest.raises(ExactLinError):
        s.inverse()
    q = ExactMatrix.from_rows([[1, 2], [3, 4]], GF(7))
    assert compose(q.inverse(), q) == identity(2, GF(7))


def test_json_round_trip():
    m = ExactMatrix.from_rows([[Fraction(1, 3), -2]])
    data = matrix_to_json(m)
    assert data == [["1/3", "-2"]]
    assert matrix_from_json(data, QQ) == m
    assert matrix_to_json(ExactMatrix.from_rows([[6]], GF(5))) == [[1]]
    assert matrix_from_json([], QQ, (0, 3)).shape == (0, 3)


@settings(max_examples=60, deadline=None)
@given(matrices(), matrices(), matrices())
def test_tensor_associative(a, b, c):
    assert tensor(tensor(a, b), c) == tensor(a, tensor(b, c))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_compose_associative(data):
    n = [data.draw(st.integers(0, 3)) for _ in range(4)]
    f = data.draw(matrices(n[1], n[0]))
    g = data.draw(matrices(n[2], n[1]))
    h = data.draw(matrices(n[3], n[2]))
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_symmetry_natural_property(data):
    m, m2, n, n2 = (data.draw(st.integers(0, 3)) for _ in range(4))
    f = data.draw(matrices(m2, m))
    g = data.draw(matrices(n2, n))
    assert compose(tensor(f, g), symmetry(m2, n2)) == compose(symmetry(m, n), tensor(g, f))
