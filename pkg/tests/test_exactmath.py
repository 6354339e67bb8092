import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import Lin
from qhalg.exactmath import (
    GF,
    QQ,
    FieldError,
    Matrix,
    Subspace,
    field_from_descriptor,
    rank,
    rref,
    rref_kernel,
    solve,
    span_saturate,
    subspace_ops,
)

FIELDS = [QQ, GF(2), GF(5), GF(7)]


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=1, max_size=max_rows)
    )


def normed(F, rows):
    return [[F.norm(x) for x in r] for r in rows]


def test_field_parsing_and_formatting():
    assert QQ.parse("-3/6") == Fraction(-1, 2)
    assert QQ.format(Fraction(4, 2)) == "2"
    assert QQ.format(Fraction(-1, 3)) == "-1/3"
    F = GF(5)
    assert F.parse("7") == 2
    assert F.format(F.norm(-1)) == "4"
    assert F.inv(2) == 3


def test_field_descriptors():
    assert field_from_descriptor("QQ") == QQ
    assert field_from_descriptor(0) == QQ
    assert field_from_descriptor("GF(5)") == GF(5)
    assert field_from_descriptor({"characteristic": 7}) == GF(7)
    with pytest.raises(FieldError):
        field_from_descriptor(4)


def test_kernel_of_rank_one_matrix():
    M = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
    R, r, K = rref_kernel(M)
    assert r == 1
    assert R.entries[0] == (1, 2)
    assert K == Subspace.span(QQ, 2, [[-2, 1]])


def test_saturation_under_cyclic_shift():
    def shift(v):
        return [tuple(v[-1:] + v[:-1])]

    U = span_saturate(QQ, 3, [(1, 0, 0)], shift)
    assert U.dim == 3
    assert U == Subspace.full(QQ, 3)


def test_solve_consistent_and_inconsistent():
    assert solve(QQ, [[1, 1], [1, -1]], [2, 0], 2) == (1, 1)
    assert solve(QQ, [[1, 1], [1, 1]], [1, 2], 2) is None


@settings(max_examples=60, deadline=None)
@given(rows=matrices(), which=st.sampled_from(range(len(FIELDS))))
def test_rref_is_idempotent(rows, which):
    F = FIELDS[which]
    rows = normed(F, rows)
    cols = len(rows[0])
    R, piv = rref(F, rows, cols)
    R2, piv2 = rref(F, R, cols)
    assert (R, piv) == (R2, piv2)


@settings(max_examples=60, deadline=None)
@given(rows=matrices(), which=st.sampled_from(range(len(FIELDS))))
def test_rank_nullity_and_oracle_rank(rows, which):
    F = FIELDS[which]
    rows = normed(F, rows)
    cols = len(rows[0])
    _, r, K = rref_kernel(Matrix.from_rows(F, rows, cols))
    assert r + K.dim == cols
    assert r == rank(F, rows, cols) == Lin(F.characteristic).rank(rows)
    for v in K.basis:
        for row in rows:
            assert F.norm(sum(a * b for a, b in zip(row, v))) == 0


@settings(max_examples=60, deadline=None)
@given(rows=matrices(), seed=st.integers(0, 10**6), which=st.sampled_from(range(len(FIELDS))))
def test_span_is_canonical(rows, seed, which):
    F = FIELDS[which]
    rows = normed(F, rows)
    n = len(rows[0])
    rng = random.Random(seed)
    mixed = []
    for _ in range(len(rows) + 1):
        coeffs = [rng.randint(-2, 2) for _ in rows]
        mixed.append([F.norm(sum(c * r[j] for c, r in zip(coeffs, rows))) for j in range(n)])
    U = Subspace.span(F, n, rows)
    V = Subspace.span(F, n, list(reversed(rows)) + mixed)
    assert U == V
    for v in rows:
        assert U.contains_vector(v)
        assert U.coordinates(v) == tuple(v[p] for p in U.pivots)


@settings(max_examples=40, deadline=None)
@given(a=matrices(3, 4), b=matrices(3, 4), which=st.sampled_from(range(len(FIELDS))))
def test_sum_and_intersection_dimensions(a, b, which):
    F = FIELDS[which]
    n = min(len(a[0]), len(b[0]))
    U = Subspace.span(F, n, normed(F, [r[:n] for r in a]))
    V = Subspace.span(F, n, normed(F, [r[:n] for r in b]))
    S, I, contains = subspace_ops(U, V)
    assert S.dim + I.dim == U.dim + V.dim
    assert contains == (S == U)
    assert U.contains(I) and V.contains(I)
    assert S.contains(U) and S.contains(V)
