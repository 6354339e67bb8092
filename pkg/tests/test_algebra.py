import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import suite
from oracles import RawAlgebra
from qhalg import fixtures
from qhalg.algebra import (
    InvalidAlgebra,
    as_ideal,
    corner,
    ideal_generated,
    idempotent_ideal,
    is_idempotent_ideal,
    make_algebra,
    opposite,
    peirce,
    peirce_dims,
    quotient,
    radical,
    validate_algebra,
)
from qhalg.constructions import build_triangular, is_isomorphism
from qhalg.exactmath import GF, QQ, Subspace
from qhalg.quiver import QuiverPresentation, compile_bound_quiver


def dense_table(A):
    return [[list(A.constants(a, b)) for b in range(A.dim)] for a in range(A.dim)]


def test_field_as_algebra_validates():
    A = make_algebra(QQ, [[[1]]], [1], [[1]])
    assert A.dim == 1
    assert validate_algebra(A).ok
    assert radical(A).dim == 0


def test_corrupted_table_reports_associativity_witness():
    A = fixtures.linear_path(2)
    table = dense_table(A)
    table[2][1] = [0, 0, 0]  # a1 * e_2 should be a1
    with pytest.raises(InvalidAlgebra) as info:
        make_algebra(QQ, table, A.unit, A.idempotents, labels=A.labels)
    rep = info.value.report
    assert not rep.ok
    assert any("fails" in f for f in rep.failures)


def test_example_algebra_validates():
    A = fixtures.example_algebra()
    assert A.dim == 11
    rep = validate_algebra(A)
    assert rep.ok and rep.basic
    assert rep.radical.dim == 8


def test_opposite_of_commutative_algebra():
    A = fixtures.truncated_polynomial(2)
    assert opposite(A).table == A.table


def test_opposite_of_arrow_is_reversed_arrow():
    A = fixtures.linear_path(2)
    B = compile_bound_quiver(QuiverPresentation.create(["1", "2"], [("a1", "2", "1")], [], 2))
    op = opposite(A)
    ident = [A.basis_vector(i) for i in range(A.dim)]
    assert is_isomorphism(op, B, ident)
    assert not is_isomorphism(A, B, ident)


def test_radical_examples():
    assert radical(fixtures.semisimple(2)).dim == 0
    D = fixtures.truncated_polynomial(2)
    J = radical(D)
    assert J.basis == ((0, 1),)
    assert not is_idempotent_ideal(J)


def test_trace_radical_refuses_small_characteristic():
    D = fixtures.truncated_polynomial(2)
    table = dense_table(D)
    with pytest.raises(InvalidAlgebra) as info:
        make_algebra(GF(2), table, D.unit, D.idempotents)
    assert any("radical" in f for f in info.value.report.failures)
    hint = Subspace.span(GF(2), 2, [[0, 1]])
    E = make_algebra(GF(2), table, D.unit, D.idempotents, radical_hint=hint)
    assert E.radical.dim == 1


def test_bad_radical_hint_is_not_trusted():
    D = fixtures.truncated_polynomial(2)
    wrong = Subspace.span(QQ, 2, [[1, 0]])
    A = make_algebra(QQ, dense_table(D), D.unit, D.idempotents, radical_hint=wrong)
    assert A.radical.basis == ((0, 1),)


def test_generated_ideals():
    A = fixtures.linear_path(2)
    assert ideal_generated(A, [A.unit]).dim == 3
    assert ideal_generated(A, [A.zero_vector()]).dim == 0
    I = idempotent_ideal(A, [0])
    assert I.space == Subspace.span(QQ, 3, [[1, 0, 0], [0, 0, 1]])
    assert is_idempotent_ideal(I)
    assert is_idempotent_ideal(ideal_generated(A, [A.zero_vector()]))


def test_quotients_and_corners():
    A = fixtures.linear_path(2)
    Q, proj = quotient(A, idempotent_ideal(A, [0]))
    assert Q.dim == 1 and proj.class_map == (1,)
    Z, _ = quotient(A, as_ideal(A, Subspace.zero(QQ, 3)))
    assert Z.same_structure(A)
    C, inc = corner(A, A.sub_sum([0, 1]))
    assert C.same_structure(A)
    T = build_triangular(fixtures.semisimple(1), 2)
    C, _ = corner(T, T.sub_sum([0]))
    assert C.dim == 1


def test_peirce_components():
    A = fixtures.linear_path(2)
    e1, e2 = A.sub_sum([0]), A.sub_sum([1])
    assert peirce(A, e1, e2).basis == ((0, 0, 1),)
    assert peirce(A, e2, e1).dim == 0
    assert peirce(A, A.sub_sum([0, 1]), A.sub_sum([0, 1])).dim == 3
    assert peirce_dims(A) == ((1, 1), (0, 1))


def test_structure_hash_ignores_radical_and_tracks_table():
    A = fixtures.linear_path(3)
    B = fixtures.linear_path(3)
    assert A.structure_hash == B.structure_hash
    assert A.structure_hash != fixtures.a3_zero_relation().structure_hash


NAMES = sorted(suite.named_algebras())


@settings(max_examples=40, deadline=None)
@given(name=st.sampled_from(NAMES), data=st.data())
def test_sub_sum_ideals_match_definition(name, data):
    A = suite.named_algebras()[name]
    support = data.draw(st.sets(st.integers(0, A.n - 1)))
    raw = RawAlgebra(A)
    I = idempotent_ideal(A, support) if support else as_ideal(A, Subspace.zero(A.field, A.dim))
    expected = Subspace.span(A.field, A.dim, raw.ideal(sorted(support)))
    assert I.space == expected
    assert is_idempotent_ideal(I)


@settings(max_examples=30, deadline=None)
@given(name=st.sampled_from(NAMES), data=st.data())
def test_quotient_and_corner_dimensions(name, data):
    A = suite.named_algebras()[name]
    support = data.draw(st.sets(st.integers(0, A.n - 1), min_size=1))
    I = idempotent_ideal(A, support)
    Q, proj = quotient(A, I)
    assert Q.dim == A.dim - I.dim
    assert Q.n == A.n - len(support)
    assert validate_algebra(Q).ok
    e = A.sub_sum(support)
    C, inc = corner(A, e)
    assert C.dim == peirce(A, e, e).dim
    assert C.n == len(support)
    for a in range(C.dim):
        for b in range(C.dim):
            lhs = inc(C.mul(C.basis_vector(a), C.basis_vector(b)))
            assert lhs == A.mul(inc.images[a], inc.images[b])


def test_radical_matches_oracle():
    for name, A in suite.named_algebras().items():
        if A.field.characteristic and A.field.characteristic <= A.dim:
            continue
        assert A.radical == Subspace.span(A.field, A.dim, RawAlgebra(A).radical()), name
