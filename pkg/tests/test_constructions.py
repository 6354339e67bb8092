import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import suite
from qhalg import fixtures
from qhalg.algebra import validate_algebra
from qhalg.constructions import (
    BlockSpec,
    ConstructionError,
    InvalidMoritaContext,
    MoritaRefusal,
    block_dim_formula,
    block_extension_chain,
    build_block_extension,
    build_morita_ring,
    build_triangular,
    check_fac_ring_iso,
    check_morita_hypotheses,
    is_isomorphism,
    morita_context,
    morita_qh_chain,
    peirce_context,
    triangular_chain,
    triangular_context,
    validate_morita_context,
    zero_context,
)
from qhalg.heredity import ChainError, decide_qh, make_certificate, verify_chain


def k():
    return fixtures.semisimple(1)


def kkkk(phi=0, psi=0):
    return morita_context(k(), k(), 1, [[[1]]], [[[1]]], 1, [[[1]]], [[[1]]], [[[phi]]], [[[psi]]])


def test_zero_context():
    R, S = fixtures.linear_path(2), fixtures.semisimple(2)
    mc = zero_context(R, S)
    assert validate_morita_context(mc).ok
    L = build_morita_ring(mc)
    assert L.dim == R.dim + S.dim
    hyp = check_morita_hypotheses(mc)
    assert hyp.ok
    assert verify_chain(morita_qh_chain(mc), L)


def test_zero_context_of_semisimple_algebras():
    mc = zero_context(fixtures.semisimple(1), fixtures.semisimple(2))
    cert = morita_qh_chain(mc)
    assert verify_chain(cert, build_morita_ring(mc))


def test_pairings_vanishing_context():
    mc = kkkk()
    assert validate_morita_context(mc).ok
    L = build_morita_ring(mc)
    assert L.dim == 4 and L.radical.dim == 2
    m, n = L.basis_vector(1), L.basis_vector(2)
    assert not any(L.mul(m, n)) and not any(L.mul(n, m))
    hyp = check_morita_hypotheses(mc)
    assert hyp.failed == ["d"]
    assert hyp.details["tensor_dim"] == 1 and hyp.details["image_dim"] == 0
    with pytest.raises(MoritaRefusal, match="sufficient"):
        morita_qh_chain(mc)
    assert not decide_qh(L).quasi_hereditary


def test_unbalanced_pairing_is_rejected_with_witness():
    report = validate_morita_context(kkkk(phi=1))
    assert not report.ok
    assert any("(m1, n1, m1)" in f for f in report.failures)
    with pytest.raises(InvalidMoritaContext):
        build_morita_ring(kkkk(phi=1))


def test_wrong_table_shapes_are_rejected():
    mc = morita_context(k(), k(), 1, [[[1]]], [], 0, None, None, None, None)
    assert not validate_morita_context(mc).ok


def test_triangular_context_matches_triangular_ring():
    for R in [k(), fixtures.linear_path(2)]:
        for size in (2, 3):
            mc = triangular_context(R, size)
            assert validate_morita_context(mc).ok
            hyp = check_morita_hypotheses(mc)
            assert hyp.ok, hyp.to_dict()
            assert build_morita_ring(mc).same_structure(build_triangular(R, size))


def test_triangular_rings():
    assert build_triangular(fixtures.linear_path(2), 1).same_structure(fixtures.linear_path(2))
    assert build_triangular(k(), 2).dim == 3
    T3 = build_triangular(k(), 3)
    assert T3.dim == 6
    cert1 = make_certificate(k(), [(0,), ()])
    assert triangular_chain(k(), cert1, 1) == cert1
    assert triangular_chain(k(), cert1, 2).length == 2
    assert verify_chain(triangular_chain(k(), cert1, 3), T3)
    R = fixtures.linear_path(2)
    cert = triangular_chain(R, decide_qh(R), 2)
    assert cert.algebra.dim == 9 and verify_chain(cert, build_triangular(R, 2))


def test_morita_chain_accepts_supplied_certificates():
    mc = triangular_context(fixtures.linear_path(2), 2)
    auto = morita_qh_chain(mc)
    hyp = check_morita_hypotheses(mc)
    again = morita_qh_chain(mc, hyp.cert_quotient, hyp.cert_S)
    assert again.layers == auto.layers
    bogus = make_certificate(mc.S, [tuple(range(mc.S.n)), ()])
    hyp = check_morita_hypotheses(mc, cert_S=bogus)
    assert not hyp.a
    assert hyp.details["S"] == "supplied certificate rejected"


def test_peirce_split_reproduces_algebra():
    for name in ["A3", "example", "two-cycle", "commutative-square"]:
        A = suite.named_algebras()[name]
        for c in range(A.n):
            mc, images = peirce_context(A, [c])
            assert validate_morita_context(mc).ok
            assert is_isomorphism(build_morita_ring(mc), A, images), (name, c)
    with pytest.raises(ConstructionError):
        peirce_context(fixtures.linear_path(2), [0, 1])


def test_block_extension_examples():
    R = fixtures.linear_path(2)
    B, index = build_block_extension(BlockSpec(R, (1, 1)))
    assert B.same_structure(R) and B.structure_hash == R.structure_hash
    T2, _ = build_block_extension(BlockSpec(k(), (2,)))
    assert T2.same_structure(build_triangular(k(), 2))
    B, index = build_block_extension(BlockSpec(R, (2, 1)))
    assert B.dim == 6

    def block(i, s):
        rows, cols = index.block_positions(i), index.block_positions(s)
        return sum(len(index.entry_basis[(r, c)]) for r in rows for c in cols)

    assert [block(0, 0), block(0, 1), block(1, 0), block(1, 1)] == [3, 2, 0, 1]
    E, _ = build_block_extension(BlockSpec(fixtures.example_algebra(), (1, 2, 1)))
    assert E.dim == block_dim_formula(BlockSpec(fixtures.example_algebra(), (1, 2, 1)))


def test_block_spec_validation():
    with pytest.raises(ConstructionError):
        BlockSpec(fixtures.linear_path(2), (1,))
    with pytest.raises(ConstructionError):
        BlockSpec(fixtures.linear_path(2), (1, 0))


def test_factor_ring_examples():
    R = fixtures.linear_path(2)
    flag, dims = check_fac_ring_iso(BlockSpec(R, (2, 1)), 1)
    assert flag and dims["quotient"] == 3 and dims["target"] == 3
    for i in range(2):
        assert check_fac_ring_iso(BlockSpec(R, (1, 1)), i)[0]
    assert check_fac_ring_iso(BlockSpec(fixtures.example_algebra(), (1, 2, 1)), 2)[0]


def test_block_chain_examples():
    R = fixtures.linear_path(2)
    cert_R = decide_qh(R)
    same = block_extension_chain(BlockSpec(R, (1, 1)), cert_R)
    assert same.layers == cert_R.layers
    T = block_extension_chain(BlockSpec(k(), (2,)), decide_qh(k()), oracle_bound=10)
    assert T.length == 2
    cert = block_extension_chain(BlockSpec(R, (2, 1)), cert_R, oracle_bound=10)
    assert cert.algebra.dim == 6
    meta = dict(cert.metadata)
    assert [meta["relabel"][j] for j in meta["relabel_inverse"]] == [0, 1]
    with pytest.raises(ChainError):
        block_extension_chain(BlockSpec(R, (2, 1)), make_certificate(R, [(0, 1), ()]))


def test_block_chain_with_two_class_bottom_layer():
    R = fixtures.a3_zero_relation()
    cert_R = decide_qh(R)
    assert len(cert_R.layers[-2]) == 2
    spec = BlockSpec(R, (1, 2, 2))
    cert = block_extension_chain(spec, cert_R, oracle_bound=40)
    assert verify_chain(cert, build_block_extension(spec)[0])


BASES = suite.block_bases()
SPECS = [(name, sizes) for name, R in BASES.items() for sizes in suite.size_vectors(R.n, total=5)]


@settings(max_examples=40, deadline=None)
@given(index=st.integers(0, len(SPECS) - 1), data=st.data())
def test_block_extension_invariants(index, data):
    name, sizes = SPECS[index]
    spec = BlockSpec(BASES[name], sizes)
    B, idx = build_block_extension(spec)
    assert B.dim == block_dim_formula(spec)
    rep = validate_algebra(B)
    assert rep.ok and rep.basic
    i = data.draw(st.integers(0, spec.base.n - 1))
    assert check_fac_ring_iso(spec, i, B, idx)[0]
    # splitting off the blocks from position p onwards reproduces B
    p = data.draw(st.integers(1, spec.total)) if spec.total > 1 else None
    if p is not None and p < spec.total:
        mc, images = peirce_context(B, range(p, spec.total))
        assert is_isomorphism(build_morita_ring(mc), B, images)
