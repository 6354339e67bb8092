"""Acceptance gate: one test per criterion, summarised at the end of the run."""

import json
import subprocess
import sys
import time
from itertools import combinations

import pytest

import oracles
import suite
from qhalg import fixtures
from qhalg.algebra import corner, idempotent_ideal, quotient
from qhalg.constructions import (
    BlockSpec,
    block_dim_formula,
    block_extension_chain,
    build_block_extension,
    check_fac_ring_iso,
    check_morita_hypotheses,
    morita_context,
    morita_qh_chain,
    build_morita_ring,
    MoritaRefusal,
    peirce_context,
    triangular_context,
    zero_context,
)
from qhalg.heredity import (
    HypothesisError,
    assemble_chain,
    biprojective,
    decide_qh,
    verify_chain,
)
from qhalg.modules import (
    add_membership_check,
    corner_projectivity,
    ideal_projectivity,
    mu_map_check,
    nu_map_check,
)
from qhalg.serialize import dumps


def all_algebras():
    return list(suite.named_algebras().items()) + [
        (f"random-{i}", A) for i, A in enumerate(suite.random_algebras())
    ]


def sub_sums(A, proper=False):
    top = A.n if not proper else A.n - 1
    for r in range(1, top + 1):
        yield from combinations(range(A.n), r)


# --- 1 ---------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_example_fixture_properties():
    start = time.perf_counter()
    Q = fixtures.example_quiver()
    A = fixtures.example_algebra()
    expected = oracles.monomial_path_count(Q.arrows, [("a", "b", "c", "a"), ("c", "a", "b")], Q.truncation)
    assert expected == 11
    assert A.dim == expected
    assert not decide_qh(A).quasi_hereditary
    e = A.sub_sum([0, 2])
    right, left = biprojective(A, e)
    assert right is True
    assert left is False
    Qa, _ = quotient(A, idempotent_ideal(A, [0, 2]))
    C, _ = corner(A, e)
    cq, cc = decide_qh(Qa), decide_qh(C)
    assert cq.quasi_hereditary and verify_chain(cq, Qa)
    assert cc.quasi_hereditary and verify_chain(cc, C)
    assert time.perf_counter() - start < 1.0


# --- 2 ---------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_assemble_chain_whenever_hypotheses_hold():
    satisfied = 0
    failures = []
    for name, A in all_algebras():
        for s in sub_sums(A):
            e = A.sub_sum(s)
            right, left = biprojective(A, e)
            if not (right and left):
                continue
            Q, _ = quotient(A, idempotent_ideal(A, s))
            C, _ = corner(A, e)
            cq, cc = decide_qh(Q), decide_qh(C)
            if not (cq.quasi_hereditary and cc.quasi_hereditary):
                continue
            satisfied += 1
            try:
                cert = assemble_chain(A, e, cq, cc)
            except HypothesisError as exc:
                failures.append((name, s, str(exc)))
                continue
            if not verify_chain(cert, A):
                failures.append((name, s, "did not verify"))
    assert satisfied >= 50
    assert failures == []


# --- 3 ---------------------------------------------------------------------


def fixture_contexts():
    named = suite.named_algebras()
    qh = ["k", "k3", "A2", "A3-zero", "T2", "two-cycle"]
    out = []
    for a, b in [("k", "k"), ("k", "A2"), ("A2", "k"), ("T2", "A3-zero"), ("k3", "two-cycle"), ("A2", "A2")]:
        out.append((f"zero({a},{b})", zero_context(named[a], named[b])))
    for r in ["k", "A2", "k3"]:
        for size in (2, 3):
            out.append((f"triangular({r},{size})", triangular_context(named[r], size)))
    for base, sizes in [("k", (3,)), ("A2", (2, 1)), ("A2", (1, 2)), ("A3-zero", (1, 1, 2)), ("k2", (2, 2))]:
        B, index = build_block_extension(BlockSpec(suite.block_bases()[base], sizes))
        last = index.block_positions(len(sizes) - 1)
        if len(last) == B.n:
            last = last[1:]
        out.append((f"block-split({base},{sizes})", peirce_context(B, last)[0]))
    for name in qh + ["A3", "A4", "T3"]:
        A = named[name]
        cert = decide_qh(A)
        c = cert.layers[-2][0]
        if A.n > 1:
            out.append((f"bottom-peirce({name})", peirce_context(A, [c])[0]))
    return out


@pytest.mark.criterion(3)
def test_morita_rings_certified():
    contexts = fixture_contexts()
    assert len(contexts) >= 20
    for name, mc in contexts:
        hyp = check_morita_hypotheses(mc)
        assert hyp.ok, (name, hyp.to_dict())
        cert = morita_qh_chain(mc)
        assert verify_chain(cert, build_morita_ring(mc)), name


@pytest.mark.criterion(3)
def test_pairing_condition_is_not_vacuous():
    k = fixtures.semisimple(1)
    mc = morita_context(k, k, 1, [[[1]]], [[[1]]], 1, [[[1]]], [[[1]]], [[[0]]], [[[0]]])
    hyp = check_morita_hypotheses(mc)
    assert hyp.a and hyp.b and hyp.c
    assert not hyp.d
    assert not decide_qh(build_morita_ring(mc)).quasi_hereditary
    with pytest.raises(MoritaRefusal):
        morita_qh_chain(mc)


# --- 4 ---------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_block_extensions_certified_and_confirmed():
    start = time.perf_counter()
    count = 0
    for name, R in suite.block_bases().items():
        cert_R = decide_qh(R)
        assert cert_R.quasi_hereditary, name
        for sizes in suite.size_vectors(R.n):
            spec = BlockSpec(R, sizes)
            cert = block_extension_chain(spec, cert_R)
            B, _ = build_block_extension(spec)
            assert verify_chain(cert, B), (name, sizes)
            assert decide_qh(B).quasi_hereditary, (name, sizes)
            count += 1
    assert count > 100
    assert time.perf_counter() - start < 60


# --- 5 ---------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_projective_ideal_consequences():
    violations = []
    checked = 0
    for name, A in all_algebras():
        for s in sub_sums(A):
            e = A.sub_sum(s)
            I = idempotent_ideal(A, s)
            if not ideal_projectivity(A, I.space).projective:
                continue
            checked += 1
            if not mu_map_check(A, e)[0]:
                violations.append((name, s, "mu"))
            if add_membership_check(A, e) is not True:
                violations.append((name, s, "add"))
            if not corner_projectivity(A, e):
                violations.append((name, s, "corner"))
            if A.dim <= 12:
                for t in sub_sums(A):
                    if not nu_map_check(A, e, A.sub_sum(t))[0]:
                        violations.append((name, s, t, "nu"))
    assert checked > 100
    assert violations == []


# --- 6 ---------------------------------------------------------------------


def block_fixtures():
    for name, R in suite.block_bases().items():
        for sizes in suite.size_vectors(R.n, total=5):
            yield name, BlockSpec(R, sizes)
    yield "example", BlockSpec(fixtures.example_algebra(), (1, 2, 1))
    yield "A3", BlockSpec(fixtures.linear_path(3), (2, 1, 2))


@pytest.mark.criterion(6)
def test_factor_rings_of_block_extensions():
    count = 0
    for name, spec in block_fixtures():
        B, index = build_block_extension(spec)
        assert B.dim == block_dim_formula(spec), (name, spec.sizes)
        for i in range(spec.base.n):
            flag, dims = check_fac_ring_iso(spec, i, B, index)
            assert flag, (name, spec.sizes, i, dims)
            count += 1
    assert count > 50


# --- 7 ---------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_search_agrees_with_brute_force():
    compared = 0
    for name, A in all_algebras():
        if A.n > 4 or A.dim > 30:
            continue
        res = decide_qh(A)
        brute = oracles.brute_force_qh(A)
        assert res.quasi_hereditary == (brute is not None), name
        compared += 1
    assert compared >= 50


# --- 8 ---------------------------------------------------------------------


def artifacts(workers):
    out = []
    for name, A in suite.named_algebras().items():
        out.append(dumps(decide_qh(A, workers)))
    R = suite.block_bases()["A2"]
    out.append(dumps(block_extension_chain(BlockSpec(R, (2, 2)), decide_qh(R), workers=workers)))
    return out


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "qhalg.cli", *args], capture_output=True, text=True, check=False
    )
    return proc.returncode, proc.stdout


@pytest.mark.criterion(8)
def test_artifacts_are_deterministic(tmp_path):
    first = artifacts(1)
    assert artifacts(1) == first
    assert artifacts(4) == first
    alg = tmp_path / "alg.json"
    alg.write_text(dumps(fixtures.example_algebra()))
    a3 = tmp_path / "a3.json"
    a3.write_text(dumps(fixtures.linear_path(3)))
    for cmd in (["qh", "certify", str(a3)], ["qh", "certify", str(alg)], ["report", str(alg)], ["example"]):
        runs = {run_cli(*cmd, "--threads", t) for t in ("1", "4", "1")}
        assert len(runs) == 1, cmd
        json.loads(next(iter(runs))[1])
