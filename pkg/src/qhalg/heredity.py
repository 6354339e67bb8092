"""Heredity ideals, the quasi-heredity decision procedure, and chain certificates.

A certificate lists nested supports ``S_0 ⊋ S_1 ⊋ ... ⊋ S_m = ∅`` of sub-sums
of the distinguished idempotents, ``S_0`` being every class.  The chain is
``H_i = A ε_i A`` with ``ε_i = Σ_{j ∈ S_i} e_j``; it is valid when each
``H_i / H_{i+1}`` is a heredity ideal of ``A / H_{i+1}``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .algebra import (
    Algebra,
    Idempotent,
    corner,
    idempotent_ideal,
    ideal_generated,
    is_idempotent_ideal,
    quotient,
    _peirce_space,
)
from .errors import QHAlgError
from .exactmath import Subspace
from .modules import ideal_projectivity


class ChainError(QHAlgError):
    def __init__(self, message, layer=None):
        self.layer = layer
        super().__init__(message)


class CertificateMismatch(QHAlgError):
    pass


class MemoMismatch(QHAlgError):
    pass


class HypothesisError(QHAlgError):
    def __init__(self, report: dict):
        self.report = report
        failed = ", ".join(k for k, v in report.items() if v is False)
        super().__init__(f"hypotheses failed: {failed}")


@dataclass(frozen=True)
class HeredityTest:
    heredity: bool
    nonzero: bool
    eje_zero: bool | None = None
    projective: bool | None = None
    ideal_dim: int | None = None
    multiplicities: tuple | None = None

    @property
    def reason(self) -> str:
        if self.heredity:
            return "heredity ideal"
        if not self.nonzero:
            return "zero idempotent"
        if not self.eje_zero:
            return "eJe != 0"
        return "AeA not right-projective"


def is_heredity_ideal(A: Algebra, e: Idempotent):
    """Return ``(flag, HeredityTest)`` for the ideal ``AeA``."""
    A.require_split_basic()
    if e.is_zero:
        t = HeredityTest(False, False)
        return False, t
    eje = _peirce_space(A, e, e, A.radical)
    if eje.dim:
        t = HeredityTest(False, True, False)
        return False, t
    I = ideal_generated(A, [e.vector])
    proj = ideal_projectivity(A, I.space)
    t = HeredityTest(proj.projective, True, True, proj.projective, I.dim, proj.multiplicities)
    return t.heredity, t


class _Layers:
    """Per-algebra caches for testing sub-sum heredity ideals quickly."""

    def __init__(self, A: Algebra):
        self.A = A
        J = A.radical
        ones = [A.sub_sum([i]) for i in range(A.n)]
        self.rad_zero = [
            [_peirce_space(A, ones[i], ones[j], J).dim == 0 for j in range(A.n)]
            for i in range(A.n)
        ]
        self._ideals: dict = {}

    def ideal(self, support: tuple) -> Subspace:
        if support not in self._ideals:
            if len(support) == 1:
                self._ideals[support] = idempotent_ideal(self.A, support).space
            else:
                acc = Subspace.zero(self.A.field, self.A.dim)
                for i in support:
                    acc = acc.sum(self.ideal((i,)))
                self._ideals[support] = acc
        return self._ideals[support]

    def test(self, support: tuple) -> HeredityTest:
        if not support:
            return HeredityTest(False, False)
        if not all(self.rad_zero[i][j] for i in support for j in support):
            return HeredityTest(False, True, False)
        space = self.ideal(support)
        proj = ideal_projectivity(self.A, space)
        return HeredityTest(proj.projective, True, True, proj.projective, space.dim, proj.multiplicities)


def _search_order(items: Sequence[int]):
    """Nonempty subsets, larger ones first, ties broken lexicographically."""
    subs = [c for r in range(1, len(items) + 1) for c in combinations(items, r)]
    return sorted(subs, key=lambda c: (-len(c), c))


@dataclass(frozen=True)
class HeredityChainCertificate:
    algebra_hash: str
    class_names: tuple
    layers: tuple
    diagnostics: tuple = ()
    metadata: tuple = ()  # sorted (key, value) pairs
    algebra: Algebra | None = field(default=None, compare=False, repr=False)

    quasi_hereditary = True

    @property
    def length(self) -> int:
        return len(self.layers) - 1

    def ideals(self, A: Algebra | None = None) -> list:
        A = A or self.algebra
        return [idempotent_ideal(A, s) for s in self.layers]

    def payload(self) -> dict:
        return {
            "type": "heredity_certificate",
            "algebra_hash": self.algebra_hash,
            "class_names": list(self.class_names),
            "layers": [list(s) for s in self.layers],
            "diagnostics": [dict(d) for d in self.diagnostics],
            "metadata": {k: v for k, v in self.metadata},
        }

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class QHRefusal:
    algebra_hash: str
    class_names: tuple
    failures: tuple  # (survivor tuple, ((subset, reason), ...)) sorted by survivors

    quasi_hereditary = False

    def payload(self) -> dict:
        return {
            "type": "qh_refusal",
            "algebra_hash": self.algebra_hash,
            "class_names": list(self.class_names),
            "verdict": "not quasi-hereditary",
            "failures": [
                {
                    "survivors": list(surv),
                    "attempts": [{"subset": list(s), "reason": r} for s, r in attempts],
                }
                for surv, attempts in self.failures
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _diagnostics(A: Algebra, layers: Sequence[tuple]) -> tuple:
    dims = [idempotent_ideal(A, s).dim for s in layers]
    out = []
    for i in range(len(layers) - 1):
        new = [A.class_names[j] for j in layers[i] if j not in layers[i + 1]]
        out.append(
            (
                ("ideal_dim", dims[i]),
                ("layer", i),
                ("new_classes", new),
                ("quotient_dim", A.dim - dims[i + 1]),
            )
        )
    return tuple(dict(d) for d in out)


def make_certificate(A: Algebra, layers: Iterable[Iterable[int]], metadata: dict | None = None):
    layers = tuple(tuple(sorted(s)) for s in layers)
    return HeredityChainCertificate(
        A.structure_hash,
        A.class_names,
        layers,
        tuple(_diagnostics(A, layers)),
        tuple(sorted((metadata or {}).items())),
        A,
    )


def decide_qh(A: Algebra, workers: int = 1):
    """Exhaustive search for a heredity chain through sub-sums of the classes.

    ``A`` is quasi-hereditary iff some nonempty support ``T`` gives a heredity
    ideal ``A e_T A`` with ``A / A e_T A`` quasi-hereditary.  States are the
    sets of killed classes; larger subsets are tried first and ties are broken
    lexicographically, so the returned certificate is deterministic.  ``workers > 1`` evaluates the
    heredity tests of one state in a thread pool without changing the result.
    """
    A.require_split_basic()
    n = A.n
    full = frozenset(range(n))
    memo: dict = {}
    failures: dict = {}
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def solve(killed: frozenset):
        if killed == full:
            return ()
        if killed:
            Q, proj = quotient(A, idempotent_ideal(A, sorted(killed)))
            origin = proj.class_map
        else:
            Q, origin = A, tuple(range(n))
        if killed in memo:
            found, digest = memo[killed]
            if digest != Q.structure_hash:
                raise MemoMismatch(f"quotient by {sorted(killed)} changed between visits")
            return found
        layers = _Layers(Q)
        subsets = _search_order(range(Q.n))
        if pool is not None:
            tests = list(pool.map(layers.test, subsets))
        else:
            tests = None
        attempts = []
        found = None
        for idx, T in enumerate(subsets):
            test = tests[idx] if tests is not None else layers.test(T)
            orig = tuple(origin[t] for t in T)
            if not test.heredity:
                attempts.append((orig, test.reason))
                continue
            rest = solve(killed | frozenset(orig))
            if rest is None:
                attempts.append((orig, "quotient not quasi-hereditary"))
                continue
            found = (orig,) + rest
            break
        memo[killed] = (found, Q.structure_hash)
        if found is None:
            failures[tuple(origin)] = tuple(attempts)
        return found

    try:
        steps = solve(frozenset())
    finally:
        if pool is not None:
            pool.shutdown()
    if steps is None:
        return QHRefusal(A.structure_hash, A.class_names, tuple(sorted(failures.items())))
    layers = [()]
    acc: tuple = ()
    for T in steps:
        acc = tuple(sorted(acc + T))
        layers.append(acc)
    return make_certificate(A, reversed(layers))


def check_layers(A: Algebra, layers: Sequence[Sequence[int]]) -> list:
    """Problems with a proposed chain (empty list when it is a heredity chain)."""
    problems = []
    layers = [tuple(s) for s in layers]
    if not layers:
        return ["empty layer list"]
    if set(layers[0]) != set(range(A.n)):
        problems.append("first layer is not the full set of classes")
    if layers[-1]:
        problems.append("last layer is not empty")
    for s in layers:
        if any(not isinstance(i, int) or i < 0 or i >= A.n for i in s):
            problems.append(f"layer {list(s)} has an index out of range")
            return problems
    for i in range(len(layers) - 1):
        if not (set(layers[i]) > set(layers[i + 1])):
            problems.append(f"layers {i} and {i + 1} are not strictly nested")
    if problems:
        return problems
    for i in range(len(layers) - 1):
        upper, lower = layers[i], layers[i + 1]
        if lower:
            Q, proj = quotient(A, idempotent_ideal(A, lower))
            pos = {c: q for q, c in enumerate(proj.class_map)}
        else:
            Q, pos = A, {c: c for c in range(A.n)}
        image = tuple(pos[c] for c in upper if c not in set(lower))
        flag, test = is_heredity_ideal(Q, Q.sub_sum(image))
        if not flag:
            problems.append(f"layer {i}: {test.reason} in the quotient by layer {i + 1}")
        if not is_idempotent_ideal(idempotent_ideal(A, upper)):
            problems.append(f"layer {i}: ideal is not idempotent in the algebra")
    return problems


def verify_chain(cert: HeredityChainCertificate, algebra: Algebra | None = None) -> bool:
    """Independently re-check every layer of a certificate against its algebra."""
    A = algebra if algebra is not None else cert.algebra
    if A is None:
        raise CertificateMismatch("certificate carries no algebra; pass one explicitly")
    if cert.algebra_hash != A.structure_hash:
        raise CertificateMismatch("certificate refers to a different algebra")
    A.require_split_basic()
    return not check_layers(A, cert.layers)


def _require_sub_sum(A: Algebra, e: Idempotent) -> tuple:
    if e.support is None:
        raise QHAlgError("constructive chain operations need a sub-sum idempotent")
    return tuple(e.support)


def _verify_partial(A: Algebra, layers: list, what: str):
    for i in range(len(layers) - 1):
        upper, lower = layers[i], layers[i + 1]
        if not set(upper) > set(lower):
            raise ChainError(f"{what}: layers {i}, {i + 1} not strictly nested", i)
        problems = check_layers_pair(A, upper, lower)
        if problems:
            raise ChainError(f"{what}: layer {i}: {problems}", i)


def check_layers_pair(A: Algebra, upper: tuple, lower: tuple) -> str | None:
    if lower:
        Q, proj = quotient(A, idempotent_ideal(A, lower))
        pos = {c: q for q, c in enumerate(proj.class_map)}
    else:
        Q, pos = A, {c: c for c in range(A.n)}
    image = tuple(pos[c] for c in upper if c not in set(lower))
    flag, test = is_heredity_ideal(Q, Q.sub_sum(image))
    return None if flag else test.reason


def lift_chain_from_quotient(A: Algebra, e: Idempotent, cert_quotient: HeredityChainCertificate) -> tuple:
    """Lift a chain of ``A/AeA`` to the layers of ``A`` from ``A`` down to ``AeA``."""
    A.require_split_basic()
    supp = _require_sub_sum(A, e)
    if supp:
        Q, proj = quotient(A, idempotent_ideal(A, supp))
        origin = proj.class_map
    else:
        Q, origin = A, tuple(range(A.n))
    if cert_quotient.algebra_hash != Q.structure_hash:
        raise CertificateMismatch("quotient certificate does not refer to A/AeA")
    if not verify_chain(cert_quotient, Q):
        raise ChainError("quotient certificate does not verify")
    layers = [tuple(sorted(set(supp) | {origin[c] for c in s})) for s in cert_quotient.layers]
    _verify_partial(A, layers, "lifted chain")
    return tuple(layers)


def biprojective(A: Algebra, e: Idempotent) -> tuple:
    I = ideal_generated(A, [e.vector])
    return (
        ideal_projectivity(A, I.space, "right").projective,
        ideal_projectivity(A, I.space, "left").projective,
    )


def transport_chain_from_corner(A: Algebra, e: Idempotent, cert_corner: HeredityChainCertificate) -> tuple:
    """Turn a chain of ``eAe`` into the layers of ``A`` from ``AeA`` down to ``0``."""
    A.require_split_basic()
    supp = _require_sub_sum(A, e)
    if not supp:
        return ((),)
    right, left = biprojective(A, e)
    if not (right and left):
        raise HypothesisError({"b": right, "c": left})
    C, inc = corner(A, e)
    if cert_corner.algebra_hash != C.structure_hash:
        raise CertificateMismatch("corner certificate does not refer to eAe")
    if not verify_chain(cert_corner, C):
        raise ChainError("corner certificate does not verify")
    layers = [tuple(sorted(inc.class_map[c] for c in s)) for s in cert_corner.layers]
    _verify_partial(A, layers, "transported chain")
    return tuple(layers)


def assemble_chain(
    A: Algebra,
    e: Idempotent,
    cert_quotient: HeredityChainCertificate | None,
    cert_corner: HeredityChainCertificate | None,
    metadata: dict | None = None,
) -> HeredityChainCertificate:
    """Heredity chain of ``A`` from chains of ``A/AeA`` and ``eAe`` when ``AeA`` is biprojective.

    Raises :class:`HypothesisError` naming the failed conditions:
    ``a`` (both certificates supplied and valid), ``b`` (``AeA`` right-projective),
    ``c`` (``AeA`` left-projective).
    """
    A.require_split_basic()
    supp = _require_sub_sum(A, e)
    report = {"a": True, "b": True, "c": True}
    if supp:
        report["b"], report["c"] = biprojective(A, e)
        Q, _ = quotient(A, idempotent_ideal(A, supp))
        C, _ = corner(A, e)
    else:
        Q, C = A, None
    try:
        if cert_quotient is None or not verify_chain(cert_quotient, Q):
            report["a"] = False
        if supp and (cert_corner is None or not verify_chain(cert_corner, C)):
            report["a"] = False
    except CertificateMismatch:
        report["a"] = False
    if not all(report.values()):
        raise HypothesisError(report)
    upper = lift_chain_from_quotient(A, e, cert_quotient)
    lower = transport_chain_from_corner(A, e, cert_corner) if supp else ((),)
    layers = list(upper) + list(lower[1:]) if supp else list(upper)
    cert = make_certificate(A, layers, metadata)
    if not verify_chain(cert, A):
        raise ChainError("assembled chain failed verification")
    return cert


def transfer_certificate(
    cert: HeredityChainCertificate,
    target: Algebra,
    class_map: Sequence[int] | None = None,
    metadata: dict | None = None,
) -> HeredityChainCertificate:
    """Re-express a chain on an algebra identified class-by-class with the certificate's.

    ``class_map[i]`` is the class of ``target`` matching class ``i`` of the
    source.  The result is verified against ``target``.
    """
    if class_map is None:
        class_map = range(len(cert.class_names))
    class_map = list(class_map)
    layers = [tuple(sorted(class_map[c] for c in s)) for s in cert.layers]
    out = make_certificate(target, layers, metadata)
    if not verify_chain(out, target):
        raise ChainError("transferred certificate does not verify on the target algebra")
    return out
