"""Morita context rings, upper triangular matrix rings and block extensions.

Each construction comes with a chain builder that produces a heredity chain
certificate for the new algebra from certificates of its ingredients, always
re-verified on the constructed algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    Algebra,
    as_ideal,
    checked,
    corner,
    idempotent_ideal,
    is_nilpotent,
    opposite,
    quotient,
    _peirce_space,
)
from .errors import QHAlgError
from .exactmath import Echelon, Subspace, dense, rank, sparse
from .heredity import (
    ChainError,
    HeredityChainCertificate,
    assemble_chain,
    decide_qh,
    make_certificate,
    transfer_certificate,
    verify_chain,
)
from .modules import RightModule, is_projective, tensor_balanced


class ConstructionError(QHAlgError):
    pass


class InvalidMoritaContext(QHAlgError):
    def __init__(self, report):
        self.report = report
        super().__init__("invalid Morita context: " + "; ".join(report.failures))


class MoritaRefusal(QHAlgError):
    """The sufficient conditions for a constructive chain do not hold.

    This says nothing about whether the ring itself is quasi-hereditary.
    """

    def __init__(self, report):
        self.report = report
        failed = ", ".join(report.failed)
        super().__init__(
            f"hypotheses {failed} fail; they are sufficient conditions only, "
            "so the Morita ring may still be quasi-hereditary"
        )


# ---------------------------------------------------------------------------
# Morita contexts


@dataclass(frozen=True)
class MoritaContext:
    """``(R, S, M, N, phi, psi)`` given by action and pairing tables.

    ``M_left[a][i]`` is ``r_a m_i`` and ``M_right[b][i]`` is ``m_i s_b`` (coordinate
    rows in M); likewise ``N_left[b][j] = s_b n_j`` and ``N_right[a][j] = n_j r_a``.
    ``phi[i][j]`` is ``phi(m_i ⊗ n_j)`` in R and ``psi[j][i]`` is ``psi(n_j ⊗ m_i)`` in S.
    """

    R: Algebra
    S: Algebra
    M_dim: int
    M_left: tuple
    M_right: tuple
    N_dim: int
    N_left: tuple
    N_right: tuple
    phi: tuple
    psi: tuple
    labels: tuple | None = None
    class_names: tuple | None = None

    @property
    def field(self):
        return self.R.field

    @property
    def dim(self) -> int:
        return self.R.dim + self.M_dim + self.N_dim + self.S.dim

    def offsets(self) -> tuple:
        dR, dM, dN = self.R.dim, self.M_dim, self.N_dim
        return 0, dR, dR + dM, dR + dM + dN


def _freeze(x):
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(y) for y in x)
    return x


def morita_context(R, S, M_dim, M_left, M_right, N_dim, N_left, N_right, phi, psi, labels=None, class_names=None):
    """Build a context, filling empty tables for zero-dimensional M or N."""
    if M_dim == 0:
        M_left = M_left or tuple(() for _ in range(R.dim))
        M_right = M_right or tuple(() for _ in range(S.dim))
    if N_dim == 0:
        N_left = N_left or tuple(() for _ in range(S.dim))
        N_right = N_right or tuple(() for _ in range(R.dim))
    phi = phi or tuple(() for _ in range(M_dim))
    psi = psi or tuple(() for _ in range(N_dim))
    F = R.field
    norm = F.norm

    def n(x):
        if isinstance(x, (list, tuple)):
            return tuple(n(y) for y in x)
        return norm(F.parse(x) if isinstance(x, str) else x)

    return MoritaContext(
        R, S, M_dim, n(M_left), n(M_right), N_dim, n(N_left), n(N_right), n(phi), n(psi),
        _freeze(labels), _freeze(class_names),
    )


def zero_context(R: Algebra, S: Algebra) -> MoritaContext:
    return morita_context(R, S, 0, None, None, 0, None, None, None, None)


def _unique_names(a: Sequence[str], b: Sequence[str], pa: str, pb: str) -> list:
    if set(a) & set(b) or len(set(a)) < len(a) or len(set(b)) < len(b):
        return [pa + x for x in a] + [pb + x for x in b]
    return list(a) + list(b)


def _morita_table(mc: MoritaContext) -> list:
    oR, oM, oN, oS = mc.offsets()
    d = mc.dim
    table = [[() for _ in range(d)] for _ in range(d)]

    def cell(row, shift):
        return tuple((shift + k, c) for k, c in enumerate(row) if c)

    R, S = mc.R, mc.S
    for a in range(R.dim):
        for b in range(R.dim):
            table[oR + a][oR + b] = tuple((oR + k, c) for k, c in R.table[a][b])
        for i in range(mc.M_dim):
            table[oR + a][oM + i] = cell(mc.M_left[a][i], oM)
        for j in range(mc.N_dim):
            table[oN + j][oR + a] = cell(mc.N_right[a][j], oN)
    for b in range(S.dim):
        for c in range(S.dim):
            table[oS + b][oS + c] = tuple((oS + k, x) for k, x in S.table[b][c])
        for i in range(mc.M_dim):
            table[oM + i][oS + b] = cell(mc.M_right[b][i], oM)
        for j in range(mc.N_dim):
            table[oS + b][oN + j] = cell(mc.N_left[b][j], oN)
    for i in range(mc.M_dim):
        for j in range(mc.N_dim):
            table[oM + i][oN + j] = cell(mc.phi[i][j], oR)
            table[oN + j][oM + i] = cell(mc.psi[j][i], oS)
    return table


def _morita_labels(mc: MoritaContext) -> tuple:
    if mc.labels is not None:
        return tuple(mc.labels)
    ends = _unique_names(mc.R.labels, mc.S.labels, "R.", "S.")
    dR = mc.R.dim
    return tuple(
        ends[:dR]
        + [f"m{i + 1}" for i in range(mc.M_dim)]
        + [f"n{j + 1}" for j in range(mc.N_dim)]
        + ends[dR:]
    )


def _morita_class_names(mc: MoritaContext) -> tuple:
    if mc.class_names is not None:
        return tuple(mc.class_names)
    return tuple(_unique_names(mc.R.class_names, mc.S.class_names, "R.", "S."))


def _raw_morita_ring(mc: MoritaContext) -> Algebra:
    oR, oM, oN, oS = mc.offsets()
    d = mc.dim
    R, S = mc.R, mc.S

    def place(v, shift):
        out = [0] * d
        for k, c in enumerate(v):
            out[shift + k] = c
        return tuple(out)

    unit = tuple(a + b for a, b in zip(place(R.unit, oR), place(S.unit, oS)))
    idems = [place(e, oR) for e in R.idempotents] + [place(e, oS) for e in S.idempotents]
    return Algebra(
        mc.field, _morita_table(mc), unit, idems,
        _morita_labels(mc), _morita_class_names(mc),
    )


@dataclass
class MoritaReport:
    ok: bool
    checks: dict
    failures: list

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "failures": list(self.failures)}


# Block triples (X, Y, Z) on which (xy)z = x(yz) can be nontrivial, with the
# context identity each one encodes.
_IDENTITIES = {
    "RRR": "R associative",
    "SSS": "S associative",
    "RRM": "M left R-module",
    "MSS": "M right S-module",
    "RMS": "M bimodule",
    "SSN": "N left S-module",
    "NRR": "N right R-module",
    "SNR": "N bimodule",
    "RMN": "phi left R-linear",
    "MNR": "phi right R-linear",
    "MSN": "phi balanced",
    "SNM": "psi left S-linear",
    "NMS": "psi right S-linear",
    "NRM": "psi balanced",
    "MNM": "compatibility phi(m⊗n)m' = m psi(n⊗m')",
    "NMN": "compatibility psi(n⊗m)n' = n phi(m⊗n')",
}


def _shape_problems(mc: MoritaContext) -> list:
    dR, dS, dM, dN = mc.R.dim, mc.S.dim, mc.M_dim, mc.N_dim
    problems = []

    def check(name, tab, outer, inner, width):
        if len(tab) != outer or any(len(t) != inner for t in tab):
            problems.append(f"{name} has the wrong shape")
            return
        if any(len(row) != width for t in tab for row in t):
            problems.append(f"{name} has rows of the wrong length")

    if mc.R.field != mc.S.field:
        problems.append("R and S are over different fields")
    check("M_left", mc.M_left, dR, dM, dM)
    check("M_right", mc.M_right, dS, dM, dM)
    check("N_left", mc.N_left, dS, dN, dN)
    check("N_right", mc.N_right, dR, dN, dN)
    check("phi", mc.phi, dM, dN, dR)
    check("psi", mc.psi, dN, dM, dS)
    return problems


def validate_morita_context(mc: MoritaContext) -> MoritaReport:
    """Check bimodule axioms, linearity and balance of the pairings, and compatibility."""
    failures = _shape_problems(mc)
    if failures:
        return MoritaReport(False, {"shape": False}, failures)
    checks = {"shape": True}
    L = _raw_morita_ring(mc)
    F = L.field
    norm = F.norm
    oR, oM, oN, oS = mc.offsets()
    blocks = {
        "R": range(oR, oM), "M": range(oM, oN), "N": range(oN, oS), "S": range(oS, L.dim),
    }
    table = L.table

    def unital(block, name):
        us = sparse(L.unit)
        for x in blocks[block]:
            xs = {x: 1}
            if L.mul_sparse(us, xs) != xs or L.mul_sparse(xs, us) != xs:
                failures.append(f"{name} fails at {L.labels[x]}")
                return False
        return True

    checks["R unital"] = unital("R", "unit of R")
    checks["S unital"] = unital("S", "unit of S")
    checks["M unital"] = unital("M", "unital action on M")
    checks["N unital"] = unital("N", "unital action on N")

    for key, name in _IDENTITIES.items():
        X, Y, Z = (blocks[c] for c in key)
        ok = True
        for a in X:
            for b in Y:
                ab = table[a][b]
                for c in Z:
                    left: dict = {}
                    for k, x in ab:
                        for m, y in table[k][c]:
                            left[m] = left.get(m, 0) + x * y
                    right: dict = {}
                    for k, x in table[b][c]:
                        for m, y in table[a][k]:
                            right[m] = right.get(m, 0) + x * y
                    if any(norm(left.get(m, 0) - right.get(m, 0)) for m in set(left) | set(right)):
                        failures.append(
                            f"{name} fails at ({L.labels[a]}, {L.labels[b]}, {L.labels[c]})"
                        )
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        checks[name] = ok
    return MoritaReport(all(checks.values()), checks, failures)


def _image_of_phi(mc: MoritaContext) -> Subspace:
    return Subspace.span(mc.field, mc.R.dim, (mc.phi[i][j] for i in range(mc.M_dim) for j in range(mc.N_dim)))


def _image_of_psi(mc: MoritaContext) -> Subspace:
    return Subspace.span(mc.field, mc.S.dim, (mc.psi[j][i] for j in range(mc.N_dim) for i in range(mc.M_dim)))


def build_morita_ring(mc: MoritaContext, validate: bool = True) -> Algebra:
    """The ring ``(R M; N S)`` on the basis ``R ⊔ M ⊔ N ⊔ S``.

    The result is validated as an algebra (associativity re-checked).  When the
    pairings land in the radicals, ``J(R) ⊕ M ⊕ N ⊕ J(S)`` is offered as the
    radical; otherwise the generic radical computation is used.
    """
    if validate:
        report = validate_morita_context(mc)
        if not report.ok:
            raise InvalidMoritaContext(report)
    L = _raw_morita_ring(mc)
    hint = None
    R, S = mc.R, mc.S
    if R.radical is not None and S.radical is not None:
        if R.radical.contains(_image_of_phi(mc)) and S.radical.contains(_image_of_psi(mc)):
            oR, oM, oN, oS = mc.offsets()
            vecs = []
            for v in R.radical.basis:
                vecs.append(tuple(v) + (0,) * (L.dim - R.dim))
            for k in range(oM, oS):
                vecs.append(L.basis_vector(k))
            for v in S.radical.basis:
                vecs.append((0,) * oS + tuple(v))
            hint = Subspace.span(L.field, L.dim, vecs)
    try:
        return checked(L, hint)
    except QHAlgError as exc:
        raise ConstructionError(f"Morita ring is not a valid algebra: {exc}") from exc


def morita_quotient(mc: MoritaContext):
    """``R / Im phi`` together with the projection from R."""
    return quotient(mc.R, as_ideal(mc.R, _image_of_phi(mc)))


def context_modules(mc: MoritaContext):
    """M as a right S-module and N as a right ``S^op``-module."""
    M = RightModule(mc.S, mc.M_dim, mc.M_right)
    N = RightModule(opposite(mc.S), mc.N_dim, mc.N_left)
    return M, N


@dataclass
class MoritaHypotheses:
    a: bool
    b: bool
    c: bool
    d: bool
    cert_quotient: HeredityChainCertificate | None = None
    cert_S: HeredityChainCertificate | None = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.a and self.b and self.c and self.d

    @property
    def failed(self) -> list:
        return [k for k in "abcd" if not getattr(self, k)]

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "details": dict(self.details)}


def check_morita_hypotheses(mc: MoritaContext, cert_quotient=None, cert_S=None, workers: int = 1) -> MoritaHypotheses:
    """Sufficient conditions for the Morita ring to be quasi-hereditary.

    (a) ``R/Im phi`` and ``S`` quasi-hereditary, (b) M right-projective over S,
    (c) N projective as a left S-module, (d) ``M ⊗_S N -> R`` injective.
    Supplied certificates are verified instead of searching.
    """
    details: dict = {}
    Q, _ = morita_quotient(mc)

    def certify(A, cert, name):
        if cert is not None:
            try:
                ok = verify_chain(cert, A)
            except QHAlgError:
                ok = False
            details[name] = "verified" if ok else "supplied certificate rejected"
            return cert if ok else None
        A.require_split_basic()
        if A.dim == 0:
            details[name] = "zero algebra"
            return make_certificate(A, [()])
        res = decide_qh(A, workers)
        details[name] = "certified" if res.quasi_hereditary else "not quasi-hereditary"
        return res if res.quasi_hereditary else None

    cq = certify(Q, cert_quotient, "quotient")
    cs = certify(mc.S, cert_S, "S")
    a = cq is not None and cs is not None
    M, N = context_modules(mc)
    b = mc.M_dim == 0 or is_projective(M)
    c = mc.N_dim == 0 or is_projective(N)
    if mc.M_dim and mc.N_dim:
        T = tensor_balanced(M, N, [dense(g, mc.S.dim) for g in mc.S.generators])
        r = rank(mc.field, (mc.phi[k // mc.N_dim][k % mc.N_dim] for k in T.basis), mc.R.dim)
        d = r == T.dim
        details["tensor_dim"] = T.dim
        details["image_dim"] = r
    else:
        d = True
        details["tensor_dim"] = 0
        details["image_dim"] = 0
    return MoritaHypotheses(a, b, c, d, cq, cs, details)


def morita_qh_chain(mc: MoritaContext, cert_quotient=None, cert_S=None, metadata=None, workers: int = 1):
    """Heredity chain of the Morita ring using ``e`` = unit of the S block.

    Raises :class:`MoritaRefusal` when a hypothesis fails.
    """
    hyp = check_morita_hypotheses(mc, cert_quotient, cert_S, workers)
    if not hyp.ok:
        raise MoritaRefusal(hyp)
    L = build_morita_ring(mc)
    nR = mc.R.n
    e = L.sub_sum(range(nR, L.n))
    if mc.S.n == 0:
        raise ConstructionError("S block has no idempotents")
    Lq, _ = quotient(L, idempotent_ideal(L, e.support))
    C, _ = corner(L, e)
    cq = _transfer_or_empty(hyp.cert_quotient, Lq)
    cs = transfer_certificate(hyp.cert_S, C)
    cert = assemble_chain(L, e, cq, cs, metadata)
    return cert


def _transfer_or_empty(cert, target):
    if target.n == 0:
        return make_certificate(target, [()])
    return transfer_certificate(cert, target)


def peirce_context(A: Algebra, support: Sequence[int]):
    """Split ``A`` as a Morita context with S = eAe for the classes in ``support``.

    Returns ``(mc, images)`` where ``images`` are the A-vectors of the Morita
    ring's basis, giving an isomorphism onto ``A``.
    """
    support = tuple(sorted(set(support)))
    rest = tuple(i for i in range(A.n) if i not in support)
    if not support or not rest:
        raise ConstructionError("Peirce split needs a proper nonempty set of classes")
    e, f = A.sub_sum(support), A.sub_sum(rest)
    R, incR = corner(A, f)
    S, incS = corner(A, e)
    Mspace = _peirce_space(A, f, e)
    Nspace = _peirce_space(A, e, f)
    rs = [sparse(v) for v in incR.images]
    ss = [sparse(v) for v in incS.images]
    ms = [sparse(v) for v in Mspace.basis]
    ns = [sparse(v) for v in Nspace.basis]

    def coords(space, v):
        return tuple(v.get(p, 0) for p in space.pivots)

    Rsp = _peirce_space(A, f, f)
    Ssp = _peirce_space(A, e, e)
    mul = A.mul_sparse
    M_left = tuple(tuple(coords(Mspace, mul(r, m)) for m in ms) for r in rs)
    M_right = tuple(tuple(coords(Mspace, mul(m, s)) for m in ms) for s in ss)
    N_left = tuple(tuple(coords(Nspace, mul(s, n)) for n in ns) for s in ss)
    N_right = tuple(tuple(coords(Nspace, mul(n, r)) for n in ns) for r in rs)
    phi = tuple(tuple(coords(Rsp, mul(m, n)) for n in ns) for m in ms)
    psi = tuple(tuple(coords(Ssp, mul(n, m)) for m in ms) for n in ns)
    labels = (
        tuple(R.labels)
        + tuple(A.labels[p] for p in Mspace.pivots)
        + tuple(A.labels[p] for p in Nspace.pivots)
        + tuple(S.labels)
    )
    mc = MoritaContext(
        R, S, Mspace.dim, M_left, M_right, Nspace.dim, N_left, N_right, phi, psi,
        labels, tuple(R.class_names) + tuple(S.class_names),
    )
    images = tuple(incR.images) + tuple(Mspace.basis) + tuple(Nspace.basis) + tuple(incS.images)
    return mc, images


def is_isomorphism(source: Algebra, target: Algebra, images: Sequence[Sequence]) -> bool:
    """Whether the linear map sending basis element ``b`` to ``images[b]`` is an algebra isomorphism."""
    if source.dim != target.dim or len(images) != source.dim:
        return False
    if rank(target.field, images, target.dim) != target.dim:
        return False
    ims = [sparse(v) for v in images]
    F = target.field

    def apply(v: dict) -> dict:
        out: dict = {}
        for k, c in v.items():
            for m, x in ims[k].items():
                out[m] = out.get(m, 0) + c * x
        return {m: F.norm(x) for m, x in out.items() if F.norm(x)}

    if apply(sparse(source.unit)) != sparse(target.unit):
        return False
    for a in range(source.dim):
        for b in range(source.dim):
            if apply(dict(source.table[a][b])) != target.mul_sparse(ims[a], ims[b]):
                return False
    return True


# ---------------------------------------------------------------------------
# upper triangular matrix rings


def triangular_context(R: Algebra, size: int) -> MoritaContext:
    """Context ``(T_{size-1}(R), R, R^{size-1}, 0, 0, 0)`` whose ring is ``T_size(R)``."""
    if size < 2:
        raise ConstructionError("triangular context needs size >= 2")
    Rp, pos = _triangular(R, size - 1)
    d = R.dim
    k = size - 1  # rows of the column block
    # M basis: (row r, basis b of R) at column `size`, index r*d + b
    M_dim = k * d
    F = R.field
    M_left = []
    for (r, c, b) in pos:
        rows = []
        for r2 in range(k):
            for b2 in range(d):
                out = [0] * M_dim
                if c == r2:
                    for t, x in R.table[b][b2]:
                        out[r * d + t] = x
                rows.append(tuple(out))
        M_left.append(tuple(rows))
    M_right = []
    for bs in range(d):
        rows = []
        for r2 in range(k):
            for b2 in range(d):
                out = [0] * M_dim
                for t, x in R.table[b2][bs]:
                    out[r2 * d + t] = x
                rows.append(tuple(out))
        M_right.append(tuple(rows))
    labels = (
        tuple(Rp.labels)
        + tuple(f"{R.labels[b]}@{r + 1},{size}" for r in range(k) for b in range(d))
        + tuple(f"{lab}@{size},{size}" for lab in R.labels)
    )
    names = tuple(Rp.class_names) + tuple(f"{cn}.{size}" for cn in R.class_names)
    return MoritaContext(
        Rp, R, M_dim, tuple(M_left), tuple(M_right), 0,
        tuple(() for _ in range(d)), tuple(() for _ in range(Rp.dim)),
        tuple(() for _ in range(M_dim)), (),
        labels, names,
    )


def _triangular(R: Algebra, size: int):
    """``(T_size(R), positions)`` with ``positions[x] = (row, col, basis index of R)``."""
    if size == 1:
        names = tuple(f"{cn}.1" for cn in R.class_names)
        labels = tuple(f"{lab}@1,1" for lab in R.labels)
        T = Algebra(R.field, R.table, R.unit, R.idempotents, labels, names, R.radical)
        return T, [(0, 0, b) for b in range(R.dim)]
    mc = triangular_context(R, size)
    _, prev = _triangular(R, size - 1)
    T = build_morita_ring(mc)
    k = size - 1
    pos = list(prev) + [(r, k, b) for r in range(k) for b in range(R.dim)] + [(k, k, b) for b in range(R.dim)]
    return T, pos


def build_triangular(R: Algebra, size: int) -> Algebra:
    """Upper triangular ``size x size`` matrices over R, built recursively as Morita rings."""
    if size < 1:
        raise ConstructionError("size must be at least 1")
    if size == 1:
        return R
    return _triangular(R, size)[0]


def triangular_chain(R: Algebra, cert_R: HeredityChainCertificate, size: int) -> HeredityChainCertificate:
    """Chain of ``T_size(R)`` by induction on the size through Morita rings."""
    if not verify_chain(cert_R, R):
        raise ChainError("certificate does not verify on the base algebra")
    if size == 1:
        return cert_R
    cert = transfer_certificate(cert_R, _triangular(R, 1)[0])
    for s in range(2, size + 1):
        mc = triangular_context(R, s)
        Q, _ = morita_quotient(mc)  # phi = 0, so this is T_{s-1}(R) itself
        cq = transfer_certificate(cert, Q)
        cert = morita_qh_chain(mc, cq, cert_R)
    return cert


# ---------------------------------------------------------------------------
# block extensions


@dataclass(frozen=True)
class BlockSpec:
    base: Algebra
    sizes: tuple

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) != self.base.n:
            raise ConstructionError(
                f"need one size per class: {len(self.sizes)} sizes for {self.base.n} classes"
            )
        if any(s < 1 for s in self.sizes):
            raise ConstructionError("block sizes must be positive")

    @property
    def offsets(self) -> tuple:
        """``l_{<=i}`` for ``i = 0..n``."""
        out = [0]
        for s in self.sizes:
            out.append(out[-1] + s)
        return tuple(out)

    @property
    def total(self) -> int:
        return sum(self.sizes)


@dataclass
class BlockIndex:
    spec: BlockSpec
    positions: tuple  # positions[x] = (row, col, index of the entry-space basis vector)
    entry_basis: dict  # (row, col) -> list of B indices, aligned with entry_space rows
    entry_space: dict  # (row, col) -> Subspace of the base algebra
    block_of: tuple  # block index of each row/column position

    def block_positions(self, i: int) -> tuple:
        off = self.spec.offsets
        return tuple(range(off[i], off[i + 1]))

    def element(self, r: int, c: int, v) -> tuple:
        """The matrix with the base-algebra element ``v`` at entry ``(r, c)``."""
        space = self.entry_space[(r, c)]
        vec = dense(v, space.ambient_dim) if isinstance(v, dict) else tuple(v)
        if not space.contains_vector(vec):
            raise ConstructionError(f"element does not belong to entry ({r + 1}, {c + 1})")
        out = [0] * len(self.positions)
        for x, coef in zip(self.entry_basis[(r, c)], space.coordinates(vec)):
            out[x] = coef
        return tuple(out)

    def tilde_e(self, B: Algebra, i: int):
        """``ẽ_i``: the idempotent ``e_i`` on every diagonal entry of block ``i``."""
        return B.sub_sum(self.block_positions(i))

    def e_n1(self, B: Algebra):
        """``e_n`` at the first diagonal entry of the last block."""
        return B.sub_sum([self.spec.offsets[-2]])


def _entry_spaces(R: Algebra):
    ones = [R.sub_sum([i]) for i in range(R.n)]
    J = R.require_radical()
    cache: dict = {}

    def space(i, s, below):
        key = (i, s, below and i == s)
        if key not in cache:
            if i == s and below:
                cache[key] = _peirce_space(R, ones[i], ones[i], J)
            else:
                cache[key] = _peirce_space(R, ones[i], ones[s])
        return cache[key]

    return space


def block_dim_formula(spec: BlockSpec) -> int:
    """Closed-form dimension of the block extension."""
    R = spec.base
    space = _entry_spaces(R)
    total = 0
    for i, li in enumerate(spec.sizes):
        total += li * (li + 1) // 2 * space(i, i, False).dim
        total += li * (li - 1) // 2 * space(i, i, True).dim
        for s, ls in enumerate(spec.sizes):
            if s != i:
                total += li * ls * space(i, s, False).dim
    return total


def build_block_extension(spec: BlockSpec):
    """The block extension ``B(R; l_1, ..., l_n)`` and its index map.

    Entry ``(r, c)`` in block ``(i, s)`` holds ``e_i R e_i`` on and above the
    diagonal of a diagonal block, ``e_i J e_i`` below it, and ``e_i R e_s`` off
    the diagonal blocks.  Basis elements are ordered by (base pivot, row, col),
    so sizes ``(1, ..., 1)`` reproduce the base table on aligned bases.
    """
    R = spec.base
    R.require_split_basic()
    F = R.field
    space = _entry_spaces(R)
    off = spec.offsets
    l = spec.total
    block_of = tuple(i for i, li in enumerate(spec.sizes) for _ in range(li))
    local = tuple(p - off[block_of[p]] for p in range(l))
    entry_space = {}
    raw = []
    for r in range(l):
        for c in range(l):
            i, s = block_of[r], block_of[c]
            sp = space(i, s, local[r] > local[c])
            entry_space[(r, c)] = sp
            for t, p in enumerate(sp.pivots):
                raw.append((p, r, c, t))
    raw.sort()
    positions = tuple((r, c, t) for _, r, c, t in raw)
    entry_basis: dict = {key: [None] * entry_space[key].dim for key in entry_space}
    for x, (r, c, t) in enumerate(positions):
        entry_basis[(r, c)][t] = x
    d = len(positions)
    vecs = [sparse(entry_space[(r, c)].basis[t]) for r, c, t in positions]
    by_row: dict = {}
    for x, (r, c, t) in enumerate(positions):
        by_row.setdefault(r, []).append(x)

    table = [[() for _ in range(d)] for _ in range(d)]
    for x, (r, c, _) in enumerate(positions):
        for y in by_row.get(c, ()):
            _, t, _ = positions[y]
            w = R.mul_sparse(vecs[x], vecs[y])
            if not w:
                continue
            sp = entry_space[(r, t)]
            coeffs = [w.get(p, 0) for p in sp.pivots]
            check: dict = {}
            for row, cf in zip(sp.basis, coeffs):
                if cf:
                    for k, v in enumerate(row):
                        if v:
                            check[k] = check.get(k, 0) + cf * v
            check = {k: F.norm(v) for k, v in check.items() if F.norm(v)}
            if check != w:
                raise ConstructionError(
                    f"product escapes entry ({r + 1}, {t + 1}): base data is not a valid basic algebra"
                )
            table[x][y] = tuple(
                (entry_basis[(r, t)][k], cf) for k, cf in enumerate(coeffs) if cf
            )

    index = BlockIndex(spec, positions, entry_basis, entry_space, block_of)

    def diag(p, v):
        return index.element(p, p, v)

    idems = []
    names = []
    for p in range(l):
        i = block_of[p]
        idems.append(diag(p, R.idempotents[i]))
        names.append(R.class_names[i] if spec.sizes[i] == 1 else f"{R.class_names[i]}.{local[p] + 1}")
    unit = [0] * d
    for e in idems:
        for k, c in enumerate(e):
            unit[k] += c
    unit = tuple(F.norm(c) for c in unit)

    all_ones = all(s == 1 for s in spec.sizes)
    labels = []
    for x, (r, c, t) in enumerate(positions):
        row = entry_space[(r, c)].basis[t]
        p = entry_space[(r, c)].pivots[t]
        standard = sum(1 for v in row if v) == 1
        lab = R.labels[p] if standard else f"{R.labels[p]}~"
        labels.append(lab if all_ones else f"{lab}@{r + 1},{c + 1}")

    rad = []
    J = R.radical
    for p in range(l):
        i = block_of[p]
        for v in _peirce_space(R, R.sub_sum([i]), R.sub_sum([i]), J).basis:
            rad.append(diag(p, v))
    for x, (r, c, _) in enumerate(positions):
        if r != c:
            rad.append(tuple(1 if k == x else 0 for k in range(d)))
    hint = Subspace.span(F, d, rad)
    B = Algebra(F, table, unit, idems, labels, names)
    try:
        B = checked(B, hint)
    except QHAlgError as exc:
        raise ConstructionError(f"block extension is not a valid algebra: {exc}") from exc
    if not is_nilpotent(B, B.radical):
        raise ConstructionError("radical of the block extension is not nilpotent")
    return B, index


def _factor_image(spec: BlockSpec, i: int):
    """Quotient base ``R/Re_iR``, the reduced spec, and the base projection."""
    R = spec.base
    Rq, proj = quotient(R, idempotent_ideal(R, [i]))
    sizes = tuple(s for j, s in enumerate(spec.sizes) if j != i)
    return Rq, proj, sizes


def check_fac_ring_iso(spec: BlockSpec, i: int, B=None, index=None):
    """``B / B ẽ_i B`` against the block extension of ``R/Re_iR`` with block ``i`` removed.

    The entry-wise projection ``psi`` is checked to be a surjective algebra
    homomorphism with kernel ``B ẽ_i B``.  Returns ``(iso, dims)``.
    """
    if B is None or index is None:
        B, index = build_block_extension(spec)
    ideal = idempotent_ideal(B, index.block_positions(i))
    dims = {"B": B.dim, "ideal": ideal.dim, "quotient": B.dim - ideal.dim}
    Rq, proj, sizes = _factor_image(spec, i)
    if Rq.n == 0:
        dims["target"] = 0
        return ideal.dim == B.dim, dims
    Bq, qindex = build_block_extension(BlockSpec(Rq, sizes))
    dims["target"] = Bq.dim
    off = spec.offsets
    removed = set(range(off[i], off[i + 1]))
    keep = [p for p in range(spec.total) if p not in removed]
    newpos = {p: k for k, p in enumerate(keep)}
    images = []
    for (r, c, t) in index.positions:
        if r in removed or c in removed:
            images.append((0,) * Bq.dim)
            continue
        v = index.entry_space[(r, c)].basis[t]
        try:
            images.append(qindex.element(newpos[r], newpos[c], proj(v)))
        except ConstructionError:
            dims.update({"homomorphism": False, "surjective": False, "kernel_is_ideal": False})
            return False, dims
    ims = [sparse(v) for v in images]
    F = B.field

    def apply(v: dict) -> dict:
        out: dict = {}
        for k, c in v.items():
            for m, x in ims[k].items():
                out[m] = out.get(m, 0) + c * x
        return {m: F.norm(x) for m, x in out.items() if F.norm(x)}

    hom = apply(sparse(B.unit)) == sparse(Bq.unit)
    if hom:
        for a in range(B.dim):
            for b in range(B.dim):
                if apply(dict(B.table[a][b])) != Bq.mul_sparse(ims[a], ims[b]):
                    hom = False
                    break
            if not hom:
                break
    # kernel of psi
    ech = Echelon(F, Bq.dim + B.dim)
    for x, v in enumerate(images):
        row = dict(sparse(v))
        row[Bq.dim + x] = 1
        ech.add(row)
    kernel = []
    for piv, row in ech.rows.items():
        if piv >= Bq.dim:
            kernel.append(dense({k - Bq.dim: c for k, c in row.items()}, B.dim))
    img_rank = sum(1 for piv in ech.rows if piv < Bq.dim)
    K = Subspace.span(F, B.dim, kernel)
    surjective = img_rank == Bq.dim
    same_kernel = K == ideal.space
    dims.update({"homomorphism": hom, "surjective": surjective, "kernel_is_ideal": same_kernel})
    return hom and surjective and same_kernel, dims


def _refine_bottom(R: Algebra, cert: HeredityChainCertificate, c: int):
    """Insert the layer ``{c}`` above the empty layer (c must lie in the bottom layer)."""
    layers = list(cert.layers)
    if layers[-2] != (c,):
        layers = layers[:-1] + [(c,), ()]
    return make_certificate(R, layers)


def block_extension_chain(
    spec: BlockSpec,
    cert_R: HeredityChainCertificate,
    oracle_bound: int | None = None,
    workers: int = 1,
) -> HeredityChainCertificate:
    """Heredity chain of ``B(R; l)`` built from a chain of R.

    A class ``c`` of the bottom layer of ``cert_R`` is moved to the last
    position (an explicit relabelling, stored in the metadata).  ``B`` splits
    as a Morita ring with S the last diagonal block, which is triangular over
    ``e_c R e_c = k``; the quotient by that block is again a block extension
    and is handled recursively.  The result is verified on ``B`` and, when
    ``dim B <= oracle_bound``, compared with an exhaustive search.
    """
    R = spec.base
    if not verify_chain(cert_R, R):
        raise ChainError("certificate does not verify on the base algebra")
    B, cert = _block_chain(spec, cert_R, workers)
    if oracle_bound is not None and B.dim <= oracle_bound:
        res = decide_qh(B, workers)
        if not res.quasi_hereditary:
            raise ChainError("exhaustive search disagrees with the constructed chain")
    return cert


def _block_chain(spec: BlockSpec, cert_R, workers):
    R = spec.base
    n = R.n
    B, index = build_block_extension(spec)
    bottom = cert_R.layers[-2]
    c = n - 1 if n - 1 in bottom else min(bottom)
    order = [j for j in range(n) if j != c] + [c]
    inverse = [order.index(j) for j in range(n)]
    meta = {"relabel": order, "relabel_inverse": inverse}
    if order != list(range(n)):
        Rp = R.relabel_classes(order)
        cert_p = transfer_certificate(cert_R, Rp, inverse)
        spec_p = BlockSpec(Rp, tuple(spec.sizes[j] for j in order))
        _, inner = _block_chain_last(spec_p, cert_p, workers)
        # class (block order[b], local j) of B corresponds to (block b, local j) of B'
        off, offp = spec.offsets, spec_p.offsets
        cmap = []
        for b, j in enumerate(order):
            for t in range(spec_p.sizes[b]):
                cmap.append(off[j] + t)
        return B, transfer_certificate(inner, B, cmap, meta)
    B, inner = _block_chain_last(spec, cert_R, workers, B, index)
    return B, transfer_certificate(inner, B, None, meta)


def _block_chain_last(spec: BlockSpec, cert_R, workers, B=None, index=None):
    """Chain when the last class lies in the bottom layer of ``cert_R``; returns ``(B, cert)``."""
    R = spec.base
    n = R.n
    if B is None:
        B, index = build_block_extension(spec)
    last = n - 1
    cert_R = _refine_bottom(R, cert_R, last)
    S_pos = index.block_positions(last)
    # S = last diagonal block = T_{l_n}(e_n R e_n) with e_n R e_n = k
    Rn, _ = corner(R, R.sub_sum([last]))
    cert_Rn = make_certificate(Rn, [(0,), ()])
    cert_S_tri = triangular_chain(Rn, cert_Rn, spec.sizes[last])
    if n == 1:
        tri = build_triangular(Rn, spec.sizes[last])
        if not is_isomorphism(tri, B, _triangular_images(tri, B, index, spec)):
            raise ChainError("single-block extension is not the triangular ring")
        return B, transfer_certificate(cert_S_tri, B)
    iso, dims = check_fac_ring_iso(spec, last, B, index)
    if not iso:
        raise ChainError(f"factor ring is not the reduced block extension: {dims}")
    Rq, proj, sizes = _factor_image(spec, last)
    origin = proj.class_map
    pos = {cl: q for q, cl in enumerate(origin)}
    q_layers = [tuple(pos[x] for x in s if x != last) for s in cert_R.layers[:-1]]
    cert_Rq = make_certificate(Rq, q_layers)
    _, cert_Bq = _block_chain(BlockSpec(Rq, sizes), cert_Rq, workers)
    mc, images = peirce_context(B, S_pos)
    if not is_isomorphism(build_morita_ring(mc, validate=False), B, images):
        raise ChainError("Peirce split does not reproduce the block extension")
    Q, _ = morita_quotient(mc)
    cq = transfer_certificate(cert_Bq, Q)
    cs = transfer_certificate(cert_S_tri, mc.S)
    cert_L = morita_qh_chain(mc, cq, cs, workers=workers)
    # Morita ring classes are the R-part positions followed by the S block: same order as B
    return B, transfer_certificate(cert_L, B)


def _triangular_images(tri: Algebra, B: Algebra, index: BlockIndex, spec: BlockSpec):
    """Images in B of the triangular basis over the one-dimensional corner."""
    size = spec.sizes[0]
    # triangular basis positions follow the recursive Morita order
    pos = [(0, 0)]
    for s in range(2, size + 1):
        pos += [(r, s - 1) for r in range(s - 1)] + [(s - 1, s - 1)]
    e = spec.base.idempotents[0]
    return [index.element(r, c, e) for r, c in pos]
