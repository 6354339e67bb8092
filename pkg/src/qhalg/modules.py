"""Right modules, projectivity by projective-cover counting, balanced tensor products.

Left modules are right modules over the opposite algebra throughout.
Action matrices use the row convention: ``m . a = m @ action[a]``, so
``action[a] @ action[b] == action[ab]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    Algebra,
    Idempotent,
    TwoSidedIdeal,
    corner,
    ideal_generated,
    opposite,
    product_space,
)
from .errors import QHAlgError
from .exactmath import Echelon, Subspace, dense, sparse


class ModuleError(QHAlgError):
    pass


@dataclass(frozen=True)
class RightModule:
    algebra: Algebra = field(repr=False)
    dim: int
    action: tuple  # action[b] is a dim x dim matrix (tuple of rows)

    def element_action(self, x: Sequence) -> list:
        """Matrix of the right action of the algebra element ``x``."""
        norm = self.algebra.field.norm
        mat = [[0] * self.dim for _ in range(self.dim)]
        for b, c in enumerate(x):
            if c:
                for i, row in enumerate(self.action[b]):
                    target = mat[i]
                    for k, v in enumerate(row):
                        if v:
                            target[k] += c * v
        return [[norm(v) for v in row] for row in mat]

    def payload(self) -> dict:
        fmt = self.algebra.field.format
        return {
            "type": "module",
            "algebra_hash": self.algebra.structure_hash,
            "dim": self.dim,
            "action": [[[fmt(c) for c in row] for row in mat] for mat in self.action],
        }


def check_module(M: RightModule) -> list:
    """List of violated module axioms (empty when ``M`` is a module)."""
    A = M.algebra
    F = A.field
    problems = []
    ident = [[1 if i == j else 0 for j in range(M.dim)] for i in range(M.dim)]
    if M.element_action(A.unit) != ident:
        problems.append("unit does not act as the identity")

    def matmul(X, Y):
        return [
            [F.norm(sum(X[i][k] * Y[k][j] for k in range(M.dim))) for j in range(M.dim)]
            for i in range(M.dim)
        ]

    for a in range(A.dim):
        for b in range(A.dim):
            lhs = matmul([list(r) for r in M.action[a]], [list(r) for r in M.action[b]])
            if lhs != M.element_action(A.constants(a, b)):
                problems.append(f"action not multiplicative at ({A.labels[a]}, {A.labels[b]})")
                return problems
    return problems


def module_from_space(
    ambient: Algebra,
    space: Subspace,
    over: Algebra,
    over_basis: Sequence[Sequence],
    side: str = "right",
) -> RightModule:
    """Module on a subspace of ``ambient`` acted on by elements ``over_basis`` of ``ambient``.

    ``side="right"`` gives ``v . c = v * u_c``; ``side="left"`` gives ``c . v = u_c * v``
    (then ``over`` should be the opposite of the acting algebra).
    """
    rows = [sparse(v) for v in space.basis]
    pivots = space.pivots
    action = []
    for u in over_basis:
        us = sparse(u)
        mat = []
        for v in rows:
            w = ambient.mul_sparse(v, us) if side == "right" else ambient.mul_sparse(us, v)
            if not space.contains_vector(dense(w, ambient.dim)):
                raise ModuleError("subspace is not closed under the action")
            mat.append(tuple(w.get(p, 0) for p in pivots))
        action.append(tuple(mat))
    return RightModule(over, space.dim, tuple(action))


def module_of_ideal(A: Algebra, I: TwoSidedIdeal | Subspace, side: str = "right") -> RightModule:
    """``I`` as a right ``A``-module, or (``side="left"``) as a right ``A^op``-module."""
    space = I.space if isinstance(I, TwoSidedIdeal) else I
    basis = [A.basis_vector(b) for b in range(A.dim)]
    if side == "right":
        return module_from_space(A, space, A, basis, "right")
    if side == "left":
        return module_from_space(A, space, opposite(A), basis, "left")
    raise ModuleError(f"unknown side {side!r}")


def top_multiplicities(M: RightModule) -> tuple:
    """``m_i = dim (M/MJ) e_i`` for each class of the (split basic) algebra."""
    A = M.algebra
    A.require_split_basic()
    F = A.field
    radical_mats = [M.element_action(j) for j in A.radical.basis]
    mj = Echelon(F, M.dim)
    for mat in radical_mats:
        for row in mat:
            mj.add_dense(row)
    MJ = mj.subspace()
    mult = []
    for e in A.idempotents:
        E = M.element_action(e)
        me = Echelon(F, M.dim)
        for row in E:
            me.add_dense(row)
        mje = Echelon(F, M.dim)
        for w in MJ.basis:
            img = [F.norm(sum(w[k] * E[k][j] for k in range(M.dim) if w[k])) for j in range(M.dim)]
            mje.add_dense(img)
        mult.append(len(me) - len(mje))
    return tuple(mult)


def is_projective(M: RightModule) -> bool:
    """Projective iff the projective cover has the same dimension as ``M``."""
    m = top_multiplicities(M)
    return sum(c * d for c, d in zip(m, M.algebra.projective_dims)) == M.dim


@dataclass(frozen=True)
class IdealProjectivity:
    projective: bool
    multiplicities: tuple
    cover_dim: int
    dim: int


def ideal_projectivity(A: Algebra, space: Subspace, side: str = "right") -> IdealProjectivity:
    """Projectivity of a one-sided ideal of ``A`` computed in ``A``'s own coordinates."""
    A.require_split_basic()
    F = A.field
    if side == "left":
        A = opposite(A)
    vs = [sparse(v) for v in space.basis]
    J = [sparse(j) for j in A.radical.basis]
    mul = A.mul_sparse
    mj = Echelon(F, A.dim)
    for v in vs:
        for j in J:
            w = mul(v, j)
            if w:
                mj.add(w)
    mj_basis = [sparse(v) for v in mj.subspace().basis]
    mult = []
    for e in A.idempotents:
        es = sparse(e)
        me = Echelon(F, A.dim)
        for v in vs:
            w = mul(v, es)
            if w:
                me.add(w)
        mje = Echelon(F, A.dim)
        for v in mj_basis:
            w = mul(v, es)
            if w:
                mje.add(w)
        mult.append(len(me) - len(mje))
    cover = sum(c * d for c, d in zip(mult, A.projective_dims))
    return IdealProjectivity(cover == space.dim, tuple(mult), cover, space.dim)


def add_membership_check(A: Algebra, e: Idempotent):
    """Whether ``AeA`` lies in ``Add(eA)``; ``None`` when ``AeA`` is not right-projective."""
    I = ideal_generated(A, [e.vector])
    M = module_of_ideal(A, I)
    if not is_projective(M):
        return None
    eA = Subspace.span(A.field, A.dim, (A.mul(e.vector, A.basis_vector(b)) for b in range(A.dim)))
    top_e = top_multiplicities(module_of_ideal(A, eA))
    top_I = top_multiplicities(M)
    return all(top_e[i] > 0 for i, m in enumerate(top_I) if m > 0)


# ---------------------------------------------------------------------------
# balanced tensor products


@dataclass
class TensorProduct:
    """``(M ⊗_k N) / span{mc ⊗ n - m ⊗ cn}`` with pure tensor ``(i, j)`` at index ``i*dim N + j``."""

    left_dim: int
    right_dim: int
    relations: Echelon
    basis: tuple  # indices of the pure tensors forming the quotient basis

    @property
    def dim(self) -> int:
        return len(self.basis)

    def project(self, i: int, j: int) -> tuple:
        r = self.relations.reduce({i * self.right_dim + j: 1})
        pos = {k: t for t, k in enumerate(self.basis)}
        return dense({pos[k]: c for k, c in r.items()}, self.dim)


def tensor_balanced(M: RightModule, N: RightModule, generators: Sequence | None = None) -> TensorProduct:
    """Balanced tensor product of a right ``C``-module ``M`` and a left ``C``-module ``N``.

    ``N`` is given as a right module over ``C^op``.  Relations are imposed for
    each element of ``generators`` (vectors of ``C``); by default the full
    basis of ``C``.  Any algebra generating set yields the same quotient.
    """
    C = M.algebra
    if N.algebra.dim != C.dim:
        raise ModuleError("modules are over different algebras")
    F = C.field
    m, n = M.dim, N.dim
    if generators is None:
        generators = [C.basis_vector(b) for b in range(C.dim)]
    ech = Echelon(F, m * n)
    for g in generators:
        if not any(g):
            continue
        AM = M.element_action(g)
        AN = N.element_action(g)
        for i in range(m):
            mc = AM[i]
            for j in range(n):
                rel: dict = {}
                for k, c in enumerate(mc):
                    if c:
                        rel[k * n + j] = c
                for l, c in enumerate(AN[j]):
                    if c:
                        idx = i * n + l
                        v = F.norm(rel.get(idx, 0) - c)
                        if v:
                            rel[idx] = v
                        else:
                            rel.pop(idx, None)
                if rel:
                    ech.add(rel)
    basis = tuple(k for k in range(m * n) if k not in ech.rows)
    return TensorProduct(m, n, ech, basis)


def _generators_in(C: Algebra) -> list:
    return [dense(g, C.dim) for g in C.generators]


def corner_modules(A: Algebra, e: Idempotent):
    """``(C, Ae as right C-module, eA as left C-module, embedding of C's basis in A)``."""
    C, inc = corner(A, e)
    us = list(inc.images)
    Ae = Subspace.span(A.field, A.dim, (A.mul(A.basis_vector(b), e.vector) for b in range(A.dim)))
    eA = Subspace.span(A.field, A.dim, (A.mul(e.vector, A.basis_vector(b)) for b in range(A.dim)))
    M = module_from_space(A, Ae, C, us, "right")
    N = module_from_space(A, eA, opposite(C), us, "left")
    return C, M, N, Ae, eA


def _image_rank(A: Algebra, T: TensorProduct, left: Subspace, right: Subspace) -> int:
    n = T.right_dim
    ech = Echelon(A.field, A.dim)
    for k in T.basis:
        i, j = divmod(k, n)
        ech.add(A.mul_sparse(sparse(left.basis[i]), sparse(right.basis[j])))
    return len(ech)


def mu_map_check(A: Algebra, e: Idempotent):
    """Is multiplication ``Ae ⊗_{eAe} eA -> AeA`` bijective?  Returns ``(iso, dims)``."""
    if e.is_zero:
        return True, {"tensor": 0, "image": 0, "ideal": 0}
    C, M, N, Ae, eA = corner_modules(A, e)
    T = tensor_balanced(M, N, _generators_in(C))
    I = ideal_generated(A, [e.vector])
    r = _image_rank(A, T, Ae, eA)
    dims = {"tensor": T.dim, "image": r, "ideal": I.dim}
    return T.dim == r == I.dim, dims


def nu_map_check(A: Algebra, e: Idempotent, f: Idempotent):
    """Is multiplication ``AeA ⊗_A AfA -> AeAfA`` bijective?  Returns ``(iso, dims)``."""
    I = ideal_generated(A, [e.vector]) if not e.is_zero else None
    K = ideal_generated(A, [f.vector]) if not f.is_zero else None
    if I is None or K is None:
        return True, {"tensor": 0, "image": 0, "product": 0}
    basis = [A.basis_vector(b) for b in range(A.dim)]
    M = module_from_space(A, I.space, A, basis, "right")
    N = module_from_space(A, K.space, opposite(A), basis, "left")
    T = tensor_balanced(M, N, _generators_in(A))
    P = product_space(A, I.space, K.space)
    r = _image_rank(A, T, I.space, K.space)
    dims = {"tensor": T.dim, "image": r, "product": P.dim}
    return T.dim == r == P.dim, dims


def corner_projectivity(A: Algebra, e: Idempotent) -> bool:
    """Whether ``Ae`` is a projective right ``eAe``-module."""
    C, M, _, _, _ = corner_modules(A, e)
    return is_projective(M)
