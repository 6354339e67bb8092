"""Finite-dimensional unital associative algebras given by structure constants.

An :class:`Algebra` carries its basis multiplication table, the unit, and a
distinguished ordered complete set of primitive orthogonal idempotents
("classes").  Quotients and corners are built on canonical bases so that
isomorphism claims downstream reduce to comparing tables.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import QHAlgError, UnsupportedInput
from .exactmath import Echelon, Field, Subspace, dense, rank, sparse


class InvalidAlgebra(QHAlgError):
    def __init__(self, report):
        self.report = report
        super().__init__("invalid algebra: " + "; ".join(report.failures))


class NotSplitBasic(QHAlgError):
    pass


class NotAnIdeal(QHAlgError):
    pass


def _sparse_cell(vec, field: Field) -> tuple:
    return tuple((k, field.norm(c)) for k, c in enumerate(vec) if field.norm(c))


class Algebra:
    """Algebra on basis ``b_0..b_{d-1}`` with ``b_a b_b = sum_k table[a][b][k] b_k``.

    ``table[a][b]`` is stored sparsely as a tuple of ``(k, coefficient)``.
    Vectors passed in and out of the public methods are dense tuples.
    """

    def __init__(
        self,
        field: Field,
        table,
        unit: Sequence,
        idempotents: Sequence[Sequence],
        labels: Sequence[str] | None = None,
        class_names: Sequence[str] | None = None,
        radical: Subspace | None = None,
    ):
        self.field = field
        self.table = tuple(tuple(tuple(cell) for cell in row) for row in table)
        self.dim = len(self.table)
        self.unit = tuple(unit)
        self.idempotents = tuple(tuple(e) for e in idempotents)
        self.labels = tuple(labels) if labels is not None else tuple(f"b{i}" for i in range(self.dim))
        self.class_names = (
            tuple(class_names)
            if class_names is not None
            else tuple(f"e{i + 1}" for i in range(len(self.idempotents)))
        )
        self.radical = radical
        if len(self.labels) != self.dim:
            raise QHAlgError("label count does not match dimension")
        if len(self.class_names) != len(self.idempotents):
            raise QHAlgError("class name count does not match idempotent count")
        if len(self.unit) != self.dim or any(len(e) != self.dim for e in self.idempotents):
            raise QHAlgError("vector length does not match dimension")

    @classmethod
    def from_dense(cls, field: Field, constants, unit, idempotents, **kw) -> "Algebra":
        table = [[_sparse_cell(cell, field) for cell in row] for row in constants]
        return cls(field, table, unit, idempotents, **kw)

    def __repr__(self):
        return f"Algebra(dim={self.dim}, classes={len(self.idempotents)}, field={self.field!r})"

    @property
    def n(self) -> int:
        return len(self.idempotents)

    def basis_vector(self, i: int) -> tuple:
        return tuple(1 if j == i else 0 for j in range(self.dim))

    def zero_vector(self) -> tuple:
        return (0,) * self.dim

    def constants(self, a: int, b: int) -> tuple:
        return dense(dict(self.table[a][b]), self.dim)

    def mul_sparse(self, x: dict, y: dict) -> dict:
        table = self.table
        out: dict = {}
        for a, xa in x.items():
            row = table[a]
            for b, yb in y.items():
                cell = row[b]
                if cell:
                    s = xa * yb
                    for k, c in cell:
                        out[k] = out.get(k, 0) + s * c
        norm = self.field.norm
        res = {}
        for k, v in out.items():
            v = norm(v)
            if v:
                res[k] = v
        return res

    def mul(self, x: Sequence, y: Sequence) -> tuple:
        return dense(self.mul_sparse(sparse(x), sparse(y)), self.dim)

    def add(self, x: Sequence, y: Sequence) -> tuple:
        norm = self.field.norm
        return tuple(norm(a + b) for a, b in zip(x, y))

    def sub_sum(self, support: Iterable[int]) -> "Idempotent":
        support = tuple(sorted(set(support)))
        if any(i < 0 or i >= self.n for i in support):
            raise QHAlgError(f"support {support} out of range for {self.n} classes")
        norm = self.field.norm
        v = [0] * self.dim
        for i in support:
            for k, c in enumerate(self.idempotents[i]):
                v[k] += c
        return Idempotent(self, tuple(norm(c) for c in v), support)

    def one(self) -> "Idempotent":
        return self.sub_sum(range(self.n))

    @cached_property
    def basic(self) -> bool:
        """True when ``A/J`` is the product of ``n`` copies of the field."""
        return self.radical is not None and self.dim - self.radical.dim == self.n

    @cached_property
    def generators(self) -> tuple:
        """Sparse algebra generators: idempotents plus lifts of ``J/J^2`` (basic case)."""
        if not self.basic:
            return tuple({i: 1} for i in range(self.dim))
        J = [sparse(v) for v in self.radical.basis]
        sq = Echelon(self.field, self.dim)
        for x in J:
            for y in J:
                sq.add(self.mul_sparse(x, y))
        gens = [sparse(e) for e in self.idempotents]
        for x in J:
            if sq.add(x):
                gens.append(x)
        return tuple(gens)

    @cached_property
    def projective_dims(self) -> tuple:
        """``dim(e_i A)`` for each class."""
        return tuple(
            rank(self.field, (self.mul(e, self.basis_vector(b)) for b in range(self.dim)), self.dim)
            for e in self.idempotents
        )

    def payload(self) -> dict:
        """Canonical JSON-ready description.

        The radical is included as ``radical_hint``; loaders re-validate it, so
        files stay loadable when the trace criterion is unavailable.
        """
        fmt = self.field.format
        out = {
            "type": "algebra",
            "field": self.field.descriptor(),
            "dim": self.dim,
            "labels": list(self.labels),
            "structure_constants": [
                [[fmt(c) for c in self.constants(a, b)] for b in range(self.dim)]
                for a in range(self.dim)
            ],
            "unit": [fmt(c) for c in self.unit],
            "idempotents": [[fmt(c) for c in e] for e in self.idempotents],
            "class_names": list(self.class_names),
        }
        if self.radical is not None:
            out["radical_hint"] = [[fmt(c) for c in v] for v in self.radical.basis]
        return out

    @cached_property
    def structure_hash(self) -> str:
        fmt = self.field.format
        body = {
            "field": self.field.characteristic,
            "labels": list(self.labels),
            "class_names": list(self.class_names),
            "table": [
                [a, b, k, fmt(c)]
                for a in range(self.dim)
                for b in range(self.dim)
                for k, c in self.table[a][b]
            ],
            "dim": self.dim,
            "unit": [fmt(c) for c in self.unit],
            "idempotents": [[fmt(c) for c in e] for e in self.idempotents],
        }
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(text.encode()).hexdigest()

    def same_structure(self, other: "Algebra") -> bool:
        """Equal tables, unit and idempotents (labels ignored)."""
        return (
            self.field == other.field
            and self.dim == other.dim
            and self.table == other.table
            and self.unit == other.unit
            and self.idempotents == other.idempotents
        )

    def with_radical(self, radical: Subspace) -> "Algebra":
        return Algebra(
            self.field, self.table, self.unit, self.idempotents,
            self.labels, self.class_names, radical,
        )

    def relabel_classes(self, order: Sequence[int]) -> "Algebra":
        """Same algebra with the idempotents listed in ``order`` (new i = old order[i])."""
        return Algebra(
            self.field, self.table, self.unit,
            [self.idempotents[i] for i in order],
            self.labels,
            [self.class_names[i] for i in order],
            self.radical,
        )

    def require_radical(self) -> Subspace:
        if self.radical is None:
            raise QHAlgError("algebra has not been validated (radical unknown)")
        return self.radical

    def require_split_basic(self):
        self.require_radical()
        if not self.basic:
            raise NotSplitBasic(
                f"algebra is not split basic: dim A/J = {self.dim - self.radical.dim}, "
                f"classes = {self.n}"
            )


@dataclass(frozen=True)
class Idempotent:
    algebra: Algebra = field(repr=False, compare=False)
    vector: tuple
    support: tuple | None = None

    @property
    def is_zero(self) -> bool:
        return not any(self.vector)


@dataclass(frozen=True)
class TwoSidedIdeal:
    algebra: Algebra = field(repr=False, compare=False)
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> tuple:
        return self.space.basis


@dataclass(frozen=True)
class AlgebraMap:
    """Linear map given by the images of the source basis vectors."""

    source: Algebra = field(repr=False)
    target: Algebra = field(repr=False)
    images: tuple
    class_map: tuple = ()  # target / source class index correspondence, see producers

    def __call__(self, v: Sequence) -> tuple:
        norm = self.target.field.norm
        out = [0] * self.target.dim
        for i, c in enumerate(v):
            if c:
                for k, x in enumerate(self.images[i]):
                    if x:
                        out[k] += c * x
        return tuple(norm(x) for x in out)


@dataclass
class ValidationReport:
    ok: bool
    checks: dict
    failures: list
    radical: Subspace | None = None
    radical_method: str = ""
    basic: bool = False

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": dict(self.checks),
            "failures": list(self.failures),
            "radical_dim": None if self.radical is None else self.radical.dim,
            "radical_method": self.radical_method,
            "basic": self.basic,
        }


# ---------------------------------------------------------------------------
# subspace helpers


def _span_sparse(field: Field, n: int, vectors: Iterable[dict]) -> Subspace:
    ech = Echelon(field, n)
    for v in vectors:
        ech.add(v)
    return ech.subspace()


def product_space(A: Algebra, U: Subspace, V: Subspace) -> Subspace:
    """``span{uv : u in U, v in V}``."""
    us = [sparse(u) for u in U.basis]
    vs = [sparse(v) for v in V.basis]
    ech = Echelon(A.field, A.dim)
    for u in us:
        for v in vs:
            ech.add(A.mul_sparse(u, v))
    return ech.subspace()


def _closed_under(A: Algebra, space: Subspace) -> tuple | None:
    """First ``(side, basis index, generator)`` escaping the subspace, if any."""
    for i, v in enumerate(space.basis):
        vs = sparse(v)
        for g in A.generators:
            for side, w in (("left", A.mul_sparse(g, vs)), ("right", A.mul_sparse(vs, g))):
                if w and not space.contains_vector(dense(w, A.dim)):
                    return side, i, g
    return None


def is_nilpotent(A: Algebra, space: Subspace) -> bool:
    power = space
    for _ in range(A.dim + 1):
        if power.dim == 0:
            return True
        nxt = product_space(A, power, space)
        if nxt.dim == power.dim:
            return False
        power = nxt
    return power.dim == 0


def trace_radical(A: Algebra) -> Subspace:
    """Radical as the kernel of the trace form ``(x, y) -> tr(L_{xy})``."""
    p = A.field.characteristic
    if p != 0 and p <= A.dim:
        raise UnsupportedInput(
            f"trace-form radical needs characteristic 0 or > dim; got p={p}, dim={A.dim}"
        )
    norm = A.field.norm
    d = A.dim
    t = [0] * d
    for z in range(d):
        for c in range(d):
            for k, coeff in A.table[z][c]:
                if k == c:
                    t[z] += coeff
    t = [norm(x) for x in t]
    gram = []
    for x in range(d):
        row = []
        for y in range(d):
            row.append(norm(sum(c * t[k] for k, c in A.table[x][y])))
        gram.append(row)
    from .exactmath import Matrix, rref_kernel

    _, _, kernel = rref_kernel(Matrix(A.field, d, d, tuple(tuple(r) for r in gram)))
    return kernel


def _radical_candidate_ok(A: Algebra, space: Subspace) -> bool:
    """Characteristic-free check: nilpotent ideal with ``A/I`` spanned by the idempotents."""
    if A.dim - space.dim != A.n:
        return False
    if _closed_under(A, space) is not None:
        return False
    return is_nilpotent(A, space)


def validate_algebra(A: Algebra, radical_hint: Subspace | None = None) -> ValidationReport:
    """Check the algebra axioms and determine the radical.

    A hint (or an already attached radical) is accepted when it is a nilpotent
    ideal whose quotient is spanned by the images of the idempotents; otherwise
    the trace-form criterion is used.
    """
    F, d = A.field, A.dim
    norm = F.norm
    failures: list = []
    checks: dict = {}

    ok = True
    for a in range(d):
        for b in range(d):
            ab = A.table[a][b]
            for c in range(d):
                left: dict = {}
                for k, x in ab:
                    for m, y in A.table[k][c]:
                        left[m] = left.get(m, 0) + x * y
                right: dict = {}
                for k, x in A.table[b][c]:
                    for m, y in A.table[a][k]:
                        right[m] = right.get(m, 0) + x * y
                diff = {m: norm(left.get(m, 0) - right.get(m, 0)) for m in set(left) | set(right)}
                if any(diff.values()):
                    ok = False
                    failures.append(
                        f"associativity fails at ({A.labels[a]}, {A.labels[b]}, {A.labels[c]})"
                    )
                    break
            if not ok:
                break
        if not ok:
            break
    checks["associativity"] = ok

    ok = True
    for a in range(d):
        ba = A.basis_vector(a)
        if A.mul(A.unit, ba) != ba or A.mul(ba, A.unit) != ba:
            ok = False
            failures.append(f"unit law fails at {A.labels[a]}")
            break
    checks["unit"] = ok

    ok = True
    total = [0] * d
    for i, e in enumerate(A.idempotents):
        if not any(e):
            ok = False
            failures.append(f"idempotent {A.class_names[i]} is zero")
        for k, c in enumerate(e):
            total[k] += c
        for j, f in enumerate(A.idempotents):
            prod = A.mul(e, f)
            want = e if i == j else A.zero_vector()
            if prod != want:
                ok = False
                failures.append(
                    f"idempotent relation fails for ({A.class_names[i]}, {A.class_names[j]})"
                )
    if tuple(norm(c) for c in total) != A.unit:
        ok = False
        failures.append("idempotents do not sum to the unit")
    checks["idempotents"] = ok

    structural = all(checks.values())
    radical = None
    method = ""
    if structural:
        candidates = [h for h in (radical_hint, A.radical) if h is not None]
        probe = A.with_radical(Subspace.zero(F, d))
        for h in candidates:
            if _radical_candidate_ok(probe, h):
                radical, method = h, "hint"
                break
        if radical is None:
            try:
                radical = trace_radical(A)
                method = "trace"
            except UnsupportedInput as exc:
                failures.append(f"radical: {exc}")
        if radical is not None and method == "trace":
            side = _closed_under(probe, radical)
            if side is not None or not is_nilpotent(A, radical):
                failures.append("radical: trace kernel is not a nilpotent ideal")
                radical = None
    checks["radical"] = radical is not None

    basic = False
    if radical is not None:
        R = A.with_radical(radical)
        ok = True
        for i, e in enumerate(A.idempotents):
            ee = Idempotent(R, e)
            dj = _peirce_space(R, ee, ee, radical).dim
            if peirce(R, ee, ee).dim - dj != 1:
                ok = False
                failures.append(f"class {A.class_names[i]} is not split primitive")
        checks["split_primitive"] = ok
        basic = d - radical.dim == A.n
    else:
        checks["split_primitive"] = False

    return ValidationReport(
        ok=all(checks.values()),
        checks=checks,
        failures=failures,
        radical=radical,
        radical_method=method,
        basic=basic,
    )


def make_algebra(
    field: Field,
    constants,
    unit,
    idempotents,
    labels=None,
    class_names=None,
    radical_hint: Subspace | None = None,
) -> Algebra:
    """Build an algebra from dense structure constants, validate it, attach its radical."""
    A = Algebra.from_dense(field, constants, unit, idempotents, labels=labels, class_names=class_names)
    return checked(A, radical_hint)


def checked(A: Algebra, radical_hint: Subspace | None = None) -> Algebra:
    report = validate_algebra(A, radical_hint)
    if not report.ok:
        raise InvalidAlgebra(report)
    return A.with_radical(report.radical)


def opposite(A: Algebra) -> Algebra:
    d = A.dim
    table = [[A.table[b][a] for b in range(d)] for a in range(d)]
    return Algebra(A.field, table, A.unit, A.idempotents, A.labels, A.class_names, A.radical)


def radical(A: Algebra) -> TwoSidedIdeal:
    if A.radical is not None:
        return TwoSidedIdeal(A, A.radical)
    report = validate_algebra(A)
    if report.radical is None:
        raise InvalidAlgebra(report)
    return TwoSidedIdeal(A, report.radical)


def ideal_generated(A: Algebra, gens: Iterable[Sequence]) -> TwoSidedIdeal:
    ech = Echelon(A.field, A.dim)
    queue = []
    for v in gens:
        s = sparse(v)
        if ech.add(s):
            queue.append(s)
    G = A.generators
    while queue:
        v = queue.pop()
        for g in G:
            for w in (A.mul_sparse(g, v), A.mul_sparse(v, g)):
                if w and ech.add(w):
                    queue.append(w)
    return TwoSidedIdeal(A, ech.subspace())


def idempotent_ideal(A: Algebra, support: Iterable[int]) -> TwoSidedIdeal:
    """``A e A`` for the sub-sum idempotent on ``support``."""
    e = A.sub_sum(support)
    if e.is_zero:
        return TwoSidedIdeal(A, Subspace.zero(A.field, A.dim))
    return ideal_generated(A, [e.vector])


def as_ideal(A: Algebra, space: Subspace) -> TwoSidedIdeal:
    bad = _closed_under(A, space)
    if bad is not None:
        side, i, _ = bad
        raise NotAnIdeal(f"subspace not closed under {side} multiplication (basis vector {i})")
    return TwoSidedIdeal(A, space)


def is_idempotent_ideal(I: TwoSidedIdeal) -> bool:
    A = I.algebra
    if I.dim == 0:
        return True
    basis = [sparse(v) for v in I.basis]
    ech = Echelon(A.field, A.dim)
    for x in basis:
        for y in basis:
            ech.add(A.mul_sparse(x, y))
            if len(ech) == I.dim:
                return True
    return len(ech) == I.dim


def quotient(A: Algebra, I: TwoSidedIdeal):
    """``A/I`` on the complement of the pivot columns of ``I``; returns ``(Q, projection)``.

    The projection's ``class_map[q]`` is the class of ``A`` whose image is class ``q``.
    """
    if I.space.ambient_dim != A.dim:
        raise NotAnIdeal("ideal lives in a different algebra")
    as_ideal(A, I.space)
    space = I.space
    F, norm = A.field, A.field.norm
    pivots = set(space.pivots)
    keep = [j for j in range(A.dim) if j not in pivots]
    pos = {j: i for i, j in enumerate(keep)}
    rows = list(zip(space.pivots, space.basis))

    def project_sparse(v: dict) -> dict:
        v = dict(v)
        for p, row in rows:
            c = v.get(p)
            if c:
                for k, rk in enumerate(row):
                    if rk:
                        nv = norm(v.get(k, 0) - c * rk)
                        if nv:
                            v[k] = nv
                        else:
                            v.pop(k, None)
        return {pos[k]: c for k, c in v.items()}

    def project(v) -> tuple:
        return dense(project_sparse(sparse(v)), len(keep))

    table = [
        [tuple(sorted(project_sparse(dict(A.table[a][b])).items())) for b in keep]
        for a in keep
    ]
    idems, names, origin = [], [], []
    for i, e in enumerate(A.idempotents):
        pe = project(e)
        if any(pe):
            idems.append(pe)
            names.append(A.class_names[i])
            origin.append(i)
    rad = None
    if A.radical is not None:
        rad = Subspace.span(F, len(keep), (project(v) for v in A.radical.basis))
    Q = Algebra(
        F, table, project(A.unit), idems,
        [A.labels[j] for j in keep], names, rad,
    )
    images = tuple(project(A.basis_vector(j)) for j in range(A.dim))
    return Q, AlgebraMap(A, Q, images, tuple(origin))


def _peirce_space(A: Algebra, e: Idempotent, f: Idempotent, within: Subspace | None = None) -> Subspace:
    es, fs = sparse(e.vector), sparse(f.vector)
    vectors = (
        [sparse(v) for v in within.basis] if within is not None
        else [{b: 1} for b in range(A.dim)]
    )
    ech = Echelon(A.field, A.dim)
    for v in vectors:
        w = A.mul_sparse(es, v)
        if w:
            ech.add(A.mul_sparse(w, fs))
    return ech.subspace()


def peirce(A: Algebra, e: Idempotent, f: Idempotent) -> Subspace:
    """The Peirce component ``eAf``."""
    return _peirce_space(A, e, f)


def corner(A: Algebra, e: Idempotent):
    """The corner ``eAe`` with unit ``e``; returns ``(C, inclusion)``.

    The inclusion's ``class_map[c]`` is the class of ``A`` equal to class ``c`` of the corner.
    """
    if e.is_zero:
        raise QHAlgError("corner at the zero idempotent")
    space = peirce(A, e, e)
    F = A.field
    rows = [sparse(v) for v in space.basis]
    pivots = space.pivots

    def coords(v: dict) -> tuple:
        return tuple(v.get(p, 0) for p in pivots)

    table = []
    for u in rows:
        row = []
        for w in rows:
            c = coords(A.mul_sparse(u, w))
            row.append(tuple((k, x) for k, x in enumerate(c) if x))
        table.append(row)
    es = sparse(e.vector)
    idems, names, origin = [], [], []
    for i, f in enumerate(A.idempotents):
        fs = sparse(f)
        if e.support is not None:
            inside = i in e.support
        else:
            inside = A.mul_sparse(es, fs) == fs and A.mul_sparse(fs, es) == fs
        if inside:
            idems.append(coords(fs))
            names.append(A.class_names[i])
            origin.append(i)
    rad = None
    if A.radical is not None:
        eje = _peirce_space(A, e, e, A.radical)
        rad = Subspace.span(F, len(rows), (coords(sparse(v)) for v in eje.basis))
    C = Algebra(
        F, table, coords(es), idems,
        [A.labels[p] for p in pivots], names, rad,
    )
    return C, AlgebraMap(C, A, tuple(space.basis), tuple(origin))


def peirce_dims(A: Algebra) -> tuple:
    es = [A.sub_sum([i]) for i in range(A.n)]
    return tuple(tuple(peirce(A, e, f).dim for f in es) for e in es)
