"""Exact scalar fields and dense/sparse linear algebra kernels.

Scalars are plain Python objects: ``int``/``Fraction`` over the rationals and
``int`` in ``[0, p)`` over a prime field.  Every rank and membership decision
made anywhere in the package goes through the routines in this module.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import QHAlgError


class FieldError(QHAlgError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """Common interface of the two supported scalar fields."""

    characteristic: int
    zero = 0
    one = 1

    def norm(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def parse(self, s):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def descriptor(self) -> dict:
        return {"characteristic": self.characteristic}

    def __eq__(self, other):
        return isinstance(other, Field) and self.characteristic == other.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))


class Rationals(Field):
    characteristic = 0

    def norm(self, x):
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        return x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.norm(Fraction(1) / x)

    def parse(self, s):
        if isinstance(s, bool) or isinstance(s, float):
            raise FieldError(f"refusing non-exact scalar {s!r}")
        if isinstance(s, int):
            return s
        if not isinstance(s, str):
            raise FieldError(f"cannot parse scalar {s!r}")
        try:
            return self.norm(Fraction(s.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"cannot parse rational {s!r}") from exc

    def format(self, x) -> str:
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def __repr__(self):
        return "QQ"


class PrimeField(Field):
    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.characteristic = p
        self.p = p

    def norm(self, x):
        return x % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def parse(self, s):
        if isinstance(s, bool) or isinstance(s, float):
            raise FieldError(f"refusing non-exact scalar {s!r}")
        if isinstance(s, int):
            return s % self.p
        if not isinstance(s, str):
            raise FieldError(f"cannot parse scalar {s!r}")
        s = s.strip()
        try:
            if "/" in s:
                a, b = s.split("/")
                return int(a) * self.inv(int(b)) % self.p
            return int(s) % self.p
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"cannot parse element of GF({self.p}): {s!r}") from exc

    def format(self, x) -> str:
        return str(x % self.p)

    def __repr__(self):
        return f"GF({self.p})"


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_descriptor(desc) -> Field:
    """Accept ``{"characteristic": p}``, ``0``/``p``, or strings like ``"QQ"``, ``"GF(5)"``."""
    if isinstance(desc, dict):
        desc = desc.get("characteristic")
    if isinstance(desc, str):
        s = desc.strip().upper()
        if s in ("QQ", "Q", "0"):
            return QQ
        if s.startswith("GF(") and s.endswith(")"):
            s = s[3:-1]
        try:
            desc = int(s)
        except ValueError:
            raise FieldError(f"unknown field {desc!r}") from None
    if isinstance(desc, bool) or not isinstance(desc, int):
        raise FieldError(f"unknown field {desc!r}")
    return QQ if desc == 0 else GF(desc)


# ---------------------------------------------------------------------------
# vectors


def sparse(v: Sequence) -> dict:
    return {i: c for i, c in enumerate(v) if c}


def dense(d: dict, n: int) -> tuple:
    out = [0] * n
    for i, c in d.items():
        out[i] = c
    return tuple(out)


class Echelon:
    """Incremental row-echelon basis over sparse dict vectors.

    Each stored row has its pivot at its smallest index with coefficient one.
    Rows are not back-reduced until :meth:`subspace` is called.
    """

    def __init__(self, field: Field, n: int):
        self.field = field
        self.n = n
        self.rows: dict[int, dict] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: dict) -> dict:
        rows = self.rows
        norm = self.field.norm
        v = dict(v)
        heap = [k for k in v if k in rows]
        heapq.heapify(heap)
        while heap:
            p = heapq.heappop(heap)
            c = v.get(p)
            if c is None:
                continue
            for k, rk in rows[p].items():
                nv = norm(v.get(k, 0) - c * rk)
                if nv == 0:
                    v.pop(k, None)
                else:
                    if k not in v and k in rows:
                        heapq.heappush(heap, k)
                    v[k] = nv
        return v

    def add(self, v: dict) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        if r[p] != 1:
            inv = self.field.inv(r[p])
            norm = self.field.norm
            r = {k: norm(c * inv) for k, c in r.items()}
        self.rows[p] = r
        return True

    def add_dense(self, v: Sequence) -> bool:
        return self.add(sparse(v))

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def subspace(self) -> "Subspace":
        norm = self.field.norm
        pivots = sorted(self.rows)
        done: dict[int, dict] = {}
        for p in reversed(pivots):
            row = dict(self.rows[p])
            for q in sorted(k for k in row if k in done and k != p):
                c = row.get(q)
                if not c:
                    continue
                for k, rk in done[q].items():
                    nv = norm(row.get(k, 0) - c * rk)
                    if nv == 0:
                        row.pop(k, None)
                    else:
                        row[k] = nv
            done[p] = row
        basis = tuple(dense(done[p], self.n) for p in pivots)
        return Subspace(self.field, self.n, basis, tuple(pivots))


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``field^ambient_dim`` stored by its unique RREF basis."""

    field: Field
    ambient_dim: int
    basis: tuple
    pivots: tuple

    @classmethod
    def span(cls, field: Field, n: int, vectors: Iterable[Sequence]) -> "Subspace":
        ech = Echelon(field, n)
        for v in vectors:
            if len(v) != n:
                raise FieldError(f"vector of length {len(v)} in ambient dimension {n}")
            ech.add_dense(v)
        return ech.subspace()

    @classmethod
    def zero(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, (), ())

    @classmethod
    def full(cls, field: Field, n: int) -> "Subspace":
        basis = tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n))
        return cls(field, n, basis, tuple(range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def echelon(self) -> Echelon:
        ech = Echelon(self.field, self.ambient_dim)
        for p, row in zip(self.pivots, self.basis):
            ech.rows[p] = sparse(row)
        return ech

    def reduce(self, v: Sequence) -> tuple:
        """Remainder of ``v`` modulo the subspace (zero at every pivot)."""
        norm = self.field.norm
        out = list(v)
        for p, row in zip(self.pivots, self.basis):
            c = out[p]
            if c:
                for k, rk in enumerate(row):
                    if rk:
                        out[k] = norm(out[k] - c * rk)
        return tuple(out)

    def contains_vector(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def contains(self, other: "Subspace") -> bool:
        self._check(other)
        return all(self.contains_vector(v) for v in other.basis)

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of a member ``v`` in the stored basis."""
        return tuple(v[p] for p in self.pivots)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.field, self.ambient_dim, self.basis + other.basis)

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        n = self.ambient_dim
        ech = Echelon(self.field, 2 * n)
        for u in self.basis:
            ech.add_dense(tuple(u) + tuple(u))
        for v in other.basis:
            ech.add_dense(tuple(v) + (0,) * n)
        out = Echelon(self.field, n)
        for p, row in ech.rows.items():
            if p >= n:
                out.add({k - n: c for k, c in row.items()})
        return out.subspace()

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise FieldError(
                f"ambient dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}"
            )


def subspace_ops(U: Subspace, V: Subspace):
    """Return ``(U + V, U ∩ V, U ⊇ V)``."""
    return U.sum(V), U.intersection(V), U.contains(V)


def span_saturate(
    field: Field,
    n: int,
    seed: Iterable[Sequence],
    step: Callable[[tuple], Iterable[Sequence]],
) -> Subspace:
    """Smallest subspace containing ``seed`` and closed under the linear map(s) ``step``."""
    ech = Echelon(field, n)
    queue = []
    for v in seed:
        if ech.add_dense(v):
            queue.append(tuple(v))
    while queue:
        v = queue.pop()
        for w in step(v):
            if ech.add_dense(w):
                queue.append(tuple(w))
    return ech.subspace()


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    field: Field
    rows: int
    cols: int
    entries: tuple

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None):
        entries = tuple(tuple(field.norm(field.parse(x) if isinstance(x, str) else x) for x in r) for r in rows)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if any(len(r) != cols for r in entries):
            raise FieldError("ragged matrix")
        return cls(field, len(entries), cols, entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def rref(field: Field, rows: Sequence[Sequence], cols: int):
    """Reduced row-echelon form; returns ``(rref_rows, pivots)``.

    Pivot choice is the first nonzero entry in column order.
    """
    norm = field.norm
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.inv(m[r][c])
        m[r] = [norm(x * inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [norm(a - f * b) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(x) for x in m], tuple(pivots)


def rref_kernel(M: Matrix):
    """Return ``(rref, rank, kernel)`` with the kernel as a canonical Subspace."""
    F = M.field
    R, pivots = rref(F, M.entries, M.cols)
    rank = len(pivots)
    free = [j for j in range(M.cols) if j not in set(pivots)]
    kernel = []
    for f in free:
        x = [0] * M.cols
        x[f] = 1
        for i, p in enumerate(pivots):
            x[p] = F.norm(-R[i][f])
        kernel.append(x)
    return (
        Matrix(F, M.rows, M.cols, tuple(R)),
        rank,
        Subspace.span(F, M.cols, kernel),
    )


def rank(field: Field, rows: Iterable[Sequence], cols: int) -> int:
    ech = Echelon(field, cols)
    for r in rows:
        ech.add_dense(r)
    return len(ech)


def solve(field: Field, rows: Sequence[Sequence], rhs: Sequence, cols: int):
    """One solution ``x`` of ``rows · x = rhs`` or ``None`` when inconsistent."""
    aug = [tuple(r) + (b,) for r, b in zip(rows, rhs)]
    R, pivots = rref(field, aug, cols + 1)
    if cols in pivots:
        return None
    x = [0] * cols
    for i, p in enumerate(pivots):
        x[p] = R[i][cols]
    return tuple(x)
