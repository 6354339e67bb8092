"""Compilation of bound quiver presentations into structure-constant algebras.

Paths compose left to right: for arrows ``a: i -> j`` and ``b: j -> k`` the
product ``a*b`` is the path ``i -> j -> k``.  Trivial paths are the
primitive idempotents, so ``e_i A`` is spanned by the paths starting at ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Algebra, checked, product_space
from .errors import QHAlgError
from .exactmath import Echelon, Field, QQ, Subspace, dense


class QuiverError(QHAlgError):
    pass


@dataclass(frozen=True)
class QuiverPresentation:
    vertices: tuple
    arrows: tuple  # (label, source, target)
    relations: tuple = ()  # each relation: tuple of (coefficient, path as tuple of arrow labels)
    truncation: int = 2
    field: Field = field(default=QQ, compare=False)

    @classmethod
    def create(cls, vertices, arrows, relations=(), truncation=2, field=QQ):
        return cls(
            tuple(str(v) for v in vertices),
            tuple((str(a), str(s), str(t)) for a, s, t in arrows),
            tuple(tuple((c, tuple(p)) for c, p in rel) for rel in relations),
            int(truncation),
            field,
        )


def _path_label(Q: QuiverPresentation, vertex: str, path: tuple) -> str:
    if not path:
        return f"e_{vertex}"
    return "*".join(path)


def compile_bound_quiver(Q: QuiverPresentation, field: Field | None = None) -> Algebra:
    """Return the bound quiver algebra ``kQ / <relations>``.

    All paths of length at most ``truncation`` are enumerated; the relation
    ideal is saturated in that truncated path space and must contain every
    path of length exactly ``truncation`` (otherwise the bound is too small).
    The result has the surviving paths of length below the bound as basis.
    """
    F = field if field is not None else Q.field
    L = Q.truncation
    if L < 1:
        raise QuiverError("truncation bound must be at least 1")
    vidx = {v: i for i, v in enumerate(Q.vertices)}
    if len(vidx) != len(Q.vertices):
        raise QuiverError("duplicate vertex labels")
    arrows = {}
    for label, s, t in Q.arrows:
        if not label:
            raise QuiverError("empty arrow label")
        if label in arrows:
            raise QuiverError(f"duplicate arrow label {label!r}")
        if s not in vidx or t not in vidx:
            raise QuiverError(f"arrow {label!r} has an unknown endpoint")
        arrows[label] = (s, t)

    def endpoints(path):
        for a, b in zip(path, path[1:]):
            if arrows[a][1] != arrows[b][0]:
                raise QuiverError(f"{'*'.join(path)} is not a path")
        return arrows[path[0]][0], arrows[path[-1]][1]

    relations = []
    for rel in Q.relations:
        if not rel:
            raise QuiverError("empty relation")
        ends = set()
        for coeff, path in rel:
            for a in path:
                if a not in arrows:
                    raise QuiverError(f"relation uses unknown arrow {a!r}")
            if len(path) < 2:
                raise QuiverError(
                    f"inadmissible relation term {'*'.join(path) or 'trivial path'}: length < 2"
                )
            ends.add(endpoints(path))
        if len(ends) != 1:
            raise QuiverError("relation terms are not parallel paths")
        if any(len(path) > L for _, path in rel):
            raise QuiverError("relation longer than the truncation bound")
        relations.append(rel)

    # enumerate paths of length <= L
    by_length = [[(v, ()) for v in Q.vertices]]
    for _ in range(L):
        nxt = []
        for v, path in by_length[-1]:
            end = arrows[path[-1]][1] if path else v
            for label, s, _t in Q.arrows:
                if s == end:
                    nxt.append((v, path + (label,)))
        nxt.sort(key=lambda vp: vp[1])
        by_length.append(nxt)
    paths = [vp for level in by_length for vp in level]
    index = {(path if path else ("", v)): i for i, (v, path) in enumerate(paths)}

    def key(v, path):
        return path if path else ("", v)

    def target(v, path):
        return arrows[path[-1]][1] if path else v

    n = len(paths)
    labels = [_path_label(Q, v, p) for v, p in paths]
    by_source: dict = {}
    for label, s, _t in Q.arrows:
        by_source.setdefault(s, []).append(label)

    def source(v, path):
        return arrows[path[0]][0] if path else v

    # saturate the relation ideal under left and right multiplication by arrows
    ech = Echelon(F, n)
    queue = []
    for rel in relations:
        vec: dict = {}
        for coeff, path in rel:
            c = F.norm(F.parse(coeff) if isinstance(coeff, str) else coeff)
            i = index[tuple(path)]
            vec[i] = F.norm(vec.get(i, 0) + c)
        vec = {k: c for k, c in vec.items() if c}
        if vec and ech.add(vec):
            queue.append(vec)

    def times_arrow(vec, label, right):
        out: dict = {}
        s, t = arrows[label]
        for i, c in vec.items():
            v, path = paths[i]
            if len(path) >= L:
                continue
            if right and target(v, path) == s:
                out[index[path + (label,)]] = c
            elif not right and source(v, path) == t:
                out[index[(label,) + path]] = c
        return out

    while queue:
        vec = queue.pop()
        for label in arrows:
            for right in (True, False):
                w = times_arrow(vec, label, right)
                if w and ech.add(w):
                    queue.append(w)
    top = [index[p] for _, p in by_length[L]]
    for i in top:
        if not ech.contains({i: 1}):
            raise QuiverError(
                f"truncation bound {L} too small: path {labels[i]} is not in the relation ideal"
            )
    for i in top:
        ech.add({i: 1})
    ideal = ech.subspace()

    # the quotient on the surviving (non-pivot) paths
    rows = list(zip(ideal.pivots, ideal.basis))
    pivots = set(ideal.pivots)
    keep = [j for j in range(n) if j not in pivots]
    pos = {j: i for i, j in enumerate(keep)}
    norm = F.norm

    def project(v: dict) -> dict:
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

    table = []
    for a in keep:
        v1, p1 = paths[a]
        t1 = target(v1, p1)
        row = []
        for b in keep:
            v2, p2 = paths[b]
            cell = ()
            if t1 == v2 and len(p1) + len(p2) <= L:
                prod = index[key(v2, p2)] if not p1 else index[key(v1, p1 + p2)]
                cell = tuple(sorted(project({prod: 1}).items()))
            row.append(cell)
        table.append(row)
    d = len(keep)
    idems = [dense({pos[index[("", v)]]: 1}, d) for v in Q.vertices]
    unit = dense({pos[index[("", v)]]: 1 for v in Q.vertices}, d)
    rad = Subspace.span(F, d, [dense({pos[j]: 1}, d) for j in keep if paths[j][1]])
    A = Algebra(F, table, unit, idems, [labels[j] for j in keep], Q.vertices, rad)
    J = A.radical
    power = J
    for _ in range(L - 1):
        power = product_space(A, power, J)
    if power.dim:
        raise QuiverError(f"J^{L} != 0 in the compiled algebra")
    return checked(A, radical_hint=J)
