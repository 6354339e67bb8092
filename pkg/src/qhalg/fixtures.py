"""Small named algebras used by the tests, the CLI and the documentation."""

from __future__ import annotations

from .algebra import Algebra
from .exactmath import QQ, Field
from .quiver import QuiverPresentation, compile_bound_quiver


def semisimple(n: int, field: Field = QQ) -> Algebra:
    """``k^n``."""
    Q = QuiverPresentation.create([str(i + 1) for i in range(n)], [], [], 1, field)
    return compile_bound_quiver(Q)


def truncated_polynomial(n: int, field: Field = QQ) -> Algebra:
    """``k[x]/(x^n)``; quasi-hereditary only for ``n = 1``."""
    if n == 1:
        return semisimple(1, field)
    Q = QuiverPresentation.create(["1"], [("x", "1", "1")], [[(1, ("x",) * n)]], n, field)
    return compile_bound_quiver(Q)


def linear_path(n: int, field: Field = QQ, relations=()) -> Algebra:
    """Path algebra of ``1 -> 2 -> ... -> n`` with arrows ``a1..a{n-1}``."""
    verts = [str(i + 1) for i in range(n)]
    arrows = [(f"a{i + 1}", verts[i], verts[i + 1]) for i in range(n - 1)]
    Q = QuiverPresentation.create(verts, arrows, relations, max(n, 1), field)
    return compile_bound_quiver(Q)


def a3_zero_relation(field: Field = QQ) -> Algebra:
    """``1 -> 2 -> 3`` with the composite ``a1*a2`` killed."""
    return linear_path(3, field, [[(1, ("a1", "a2"))]])


def two_cycle(commuting_zero: bool = False, field: Field = QQ) -> Algebra:
    """Arrows ``a: 1 -> 2``, ``b: 2 -> 1`` with ``a*b = 0`` (and ``b*a = 0`` if requested).

    With one relation the algebra is quasi-hereditary; with both it is not.
    """
    rels = [[(1, ("a", "b"))]]
    if commuting_zero:
        rels.append([(1, ("b", "a"))])
    L = 2 if commuting_zero else 3
    Q = QuiverPresentation.create(["1", "2"], [("a", "1", "2"), ("b", "2", "1")], rels, L, field)
    return compile_bound_quiver(Q)


def example_quiver(field: Field = QQ) -> QuiverPresentation:
    """Three-cycle ``a: 1->2, b: 2->3, c: 3->1`` with ``abca = 0`` and ``cab = 0``."""
    return QuiverPresentation.create(
        ["1", "2", "3"],
        [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1")],
        [[(1, ("a", "b", "c", "a"))], [(1, ("c", "a", "b"))]],
        4,
        field,
    )


def example_algebra(field: Field = QQ) -> Algebra:
    return compile_bound_quiver(example_quiver(field))


NAMED = {
    "semisimple2": lambda f=QQ: semisimple(2, f),
    "dual-numbers": lambda f=QQ: truncated_polynomial(2, f),
    "A2": lambda f=QQ: linear_path(2, f),
    "A3": lambda f=QQ: linear_path(3, f),
    "A3-zero": a3_zero_relation,
    "two-cycle": lambda f=QQ: two_cycle(False, f),
    "two-cycle-zero": lambda f=QQ: two_cycle(True, f),
    "example": example_algebra,
}
