"""Fixture collections shared by the acceptance and property tests."""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product

from qhalg import fixtures
from qhalg.constructions import BlockSpec, build_block_extension, build_triangular
from qhalg.exactmath import GF
from qhalg.quiver import QuiverError, QuiverPresentation, compile_bound_quiver

from oracles import random_monomial_quivers


def k():
    return fixtures.semisimple(1)


@lru_cache(maxsize=None)
def named_algebras():
    out = {name: f() for name, f in fixtures.NAMED.items()}
    out["k"] = fixtures.semisimple(1)
    out["k3"] = fixtures.semisimple(3)
    out["T2"] = build_triangular(fixtures.semisimple(1), 2)
    out["T3"] = build_triangular(fixtures.semisimple(1), 3)
    out["A3-F5"] = fixtures.linear_path(3, GF(5))
    out["A4"] = fixtures.linear_path(4)
    out["x3"] = fixtures.truncated_polynomial(3)
    out["T2(A2)"] = build_triangular(fixtures.linear_path(2), 2)
    out["kronecker"] = compile_bound_quiver(
        QuiverPresentation.create(["1", "2"], [("a", "1", "2"), ("b", "1", "2")], [], 2)
    )
    out["commutative-square"] = compile_bound_quiver(
        QuiverPresentation.create(
            ["1", "2", "3", "4"],
            [("a", "1", "2"), ("b", "2", "4"), ("c", "1", "3"), ("d", "3", "4")],
            [[(1, ("a", "b")), (-1, ("c", "d"))]],
            3,
        )
    )
    out["loop-and-arrow"] = compile_bound_quiver(
        QuiverPresentation.create(
            ["1", "2"], [("x", "1", "1"), ("a", "1", "2")], [[(1, ("x", "x"))], [(1, ("x", "a"))]], 2
        )
    )
    out["block-A2(2,1)"] = build_block_extension(BlockSpec(fixtures.linear_path(2), (2, 1)))[0]
    out["block-example(1,2,1)"] = build_block_extension(BlockSpec(fixtures.example_algebra(), (1, 2, 1)))[0]
    return out


@lru_cache(maxsize=None)
def random_algebras(count=40, seed=20261014):
    rng = random.Random(seed)
    out = []
    for verts, arrows, rels, L in random_monomial_quivers(rng, 4 * count):
        if len(out) >= count:
            break
        try:
            A = compile_bound_quiver(
                QuiverPresentation.create(verts, arrows, [[(1, tuple(r))] for r in rels], L)
            )
        except QuiverError:
            continue
        if A.dim <= 30:
            out.append(A)
    return tuple(out)


def block_bases():
    one = fixtures.semisimple(1)
    return {
        "k": one,
        "k2": fixtures.semisimple(2),
        "k3": fixtures.semisimple(3),
        "T2": build_triangular(one, 2),
        "T3": build_triangular(one, 3),
        "A2": fixtures.linear_path(2),
        "A3-zero": fixtures.a3_zero_relation(),
    }


def size_vectors(n, total=6):
    for sizes in product(range(1, total + 1), repeat=n):
        if sum(sizes) <= total:
            yield sizes
