from __future__ import annotations

import itertools
import random

import pytest

from conftest import std
from oracles import naive_associative, oracle_isomorphic
from polygroupoids import (AmalgamationProblem, CapacityError, PreconditionError,
                           nonuniqueness_witness, solve, uniqueness_check)
from polygroupoids.amalgamation import (LabelledStandard, enumerate_solutions,
                                        independent, problem_from_shape, problem_shapes)


def test_independence_examples():
    H = std(2, "2", 5)
    assert independent(H, {0}, set(), {1})
    assert not independent(H, {0}, set(), {0})
    assert independent(H, {0}, {0}, {0})


def test_independence_of_vertex_sets():
    H = std(2, "2", 5)
    rng = random.Random(0)
    for _ in range(60):
        A = set(rng.sample(range(5), rng.randint(1, 3)))
        C = set(rng.sample(range(5), rng.randint(1, 3)))
        assert independent(H, A, set(), C) == (not A & C)
        assert independent(H, A, set(), C) == independent(H, C, set(), A)
        if independent(H, A, set(), C):
            assert independent(H, set(list(A)[:1]), set(), C)


def test_bad_problems():
    H = std(2, "2", 5)
    with pytest.raises(PreconditionError):
        AmalgamationProblem(H, ([0, 1], [1, 2]))
    with pytest.raises(PreconditionError):
        AmalgamationProblem(H, ())
    with pytest.raises(CapacityError):
        AmalgamationProblem(H, ([0], [7]))


def test_solutions_verify():
    H = std(2, "2", 5)
    for blocks, base in [(([0, 1], [2]), [3]), (([0], [1], [2]), []), (([0], [1], [2]), [3, 4])]:
        P = AmalgamationProblem(H, blocks, frozenset(base))
        sol = solve(H, P)
        assert sol.verify() == (True, "")


# an independent route: all relabellings kept by the associativity law,
# and isomorphisms found by search over cell bijections fixing every face

def oracle_solutions(P):
    H = P.H
    verts = sorted(P.vertices)
    new = [X for X in itertools.combinations(verts, H.n + 1) if not P.in_face(X)]
    out = []
    for vals in itertools.product(H.group.elements, repeat=len(new)):
        h = dict(zip(new, vals))
        T = LabelledStandard(H.n, H.group, H.names, verts, h)
        if naive_associative(T):
            out.append(h)
    return out


@pytest.mark.parametrize("m,blocks,base", [
    (4, ([0, 1], [2]), [3]),
    (4, ([0], [1]), [2, 3]),
    (4, ([0], [1], [2]), []),
    (4, ([0, 1], [2], [3]), []),
    (4, ([0], [1], [2]), [3]),
    (5, ([0, 1], [2], [3]), [4]),
    (5, ([0, 1], [2, 3], [4]), []),
])
def test_against_oracle(m, blocks, base):
    H = std(2, "2", m)
    P = AmalgamationProblem(H, blocks, frozenset(base))
    sols = oracle_solutions(P)
    mine = enumerate_solutions(P)
    assert {tuple(sorted(h.items())) for h in mine} == \
        {tuple(sorted((X, v) for X, v in h.items() if any(v))) for h in sols}
    expect_unique = all(oracle_isomorphic(P, {}, h) for h in sols)
    v = uniqueness_check(H, P)
    assert v.unique == expect_unique
    if not v.unique:
        assert not oracle_isomorphic(P, *v.witness)


def test_examples():
    H = std(2, "2", 5)
    assert uniqueness_check(H, AmalgamationProblem(H, ([0, 1], [2, 3]), frozenset([4]))).unique
    v = uniqueness_check(H, AmalgamationProblem(H, ([0], [1], [2])))
    assert v.status == "witness"
    h0, h1 = v.witness
    assert h0 == {} and list(h1.values()) == [(1,)]
    H3 = std(3, "2", 6)
    assert uniqueness_check(H3, AmalgamationProblem(H3, ([0, 1], [2, 3], [4]), frozenset([5]))).unique


def test_shapes():
    shapes = problem_shapes(5, 3)
    assert (0, (1, 1, 1)) in shapes and (2, (1, 1, 1)) in shapes
    assert all(b + sum(s) <= 5 for b, s in shapes)
    assert problem_shapes(5, 3, with_base=False) == [s for s in shapes if s[0] == 0]
    with pytest.raises(CapacityError):
        problem_from_shape(std(2, "2", 4), 2, (2, 1))


def test_budget():
    H = std(2, "2", 5)
    with pytest.raises(CapacityError):
        uniqueness_check(H, AmalgamationProblem(H, ([0], [1], [2])), budget=0)


@pytest.mark.parametrize("n,g,m", [(2, "2", 3), (2, "3", 4), (3, "2x2", 5)])
def test_witness(n, g, m):
    H = std(n, g, m)
    w = tuple(range(n + 1))
    W = nonuniqueness_witness(H, w)
    assert W.certify(H) == (True, "")
    assert W.cell.spine == w[:n]
    if g == "2":
        assert W.automorphism(W.cell) == H.act((1,), W.cell)


def test_witness_trivial_group():
    assert nonuniqueness_witness(std(2, "2", 3), (0, 1, 2), recovered_order=1) is None


def test_witness_checks_fail_when_tampered():
    H = std(2, "3", 4)
    W = nonuniqueness_witness(H, (0, 1, 2))
    W.q_tuple = (H.act((1,), W.q_tuple[0]),) + W.q_tuple[1:]
    assert W.certify(H)[0] is False
