from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import std
from oracles import (naive_associative, naive_fillers_exist, naive_q_implies_compatible,
                     naive_unique_fillers)
from polygroupoids import (CapacityError, Cell, ExplicitPolygroupoid, GroupSpec, StructuralError,
                           check_axioms, closure_of, fiber_of, is_compatible, q_holds, support_of,
                           to_explicit, twist)
from polygroupoids.core import FAMILIES


def top(g, *w):
    return Cell(len(w), tuple(w), (g,))


def test_vertex_pairs():
    H = std(2, "2", 3)
    assert is_compatible(H, (0, 1))
    assert not is_compatible(H, (0, 0))


def test_compatible_top_cells():
    H = std(2, "2", 3)
    assert is_compatible(H, (top(0, 1, 2), top(1, 0, 2), top(0, 0, 1)))
    assert not is_compatible(H, (top(0, 1, 2), top(1, 0, 2), top(0, 1, 0)))


def test_mixed_levels_rejected():
    H = std(3, "2", 4)
    with pytest.raises(StructuralError):
        is_compatible(H, (Cell(2, (0, 1)), top(0, 0, 1, 2)))


def test_support_examples():
    H2, H3 = std(2, "2", 4), std(3, "2", 4)
    assert support_of(H2, []) == set()
    assert support_of(H3, [top(1, 2, 0, 3)]) == {0, 2, 3}
    assert support_of(H2, [0, top(0, 1, 2)]) == {0, 1, 2}


def test_closure_examples():
    H = std(2, "2", 4)
    assert list(closure_of(H, []).cells(2)) == []
    C = closure_of(H, [0, 1])
    assert C.vertex_ids == (0, 1)
    fibers = {c.spine for c in C.cells(2)}
    assert fibers == {(0, 1), (1, 0)}
    assert all(len(C.fiber(w)) == 2 for w in fibers)


def test_closure_idempotent_and_monotone():
    H = std(3, "2", 5)
    rng = random.Random(0)
    cells = list(H.cells(3))
    for _ in range(30):
        X = rng.sample(cells, 2) + rng.sample(range(5), 1)
        C = closure_of(H, X)
        assert closure_of(H, C.vertex_ids) == C
        assert closure_of(H, support_of(H, X)) == C
        Y = X + rng.sample(cells, 1)
        assert set(C.vertex_ids) <= set(closure_of(H, Y).vertex_ids)


def test_fiber_sizes():
    assert len(fiber_of(std(2, "3", 4), (0, 1))) == 3
    assert len(fiber_of(std(3, "2", 4), (0, 1))) == 1
    with pytest.raises(StructuralError):
        fiber_of(std(2, "2", 4), (0, 0))


def test_fiber_sizes_everywhere():
    for n, g, m in [(3, "2x2", 5), (4, "2", 5)]:
        H = std(n, g, m)
        for k in range(2, n + 1):
            for w in itertools.permutations(range(m), k):
                assert len(fiber_of(H, w)) == (H.group.order if k == n else 1)


def test_q_examples():
    H3, H2 = std(2, "3", 3), std(2, "2", 3)
    spines = [(1, 2), (0, 2), (0, 1)]
    assert q_holds(H3, [top(g, *w) for g, w in zip((1, 2, 1), spines)])
    assert q_holds(H3, [top(0, *w) for w in spines])
    assert not q_holds(H2, [top(g, *w) for g, w in zip((1, 0, 0), spines)])


def test_projection_coherence():
    for n, g, m in [(3, "2", 5), (4, "2", 5)]:
        H = std(n, g, m)
        for k in range(2, n + 1):
            for c in H.cells(k):
                assert is_compatible(H, H.project(c))


def test_standard_passes_all_families():
    report = check_axioms(std(2, "2", 4))
    assert report.passed
    assert set(report.verdicts) == set(FAMILIES)


def test_capacity_errors():
    with pytest.raises(CapacityError):
        check_axioms(std(2, "2", 9))
    with pytest.raises(CapacityError):
        check_axioms(std(2, "2", 4), max_group=1)


def test_duplicated_filler_fails():
    E = to_explicit(std(2, "2", 3))
    t = next(iter(sorted(E.q_set)))
    other = Cell(2, t[0].spine, 1 - t[0].label)
    bad = E.with_q(set(E.q_set) | {(other,) + t[1:]})
    v = check_axioms(bad, ["quasigroupoid"])["quasigroupoid"]
    assert v.status == "fail"
    assert other in v.witness or t[0] in v.witness
    assert not naive_unique_fillers(bad)


def test_twisted_n3():
    T = twist(std(3, "2", 5), (1,))
    r = check_axioms(T, ["quasigroupoid", "associative"])
    assert r["quasigroupoid"].status == "pass"
    assert r["associative"].status == "fail"
    assert not naive_associative(T)
    # the witness is a real family
    assert r["associative"].witness is not None


def test_twisted_n2_is_associative():
    T = twist(std(2, "3", 4), (1,))
    assert check_axioms(T, ["associative"]).passed
    assert naive_associative(T)


def test_standard_matches_naive():
    for H in (std(2, "3", 4), std(3, "2", 4)):
        assert naive_unique_fillers(H) and naive_fillers_exist(H)
        assert naive_associative(H)
    # all (n+1)-tuples of top cells is only affordable at n = 2
    assert naive_q_implies_compatible(std(2, "3", 4))


def test_explicit_rejects_bad_tables():
    G = GroupSpec((2,))
    with pytest.raises(StructuralError):
        ExplicitPolygroupoid(2, ["a", "a"], G, {})
    with pytest.raises(StructuralError):
        ExplicitPolygroupoid(2, ["a", "b"], G, {(3, (0, 1)): 1})
    with pytest.raises(StructuralError):
        ExplicitPolygroupoid(2, ["a", "b", "c"], G, {(2, (0, 1)): 1}, q=[(Cell(2, (0, 1), 0),)])


# random perturbations of Q, judged by both routes

BASE = to_explicit(std(2, "2", 3))
Q_ALL = sorted(BASE.q_set)
TOP = sorted(BASE.cells(2))
EXTRA = [t for t in itertools.product(TOP, repeat=3) if is_compatible(BASE, t) and t not in BASE.q_set]


@settings(max_examples=40, deadline=None)
@given(st.sets(st.sampled_from(Q_ALL), max_size=3), st.sets(st.sampled_from(EXTRA), max_size=2))
def test_perturbed_q_agrees_with_naive(drop, add):
    E = BASE.with_q((set(Q_ALL) - drop) | add)
    r = check_axioms(E, ["quasigroupoid", "connected", "associative"])
    assert (r["quasigroupoid"].status == "pass") == (naive_unique_fillers(E) and naive_q_implies_compatible(E))
    assert (r["connected"].status == "pass") == naive_fillers_exist(E)
    assert (r["associative"].status == "pass") == naive_associative(E)
    for v in r.failures():
        assert v.witness is not None
