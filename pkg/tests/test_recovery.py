from __future__ import annotations

import itertools

import pytest

from conftest import std
from polygroupoids import (CapacityError, GroupSpec, check_standard_action, recover_group,
                           to_explicit, transport)
from polygroupoids.recovery import (abelian_specs, admissible_frames, canonical_frame,
                                    completion_independent, frame_independent, pair_classes)


def label(f):
    return f.label[0]


def test_transport_identity():
    H = std(2, "3", 4)
    p = H.fiber((0, 1))[1]
    fr = canonical_frame(H, p)
    assert transport(H, 1, 3, p, p, fr).is_identity()


def test_transport_translates():
    """In the standard law the transport is translation by +-(q - p), one sign per position pair."""
    H = std(2, "3", 4)
    fib = H.fiber((0, 1))
    for i, j in itertools.permutations(range(1, 4), 2):
        for fr in admissible_frames(H, fib[0], i, j):
            signs = set()
            for p, q in itertools.product(fib, repeat=2):
                t = transport(H, i, j, p, q, fr)
                shifts = {(label(t(x)) - label(x)) % 3 for x in t.fiber}
                assert len(shifts) == 1
                d = (label(q) - label(p)) % 3
                if d:
                    signs.add(+1 if shifts == {d} else -1 if shifts == {(-d) % 3} else 0)
            assert len(signs) == 1 and 0 not in signs


def test_transport_separates():
    H = std(2, "4", 4)
    fib = H.fiber((0, 1))
    fr = canonical_frame(H, fib[0])
    tables = {transport(H, 1, 3, fib[0], q, fr).table for q in fib}
    assert len(tables) == len(fib)


@pytest.mark.parametrize("g", ["2", "3", "2x2"])
def test_pair_classes_match_label_differences(g):
    H = std(2, g, 4)
    G = H.group
    classes = pair_classes(H, (0, 1))
    assert len(classes) == G.order
    for cls in classes:
        diffs = {G.sub(s.label, r.label) for r, s in cls}
        assert len(diffs) == 1
    diagonal = [cls for cls in classes if any(r == s for r, s in cls)]
    assert len(diagonal) == 1 and all(r == s for r, s in diagonal[0])


def test_needs_auxiliary_vertex():
    with pytest.raises(CapacityError):
        pair_classes(std(2, "2", 2), (0, 1))


@pytest.mark.parametrize("n,g,m,order,exponent", [
    (2, "2", 4, 2, 2), (3, "2x2", 5, 4, 2), (2, "4", 4, 4, 4), (2, "3", 4, 3, 3)])
def test_recovered_orders(n, g, m, order, exponent):
    R = recover_group(std(n, g, m))
    assert R.order == order
    assert R.exponent == exponent
    assert R.is_abelian()
    assert R.isomorphism_from(GroupSpec.parse(g)) is not None


def test_z4_and_klein_distinguished():
    a = recover_group(std(2, "4", 4)).structure()
    b = recover_group(std(2, "2x2", 4)).structure()
    assert a == GroupSpec((4,)) and b == GroupSpec((2, 2))


def test_abelian_specs():
    # one spec per partition of each prime exponent
    assert [str(s) for s in abelian_specs(8)] == ["8", "4x2", "2x2x2"]
    assert [s.order for s in abelian_specs(12)] == [12, 12]
    assert len(abelian_specs(36)) == 4


@pytest.mark.parametrize("n,g,m", [(2, "3", 4), (2, "4", 4), (3, "2", 5)])
def test_standard_action_passes(n, g, m):
    H = std(n, g, m)
    report = check_standard_action(H, recover_group(H))
    assert report.passed, report.failures()
    assert report["commute"].status == "pass"


def test_corrupted_q_fails():
    E = to_explicit(std(2, "3", 4))
    R = recover_group(E)
    drop = sorted(E.q_set)[-1]
    bad = E.with_q(E.q_set - {drop})
    report = check_standard_action(bad, R)
    assert not report.passed
    v = report["adjacent"]
    assert v.status == "fail" and v.witness is not None


@pytest.mark.parametrize("n,g", [(2, "3"), (2, "2x2"), (3, "2")])
def test_independence_at_n_plus_2(n, g):
    H = std(n, g, n + 2)
    ok, frames = frame_independent(H, tuple(range(n)))
    assert ok and len(frames) > 1
    ok, count = completion_independent(H, tuple(range(n)))
    assert ok and count > 0
