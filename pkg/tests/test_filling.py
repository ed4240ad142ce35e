from __future__ import annotations

import itertools

import pytest

from conftest import std
from oracles import naive_family_defects
from polygroupoids import (Cell, CompatibleSystem, PreconditionError, UnfillableError,
                           build_simplex_family, check_axioms, defect_of_family, defect_of_tuple,
                           extend_to_maximal, horn_fill, structure_defect, to_explicit, twist)
from polygroupoids.filling import certify_defect_constancy


def top(g, *w):
    return Cell(len(w), tuple(w), (g,))


SPINES = [(1, 2), (0, 2), (0, 1)]


def test_extend_examples():
    H = std(2, "2", 4)
    S = CompatibleSystem({1: {0, 1, 2}})
    B = extend_to_maximal(H, S)
    assert len(B.layer(2)) == 6
    assert B.is_maximal(H)
    assert all(c.label == (0,) for c in B.layer(2))
    assert extend_to_maximal(H, B) == B


def test_extend_keeps_choices():
    H = std(3, "2", 5)
    f = top(1, 0, 1, 2)
    S = CompatibleSystem.from_cells(H, [f], vertices=[3])
    B = extend_to_maximal(H, S)
    assert f in B.layer(3)
    assert len(B.layer(2)) == 12
    assert len(B.layer(3)) == 24


def test_extend_needs_vertices():
    with pytest.raises(PreconditionError):
        extend_to_maximal(std(2, "2", 4), CompatibleSystem({1: {0, 1}}))


def test_horn_examples():
    H = std(2, "3", 3)
    x = horn_fill(H, [top(1, 1, 2), None, top(1, 0, 1)])
    assert x == top(2, 0, 2)
    for pos in range(3):
        faces = [top(0, *w) for w in SPINES]
        faces[pos] = None
        assert horn_fill(H, faces).label == (0,)


def test_horn_round_trip():
    for H in (std(2, "3", 4), std(3, "2", 4)):
        for tup in itertools.islice(H.iter_q_tuples(), 200):
            for pos in range(1, H.n + 2):
                faces = list(tup)
                faces[pos - 1] = None
                assert horn_fill(H, faces) == tup[pos - 1]


def test_horn_without_completion():
    E = to_explicit(std(2, "2", 3))
    t = sorted(E.q_set)[0]
    empty = E.with_q([q for q in E.q_set if q[1:] != t[1:]])
    with pytest.raises(UnfillableError):
        horn_fill(empty, [None, t[1], t[2]])


def test_family_examples():
    H = std(2, "2", 4)
    fam = build_simplex_family(H, (0, 1, 2, 3))
    assert sum(len(r) for r in fam.rows) == 12
    assert fam.check(H)
    assert all(H.q_holds(r) for r in fam.rows)
    assert defect_of_family(H, fam) == (0,)


def test_family_seed():
    H = std(3, "2", 5)
    ground = (0, 1, 2, 3, 4)
    seed = [t for t in H.iter_q_tuples() if H.ground_of(t) == ground[:4]][5]
    fam = build_simplex_family(H, ground, seed)
    assert fam.rows[-1] == tuple(seed)
    bad = (H.act((1,), seed[0]),) + tuple(seed[1:])
    with pytest.raises(PreconditionError):
        build_simplex_family(H, ground, bad)


def test_twisted_family_row_one_fails():
    T = twist(std(3, "2", 5), (1,))
    fam = build_simplex_family(T, (0, 1, 2, 3, 4))
    assert all(T.q_holds(r) for r in fam.rows[1:])
    assert not T.q_holds(fam.rows[0])


def test_defect_examples():
    H = std(2, "3", 3)
    for tup in itertools.islice(H.iter_q_tuples(), 20):
        assert defect_of_tuple(H, tup) == (0,)
    assert defect_of_tuple(H, [top(g, *w) for g, w in zip((1, 0, 0), SPINES)]) == (2,)


def test_defect_shift_rule():
    H = std(2, "3", 4)
    G = H.group
    for ground in itertools.permutations(range(4), 3):
        fibs = [H.fiber(w) for w in ((ground[1], ground[2]), (ground[0], ground[2]), ground[:2])]
        for tup in itertools.product(*fibs):
            d = defect_of_tuple(H, tup)
            for h in G.elements:
                moved = tup[:-1] + (H.act(h, tup[-1]),)
                assert defect_of_tuple(H, moved) == G.sub(d, h)


def test_defect_needs_compatible():
    H = std(2, "2", 3)
    with pytest.raises(PreconditionError):
        defect_of_tuple(H, [top(0, 1, 2), top(0, 0, 2), top(0, 1, 0)])


@pytest.mark.parametrize("n,g,m", [(2, "3", 4), (3, "2", 5), (2, "2x2", 5)])
def test_standard_defect_zero(n, g, m):
    assert structure_defect(std(n, g, m)) == std(n, g, m).group.zero


def test_twist_identities():
    H = std(2, "3", 4)
    E = to_explicit(H)
    assert twist(H, (0,)).q_set == E.q_set
    assert twist(twist(H, (1,)), (2,)).q_set == E.q_set


def test_odd_twist_and_retwist():
    T = twist(std(3, "2", 5), (1,))
    d = structure_defect(T)
    assert d == (1,)
    R = twist(T, d)
    assert check_axioms(R, ["associative"]).passed


@pytest.mark.parametrize("n,g,m,elt", [(2, "3", 4, (1,)), (3, "2", 5, (1,)), (3, "3", 5, (1,))])
def test_constancy_matches_naive(n, g, m, elt):
    T = twist(std(n, g, m), elt)
    cert = certify_defect_constancy(T)
    assert cert.constant
    grounds = list(itertools.permutations(range(m), n + 2))
    # the naive scan enumerates every family; a few grounds keep it cheap
    families = T.group.order ** ((n + 2) * (n + 1) // 2)
    picked = grounds[:: max(1, len(grounds) // 6)] if families <= 5000 else grounds[:1]
    for ground in picked:
        assert naive_family_defects(T, ground) == {cert.value}
    expected = T.group.neg(elt) if n % 2 else T.group.zero
    assert cert.value == expected


def test_constancy_at_n_plus_3():
    T = twist(std(2, "3", 5), (2,))
    cert = certify_defect_constancy(T)
    assert cert.constant and cert.value == (0,)
    assert naive_family_defects(T, (4, 0, 2, 1)) == {(0,)}
