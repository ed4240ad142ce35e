from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polygroupoids import (CapacityError, GroupSpec, StructuralError,
                           enumerate_group_automorphisms, group_arith, sign_scale)

SPECS = ["2", "3", "4", "2x2", "6", "2x4", "3x3", "2x2x2"]


def brute_automorphisms(G):
    # every map of elements, kept when it is a bijective homomorphism
    els = G.elements
    out = []
    for images in itertools.permutations(els):
        f = dict(zip(els, images))
        if all(f[G.add(a, b)] == G.add(f[a], f[b]) for a in els for b in els):
            out.append(images)
    return out


def test_arith_examples():
    Z3, Z4, V = GroupSpec((3,)), GroupSpec((4,)), GroupSpec((2, 2))
    assert group_arith(Z3, "add", (1,), (2,)) == (0,)
    assert group_arith(V, "neg", (1, 0)) == (1, 0)
    assert group_arith(Z4, "add", (3,), (3,)) == (2,)
    assert group_arith(V, "zero") == (0, 0)


def test_arith_length_mismatch():
    with pytest.raises(StructuralError):
        GroupSpec((2, 2)).check((1,))


def test_sign_scale_examples():
    Z3, V = GroupSpec((3,)), GroupSpec((2, 2))
    assert sign_scale("even", (1,), Z3) == (1,)
    assert sign_scale("odd", (1,), Z3) == (2,)
    assert sign_scale("odd", (1, 1), V) == (1, 1)


@pytest.mark.parametrize("text", ["1", "2x1", "0", "x", ""])
def test_bad_specs(text):
    with pytest.raises(StructuralError):
        GroupSpec.parse(text)


def test_spec_text_round_trip():
    for s in SPECS:
        assert str(GroupSpec.parse(s)) == s


@pytest.mark.parametrize("text,count", [("2", 1), ("3", 2), ("2x2", 6), ("4", 2), ("2x4", 8)])
def test_automorphism_counts(text, count):
    G = GroupSpec.parse(text)
    auts = enumerate_group_automorphisms(G)
    assert len(auts) == count
    assert len(brute_automorphisms(G)) == count
    assert {a.table for a in auts} == set(brute_automorphisms(G))


@pytest.mark.parametrize("text", ["2x2", "6", "3x3"])
def test_automorphisms_form_a_group(text):
    G = GroupSpec.parse(text)
    auts = enumerate_group_automorphisms(G)
    tables = {a.table for a in auts}
    assert auts[0].is_identity()
    for a in auts:
        assert a.inverse().table in tables
        assert a.compose(a.inverse()).is_identity()
        for b in auts:
            assert a.compose(b).table in tables


def test_automorphism_bound():
    with pytest.raises(CapacityError):
        enumerate_group_automorphisms(GroupSpec((2, 2, 2)), max_order=4)


@st.composite
def spec_and_elements(draw, k=3):
    G = GroupSpec.parse(draw(st.sampled_from(SPECS)))
    els = [draw(st.sampled_from(G.elements)) for _ in range(k)]
    return G, els


@settings(max_examples=200, deadline=None)
@given(spec_and_elements())
def test_group_laws(data):
    G, (a, b, c) = data
    assert G.add(G.add(a, b), c) == G.add(a, G.add(b, c))
    assert G.add(a, b) == G.add(b, a)
    assert G.add(a, G.zero) == a
    assert G.add(a, G.neg(a)) == G.zero
    assert sign_scale("odd", sign_scale("odd", a, G), G) == a


def test_group_laws_exhaustive():
    for s in SPECS:
        G = GroupSpec.parse(s)
        assert G.order == len(G.elements)
        for a, b in itertools.product(G.elements, repeat=2):
            assert G.sub(G.add(a, b), b) == a
