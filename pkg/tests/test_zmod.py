from __future__ import annotations

import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from polygroupoids.zmod import kernel_mod, solve_mod


@st.composite
def systems(draw):
    q = draw(st.sampled_from([2, 3, 4, 6, 8, 9, 12]))
    r = draw(st.integers(1, 3))
    c = draw(st.integers(1, 3))
    A = np.array(draw(st.lists(st.integers(0, q - 1), min_size=r * c, max_size=r * c))).reshape(r, c)
    b = np.array(draw(st.lists(st.integers(0, q - 1), min_size=r, max_size=r)))
    return A, b, q


def all_vectors(c, q):
    return (np.array(x) for x in itertools.product(range(q), repeat=c))


@settings(max_examples=150, deadline=None)
@given(systems())
def test_solve_matches_brute_force(sys_):
    A, b, q = sys_
    brute = [x for x in all_vectors(A.shape[1], q) if not ((A @ x - b) % q).any()]
    x = solve_mod(A, b, q)
    if brute:
        assert x is not None and not ((A @ x - b) % q).any()
    else:
        assert x is None


@settings(max_examples=150, deadline=None)
@given(systems())
def test_kernel_matches_brute_force(sys_):
    A, _, q = sys_
    brute = {tuple(x) for x in all_vectors(A.shape[1], q) if not ((A @ x) % q).any()}
    gens, order = kernel_mod(A, q)
    assert order == len(brute)
    span = {tuple([0] * A.shape[1])}
    frontier = list(span)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((np.array(v) + g) % q)
                if w not in span:
                    span.add(w)
                    nxt.append(w)
        frontier = nxt
    assert span == brute
