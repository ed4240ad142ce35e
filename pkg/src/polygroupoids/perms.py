"""Permutations of ``range(n)`` stored as tuples.

``sigma[k]`` is the image of ``k``.  Acting on a tuple ``w`` gives
``(w[sigma[0]], ..., w[sigma[n-1]])``, which is how the inverse maps move
spines.  Composition follows that action: applying ``tau`` and then
``sigma`` to a tuple equals applying ``perm_product(sigma, tau)``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache


def identity(n: int) -> tuple:
    return tuple(range(n))


def parity(sigma) -> int:
    """0 for even, 1 for odd, by inversion count."""
    return _parity(tuple(sigma))


@lru_cache(maxsize=4096)
def _parity(sigma) -> int:
    inv = 0
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j]:
                inv += 1
    return inv % 2


def apply(sigma, w) -> tuple:
    return tuple(w[s] for s in sigma)


def perm_product(sigma, tau) -> tuple:
    """The permutation whose action on tuples is ``tau`` followed by ``sigma``."""
    return tuple(tau[s] for s in sigma)


def inverse(sigma) -> tuple:
    out = [0] * len(sigma)
    for i, s in enumerate(sigma):
        out[s] = i
    return tuple(out)


def transposition(n: int, i: int) -> tuple:
    """The adjacent transposition swapping 0-based slots ``i`` and ``i+1``."""
    p = list(range(n))
    p[i], p[i + 1] = p[i + 1], p[i]
    return tuple(p)


@lru_cache(maxsize=None)
def all_perms(n: int) -> tuple:
    return tuple(itertools.permutations(range(n)))


def sorting_perm(c, key=None) -> tuple:
    """``(b, sigma)`` with ``b`` sorted and ``apply(sigma, b) == c``."""
    b = tuple(sorted(c, key=key))
    pos = {x: k for k, x in enumerate(b)}
    return b, tuple(pos[x] for x in c)


def format_perm(sigma) -> str:
    return ",".join(str(s + 1) for s in sigma)


def parse_perm(text: str, n: int | None = None) -> tuple:
    try:
        sigma = tuple(int(tok) - 1 for tok in text.split(","))
    except ValueError:
        raise ValueError(f"bad permutation {text!r}") from None
    if sorted(sigma) != list(range(len(sigma))) or (n is not None and len(sigma) != n):
        raise ValueError(f"bad permutation {text!r}")
    return sigma
