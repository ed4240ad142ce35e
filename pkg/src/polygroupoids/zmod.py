"""Linear systems over Z/q by diagonal reduction.

For q a prime power the ideals of Z/q form a chain, so an entry of least
valuation divides everything else in its row and column.  Composite moduli
are split with the Chinese remainder theorem.
"""
from __future__ import annotations

import numpy as np


def _prime_powers(q: int) -> list:
    out, p = [], 2
    while p * p <= q:
        if q % p == 0:
            e = 1
            q //= p
            while q % p == 0:
                q //= p
                e += 1
            out.append((p, e))
        p += 1
    if q > 1:
        out.append((q, 1))
    return out


def _valuation(x: int, p: int, e: int) -> int:
    if x == 0:
        return e
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class _Diagonal:
    """``A = U^-1 D V^-1`` over Z/p^e; stores what solving and kernels need."""

    def __init__(self, A, p, e):
        self.p, self.e, self.N = p, e, p**e
        N = self.N
        A = np.array(A, dtype=np.int64) % N
        r, c = A.shape
        U = np.eye(r, dtype=np.int64)
        V = np.eye(c, dtype=np.int64)
        vals = []
        t = 0
        while t < min(r, c):
            sub = A[t:, t:]
            if not sub.any():
                break
            best = None
            for (i, j), x in np.ndenumerate(sub):
                if x:
                    v = _valuation(int(x), p, e)
                    if best is None or v < best[0]:
                        best = (v, i + t, j + t)
                        if v == 0:
                            break
            v, i, j = best
            A[[t, i]] = A[[i, t]]
            U[[t, i]] = U[[i, t]]
            A[:, [t, j]] = A[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
            unit = int(A[t, t]) // p**v
            inv = pow(unit, -1, N)
            A[t] = A[t] * inv % N
            U[t] = U[t] * inv % N
            pv = p**v
            for k in range(r):
                if k != t and A[k, t]:
                    f = int(A[k, t]) // pv
                    A[k] = (A[k] - f * A[t]) % N
                    U[k] = (U[k] - f * U[t]) % N
            for k in range(c):
                if k != t and A[t, k]:
                    f = int(A[t, k]) // pv
                    A[:, k] = (A[:, k] - f * A[:, t]) % N
                    V[:, k] = (V[:, k] - f * V[:, t]) % N
            vals.append(v)
            t += 1
        self.U, self.V, self.vals, self.shape = U, V, vals, (r, c)

    def solve(self, b):
        N = self.N
        b = (self.U @ (np.array(b, dtype=np.int64) % N)) % N
        r, c = self.shape
        y = np.zeros(c, dtype=np.int64)
        for t, v in enumerate(self.vals):
            pv = self.p**v
            if b[t] % pv:
                return None
            y[t] = (b[t] // pv) % N
        if b[len(self.vals):].any():
            return None
        return (self.V @ y) % N

    def kernel(self):
        """Generators of the solution group of ``A x = 0`` and its order."""
        N = self.N
        r, c = self.shape
        gens, order = [], 1
        for t in range(c):
            v = self.vals[t] if t < len(self.vals) else 0
            if t < len(self.vals):
                if v == 0:
                    continue
                step = self.p ** (self.e - v)
                order *= self.p**v
            else:
                step = 1
                order *= N
            gens.append((self.V[:, t] * step) % N)
        return gens, order


def solve_mod(A, b, q: int):
    """A solution of ``A x = b`` over Z/q, or ``None``."""
    A = np.asarray(A, dtype=np.int64)
    parts = []
    for p, e in _prime_powers(q):
        x = _Diagonal(A, p, e).solve(np.asarray(b) % p**e)
        if x is None:
            return None
        parts.append((p**e, x))
    return _crt(parts, q)


def kernel_mod(A, q: int):
    """Generators of ``{x : A x = 0}`` over Z/q and the group order."""
    A = np.asarray(A, dtype=np.int64)
    gens, order = [], 1
    for p, e in _prime_powers(q):
        N = p**e
        g, o = _Diagonal(A, p, e).kernel()
        order *= o
        # lift a Z/N generator to Z/q: the CRT element that is x mod N and 0 elsewhere
        other = q // N
        lift = other * pow(other, -1, N) % q if other > 1 else 1
        gens.extend((x * lift) % q for x in g)
    return gens, order


def _crt(parts, q):
    x = np.zeros_like(parts[0][1])
    for N, y in parts:
        other = q // N
        lift = other * pow(other, -1, N) % q if other > 1 else 1
        x = (x + y * lift) % q
    return x
