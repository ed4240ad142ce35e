"""The canonical models H_{G,n}: trivial lower fibers, top fibers a G-torsor."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import perms
from .core import Cell, ExplicitPolygroupoid, Polygroupoid, delete, ground_from_spines
from .errors import CapacityError, StructuralError
from .groups import GroupSpec, sign_scale


class StandardPolygroupoid(Polygroupoid):
    law = "standard"

    def __init__(self, n: int, group: GroupSpec, names):
        super().__init__()
        self.n = int(n)
        self.group = group
        self.names = tuple(names)
        self.vertex_ids = tuple(range(len(self.names)))
        self._fibers = {}

    @property
    def has_action(self):
        return True

    @property
    def has_inverses(self):
        return True

    def fiber(self, w) -> tuple:
        w = tuple(w)
        fib = self._fibers.get(w)
        if fib is None:
            k = len(w)
            if k == 1:
                fib = (w[0],)
            elif k < self.n:
                fib = (Cell(k, w, None),)
            else:
                fib = tuple(Cell(k, w, g) for g in self.group.elements)
            self._fibers[w] = fib
        return fib

    def project(self, f) -> tuple:
        w = f.spine
        if f.level == 2:
            return (w[1], w[0])
        return tuple(Cell(f.level - 1, delete(w, i), None) for i in range(1, f.level + 1))

    def fiber_index(self, f) -> int:
        if f.level < self.n:
            return 0
        return self.group.index(f.label)

    def q_holds(self, cells) -> bool:
        cells = tuple(cells)
        if len(cells) != self.n + 1 or any(c.level != self.n for c in cells):
            return False
        if ground_from_spines([c.spine for c in cells]) is None:
            return False
        G = self.group
        total = G.zero
        for i, c in enumerate(cells, start=1):
            total = G.add(total, c.label if i % 2 == 0 else G.neg(c.label))
        return total == G.zero

    def act(self, g, f) -> Cell:
        if f.level != self.n:
            raise StructuralError(f"the group acts on level {self.n} only, got level {f.level}")
        return Cell(f.level, f.spine, self.group.add(f.label, g))

    def iota(self, sigma, f) -> Cell:
        if f.level != self.n:
            raise StructuralError("inverse maps act on top cells only")
        return Cell(f.level, perms.apply(sigma, f.spine), sign_scale(perms.parity(sigma), f.label, self.group))

    def _labels(self):
        return _label_sums(self.n, self.group)

    def _build_q_tensor(self, ground):
        return self._labels() == 0

    def _build_compat_tensor(self, ground):
        return np.ones([self.group.order] * (self.n + 1), dtype=bool)

    def action_perm(self, w, g):
        key = (None, tuple(g))
        arr = self._act_cache.get(key)
        if arr is None:
            arr = self.group.add_table[:, self.group.index(g)].copy()
            self._act_cache[key] = arr
        return arr

    def iota_perm(self, sigma, w):
        G = self.group
        return G.neg_table if perms.parity(sigma) else _identity_index(G.order)

    def iota_table(self, sigma, spines):
        row = self.iota_perm(sigma, None)
        return np.broadcast_to(row, (len(spines), len(row)))

    def signature(self):
        return ("standard", self.n, self.group, self.names)

    def __eq__(self, other):
        return isinstance(other, StandardPolygroupoid) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())


@lru_cache(maxsize=None)
def _label_sums(n: int, G: GroupSpec) -> np.ndarray:
    """Alternating label sum over all label choices, as element indices."""
    k = n + 1
    total = np.zeros([1] * k, dtype=np.int64)
    for i in range(k):
        idx = np.arange(G.order)
        if i % 2 == 0:  # 1-based odd position carries a minus sign
            idx = G.neg_table[idx]
        shape = [1] * k
        shape[i] = G.order
        total = G.add_table[total, idx.reshape(shape)]
    total.setflags(write=False)
    return total


@lru_cache(maxsize=None)
def _identity_index(k: int) -> np.ndarray:
    arr = np.arange(k)
    arr.setflags(write=False)
    return arr


def default_names(m: int) -> tuple:
    return tuple(f"v{i}" for i in range(m))


def build_standard(n: int, spec: GroupSpec, m: int, names=None) -> StandardPolygroupoid:
    if n < 2:
        raise StructuralError("arity must be at least 2")
    if not isinstance(spec, GroupSpec):
        spec = GroupSpec(tuple(spec))
    if spec.order < 2:
        raise StructuralError("the acting group must be nontrivial")
    if m < n:
        raise CapacityError(f"{m} vertices cannot carry top cells of arity {n}", count=m, bound=n)
    names = default_names(m) if names is None else tuple(names)
    if len(names) != m:
        raise StructuralError("one name per vertex is required")
    return StandardPolygroupoid(n, spec, names)


def act(H: Polygroupoid, g, f) -> Cell:
    return H.act(g, f)


def iota_apply(H: Polygroupoid, sigma, f) -> Cell:
    return H.iota(tuple(sigma), f)


def to_explicit(H: Polygroupoid, with_action: bool = True, with_inverses: bool = True) -> ExplicitPolygroupoid:
    """Tabulate any structure; cells are renumbered by position in their fiber."""
    n = H.n
    renum = {}
    fibers = {}
    for level in range(2, n + 1):
        for w in H.spines(level):
            fib = H.fiber(w)
            fibers[(level, w)] = len(fib)
            for i, c in enumerate(fib):
                renum[c] = Cell(level, w, i)

    def re(x):
        return renum.get(x, x) if not isinstance(x, int) else x

    projections = {renum[c]: tuple(re(x) for x in H.project(c))
                   for level in range(3, n + 1) for w in H.spines(level) for c in H.fiber(w)}
    q = [tuple(renum[c] for c in tup) for tup in H.iter_q_tuples()]
    top = list(H.cells(n))
    action = None
    if with_action and H.has_action:
        action = {(g, renum[c]): renum[H.act(g, c)] for g in H.group.elements for c in top}
    inverses = None
    if with_inverses and H.has_inverses:
        inverses = {(s, renum[c]): renum[H.iota(s, c)] for s in perms.all_perms(n) for c in top}
    return ExplicitPolygroupoid(n, H.names, H.group, fibers, projections, q, action, inverses)
