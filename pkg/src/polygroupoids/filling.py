"""Compatible systems, horn filling, simplex families and the defect calculus."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import ExplicitPolygroupoid, Polygroupoid, _FamilyLayout, delete, faces, is_compatible, level_of
from .errors import CapacityError, PreconditionError, StructuralError, UnfillableError
from .standard import to_explicit

MAX_FAMILY_GRID = 4_000_000


@dataclass
class CompatibleSystem:
    """Per-level cell sets; ``layers[1]`` holds vertices."""

    layers: dict = field(default_factory=dict)

    @classmethod
    def from_cells(cls, H: Polygroupoid, cells, vertices=()) -> CompatibleSystem:
        """The system generated by ``cells`` under projections, plus extra vertices."""
        layers = {k: set() for k in range(1, H.n + 1)}
        frontier = list(cells) + [int(v) for v in vertices]
        while frontier:
            x = frontier.pop()
            k = level_of(x)
            if x in layers[k]:
                continue
            layers[k].add(x)
            if k > 1:
                frontier.extend(H.project(x))
        return cls(layers)

    def layer(self, k) -> set:
        return self.layers.setdefault(k, set())

    def cell_over(self, w):
        w = tuple(w)
        if len(w) == 1:
            return w[0] if w[0] in self.layer(1) else None
        hits = [c for c in self.layer(len(w)) if c.spine == w]
        if len(hits) > 1:
            raise StructuralError(f"compatible system holds {len(hits)} cells over {w}")
        return hits[0] if hits else None

    def is_closed(self, H) -> bool:
        return all(set(H.project(c)) <= self.layer(k - 1)
                   for k in range(2, max(self.layers) + 1) for c in self.layer(k))

    def is_maximal(self, H) -> bool:
        verts = sorted(self.layer(1))
        for k in range(2, H.n + 1):
            have = {c.spine for c in self.layer(k)}
            if len(have) != len(self.layer(k)):
                return False
            if have != set(itertools.permutations(verts, k)):
                return False
        return True

    def __eq__(self, other):
        keys = set(self.layers) | set(other.layers)
        return all(self.layers.get(k, set()) == other.layers.get(k, set()) for k in keys)


def extend_to_maximal(H: Polygroupoid, S: CompatibleSystem) -> CompatibleSystem:
    """Fill every missing fiber over the vertex layer, level by level.

    A free choice takes the first cell of the fiber whose boundary matches,
    which in the standard law is the zero-label cell.
    """
    verts = sorted(S.layer(1))
    if len(verts) < H.n + 1:
        raise PreconditionError(f"a maximal system needs at least {H.n + 1} vertices, got {len(verts)}")
    if not S.is_closed(H):
        raise PreconditionError("the system is not closed under projections")
    out = CompatibleSystem({1: set(verts)})
    for k in range(2, H.n + 1):
        chosen = {}
        for c in S.layer(k):
            if c.spine in chosen:
                raise PreconditionError(f"two cells over {c.spine} in the input system")
            chosen[c.spine] = c
        for w in itertools.permutations(verts, k):
            if w in chosen:
                continue
            boundary = tuple(out.cell_over(s) for s in faces(w))
            hit = next((c for c in H.fiber(w) if tuple(H.project(c)) == boundary), None)
            if hit is None:
                raise UnfillableError(f"no cell over {w} with the chosen boundary", witness=boundary)
            chosen[w] = hit
        out.layers[k] = set(chosen.values())
        # lower faces of a chosen cell are the chosen lower cells
        for w, c in chosen.items():
            for i, lower in enumerate(H.project(c), start=1):
                assert lower == out.cell_over(delete(w, i)), "compatible system lost face coherence"
    return out


def _ground_with_gap(spines, position):
    given = [(k, s) for k, s in enumerate(spines, start=1) if s is not None]
    if len(given) < 2:
        raise StructuralError("need at least two faces to place a horn")
    (k, sk), (_, sl) = given[0], given[1]
    x = sl[k - 1]
    ground = tuple(sk[: k - 1]) + (x,) + tuple(sk[k - 1:])
    if len(set(ground)) != len(ground):
        raise UnfillableError("faces do not lie over one ground tuple")
    for j, s in given:
        if delete(ground, j) != tuple(s):
            raise UnfillableError(f"face {j} is not over {delete(ground, j)}")
    return ground


def horn_fill(H: Polygroupoid, faces_, position: int | None = None):
    """Fill the missing slot (``None`` or ``position``, 1-based) of a horn."""
    cells = list(faces_)
    if len(cells) != H.n + 1:
        raise StructuralError(f"a horn has {H.n + 1} slots, got {len(cells)}")
    if position is None:
        gaps = [k for k, c in enumerate(cells, start=1) if c is None]
        if len(gaps) != 1:
            raise StructuralError("exactly one slot must be empty")
        position = gaps[0]
    cells[position - 1] = None
    ground = _ground_with_gap([None if c is None else c.spine for c in cells], position)
    q = H.q_tensor(ground)
    idx = tuple(slice(None) if c is None else H.fiber_index(c) for c in cells)
    fib = H.fiber(delete(ground, position))
    hits = np.nonzero(q[idx])[0]
    if len(hits) == 1:
        return fib[int(hits[0])]
    if len(hits) > 1:
        raise StructuralError(f"horn at position {position} has {len(hits)} fillers")
    if not H.compat_tensor(ground)[idx].any():
        raise UnfillableError("the given faces have no compatible completion", witness=tuple(cells))
    raise UnfillableError(f"no filler at position {position}", witness=tuple(cells))


@dataclass
class SimplexFamily:
    ground: tuple
    rows: tuple  # rows[i-1][j-1] is p^i_j

    def cell(self, i, j):
        return self.rows[i - 1][j - 1]

    def check(self, H) -> bool:
        n1 = len(self.rows[0])
        for row in self.rows:
            if not is_compatible(H, row):
                return False
        return all(self.cell(i, j) == self.cell(j + 1, i) for i in range(1, n1 + 1) for j in range(i, n1 + 1))


def build_simplex_family(H: Polygroupoid, ground, seed=None) -> SimplexFamily:
    n = H.n
    ground = tuple(int(x) for x in ground)
    if len(ground) != n + 2 or len(set(ground)) != n + 2 or not set(ground) <= set(H.vertex_ids):
        raise StructuralError(f"a family needs {n + 2} distinct vertices")
    if seed is not None:
        seed = tuple(seed)
        if [c.spine for c in seed] != faces(ground[: n + 1]) or not H.q_holds(seed):
            raise PreconditionError("seed is not a Q-tuple over the last face of the ground")
        S = CompatibleSystem.from_cells(H, seed, vertices=ground)
    else:
        S = CompatibleSystem({1: set(ground)})
    B = extend_to_maximal(H, S)
    rows = [[None] * (n + 1) for _ in range(n + 2)]
    for i in range(2, n + 3):
        row_ground = delete(ground, i)
        for j in range(2, n + 2):
            rows[i - 1][j - 1] = B.cell_over(delete(row_ground, j))
        rows[i - 1][0] = horn_fill(H, [None] + rows[i - 1][1:], 1)
    for j in range(1, n + 2):
        rows[0][j - 1] = rows[j][0]
    return SimplexFamily(ground, tuple(tuple(r) for r in rows))


def _require_action(H):
    if not H.has_action:
        raise PreconditionError("defects need a group action")


def defect_of_tuple(H: Polygroupoid, rho):
    _require_action(H)
    rho = tuple(rho)
    if len(rho) != H.n + 1 or not is_compatible(H, rho):
        raise PreconditionError("defects are defined on compatible tuples only")
    x = horn_fill(H, rho[:-1] + (None,), H.n + 1)
    return H.difference(rho[-1], x)


def defect_of_family(H: Polygroupoid, tau: SimplexFamily):
    G = H.group
    total = G.zero
    for i, row in enumerate(tau.rows, start=1):
        d = defect_of_tuple(H, row)
        total = G.add(total, d if i % 2 == 0 else G.neg(d))
    return total


def _diff_table(H, w):
    """``table[z, y]`` is the index of the g with g.z = y inside fiber(w)."""
    G = H.group
    size = len(H.fiber(w))
    table = np.full((size, size), -1, dtype=np.int64)
    for gi, g in enumerate(G.elements):
        table[np.arange(size), H.action_perm(w, g)] = gi
    return table


def defect_tensor(H: Polygroupoid, ground) -> np.ndarray:
    """Defect indices over all assignments of one ground; -1 where incompatible."""
    ground = tuple(ground)
    q = H.q_tensor(ground)
    ct = H.compat_tensor(ground)
    last = faces(ground)[-1]
    has = q.any(axis=-1)
    y = np.argmax(q, axis=-1)
    table = _diff_table(H, last)
    d = table[np.arange(q.shape[-1]).reshape([1] * (q.ndim - 1) + [-1]), y[..., None]]
    d = np.where(ct, d, -1)
    if (ct & ~has[..., None]).any():
        raise UnfillableError(f"some compatible tuple over {ground} has no defect")
    return d


@dataclass
class DefectCertificate:
    value: tuple | None
    constant: bool
    grounds_checked: int
    witness: tuple | None = None


def _signed(G, idx, sign):
    return idx if sign > 0 else G.neg_table[idx]


def _grid_ground_value(H, layout, b, D):
    """Exact constancy test over a product grid of families; returns the value or None."""
    G = H.group
    n2 = H.n + 2
    signs = [(-1) ** (l + 1) for l in range(n2)]
    for e in layout.pairs:
        r1, r2 = e
        vars_ = sorted(set(layout.rows[r1]) | set(layout.rows[r2]))
        pos = {p: k for k, p in enumerate(vars_)}
        total = None
        for r in (r1, r2):
            t = _signed(G, D[r], signs[r])
            shape = [1] * len(vars_)
            perm_axes = [pos[p] for p in layout.rows[r]]
            order = np.argsort(perm_axes)
            t = np.transpose(t, order)
            for k, ax in enumerate(sorted(perm_axes)):
                shape[ax] = t.shape[k]
            t = t.reshape(shape)
            total = t if total is None else G.add_table[total, t]
        ax = pos[e]
        first = np.take(total, [0], axis=ax)
        if not (total == first).all():
            return None
    idx0 = 0
    for l in range(n2):
        v = int(_signed(G, D[l][(0,) * D[l].ndim], signs[l]))
        idx0 = int(G.add_table[idx0, v])
    return G.elements[idx0]


def _full_ground_values(H, layout, b, D, C):
    G = H.group
    sizes = {}
    for l, row in enumerate(layout.rows):
        for p, s in zip(row, D[l].shape):
            sizes[p] = s
    total_size = int(np.prod([sizes[p] for p in layout.pairs]))
    if total_size > MAX_FAMILY_GRID:
        raise CapacityError(f"{total_size} families over one ground exceed the bound", count=total_size,
                            bound=MAX_FAMILY_GRID)
    pos = {p: k for k, p in enumerate(layout.pairs)}
    total = np.zeros([1] * len(pos), dtype=np.int64)
    mask = np.ones([1] * len(pos), dtype=bool)
    for l, row in enumerate(layout.rows):
        shape = [1] * len(pos)
        for p in row:
            shape[pos[p]] = sizes[p]
        order = np.argsort([pos[p] for p in row])
        d = np.transpose(D[l], order).reshape(shape)
        c = np.transpose(C[l], order).reshape(shape)
        mask = mask & c
        total = G.add_table[total, _signed(G, np.where(d < 0, 0, d), (-1) ** (l + 1))]
    vals = np.unique(np.broadcast_to(total, mask.shape)[mask])
    return [G.elements[int(v)] for v in vals]


def certify_defect_constancy(H: Polygroupoid, grounds=None) -> DefectCertificate:
    """Check that every simplex family of ``H`` has the same defect."""
    _require_action(H)
    layout = _FamilyLayout(H.n)
    value = None
    count = 0
    for b in (H.grounds(H.n + 2) if grounds is None else grounds):
        b = tuple(b)
        count += 1
        row_grounds = [delete(b, l + 1) for l in range(H.n + 2)]
        D = [defect_tensor(H, a) for a in row_grounds]
        C = [H.compat_tensor(a) for a in row_grounds]
        if all(c.all() for c in C):
            v = _grid_ground_value(H, layout, b, D)
            vals = [v] if v is not None else None
            if vals is None:
                vals = _full_ground_values(H, layout, b, D, C)
        else:
            vals = _full_ground_values(H, layout, b, D, C)
        if len(vals) > 1:
            return DefectCertificate(None, False, count, (b, tuple(vals)))
        if not vals:
            continue
        if value is None:
            value = vals[0]
        elif vals[0] != value:
            return DefectCertificate(None, False, count, (b, (value, vals[0])))
    return DefectCertificate(value, True, count)


def structure_defect(H: Polygroupoid, certify: bool = True):
    """The common defect of all simplex families, read off the least ground."""
    _require_action(H)
    if H.m < H.n + 2:
        raise CapacityError(f"families need {H.n + 2} vertices, structure has {H.m}", count=H.m, bound=H.n + 2)
    cert = None
    if certify:
        cert = getattr(H, "_defect_certificate", None)
        if cert is None:
            cert = certify_defect_constancy(H)
            H._defect_certificate = cert
        if not cert.constant:
            raise PreconditionError(f"family defects are not constant: {cert.witness}")
    ground = next(iter(H.grounds(H.n + 2)))
    value = defect_of_family(H, build_simplex_family(H, ground))
    if cert is not None and cert.value is not None and cert.value != value:
        raise StructuralError("canonical family disagrees with the certified defect")
    return value


def twist(H: Polygroupoid, g) -> ExplicitPolygroupoid:
    """Replace Q by Q_g, where Q_g(p) iff Q(p_1, ..., p_n, p_{n+1} - g)."""
    _require_action(H)
    g = H.group.check(g)
    E = H if isinstance(H, ExplicitPolygroupoid) else to_explicit(H)
    return E.with_q(tup[:-1] + (E.act(g, tup[-1]),) for tup in E.q_set)
