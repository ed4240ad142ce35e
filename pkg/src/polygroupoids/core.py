"""The multi-sorted data model and the exhaustive axiom checker.

Vertices are plain integers.  A cell of level ``k >= 2`` is a :class:`Cell`
carrying its spine, the ordered ``k``-tuple of vertices it lies over.  The
``i``-th projection of a cell over ``w`` lies over ``w`` with its ``i``-th
entry deleted; at level 2 the projections of a cell over ``(a, b)`` are the
vertices ``(b, a)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import perms
from .errors import CapacityError, StructuralError
from .groups import GroupSpec, sign_scale

MAX_CHECK_VERTICES = 8
MAX_CHECK_GROUP = 64

FAMILIES = ("quasigroupoid", "connected", "locally_finite", "associative",
            "regular_action", "inverses")


@dataclass(frozen=True, order=True)
class Cell:
    level: int
    spine: tuple
    label: object = None

    def __repr__(self):
        return f"Cell({self.level}, {self.spine}, {self.label!r})"


def delete(w, i) -> tuple:
    """Drop the ``i``-th entry (1-based) of ``w``."""
    return tuple(w[: i - 1]) + tuple(w[i:])


def faces(w) -> list:
    return [delete(w, i) for i in range(1, len(w) + 1)]


def level_of(x) -> int:
    return 1 if isinstance(x, (int, np.integer)) else x.level


def spine_of(x) -> tuple:
    return (int(x),) if isinstance(x, (int, np.integer)) else x.spine


def ground_from_spines(spines):
    """The ``(k+1)``-tuple whose faces are ``spines``, or ``None``."""
    if len(spines) < 2:
        return None
    first, second = spines[0], spines[1]
    if not second:
        return None
    ground = (second[0],) + tuple(first)
    if len(set(ground)) != len(ground):
        return None
    if any(delete(ground, k + 1) != tuple(s) for k, s in enumerate(spines)):
        return None
    return ground


class Polygroupoid:
    """Shared behaviour of every structure law.

    Subclasses provide ``fiber``, ``project``, ``q_holds`` and optionally
    ``act`` and ``iota``.  Everything else (tensors, enumeration) is derived.
    """

    law = "abstract"
    n: int
    names: tuple
    vertex_ids: tuple
    group: GroupSpec | None

    def __init__(self):
        self._qt_cache = {}
        self._ct_cache = {}
        self._index_cache = {}
        self._act_cache = {}
        self._iota_cache = {}

    # basic shape

    @property
    def m(self) -> int:
        return len(self.vertex_ids)

    @property
    def has_action(self) -> bool:
        return False

    @property
    def has_inverses(self) -> bool:
        return False

    def name(self, v) -> str:
        return self.names[v]

    def check_spine(self, w) -> tuple:
        w = tuple(int(x) for x in w)
        if not 1 <= len(w) <= self.n:
            raise StructuralError(f"spine {w} has length outside [1, {self.n}]")
        if len(set(w)) != len(w):
            raise StructuralError(f"spine {w} repeats a vertex")
        allowed = set(self.vertex_ids)
        if any(x not in allowed for x in w):
            raise StructuralError(f"spine {w} uses vertices outside the structure")
        return w

    def spines(self, k: int):
        return itertools.permutations(self.vertex_ids, k)

    def grounds(self, size: int | None = None):
        return self.spines(self.n + 1 if size is None else size)

    def cells(self, level: int | None = None):
        level = self.n if level is None else level
        if level == 1:
            yield from self.vertex_ids
            return
        for w in self.spines(level):
            yield from self.fiber(w)

    def fiber_index(self, f) -> int:
        key = f.spine
        table = self._index_cache.get(key)
        if table is None:
            table = {c: i for i, c in enumerate(self.fiber(key))}
            self._index_cache[key] = table
        return table[f]

    def ground_of(self, cells):
        return ground_from_spines([spine_of(c) for c in cells])

    # interface for subclasses

    def fiber(self, w) -> tuple:
        raise NotImplementedError

    def project(self, f) -> tuple:
        raise NotImplementedError

    def q_holds(self, cells) -> bool:
        raise NotImplementedError

    def act(self, g, f):
        raise StructuralError("structure carries no group action")

    def iota(self, sigma, f):
        raise StructuralError("structure carries no inverse maps")

    # tensors over a ground tuple of n+1 vertices

    def q_tensor(self, ground) -> np.ndarray:
        ground = tuple(ground)
        t = self._qt_cache.get(ground)
        if t is None:
            t = self._build_q_tensor(ground)
            t.setflags(write=False)
            self._qt_cache[ground] = t
        return t

    def compat_tensor(self, ground) -> np.ndarray:
        ground = tuple(ground)
        t = self._ct_cache.get(ground)
        if t is None:
            t = self._build_compat_tensor(ground)
            t.setflags(write=False)
            self._ct_cache[ground] = t
        return t

    def _build_q_tensor(self, ground) -> np.ndarray:
        fibs = [self.fiber(s) for s in faces(ground)]
        t = np.zeros([len(f) for f in fibs], dtype=bool)
        for idx in itertools.product(*(range(len(f)) for f in fibs)):
            t[idx] = self.q_holds(tuple(f[i] for f, i in zip(fibs, idx)))
        return t

    def _build_compat_tensor(self, ground) -> np.ndarray:
        fibs = [self.fiber(s) for s in faces(ground)]
        k = len(fibs)
        t = np.ones([len(f) for f in fibs], dtype=bool)
        projs = [[self.project(c) for c in f] for f in fibs]
        for i in range(k):
            for j in range(i + 1, k):
                # pi_i(f_j) == pi_{j-1}(f_i), 1-based
                mat = np.array([[pj[i] == pi[j - 1] for pj in projs[j]] for pi in projs[i]],
                               dtype=bool).reshape(len(fibs[i]), len(fibs[j]))
                shape = [1] * k
                shape[i], shape[j] = len(fibs[i]), len(fibs[j])
                t &= mat.reshape(shape)
        return t

    def action_perm(self, w, g) -> np.ndarray:
        """Fiber indices of ``g . f`` for ``f`` running over ``fiber(w)``."""
        key = (tuple(w), tuple(g))
        arr = self._act_cache.get(key)
        if arr is None:
            fib = self.fiber(w)
            arr = np.array([self.fiber_index(self.act(g, f)) for f in fib], dtype=np.int64)
            self._act_cache[key] = arr
        return arr

    def iota_perm(self, sigma, w) -> np.ndarray:
        """Indices in ``fiber(sigma . w)`` of ``iota_sigma(f)`` for ``f`` over ``w``."""
        key = (tuple(sigma), tuple(w))
        arr = self._iota_cache.get(key)
        if arr is None:
            arr = np.array([self.fiber_index(self.iota(sigma, f)) for f in self.fiber(w)], dtype=np.int64)
            self._iota_cache[key] = arr
        return arr

    def iota_table(self, sigma, spines) -> np.ndarray:
        """``iota_perm`` stacked over ``spines``, one row each."""
        return np.stack([self.iota_perm(sigma, w) for w in spines])

    def iter_q_tuples(self, ground=None):
        grounds = [tuple(ground)] if ground is not None else self.grounds()
        for a in grounds:
            t = self.q_tensor(a)
            fibs = [self.fiber(s) for s in faces(a)]
            for idx in zip(*np.nonzero(t)):
                yield tuple(f[i] for f, i in zip(fibs, idx))

    def difference(self, x, f):
        """The unique ``g`` with ``g . x == f`` for two cells in one fiber."""
        for g in self.group.elements:
            if self.act(g, x) == f:
                return g
        raise StructuralError(f"{f} is not in the orbit of {x}")

    def signature(self):
        raise NotImplementedError


class ExplicitPolygroupoid(Polygroupoid):
    """A structure given entirely by tables.

    ``fibers`` maps ``(level, spine)`` to the number of cells over the spine;
    the cells are ``Cell(level, spine, 0..count-1)``.  ``projections`` maps
    each cell of level >= 3 to its tuple of lower cells.  ``q`` lists the
    ``(n+1)``-tuples satisfying Q.  ``action`` maps ``(g, cell)`` and
    ``inverses`` maps ``(sigma, cell)`` to cells; either may be omitted.
    """

    law = "explicit"

    def __init__(self, n, names, group, fibers, projections=None, q=(), action=None,
                 inverses=None, cell_names=None):
        super().__init__()
        if n < 2:
            raise StructuralError("arity must be at least 2")
        self.n = int(n)
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise StructuralError("vertex names must be distinct")
        self.vertex_ids = tuple(range(len(self.names)))
        self.group = group
        self._fibers = {}
        for (level, w), count in fibers.items():
            w = self.check_spine(w)
            if len(w) != level or not 2 <= level <= self.n:
                raise StructuralError(f"fiber over {w} declared at bad level {level}")
            if count < 0:
                raise StructuralError(f"negative fiber size over {w}")
            self._fibers[(level, w)] = tuple(Cell(level, w, i) for i in range(count))
        self._proj = {}
        projections = projections or {}
        for level in range(2, self.n + 1):
            for w in self.spines(level):
                for c in self.fiber(w):
                    if level == 2:
                        self._proj[c] = (w[1], w[0])
                        continue
                    if c not in projections:
                        raise StructuralError(f"cell {c} has no projection row")
                    row = tuple(projections[c])
                    if len(row) != level:
                        raise StructuralError(f"projection row of {c} has {len(row)} entries")
                    for i, lower in enumerate(row, start=1):
                        if level_of(lower) != level - 1 or lower not in self.fiber(delete(w, i)):
                            raise StructuralError(f"projection {i} of {c} is not over {delete(w, i)}")
                    self._proj[c] = row
        extra = set(projections) - set(self._proj)
        if extra:
            raise StructuralError(f"projection rows for unknown cells: {sorted(extra)[:3]}")
        top = set(self.cells(self.n))
        self._q = set()
        self._q_by_ground = {}
        self._stray_q = []
        for tup in q:
            tup = tuple(tup)
            if len(tup) != self.n + 1 or any(c not in top for c in tup):
                raise StructuralError(f"Q tuple {tup} does not consist of {self.n + 1} top cells")
            self._q.add(tup)
            ground = self.ground_of(tup)
            if ground is None:
                self._stray_q.append(tup)
            else:
                self._q_by_ground.setdefault(ground, []).append(tup)
        self._q = frozenset(self._q)
        self._action = None
        if action is not None:
            if group is None:
                raise StructuralError("an action needs a group")
            action = {(tuple(g), c): v for (g, c), v in action.items()}
            for g in group.elements:
                for c in top:
                    if (g, c) not in action:
                        raise StructuralError(f"action table misses {GroupSpec.format_element(g)} on {c}")
                    if action[(g, c)] not in top:
                        raise StructuralError(f"action sends {c} outside the top sort")
            self._action = action
        self._inverses = None
        if inverses is not None:
            inverses = {(tuple(s), c): v for (s, c), v in inverses.items()}
            for s in perms.all_perms(self.n):
                for c in top:
                    if (s, c) not in inverses:
                        raise StructuralError(f"inverse table misses {perms.format_perm(s)} on {c}")
                    if inverses[(s, c)] not in top:
                        raise StructuralError(f"inverse map sends {c} outside the top sort")
            self._inverses = inverses
        self.cell_names = dict(cell_names) if cell_names else None

    @property
    def has_action(self) -> bool:
        return self._action is not None

    @property
    def has_inverses(self) -> bool:
        return self._inverses is not None

    def fiber(self, w) -> tuple:
        w = tuple(w)
        if len(w) == 1:
            return (w[0],)
        return self._fibers.get((len(w), w), ())

    def project(self, f) -> tuple:
        return self._proj[f]

    def q_holds(self, cells) -> bool:
        return tuple(cells) in self._q

    def fiber_counts(self) -> dict:
        return {key: len(cells) for key, cells in self._fibers.items()}

    def projection_rows(self) -> dict:
        return {c: row for c, row in self._proj.items() if c.level >= 3}

    def with_q(self, q) -> ExplicitPolygroupoid:
        """A copy with the Q relation replaced."""
        return ExplicitPolygroupoid(self.n, self.names, self.group, self.fiber_counts(),
                                    self.projection_rows(), q, self._action, self._inverses,
                                    self.cell_names)

    @property
    def action_table(self):
        return self._action

    @property
    def inverse_table(self):
        return self._inverses

    @property
    def q_set(self) -> frozenset:
        return self._q

    @property
    def stray_q(self) -> list:
        return list(self._stray_q)

    def act(self, g, f):
        if self._action is None:
            return super().act(g, f)
        if f.level != self.n:
            raise StructuralError("the group acts on top cells only")
        return self._action[(tuple(g), f)]

    def iota(self, sigma, f):
        if self._inverses is None:
            return super().iota(sigma, f)
        return self._inverses[(tuple(sigma), f)]

    def _build_q_tensor(self, ground) -> np.ndarray:
        fibs = [self.fiber(s) for s in faces(ground)]
        t = np.zeros([len(f) for f in fibs], dtype=bool)
        for tup in self._q_by_ground.get(ground, ()):
            t[tuple(self.fiber_index(c) for c in tup)] = True
        return t

    def signature(self):
        return ("explicit", self.n, self.names, self.group, tuple(sorted(self._fibers.items())),
                tuple(sorted(self._proj.items())), self._q,
                None if self._action is None else frozenset(self._action.items()),
                None if self._inverses is None else frozenset(self._inverses.items()))

    def __eq__(self, other):
        return isinstance(other, ExplicitPolygroupoid) and self.signature() == other.signature()

    def __hash__(self):
        return hash((self.n, self.names, len(self._q)))


class SubPolygroupoid(Polygroupoid):
    """The closure of a vertex set inside a parent structure."""

    def __init__(self, parent: Polygroupoid, vertices):
        super().__init__()
        while isinstance(parent, SubPolygroupoid):
            parent = parent.parent
        self.parent = parent
        self.n = parent.n
        self.names = parent.names
        self.group = parent.group
        self.vertex_ids = tuple(sorted(set(int(v) for v in vertices)))
        self.law = parent.law

    @property
    def has_action(self):
        return self.parent.has_action

    @property
    def has_inverses(self):
        return self.parent.has_inverses

    def fiber(self, w):
        if any(x not in self.vertex_ids for x in w):
            return ()
        return self.parent.fiber(w)

    def project(self, f):
        return self.parent.project(f)

    def q_holds(self, cells):
        return self.parent.q_holds(cells)

    def act(self, g, f):
        return self.parent.act(g, f)

    def iota(self, sigma, f):
        return self.parent.iota(sigma, f)

    def q_tensor(self, ground):
        return self.parent.q_tensor(ground)

    def compat_tensor(self, ground):
        return self.parent.compat_tensor(ground)

    def contains(self, x) -> bool:
        return set(spine_of(x)) <= set(self.vertex_ids)

    def __eq__(self, other):
        return (isinstance(other, SubPolygroupoid) and other.parent is self.parent
                and other.vertex_ids == self.vertex_ids)

    def __hash__(self):
        return hash((id(self.parent), self.vertex_ids))


# public operations


def is_compatible(H: Polygroupoid, cells) -> bool:
    cells = tuple(cells)
    levels = {level_of(c) for c in cells}
    if len(levels) > 1:
        raise StructuralError(f"mixed levels {sorted(levels)} in a compatibility test")
    if not cells:
        return False
    k = levels.pop()
    if len(cells) != k + 1:
        return False
    if k == 1:
        return cells[0] != cells[1]
    projs = [H.project(c) for c in cells]
    for i in range(1, k + 2):
        for j in range(i + 1, k + 2):
            if projs[j - 1][i - 1] != projs[i - 1][j - 2]:
                return False
    return True


def support_of(H: Polygroupoid, X) -> set:
    out = set()
    for x in X:
        if level_of(x) == 1:
            out.add(int(x))
            continue
        frontier = [x]
        while frontier:
            y = frontier.pop()
            if level_of(y) == 1:
                out.add(int(y))
            else:
                frontier.extend(H.project(y))
    return out


def closure_of(H: Polygroupoid, X) -> SubPolygroupoid:
    return SubPolygroupoid(H, support_of(H, X))


def fiber_of(H: Polygroupoid, w) -> tuple:
    w = H.check_spine(w)
    if len(w) < 2:
        raise StructuralError("fibers live over tuples of length >= 2")
    return H.fiber(w)


def q_holds(H: Polygroupoid, cells) -> bool:
    return H.q_holds(tuple(cells))


# axiom checking


@dataclass
class Verdict:
    family: str
    status: str  # "pass", "fail" or "skip"
    message: str = ""
    witness: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.status != "fail"


@dataclass
class AxiomReport:
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def __getitem__(self, family) -> Verdict:
        return self.verdicts[family]

    def failures(self) -> list:
        return [v for v in self.verdicts.values() if v.status == "fail"]


def _cells_at(fibs, idx):
    return tuple(f[int(i)] for f, i in zip(fibs, idx))


def _check_quasigroupoid(H):
    for level in range(2, H.n + 1):
        for w in H.spines(level):
            for c in H.fiber(w):
                row = H.project(c)
                if len(row) != level or not is_compatible(H, row):
                    return Verdict("quasigroupoid", "fail", f"projections of {c} are not compatible", (c,) + tuple(row))
                for i, lower in enumerate(row, start=1):
                    if spine_of(lower) != delete(w, i):
                        return Verdict("quasigroupoid", "fail", f"projection {i} of {c} is not over {delete(w, i)}", (c,))
    stray = getattr(H, "stray_q", [])
    if stray:
        return Verdict("quasigroupoid", "fail", "Q holds on an incompatible tuple", stray[0])
    for a in H.grounds():
        q = H.q_tensor(a)
        ct = H.compat_tensor(a)
        fibs = [H.fiber(s) for s in faces(a)]
        bad = q & ~ct
        if bad.any():
            idx = np.argwhere(bad)[0]
            return Verdict("quasigroupoid", "fail", "Q holds on an incompatible tuple", _cells_at(fibs, idx))
        for ax in range(q.ndim):
            counts = q.sum(axis=ax)
            if (counts > 1).any():
                rest = list(np.argwhere(counts > 1)[0])
                hits = [i for i in range(q.shape[ax]) if q[tuple(rest[:ax] + [i] + rest[ax:])]]
                idx = rest[:ax] + [hits[0]] + rest[ax:]
                other = fibs[ax][hits[1]]
                return Verdict("quasigroupoid", "fail",
                               f"horn at position {ax + 1} has two fillers", _cells_at(fibs, idx) + (other,))
    return Verdict("quasigroupoid", "pass")


def _check_connected(H):
    for i in range(1, H.n):
        for w in H.spines(i + 1):
            images = {tuple(H.project(c)) for c in H.fiber(w)}
            face_fibs = [H.fiber(s) for s in faces(w)]
            for tup in itertools.product(*face_fibs):
                if tup not in images and is_compatible(H, tup):
                    return Verdict("connected", "fail", f"compatible tuple over {w} has no cell above it", tup)
    for a in H.grounds():
        q = H.q_tensor(a)
        ct = H.compat_tensor(a)
        fibs = [H.fiber(s) for s in faces(a)]
        for ax in range(q.ndim):
            missing = ct.any(axis=ax) & ~q.any(axis=ax)
            if missing.any():
                rest = list(np.argwhere(missing)[0])
                full = next(i for i in range(ct.shape[ax]) if ct[tuple(rest[:ax] + [i] + rest[ax:])])
                return Verdict("connected", "fail", f"horn at position {ax + 1} has no filler",
                               _cells_at(fibs, rest[:ax] + [full] + rest[ax:]))
    return Verdict("connected", "pass")


class _FamilyLayout:
    """Index bookkeeping for the (n+2)-families over one ground.

    The family variable shared by rows ``r`` and ``c`` (0-based, r < c) is the
    cell over the ground with positions ``r`` and ``c`` deleted.  Row ``l``
    lists these variables in the column order of its face.
    """

    _cache = {}

    def __new__(cls, n):
        if n in cls._cache:
            return cls._cache[n]
        self = super().__new__(cls)
        size = n +2
        self.n = n
        self.pairs = [(r, c) for r in range(size) for c in range(r + 1, size)]
        self.letter = {p: chr(ord("a") + k) if k < 26 else chr(ord("A") + k - 26)
                       for k, p in enumerate(self.pairs)}
        self.rows = []
        for l in range(size):
            row = []
            for j in range(n + 1):
                jj = j if j < l else j + 1
                row.append((min(l, jj), max(l, jj)))
            self.rows.append(row)
        self.subs = ["".join(self.letter[p] for p in row) for row in self.rows]
        self.paths = {}
        cls._cache[n] = self
        return self

    def pair_spine(self, ground, pair):
        r, c = pair
        return tuple(x for k, x in enumerate(ground) if k not in (r, c))

    def row_ground(self, ground, l):
        return delete(ground, l + 1)


def _einsum_count(layout, key, subs, operands):
    expr = ",".join(subs) + "->"
    path = layout.paths.get((key, expr))
    if path is None:
        path = np.einsum_path(expr, *operands, optimize=("greedy", 1e7))[0]
        layout.paths[(key, expr)] = path
    return float(np.einsum(expr, *operands, optimize=path))


def _first_assignment(layout, subs, operands, sizes):
    """A variable assignment where every operand is nonzero."""
    fixed = {}
    ops = list(operands)
    for p in layout.pairs:
        ch = layout.letter[p]
        for v in range(sizes[p]):
            trial = []
            for s, op in zip(subs, ops):
                if ch in s:
                    trial.append(np.take(op, [v], axis=s.index(ch)))
                else:
                    trial.append(op)
            if float(np.einsum(",".join(subs) + "->", *trial, optimize="greedy")) > 0:
                ops = trial
                fixed[p] = v
                break
    return fixed


def _check_associative(H):
    layout = _FamilyLayout(H.n)
    for b in H.grounds(H.n + 2):
        rows_q = [H.q_tensor(layout.row_ground(b, l)).astype(np.float64) for l in range(H.n + 2)]
        rows_c = [H.compat_tensor(layout.row_ground(b, l)) for l in range(H.n + 2)]
        key = tuple(t.shape for t in rows_q)
        for l in range(H.n + 2):
            bad = (rows_c[l] & ~H.q_tensor(layout.row_ground(b, l))).astype(np.float64)
            operands = [rows_q[r] if r != l else bad for r in range(H.n + 2)]
            if _einsum_count(layout, key, layout.subs, operands) > 0:
                sizes = {p: len(H.fiber(layout.pair_spine(b, p))) for p in layout.pairs}
                fixed = _first_assignment(layout, layout.subs, operands, sizes)
                cells = {p: H.fiber(layout.pair_spine(b, p))[fixed[p]] for p in layout.pairs}
                rows = tuple(tuple(cells[p] for p in layout.rows[r]) for r in range(H.n + 2))
                return Verdict("associative", "fail",
                               f"family over {b}: Q holds on every row but row {l + 1}", rows)
    return Verdict("associative", "pass")


def _check_regular_action(H):
    if not H.has_action:
        return Verdict("regular_action", "skip", "no action tables")
    G = H.group
    zero = G.zero
    for w in H.spines(H.n):
        fib = H.fiber(w)
        for f in fib:
            if H.act(zero, f) != f:
                return Verdict("regular_action", "fail", "zero does not act trivially", (f,))
            orbit = []
            for g in G.elements:
                x = H.act(g, f)
                if x.spine != f.spine or H.project(x) != H.project(f):
                    return Verdict("regular_action", "fail", f"{G.format_element(g)} moves {f} off its fiber", (f, x))
                orbit.append(x)
                for h in G.basis():
                    if H.act(h, x) != H.act(G.add(h, g), f):
                        return Verdict("regular_action", "fail", "action is not compatible with addition", (f, x))
            same = [x for x in fib if H.project(x) == H.project(f)]
            if len(set(orbit)) != len(orbit) or set(orbit) != set(same):
                return Verdict("regular_action", "fail", f"action is not regular on the fiber of {f}", (f,))
    for a in H.grounds():
        q = H.q_tensor(a)
        if not q.any():
            continue
        fspines = faces(a)
        for g in G.elements:
            for i in range(H.n):
                moved = np.take(q, H.action_perm(fspines[i], g), axis=i)
                moved = np.take(moved, H.action_perm(fspines[i + 1], g), axis=i + 1)
                bad = q & ~moved
                if bad.any():
                    fibs = [H.fiber(s) for s in fspines]
                    return Verdict("regular_action", "fail",
                                   f"acting by {G.format_element(g)} on positions {i + 1},{i + 2} breaks Q",
                                   _cells_at(fibs, np.argwhere(bad)[0]))
    return Verdict("regular_action", "pass")


def _check_inverses(H):
    if not H.has_inverses:
        return Verdict("inverses", "skip", "no inverse tables")
    n = H.n
    allp = perms.all_perms(n)
    ident = perms.identity(n)
    for w in H.spines(n):
        fib = H.fiber(w)
        for s in allp:
            image = [H.iota(s, f) for f in fib]
            target = perms.apply(s, w)
            if any(x.spine != target for x in image) or len(set(image)) != len(fib) or len(fib) != len(H.fiber(target)):
                return Verdict("inverses", "fail", f"iota {perms.format_perm(s)} is not a bijection onto the fiber over {target}", fib)
        for f in fib:
            if H.iota(ident, f) != f:
                return Verdict("inverses", "fail", "identity inverse map moves a cell", (f,))
            img = {s: H.iota(s, f) for s in allp}
            for s in allp:
                for t in allp:
                    if H.iota(s, img[t]) != img[perms.perm_product(s, t)]:
                        return Verdict("inverses", "fail",
                                       f"iota {perms.format_perm(s)} after {perms.format_perm(t)} disagrees with the product", (f,))
            if H.has_action:
                for s in allp:
                    par = perms.parity(s)
                    for g in H.group.elements:
                        lhs = H.iota(s, H.act(g, f))
                        rhs = H.act(sign_scale(par, g, H.group), img[s])
                        if lhs != rhs:
                            return Verdict("inverses", "fail", "inverse maps do not twist the action by the sign", (f,))
    for tup in H.iter_q_tuples():
        for i in range(1, n):
            moved = transposed_tuple(H, tup, i)
            if not H.q_holds(moved):
                return Verdict("inverses", "fail", f"swapping faces {i},{i + 1} breaks Q", tup)
    return Verdict("inverses", "pass")


def transposed_tuple(H, tup, i):
    """The tuple obtained from a Q-tuple by swapping ground entries ``i, i+1`` (1-based)."""
    n = H.n
    out = []
    for k in range(1, n + 2):
        if k < i:
            out.append(H.iota(perms.transposition(n, i - 2), tup[k - 1]))
        elif k == i:
            out.append(tup[i])
        elif k == i + 1:
            out.append(tup[i - 1])
        else:
            out.append(H.iota(perms.transposition(n, i - 1), tup[k - 1]))
    return tuple(out)


_CHECKERS = {
    "quasigroupoid": _check_quasigroupoid,
    "connected": _check_connected,
    "locally_finite": lambda H: Verdict("locally_finite", "pass", "finite tables"),
    "associative": _check_associative,
    "regular_action": _check_regular_action,
    "inverses": _check_inverses,
}


def check_axioms(H: Polygroupoid, which=None, max_vertices: int = MAX_CHECK_VERTICES,
                 max_group: int = MAX_CHECK_GROUP) -> AxiomReport:
    which = FAMILIES if which is None else tuple(which)
    unknown = set(which) - set(FAMILIES)
    if unknown:
        raise StructuralError(f"unknown axiom families {sorted(unknown)}")
    if H.m > max_vertices:
        raise CapacityError(f"{H.m} vertices exceed the exhaustive bound {max_vertices}",
                            count=H.m, bound=max_vertices)
    if H.group is not None and H.group.order > max_group:
        raise CapacityError(f"group of order {H.group.order} exceeds bound {max_group}",
                            count=H.group.order, bound=max_group)
    report = AxiomReport()
    for fam in FAMILIES:
        if fam in which:
            report.verdicts[fam] = _CHECKERS[fam](H)
    return report
