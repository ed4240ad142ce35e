"""Amalgamation problems over a standard model.

A problem is a family of vertex blocks over a base inside one ambient
H_{G,n}.  Faces are the closures of the base with some proper subfamily of
blocks.  Solutions keep the faces as they are and may relabel Q on the
grounds that no face contains: the relabelling ``h`` must be alternating
and a cocycle, otherwise the result is not a polygroupoid.  Two solutions
are isomorphic over the faces exactly when their difference is the
coboundary of a shift vanishing on face spines.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import perms
from .core import Cell, Polygroupoid, delete, faces, support_of
from .errors import CapacityError, PreconditionError, StructuralError
from .filling import horn_fill
from .morphisms import Star, StructureMap, certify, default_solution, star_isomorphism, automorphism_from_star, realize
from .standard import StandardPolygroupoid
from .zmod import kernel_mod, solve_mod

DEFAULT_BUDGET = 10**5
ENUMERATE_LIMIT = 256


def closure_set(H: Polygroupoid, X) -> frozenset:
    verts = support_of(H, X)
    out = set(verts)
    for k in range(2, H.n + 1):
        for w in itertools.permutations(sorted(verts), k):
            out.update(H.fiber(w))
    return frozenset(out)


def independent(H: Polygroupoid, A, B, C) -> bool:
    """Whether ``cl(A u B)`` and ``cl(C u B)`` meet exactly in ``cl(B)``."""
    A, B, C = set(A), set(B), set(C)
    return closure_set(H, A | B) & closure_set(H, C | B) == closure_set(H, B)


class LabelledStandard(StandardPolygroupoid):
    """The standard model on a vertex subset with Q shifted by ``h`` on chosen grounds.

    ``h`` is keyed by increasing (n+1)-tuples; on a reordered ground the
    shift picks up the sign of the reordering.
    """

    law = "labelled"

    def __init__(self, n, group, names, vertex_ids, hmap=None):
        super().__init__(n, group, names)
        self.vertex_ids = tuple(sorted(vertex_ids))
        self.hmap = {tuple(k): tuple(v) for k, v in (hmap or {}).items() if any(v)}

    def shift(self, ground):
        b, sigma = perms.sorting_perm(ground)
        h = self.hmap.get(b)
        if h is None:
            return self.group.zero
        return self.group.neg(h) if perms.parity(sigma) else h

    def q_holds(self, cells) -> bool:
        cells = tuple(cells)
        if len(cells) != self.n + 1 or any(c.level != self.n for c in cells):
            return False
        from .core import ground_from_spines

        ground = ground_from_spines([c.spine for c in cells])
        if ground is None or any(v not in self.vertex_ids for v in ground):
            return False
        G = self.group
        total = G.zero
        for i, c in enumerate(cells, start=1):
            total = G.add(total, c.label if i % 2 == 0 else G.neg(c.label))
        return total == self.shift(ground)

    def _build_q_tensor(self, ground):
        return self._labels() == self.group.index(self.shift(ground))

    def signature(self):
        return ("labelled", self.n, self.group, self.names, self.vertex_ids, tuple(sorted(self.hmap.items())))

    def __eq__(self, other):
        return isinstance(other, LabelledStandard) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())


@dataclass
class AmalgamationProblem:
    H: Polygroupoid
    blocks: tuple
    base: frozenset = frozenset()

    def __post_init__(self):
        self.blocks = tuple(frozenset(int(v) for v in b) for b in self.blocks)
        self.base = frozenset(int(v) for v in self.base)
        if not self.blocks:
            raise PreconditionError("an amalgamation problem needs at least one block")
        if any(not b for b in self.blocks):
            raise PreconditionError("blocks must be nonempty")
        seen = set(self.base)
        for b in self.blocks:
            if seen & b:
                raise PreconditionError("blocks and base must be pairwise disjoint")
            seen |= b
        missing = seen - set(self.H.vertex_ids)
        if missing:
            raise CapacityError(f"vertices {sorted(missing)} are not in the structure", count=len(seen), bound=self.H.m)
        if not isinstance(self.H, StandardPolygroupoid):
            raise PreconditionError("amalgamation problems are posed over standard models")

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def vertices(self) -> frozenset:
        return self.base.union(*self.blocks)

    def face(self, s) -> frozenset:
        return self.base.union(*(self.blocks[i] for i in s))

    def index_sets(self):
        """Every proper subset of the block indices."""
        for r in range(self.k):
            yield from (frozenset(c) for c in itertools.combinations(range(self.k), r))

    def faces(self) -> dict:
        return {s: self.face(s) for s in self.index_sets()}

    def transitions(self):
        """Pairs ``(s, t)`` with ``s`` inside ``t``; every transition is an inclusion."""
        sets = list(self.index_sets())
        return [(s, t) for s in sets for t in sets if s <= t]

    def in_face(self, X) -> bool:
        X = set(X)
        return any(not (X & b) for b in self.blocks)

    def check_independent(self) -> bool:
        H = self.H
        cl = {s: closure_set(H, v) for s, v in self.faces().items()}
        return all(cl[s] & cl[t] == cl[s & t] for s in cl for t in cl)

    def describe(self) -> dict:
        return {"k": self.k, "base": sorted(self.base), "blocks": [sorted(b) for b in self.blocks]}


@dataclass
class SolutionEmbedding:
    problem: AmalgamationProblem
    structure: LabelledStandard
    star: Star | None = None
    star_cells: tuple = ()

    @property
    def hmap(self) -> dict:
        return self.structure.hmap

    def embedding(self, s):
        """Inclusion of ``cl(A(s))`` into the solution, as a cell map."""
        verts = self.problem.face(s)
        return {c: c for c in closure_set(self.problem.H, verts) if not isinstance(c, int)}

    def verify(self) -> tuple:
        P, T, H = self.problem, self.structure, self.problem.H
        n = H.n
        for s, verts in P.faces().items():
            for ground in itertools.permutations(sorted(verts), n + 1):
                if not np.array_equal(T.q_tensor(ground), H.q_tensor(ground)):
                    return False, f"Q differs from face {sorted(s)} over {ground}"
            for w in itertools.permutations(sorted(verts), n):
                for f in H.fiber(w):
                    if T.project(f) != H.project(f):
                        return False, f"projections of {f} differ"
        for s, t in P.transitions():
            es, et = self.embedding(s), self.embedding(t)
            if any(et[c] != es[c] for c in es):
                return False, f"square for {sorted(s)} inside {sorted(t)} does not commute"
        if set(T.vertex_ids) != set(P.vertices):
            return False, "the solution is not generated by the faces"
        return True, ""


def solve(H: Polygroupoid, P: AmalgamationProblem) -> SolutionEmbedding:
    """The solution read off a star over the union of the blocks and the base."""
    if not P.check_independent():
        raise PreconditionError("the faces are not independent")
    verts = sorted(P.vertices)
    T = LabelledStandard(H.n, H.group, H.names, verts)
    star, cells = None, ()
    if len(verts) >= H.n:
        center = min(P.base) if P.base else verts[0]
        star = Star.centered(T, center)
        cells = tuple(default_solution(T, star).values())
        if support_of(T, cells) != set(verts):
            raise StructuralError("the star does not generate the solution")
    sol = SolutionEmbedding(P, T, star, cells)
    ok, why = sol.verify()
    if not ok:
        raise StructuralError(why)
    return sol


# the cochain complex of the problem


def _sorted_sets(verts, size):
    return list(itertools.combinations(sorted(verts), size))


def _coboundary(rows, cols, size):
    """Matrix of the alternating face map from size-``size`` sets ``cols`` to ``rows``."""
    col_index = {c: j for j, c in enumerate(cols)}
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, X in enumerate(rows):
        for pos in range(1, len(X) + 1):
            face = delete(X, pos)
            j = col_index.get(face)
            if j is not None:
                M[i, j] += -1 if pos % 2 else 1
    return M


@dataclass
class _Complex:
    new_grounds: list
    new_spines: list
    cocycle: np.ndarray  # (n+2)-sets by new grounds
    cobound: np.ndarray  # new grounds by new spines


def _complex(P: AmalgamationProblem) -> _Complex:
    n = P.H.n
    verts = P.vertices
    grounds = [X for X in _sorted_sets(verts, n + 1) if not P.in_face(X)]
    spines = [X for X in _sorted_sets(verts, n) if not P.in_face(X)]
    big = _sorted_sets(verts, n + 2)
    return _Complex(grounds, spines, _coboundary(big, grounds, n + 2), _coboundary(grounds, spines, n + 1))


def _coordinate_split(G):
    return list(G.moduli)


def solution_generators(P: AmalgamationProblem):
    """Generators of the group of admissible relabellings and its order."""
    cx = _complex(P)
    G = P.H.group
    gens, order = [], 1
    for c, q in enumerate(_coordinate_split(G)):
        if not cx.new_grounds:
            continue
        if cx.cocycle.shape[0]:
            g, o = kernel_mod(cx.cocycle, q)
        else:
            g = [np.eye(len(cx.new_grounds), dtype=np.int64)[i] for i in range(len(cx.new_grounds))]
            o = q ** len(cx.new_grounds)
        order *= o
        for vec in g:
            if not vec.any():
                continue
            h = {}
            for X, x in zip(cx.new_grounds, vec):
                if x % q:
                    val = [0] * G.rank
                    val[c] = int(x) % q
                    h[X] = G.check(tuple(val))
            gens.append(h)
    return gens, order, cx


def _add_h(G, h1, h2):
    out = dict(h1)
    for X, v in h2.items():
        out[X] = G.add(out.get(X, G.zero), v)
    return {X: v for X, v in out.items() if any(v)}


def enumerate_solutions(P: AmalgamationProblem, limit: int = ENUMERATE_LIMIT) -> list:
    """Every admissible relabelling, as ``h`` dicts; capacity error above ``limit``."""
    gens, order, _ = solution_generators(P)
    if order > limit:
        raise CapacityError(f"{order} solutions exceed the enumeration limit", count=order, bound=limit)
    G = P.H.group
    seen = {(): {}}
    frontier = [{}]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                h2 = _add_h(G, h, g)
                key = tuple(sorted(h2.items()))
                if key not in seen:
                    seen[key] = h2
                    nxt.append(h2)
        frontier = nxt
    if len(seen) != order:
        raise StructuralError("generated solutions do not match the computed order")
    return list(seen.values())


def _shift_for(P, cx, h):
    """A shift on new spines whose coboundary is ``h``, or ``None``."""
    G = P.H.group
    psi = {X: [0] * G.rank for X in cx.new_spines}
    for c, q in enumerate(_coordinate_split(G)):
        b = np.array([h.get(X, G.zero)[c] for X in cx.new_grounds], dtype=np.int64)
        if not b.any():
            continue
        if not cx.new_spines:
            return None
        x = solve_mod(cx.cobound, b, q)
        if x is None:
            return None
        for X, v in zip(cx.new_spines, x):
            psi[X][c] = int(v)
    return {X: G.check(tuple(v)) for X, v in psi.items()}


def shift_isomorphism(T0: LabelledStandard, T1: LabelledStandard, psi: dict) -> StructureMap:
    G = T0.group
    cells = {}
    for k in range(2, T0.n + 1):
        for w in T0.spines(k):
            for f in T0.fiber(w):
                if k < T0.n:
                    cells[f] = f
                    continue
                b, sigma = perms.sorting_perm(w)
                d = psi.get(b, G.zero)
                if perms.parity(sigma):
                    d = G.neg(d)
                cells[f] = T1.act(d, f)
    ident = {v: v for v in T0.vertex_ids}
    return StructureMap(T0, T1, ident, {g: g for g in G.elements}, cells)


def _star_match(P, T0, T1):
    """The base-centered star argument: both solutions agree on the star, faces follow."""
    center = min(P.base)
    S = Star.centered(T0, center)
    s = default_solution(T0, S)
    return star_isomorphism(T0, T1, {v: v for v in T0.vertex_ids}, None, S, s, dict(s))


def fixes_faces(P: AmalgamationProblem, chi: StructureMap) -> bool:
    for verts in P.faces().values():
        for c in closure_set(P.H, verts):
            if chi(c) != c:
                return False
    return True


@dataclass
class UniquenessVerdict:
    status: str  # "unique" or "witness"
    problem: AmalgamationProblem
    solutions: int
    checked: int
    mode: str
    isomorphisms: list = field(default_factory=list)
    witness: tuple | None = None

    @property
    def unique(self) -> bool:
        return self.status == "unique"


def isomorphism_between(P: AmalgamationProblem, h0: dict, h1: dict, cx=None):
    """An isomorphism of solutions over the faces, or ``None`` when there is none."""
    H = P.H
    verts = sorted(P.vertices)
    T0 = LabelledStandard(H.n, H.group, H.names, verts, h0)
    T1 = LabelledStandard(H.n, H.group, H.names, verts, h1)
    if P.base and len(verts) >= H.n:
        chi = _star_match(P, T0, T1)
    else:
        cx = _complex(P) if cx is None else cx
        diff = _add_h(H.group, h1, {X: H.group.neg(v) for X, v in h0.items()})
        psi = _shift_for(P, cx, diff)
        if psi is None:
            return None
        chi = shift_isomorphism(T0, T1, psi)
    return chi


def uniqueness_check(H: Polygroupoid, P: AmalgamationProblem, budget: int = DEFAULT_BUDGET,
                     enumerate_limit: int = ENUMERATE_LIMIT, certify_maps: bool = True) -> UniquenessVerdict:
    """Decide whether all solutions of ``P`` are isomorphic over the faces.

    Solutions form a group under adding relabellings, and isomorphism over
    the faces is the coset relation of a subgroup, so it suffices to compare
    each generator with the trivial solution.  Small solution groups are
    enumerated outright.
    """
    if P.H is not H:
        raise PreconditionError("the problem is posed over a different structure")
    if not P.check_independent():
        raise PreconditionError("the faces are not independent")
    size = len(list(itertools.combinations(sorted(P.vertices), H.n + 1)))
    if size > budget:
        raise CapacityError(f"{size} grounds exceed the budget", count=size, bound=budget)
    gens, order, cx = solution_generators(P)
    if order <= enumerate_limit:
        candidates, mode = enumerate_solutions(P, enumerate_limit), "enumerated"
    else:
        candidates, mode = gens, "generators"
    isos = []
    checked = 0
    gen_keys = {tuple(sorted(g.items())) for g in gens}
    for h in candidates:
        checked += 1
        if tuple(sorted(h.items())) in gen_keys or not h:
            # build the isomorphism itself for the generators
            chi = isomorphism_between(P, {}, h, cx)
            if chi is None:
                return UniquenessVerdict("witness", P, order, checked, mode, isos, ({}, h))
            if certify_maps:
                ok, why = certify(chi)
                if not ok or not fixes_faces(P, chi):
                    raise StructuralError(f"constructed isomorphism failed: {why or 'moves a face'}")
            isos.append((h, chi))
        elif _shift_for(P, cx, h) is None:
            return UniquenessVerdict("witness", P, order, checked, mode, isos, ({}, h))
    return UniquenessVerdict("unique", P, order, checked, mode, isos)


def problem_shapes(m: int, k: int, with_base=None):
    """One problem shape per (base size, sorted block sizes) fitting in ``m`` vertices."""
    shapes = []
    for b in range(0, m - k + 1):
        if with_base is True and b == 0 or with_base is False and b > 0:
            continue
        for sizes in itertools.combinations_with_replacement(range(1, m - b - k + 2), k):
            if b + sum(sizes) <= m:
                shapes.append((b, tuple(sorted(sizes, reverse=True))))
    return sorted(set(shapes))


def problem_from_shape(H: Polygroupoid, base_size: int, sizes) -> AmalgamationProblem:
    ids = list(H.vertex_ids)
    need = base_size + sum(sizes)
    if need > len(ids):
        raise CapacityError("not enough vertices for this shape", count=need, bound=len(ids))
    base = ids[:base_size]
    blocks, at = [], base_size
    for s in sizes:
        blocks.append(ids[at: at + s])
        at += s
    return AmalgamationProblem(H, tuple(blocks), frozenset(base))


# the B(n+1) failure


@dataclass
class FailureWitness:
    tuple_: tuple
    cell: Cell
    automorphism: StructureMap
    q_tuple: tuple
    position: int

    def certify(self, H: Polygroupoid) -> tuple:
        chi = self.automorphism
        ok, why = certify(chi)
        if not ok:
            return False, why
        head = self.tuple_[: H.n]
        for r in range(len(head)):
            for sub in itertools.combinations(head, r):
                if any(chi(c) != c for c in closure_set(H, sub)):
                    return False, f"moves the closure of {sub}"
        if chi(self.cell) == self.cell:
            return False, "the automorphism fixes the cell"
        if not H.q_holds(self.q_tuple):
            return False, "Q fails on the tuple"
        faces_ = list(self.q_tuple)
        faces_[self.position - 1] = None
        if horn_fill(H, faces_, self.position) != self.cell:
            return False, "horn filling does not recover the cell"
        return True, ""


def nonuniqueness_witness(H: Polygroupoid, w, recovered_order: int | None = None):
    """A cell algebraic over n vertices, pinned by Q, yet moved over every proper subset.

    Returns ``None`` when the acting group is trivial.
    """
    n = H.n
    w = tuple(int(v) for v in w)
    if len(w) != n + 1 or len(set(w)) != n + 1:
        raise PreconditionError(f"need {n + 1} distinct vertices")
    if H.m < n + 1:
        raise CapacityError("not enough vertices", count=H.m, bound=n + 1)
    if recovered_order is None:
        from .recovery import recover_group

        recovered_order = recover_group(H, spread=False).order
    if recovered_order < 2:
        return None
    head = w[:n]
    S = Star.centered(H, head[0], head[1:])
    # the star order lists head first, so the sorted head is a star tuple
    b, _ = S.sort(head)
    e = H.group.basis()[0]
    rep = automorphism_from_star(H, S, {b: e})
    chi = realize(H, rep)
    ground = w
    fibs = [H.fiber(x) for x in faces(ground)]
    tensor = H.q_tensor(ground)
    f = fibs[n][0]
    idx = np.argwhere(tensor[..., 0])[0]
    q_tuple = tuple(fib[int(i)] for fib, i in zip(fibs[:n], idx)) + (f,)
    return FailureWitness(w, f, chi, q_tuple, n + 1)
