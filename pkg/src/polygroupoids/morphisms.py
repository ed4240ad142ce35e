"""Stars, star-built isomorphisms, automorphism normal forms and the census."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import perms
from .core import Cell, Polygroupoid, faces
from .errors import CapacityError, PreconditionError, StructuralError, UnfillableError
from .filling import horn_fill
from .groups import GroupAutomorphism, GroupSpec, enumerate_group_automorphisms, find_isomorphism, identity_automorphism

DEFAULT_CENSUS_BOUND = 10**7
BFS_LIMIT = 50_000


def census_bound() -> int:
    raw = os.environ.get("PGX_MAX_SEARCH")
    return int(raw) if raw else DEFAULT_CENSUS_BOUND


@dataclass(frozen=True)
class Star:
    center: int
    order: tuple  # every vertex, center first
    n: int

    def __post_init__(self):
        if not self.order or self.order[0] != self.center:
            raise StructuralError("the center must be the least vertex of the star order")
        if len(set(self.order)) != len(self.order):
            raise StructuralError("star order repeats a vertex")
        if len(self.order) < self.n:
            raise CapacityError(f"a star needs at least {self.n} vertices", count=len(self.order), bound=self.n)

    @classmethod
    def default(cls, H: Polygroupoid) -> Star:
        order = tuple(sorted(H.vertex_ids))
        return cls(order[0], order, H.n)

    @classmethod
    def centered(cls, H: Polygroupoid, center: int, first=()) -> Star:
        """A star at ``center`` whose order lists ``first`` right after it."""
        first = [v for v in sorted(first) if v != center]
        rest = [v for v in sorted(H.vertex_ids) if v != center and v not in first]
        return cls(center, (center, *first, *rest), H.n)

    @property
    def tuples(self) -> tuple:
        tail = self.order[1:]
        return tuple((self.center,) + c for c in itertools.combinations(tail, self.n - 1))

    def rank(self, v) -> int:
        return self.order.index(v)

    def sort(self, c):
        """``(b, sigma)`` with ``b`` a star tuple and ``perms.apply(sigma, b) == c``."""
        return perms.sorting_perm(c, key=self.rank)

    def transfer(self, vmap) -> Star:
        return Star(vmap[self.center], tuple(vmap[v] for v in self.order), self.n)


def default_solution(H: Polygroupoid, S: Star) -> dict:
    return {u: H.fiber(u)[0] for u in S.tuples}


def _vertex_map(H, H2, vmap) -> dict:
    if vmap is None:
        vmap = dict(zip(sorted(H.vertex_ids), sorted(H2.vertex_ids)))
    elif not isinstance(vmap, dict):
        vmap = dict(zip(sorted(H.vertex_ids), vmap))
    vmap = {int(k): int(v) for k, v in vmap.items()}
    if set(vmap) != set(H.vertex_ids) or set(vmap.values()) != set(H2.vertex_ids):
        raise StructuralError("vertex map is not a bijection between the vertex sets")
    return vmap


def _group_map(G: GroupSpec, G2: GroupSpec, gmap) -> dict:
    if gmap is None:
        if G != G2:
            raise PreconditionError("different group specs need an explicit group isomorphism")
        gmap = {g: g for g in G.elements}
    elif isinstance(gmap, GroupAutomorphism):
        gmap = {g: gmap(g) for g in G.elements}
    gmap = {tuple(k): tuple(v) for k, v in gmap.items()}
    if set(gmap) != set(G.elements) or set(gmap.values()) != set(G2.elements):
        raise PreconditionError("group map is not a bijection")
    for g in G.elements:
        for h in G.basis():
            if gmap[G.add(g, h)] != G2.add(gmap[g], gmap[h]):
                raise PreconditionError("group map is not a homomorphism")
    return gmap


@dataclass
class StructureMap:
    source: Polygroupoid
    target: Polygroupoid
    vmap: dict
    gmap: dict
    cells: dict

    def __call__(self, x):
        if isinstance(x, (int, np.integer)):
            return self.vmap[int(x)]
        return self.cells[x]

    def map_group(self, g):
        return self.gmap[tuple(g)]

    def compose(self, other: StructureMap) -> StructureMap:
        """``self`` after ``other``."""
        return StructureMap(other.source, self.target,
                            {v: self.vmap[w] for v, w in other.vmap.items()},
                            {g: self.gmap[h] for g, h in other.gmap.items()},
                            {c: self.cells[d] for c, d in other.cells.items()})

    def inverse(self) -> StructureMap:
        return StructureMap(self.target, self.source, {w: v for v, w in self.vmap.items()},
                            {h: g for g, h in self.gmap.items()}, {d: c for c, d in self.cells.items()})

    def key(self):
        return (tuple(sorted(self.vmap.items())), tuple(sorted(self.gmap.items())),
                tuple(sorted(self.cells.items())))

    def __eq__(self, other):
        return isinstance(other, StructureMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_identity(self) -> bool:
        return (all(k == v for k, v in self.vmap.items()) and all(k == v for k, v in self.gmap.items())
                and all(k == v for k, v in self.cells.items()))

    def fixes(self, X) -> bool:
        return all(self(x) == x for x in X)


def _require_inverses(H):
    if not H.has_inverses or not H.has_action:
        raise PreconditionError("star constructions need action and inverse tables")


def star_isomorphism(H: Polygroupoid, H2: Polygroupoid, vmap, gmap, S: Star, s: dict, s2: dict) -> StructureMap:
    """The unique isomorphism extending ``vmap``, ``gmap`` and sending ``s`` to ``s2``.

    Cells over spines through the center are reached from the star by the
    inverse maps and the action; the remaining cells are pinned down by Q
    together with cells through the center.
    """
    _require_inverses(H)
    _require_inverses(H2)
    if H.n != H2.n:
        raise PreconditionError("arities differ")
    if H.m < H.n:
        raise CapacityError("a star needs at least n vertices", count=H.m, bound=H.n)
    vmap = _vertex_map(H, H2, vmap)
    gmap = _group_map(H.group, H2.group, gmap)
    n = H.n
    a = S.center
    S2 = S.transfer(vmap)
    if set(s) != set(S.tuples):
        raise StructuralError("the solution is not defined exactly on the star")
    if set(s2) != set(S2.tuples):
        raise StructuralError("the target solution is not defined on the transferred star")
    for u in S.tuples:
        if s[u].spine != u or s2[S2.tuples[S.tuples.index(u)]].spine != S2.tuples[S.tuples.index(u)]:
            raise StructuralError(f"solution value over {u} lies over the wrong tuple")
    cells = {}
    for c in H.spines(n):
        if a not in c:
            continue
        b, sigma = S.sort(c)
        base = H.iota(sigma, s[b])
        base2 = H2.iota(sigma, s2[tuple(vmap[x] for x in b)])
        for f in H.fiber(c):
            try:
                g = H.difference(base, f)
            except StructuralError as exc:
                raise PreconditionError(f"action is not transitive on the fiber over {c}") from exc
            cells[f] = H2.act(gmap[g], base2)
    for c in H.spines(n):
        if a in c:
            continue
        ground = (a,) + tuple(c)
        q = H.q_tensor(ground)
        fs = faces(ground)
        for xi, f in enumerate(H.fiber(c)):
            hits = np.argwhere(q[xi])
            if not len(hits):
                raise UnfillableError(f"no Q-tuple through {f} and the center", witness=(f,))
            others = [H.fiber(fs[k + 1])[int(i)] for k, i in enumerate(hits[0])]
            cells[f] = horn_fill(H2, [None] + [cells[x] for x in others], 1)
    for k in range(n, 2, -1):
        for w in H.spines(k):
            for f in H.fiber(w):
                for lower, img in zip(H.project(f), H2.project(cells[f])):
                    prev = cells.setdefault(lower, img)
                    if prev != img:
                        raise StructuralError(f"images of {lower} disagree")
    for k in range(2, n):
        for w in H.spines(k):
            for f in H.fiber(w):
                if f not in cells:
                    raise PreconditionError(f"lower cell {f} lies under no top cell")
    return StructureMap(H, H2, vmap, gmap, cells)


def certify(chi: StructureMap) -> tuple:
    """Exhaustively confirm that ``chi`` is an isomorphism; returns ``(ok, reason)``."""
    H, H2 = chi.source, chi.target
    if sorted(chi.vmap) != sorted(H.vertex_ids) or sorted(chi.vmap.values()) != sorted(H2.vertex_ids):
        return False, "vertex map is not a bijection"
    G, G2 = H.group, H2.group
    if G is not None:
        if sorted(chi.gmap) != sorted(G.elements) or sorted(chi.gmap.values()) != sorted(G2.elements):
            return False, "group map is not a bijection"
        for g in G.elements:
            for h in G.elements:
                if chi.gmap[G.add(g, h)] != G2.add(chi.gmap[g], chi.gmap[h]):
                    return False, "group map is not additive"
    for k in range(2, H.n + 1):
        src = list(H.cells(k))
        imgs = [chi.cells.get(c) for c in src]
        if any(x is None for x in imgs) or len(set(imgs)) != len(src) or set(imgs) != set(H2.cells(k)):
            return False, f"level {k} is not mapped bijectively"
        for c, x in zip(src, imgs):
            if x.spine != tuple(chi.vmap[v] for v in c.spine):
                return False, f"{c} leaves its fiber"
            if tuple(H2.project(x)) != tuple(chi(y) for y in H.project(c)):
                return False, f"projections of {c} are not preserved"
    # action and inverse maps, compared as index maps fiber by fiber
    n = H.n
    where = {}
    for w in H.spines(n):
        w2 = tuple(chi.vmap[v] for v in w)
        pos = {c: i for i, c in enumerate(H2.fiber(w2))}
        where[w] = np.array([pos[chi.cells[c]] for c in H.fiber(w)], dtype=np.int64)
    if H.has_action and H2.has_action:
        for w, cw in where.items():
            w2 = tuple(chi.vmap[v] for v in w)
            for g in G.elements:
                if not np.array_equal(cw[H.action_perm(w, g)], H2.action_perm(w2, chi.gmap[g])[cw]):
                    return False, f"action of {G.format_element(g)} over {w} is not preserved"
    if H.has_inverses and H2.has_inverses and where:
        spines = list(where)
        images = [tuple(chi.vmap[v] for v in w) for w in spines]
        row = {w: i for i, w in enumerate(spines)}
        W = np.stack([where[w] for w in spines])
        for sigma in perms.all_perms(n):
            moved = W[[row[perms.apply(sigma, w)] for w in spines]]
            lhs = np.take_along_axis(moved, H.iota_table(sigma, spines), axis=1)
            rhs = np.take_along_axis(H2.iota_table(sigma, images), W, axis=1)
            if not np.array_equal(lhs, rhs):
                w = spines[int(np.argwhere(lhs != rhs)[0][0])]
                return False, f"inverse map {perms.format_perm(sigma)} over {w} is not preserved"
    # Q, one ground at a time: pull the target tensor back along the fiber bijections
    shaped = {}  # (spine, axis) -> index array broadcast along that axis
    for ground in H.grounds():
        image = tuple(chi.vmap[v] for v in ground)
        index = []
        for axis, w in enumerate(faces(ground)):
            key = (w, axis)
            if key not in shaped:
                shape = [1] * (n + 1)
                shape[axis] = -1
                shaped[key] = where[w].reshape(shape)
            index.append(shaped[key])
        pulled = H2.q_tensor(image)[tuple(index)]
        if not np.array_equal(pulled, H.q_tensor(ground)):
            bad = np.argwhere(pulled != H.q_tensor(ground))[0]
            tup = tuple(H.fiber(w)[int(i)] for w, i in zip(faces(ground), bad))
            return False, f"Q is not preserved at {tup}"
    return True, ""


# normal forms relative to the default star


def reference_section(H: Polygroupoid, S: Star | None = None, s: dict | None = None) -> dict:
    """A cell over every top spine, transported from the star solution."""
    cache_key = (S, None if s is None else tuple(sorted(s.items())))
    store = H.__dict__.setdefault("_reference_cache", {})
    if cache_key in store:
        return store[cache_key]
    S = Star.default(H) if S is None else S
    s = default_solution(H, S) if s is None else s
    a = S.center
    r = {}
    for c in H.spines(H.n):
        if a in c:
            b, sigma = S.sort(c)
            r[c] = H.iota(sigma, s[b])
    for c in H.spines(H.n):
        if a not in c:
            ground = (a,) + tuple(c)
            r[c] = horn_fill(H, [None] + [r[x] for x in faces(ground)[1:]], 1)
    store[cache_key] = r
    return r


@dataclass(frozen=True)
class AutomorphismRep:
    vperm: tuple  # image of each vertex, indexed by vertex id
    gaut: GroupAutomorphism
    tmap: tuple  # one group element per default star tuple

    def is_identity(self) -> bool:
        return (self.vperm == tuple(range(len(self.vperm))) and self.gaut.is_identity()
                and all(not any(t) for t in self.tmap))


def identity_rep(H: Polygroupoid) -> AutomorphismRep:
    S = Star.default(H)
    return AutomorphismRep(tuple(H.vertex_ids), identity_automorphism(H.group),
                           tuple(H.group.zero for _ in S.tuples))


def realize(H: Polygroupoid, rep: AutomorphismRep) -> StructureMap:
    store = H.__dict__.setdefault("_realize_cache", {})
    if rep in store:
        return store[rep]
    S = Star.default(H)
    s = default_solution(H, S)
    r = reference_section(H)
    vmap = dict(zip(H.vertex_ids, rep.vperm))
    s2 = {}
    for u, t in zip(S.tuples, rep.tmap):
        image = tuple(vmap[x] for x in u)
        s2[image] = H.act(t, r[image])
    chi = star_isomorphism(H, H, vmap, rep.gaut, S, s, s2)
    if len(store) < 4096:
        store[rep] = chi
    return chi


def extract(H: Polygroupoid, chi: StructureMap) -> AutomorphismRep:
    S = Star.default(H)
    s = default_solution(H, S)
    r = reference_section(H)
    G = H.group
    vperm = tuple(chi.vmap[v] for v in H.vertex_ids)
    gaut = GroupAutomorphism(G, tuple(chi.gmap[e] for e in G.basis()))
    tmap = tuple(H.difference(r[tuple(chi.vmap[x] for x in u)], chi.cells[s[u]]) for u in S.tuples)
    return AutomorphismRep(vperm, gaut, tmap)


def compose_reps(H: Polygroupoid, first: AutomorphismRep, second: AutomorphismRep) -> AutomorphismRep:
    """The rep of ``first`` after ``second``."""
    return extract(H, realize(H, first).compose(realize(H, second)))


def invert_rep(H: Polygroupoid, rep: AutomorphismRep) -> AutomorphismRep:
    return extract(H, realize(H, rep).inverse())


def automorphism_from_star(H: Polygroupoid, S: Star | None, phi: dict) -> AutomorphismRep:
    """The automorphism fixing vertices and G that shifts ``s(u)`` by ``phi(u)``."""
    S = Star.default(H) if S is None else S
    s = default_solution(H, S)
    G = H.group
    unknown = set(phi) - set(S.tuples)
    if unknown:
        raise StructuralError(f"phi is defined off the star: {sorted(unknown)[:2]}")
    s2 = {u: H.act(G.check(phi.get(u, G.zero)), s[u]) for u in S.tuples}
    ident = {v: v for v in H.vertex_ids}
    return extract(H, star_isomorphism(H, H, ident, None, S, s, s2))


def lift_vertex_permutation(H: Polygroupoid, vperm) -> AutomorphismRep:
    vperm = tuple(int(v) for v in vperm)
    if sorted(vperm) != sorted(H.vertex_ids):
        raise StructuralError("not a permutation of the vertices")
    S = Star.default(H)
    return AutomorphismRep(vperm, identity_automorphism(H.group), tuple(H.group.zero for _ in S.tuples))


def lift_group_automorphism(H: Polygroupoid, gaut: GroupAutomorphism) -> AutomorphismRep:
    S = Star.default(H)
    return AutomorphismRep(tuple(H.vertex_ids), gaut, tuple(H.group.zero for _ in S.tuples))


def lift_fixing(H: Polygroupoid, vperm, fixed) -> AutomorphismRep:
    """Lift a vertex permutation fixing ``fixed`` to an automorphism fixing its closure."""
    fixed = sorted(set(int(v) for v in fixed))
    vmap = dict(zip(H.vertex_ids, vperm))
    if any(vmap[v] != v for v in fixed):
        raise PreconditionError("the permutation moves a vertex it should fix")
    if not fixed:
        return lift_vertex_permutation(H, vperm)
    S = Star.centered(H, fixed[0], fixed)
    s = default_solution(H, S)
    inside = set(fixed)
    s2 = {}
    for u in S.tuples:
        image = tuple(vmap[x] for x in u)
        s2[image] = s[u] if set(u) <= inside else H.fiber(image)[0]
    chi = star_isomorphism(H, H, vmap, None, S, s, s2)
    return extract(H, chi)


# isomorphism testing


def group_isomorphism(G: GroupSpec, G2: GroupSpec):
    mapping = find_isomorphism(G, G2.elements, G2.add, G2.zero)
    return mapping


def is_isomorphic(H: Polygroupoid, H2: Polygroupoid):
    """An isomorphism built from default stars, or ``None`` when none exists."""
    if H.n != H2.n or H.m != H2.m:
        return None
    if H.group is None or H2.group is None or H.group.order != H2.group.order:
        return None
    gmap = group_isomorphism(H.group, H2.group)
    if gmap is None:
        return None
    S = Star.default(H)
    vmap = dict(zip(sorted(H.vertex_ids), sorted(H2.vertex_ids)))
    S2 = S.transfer(vmap)
    chi = star_isomorphism(H, H2, vmap, gmap, S, default_solution(H, S), default_solution(H2, S2))
    ok, _ = certify(chi)
    return chi if ok else None


# census


@dataclass
class CensusReport:
    order: int
    formula: int
    gamma2: int
    gamma1_over_gamma2: int
    gamma_over_gamma1: int
    star_size: int
    method: str
    generators: int
    normal: bool = True

    @property
    def consistent(self) -> bool:
        return (self.order == self.formula == self.gamma2 * self.gamma1_over_gamma2 * self.gamma_over_gamma1
                and self.normal)


class _ObjectIndex:
    """Dense numbering of vertices, cells of every level and group elements."""

    def __init__(self, H):
        objs = list(H.vertex_ids)
        for k in range(2, H.n + 1):
            objs.extend(H.cells(k))
        objs.extend(("g",) + (g,) for g in H.group.elements)
        self.objs = objs
        self.index = {o: i for i, o in enumerate(objs)}
        self.nv = H.m

    def perm_of(self, chi: StructureMap) -> tuple:
        out = []
        for o in self.objs:
            if isinstance(o, int):
                out.append(self.index[chi.vmap[o]])
            elif isinstance(o, Cell):
                out.append(self.index[chi.cells[o]])
            else:
                out.append(self.index[("g", chi.gmap[o[1]])])
        return tuple(out)


def census_generators(H: Polygroupoid) -> list:
    S = Star.default(H)
    gens = []
    for u in S.tuples:
        for e in H.group.basis():
            gens.append(automorphism_from_star(H, S, {u: e}))
    m = H.m
    verts = list(H.vertex_ids)
    for i in range(m - 1):
        p = list(verts)
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append(lift_vertex_permutation(H, p))
    for aut in enumerate_group_automorphisms(H.group):
        if not aut.is_identity():
            gens.append(lift_group_automorphism(H, aut))
    return gens


def automorphism_census(H: Polygroupoid, bound: int | None = None, bfs_limit: int = BFS_LIMIT) -> CensusReport:
    _require_inverses(H)
    bound = census_bound() if bound is None else bound
    G = H.group
    S = Star.default(H)
    auts = enumerate_group_automorphisms(G)
    k = len(S.tuples)
    formula = math.factorial(H.m) * len(auts) * G.order**k
    if formula > bound:
        raise CapacityError(f"census of {formula} automorphisms exceeds bound {bound}", count=formula, bound=bound)
    gens = census_generators(H)
    maps = []
    for rep in gens:
        chi = realize(H, rep)
        ok, why = certify(chi)
        if not ok:
            raise StructuralError(f"generator failed certification: {why}")
        maps.append(chi)
    index = _ObjectIndex(H)
    nv = index.nv
    gstart = len(index.objs) - G.order
    gen_perms = [np.array(index.perm_of(chi)) for chi in maps]
    if formula <= bfs_limit:
        ident = np.arange(len(index.objs))
        seen = {ident.tobytes(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gen_perms:
                    q = g[p]
                    key = q.tobytes()
                    if key not in seen:
                        seen[key] = q
                        nxt.append(q)
            frontier = nxt
            if len(seen) > formula:
                break
        elems = list(seen.values())
        fix_v = [p for p in elems if (p[:nv] == np.arange(nv)).all()]
        fix_vg = [p for p in fix_v if (p[gstart:] == np.arange(gstart, len(index.objs))).all()]
        normal = True
        for p in fix_vg[: min(len(fix_vg), 64)]:
            for g in gen_perms:
                ginv = np.argsort(g)
                conj = g[p[ginv]]
                if not ((conj[:nv] == np.arange(nv)).all() and (conj[gstart:] == np.arange(gstart, len(index.objs))).all()):
                    normal = False
        gamma2 = len(fix_vg)
        g1 = len(fix_v) // max(gamma2, 1)
        gq = len(elems) // max(len(fix_v), 1)
        return CensusReport(len(elems), formula, gamma2, g1, gq, k, "closure", len(gens), normal)
    # layer by layer: star shifts are independent, every group automorphism and
    # every vertex transposition lifts
    basis_reps = gens[: k * G.rank]
    coords = set()
    for rep in basis_reps:
        nz = [(i, t) for i, t in enumerate(rep.tmap) if any(t)]
        if len(nz) != 1 or not rep.gaut.is_identity() or rep.vperm != tuple(H.vertex_ids):
            raise StructuralError("star generator does not act on a single star coordinate")
        coords.add(nz[0])
    gamma2 = G.order**k if len(coords) == k * G.rank else 0
    lifted_auts = {rep.gaut.gen_images for rep in gens if rep.vperm == tuple(H.vertex_ids)}
    g1 = len(auts) if len(lifted_auts) == len(auts) else len(lifted_auts)
    transpositions = sum(1 for rep in gens if rep.vperm != tuple(H.vertex_ids))
    gq = math.factorial(H.m) if transpositions == H.m - 1 else 0
    return CensusReport(gamma2 * g1 * gq, formula, gamma2, g1, gq, k, "layers", len(gens), True)


# factorization


@dataclass
class Factorization:
    tau: list  # (side, rep) pairs, applied right to left: tau = tau[0] o tau[1] o ...
    sigma_a: AutomorphismRep
    sigma_b: AutomorphismRep
    t: dict = field(default_factory=dict)
    t_a: dict = field(default_factory=dict)
    t_b: dict = field(default_factory=dict)


def _closure_cells(H, verts):
    verts = set(verts)
    out = list(verts)
    for k in range(2, H.n + 1):
        for w in itertools.permutations(sorted(verts), k):
            out.extend(H.fiber(w))
    return out


def _transposition_word(vperm, A0, B0, verts):
    """Sided transpositions ``t1, t2, ...`` with ``t1 o t2 o ... == vperm``."""
    p = dict(zip(verts, vperm))
    word = []
    for v in verts:
        if p[v] == v:
            continue
        x, y = v, p[v]
        word.extend(_split_transposition(x, y, A0, B0, verts))
        # peel the transposition off the left: p <- (x y) o p
        p = {k: (y if w == x else x if w == y else w) for k, w in p.items()}
    return word


def _split_transposition(x, y, A0, B0, verts):
    if x not in A0 and y not in A0:
        return [("A", (x, y))]
    if x not in B0 and y not in B0:
        return [("B", (x, y))]
    # one endpoint only in A0, the other only in B0
    spare = [z for z in verts if z not in A0 and z not in B0]
    if not spare:
        raise PreconditionError(f"transposition ({x} {y}) needs a vertex outside both sets")
    z = spare[0]
    out = []
    for u, v in ((x, z), (y, z), (x, z)):
        out.extend(_split_transposition(u, v, A0, B0, verts))
    return out


def factor_automorphism(H: Polygroupoid, A, B, sigma: AutomorphismRep) -> Factorization:
    """Write ``sigma`` as ``sigma_B o sigma_A o tau``.

    ``tau`` is a word of automorphisms each fixing ``cl(A)`` or ``cl(B)``
    pointwise; ``sigma_A`` fixes ``cl(A)`` and ``sigma_B`` fixes ``cl(B)``.
    """
    A0, B0 = set(int(v) for v in A), set(int(v) for v in B)
    verts = list(H.vertex_ids)
    if not sigma.gaut.is_identity():
        raise PreconditionError("factorization needs an automorphism fixing the group")
    chi = realize(H, sigma)
    common = _closure_cells(H, A0 & B0)
    if not chi.fixes(common):
        raise PreconditionError("sigma moves the closure of the intersection")
    ident = identity_rep(H)
    if chi.fixes(_closure_cells(H, A0)):
        return Factorization([("A", sigma)], ident, ident)
    if chi.fixes(_closure_cells(H, B0)):
        return Factorization([("B", sigma)], ident, ident)
    tau = []
    tau_map = realize(H, ident)
    for side, (x, y) in _transposition_word(sigma.vperm, A0, B0, verts):
        p = list(verts)
        p[verts.index(x)], p[verts.index(y)] = y, x
        rep = lift_fixing(H, p, A0 if side == "A" else B0)
        tau.append((side, rep))
        tau_map = tau_map.compose(realize(H, rep))
    rest = chi.compose(tau_map.inverse())
    if rest.vmap != {v: v for v in verts}:
        raise StructuralError("vertex word does not reproduce the permutation")
    # split the star shift of the remainder
    if A0 & B0:
        center = min(A0 & B0)
    elif A0:
        center = min(A0)
    else:
        rep_rest = extract(H, rest)
        return Factorization(tau, rep_rest, ident)
    S = Star.centered(H, center, A0)
    s = default_solution(H, S)
    G = H.group
    t = {u: H.difference(s[u], rest.cells[s[u]]) for u in S.tuples}
    t_a = {u: (G.zero if set(u) <= A0 else t[u]) for u in S.tuples}
    t_b = {u: G.sub(t[u], t_a[u]) for u in S.tuples}
    sigma_a = automorphism_from_star(H, S, t_a)
    sigma_b = automorphism_from_star(H, S, t_b)
    return Factorization(tau, sigma_a, sigma_b, t, t_a, t_b)


def recompose(H: Polygroupoid, fac: Factorization) -> StructureMap:
    out = realize(H, fac.sigma_b).compose(realize(H, fac.sigma_a))
    for _, rep in fac.tau:
        out = out.compose(realize(H, rep))
    return out
