"""Exhaustive isomorphism search, used as an oracle for the star constructions.

Nothing here touches stars or horn filling: vertex maps and group
isomorphisms are enumerated outright and cell maps are found by
backtracking over fiber bijections against the raw tables.
"""
from __future__ import annotations

import itertools

from . import perms
from .core import Polygroupoid, faces
from .errors import CapacityError, PreconditionError
from .groups import GroupSpec
from .morphisms import StructureMap

MAX_FIBER = 6


def group_isomorphisms(G: GroupSpec, G2: GroupSpec):
    """Every additive bijection ``G -> G2`` as a dict, by brute force over element maps."""
    if G.order != G2.order:
        return
    basis = G.basis()
    for images in itertools.product(G2.elements, repeat=len(basis)):
        mapping = {}
        for g in G.elements:
            out = G2.zero
            for x, h in zip(g, images):
                for _ in range(x):
                    out = G2.add(out, h)
            mapping[g] = out
        if len(set(mapping.values())) != G.order:
            continue
        if all(mapping[G.add(g, h)] == G2.add(mapping[g], mapping[h]) for g in G.elements for h in G.elements):
            yield mapping


def _vertex_maps(H, H2, vmap):
    if vmap is not None:
        yield dict(vmap)
        return
    src = list(H.vertex_ids)
    for img in itertools.permutations(H2.vertex_ids):
        yield dict(zip(src, img))


class _Problem:
    def __init__(self, H, H2, vmap, gmap, use_action, use_inverses, pins):
        self.H, self.H2, self.vmap, self.gmap = H, H2, vmap, gmap
        n = H.n
        self.vars = [(k, w) for k in range(2, n + 1) for w in H.spines(k)]
        pos = {v: i for i, v in enumerate(self.vars)}
        self.src = {v: H.fiber(v[1]) for v in self.vars}
        self.dst = {v: H2.fiber(tuple(vmap[x] for x in v[1])) for v in self.vars}
        self.domains = {}
        self.checks = {i: [] for i in range(len(self.vars))}
        for v in self.vars:
            fs, ft = self.src[v], self.dst[v]
            if len(fs) != len(ft):
                self.domains = None
                return
            if len(fs) > MAX_FIBER:
                raise CapacityError("fiber too large for exhaustive search", count=len(fs), bound=MAX_FIBER)
            dom = []
            for img in itertools.permutations(ft):
                m = dict(zip(fs, img))
                if any(k in m and m[k] != val for k, val in pins.items()):
                    continue
                if v[0] == n and use_action:
                    if any(m[H.act(g, f)] != H2.act(gmap[g], m[f]) for f in fs for g in H.group.basis()):
                        continue
                dom.append(m)
            self.domains[v] = dom
        # projection constraints tie a cell variable to its faces
        for v in self.vars:
            k, w = v
            if k == 2:
                continue
            deps = [(k - 1, u) for u in faces(w)]
            last = max(pos[v], *(pos[d] for d in deps))
            self.checks[last].append(("proj", v, deps))
        if use_inverses:
            for w in H.spines(n):
                for sigma in perms.all_perms(n):
                    u = perms.apply(sigma, w)
                    if u <= w and sigma != perms.identity(n):
                        continue
                    last = max(pos[(n, w)], pos[(n, u)])
                    self.checks[last].append(("iota", w, sigma))
        for ground in H.grounds(n + 1):
            deps = [(n, u) for u in faces(ground)]
            last = max(pos[d] for d in deps)
            self.checks[last].append(("q", ground, deps))

    def _ok(self, check, assign):
        H, H2 = self.H, self.H2
        kind = check[0]
        if kind == "proj":
            _, v, deps = check
            m = assign[v]
            lower = {}
            for d in deps:
                lower.update(assign[d])
            for f in self.src[v]:
                if tuple(H2.project(m[f])) != tuple(lower.get(x, self.vmap.get(x)) for x in H.project(f)):
                    return False
            return True
        if kind == "iota":
            _, w, sigma = check
            m = assign[(H.n, w)]
            m2 = assign[(H.n, perms.apply(sigma, w))]
            return all(m2[H.iota(sigma, f)] == H2.iota(sigma, m[f]) for f in self.src[(H.n, w)])
        _, ground, deps = check
        top = {}
        for d in deps:
            top.update(assign[d])
        image_ground = tuple(self.vmap[x] for x in ground)
        src_q = list(H.iter_q_tuples(ground))
        dst_q = set(H2.iter_q_tuples(image_ground))
        if len(src_q) != len(dst_q):
            return False
        return all(tuple(top[c] for c in tup) in dst_q for tup in src_q)

    def solve(self):
        if self.domains is None:
            return
        assign = {}
        order = self.vars

        def rec(i):
            if i == len(order):
                yield dict(assign)
                return
            v = order[i]
            for m in self.domains[v]:
                assign[v] = m
                if all(self._ok(c, assign) for c in self.checks[i]):
                    yield from rec(i + 1)
                del assign[v]

        yield from rec(0)


def brute_force_isomorphisms(H: Polygroupoid, H2: Polygroupoid, vmap=None, gmap=None,
                             use_action: bool = True, use_inverses: bool = True, pins=None, limit=None):
    """Yield every isomorphism ``H -> H2`` as a StructureMap."""
    if H.n != H2.n or H.m != H2.m:
        return
    if use_action and (not H.has_action or not H2.has_action):
        raise PreconditionError("action tables are missing")
    if use_inverses and (not H.has_inverses or not H2.has_inverses):
        raise PreconditionError("inverse tables are missing")
    pins = dict(pins or {})
    gmaps = [dict(gmap)] if gmap is not None else list(group_isomorphisms(H.group, H2.group))
    found = 0
    for vm in _vertex_maps(H, H2, vmap):
        for gm in gmaps:
            problem = _Problem(H, H2, vm, gm, use_action, use_inverses, pins)
            for assign in problem.solve():
                cells = {}
                for m in assign.values():
                    cells.update(m)
                yield StructureMap(H, H2, dict(vm), dict(gm), cells)
                found += 1
                if limit is not None and found >= limit:
                    return


def count_automorphisms(H: Polygroupoid) -> int:
    return sum(1 for _ in brute_force_isomorphisms(H, H))


def certify_homogeneity(H: Polygroupoid, size: int | None = None) -> bool:
    """Every bijection between ``size``-sets of vertices extends to an isomorphism of closures.

    Only structures whose fibers below the top level are singletons are
    supported: there a vertex bijection determines the lower cells, so the
    closure maps need only commute with the action.
    """
    from .core import SubPolygroupoid

    n = H.n
    size = n + 2 if size is None else size
    for k in range(2, n):
        if any(len(H.fiber(w)) != 1 for w in H.spines(k)):
            raise PreconditionError("homogeneity is certified only for singleton lower fibers")
    verts = sorted(H.vertex_ids)
    if len(verts) < size:
        raise CapacityError("not enough vertices", count=len(verts), bound=size)
    base = tuple(verts[:size])
    cl_base = SubPolygroupoid(H, base)
    ident = {g: g for g in H.group.elements}

    def extends(src, X, Y):
        sub_y = SubPolygroupoid(H, Y)
        for _ in brute_force_isomorphisms(src, sub_y, vmap=dict(zip(X, Y)), gmap=ident,
                                          use_inverses=False, limit=1):
            return True
        return False

    # generators of Sym(base) inside cl(base)
    if size > 1:
        swap = (base[1], base[0]) + base[2:]
        cycle = base[1:] + base[:1]
        for target in (swap, cycle):
            if not extends(cl_base, base, target):
                return False
    for Y in itertools.combinations(verts, size):
        if not extends(cl_base, base, Y):
            return False
    return True
