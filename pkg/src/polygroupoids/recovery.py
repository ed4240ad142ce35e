"""Reading the acting group back off the Q relation alone.

No action table is consulted here.  Pairs of cells in one fiber are
classified by the permutation they induce on a neighbouring fiber through
Q-substitution; the classes form the recovered group.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import AxiomReport, Polygroupoid, Verdict, delete, ground_from_spines, spine_of
from .errors import CapacityError, StructuralError, UnfillableError
from .groups import GroupSpec, find_isomorphism


@dataclass(frozen=True)
class TransportPermutation:
    i: int
    j: int
    p: object
    q: object
    frame: tuple
    fiber: tuple  # the target cells, in fiber order
    table: tuple  # table[k] is the image of fiber[k]

    def __call__(self, x):
        return self.table[self.fiber.index(x)]

    def is_identity(self) -> bool:
        return self.table == self.fiber


def frame_spine(frame) -> tuple:
    spines = [spine_of(c) for c in frame]
    w = ground_from_spines(spines)
    if w is None:
        raise StructuralError("frame cells are not compatible")
    return w


def _ground(p_spine, i, w2, j):
    """The tuple ``a`` with ``delete(a, i) == p_spine`` and ``delete(a, j) == w2``."""
    missing = w2[i - 1] if i < j else w2[i - 2]
    a = tuple(p_spine[: i - 1]) + (missing,) + tuple(p_spine[i - 1:])
    if len(set(a)) != len(a) or delete(a, j) != tuple(w2):
        raise StructuralError("the cells and the frame do not sit on one ground")
    return a


def target_fiber(H: Polygroupoid, frame) -> tuple:
    w2 = frame_spine(frame)
    frame = tuple(frame)
    return tuple(x for x in H.fiber(w2) if tuple(H.project(x)) == frame)


def transport(H: Polygroupoid, i: int, j: int, p, q, frame) -> TransportPermutation:
    """The permutation of the framed fiber induced by replacing ``p`` with ``q``.

    Every completion is examined, so an inconsistent rule raises.
    """
    n = H.n
    if i == j or not (1 <= i <= n + 1 and 1 <= j <= n + 1):
        raise StructuralError("positions must be distinct and in range")
    if p.spine != q.spine or tuple(H.project(p)) != tuple(H.project(q)):
        raise StructuralError("p and q must share their projections")
    frame = tuple(frame)
    w2 = frame_spine(frame)
    a = _ground(p.spine, i, w2, j)
    # the shared face: p's face opposite a_j against the frame's face opposite a_i
    shared_p = H.project(p)[(j - 1) - 1 if j > i else j - 1]
    if frame[(i - 1) - 1 if i > j else i - 1] != shared_p:
        raise StructuralError("the frame does not share the required face with p")
    fib_i = H.fiber(delete(a, i))
    fib_j = H.fiber(w2)
    target = target_fiber(H, frame)
    tensor = np.moveaxis(H.q_tensor(a), (i - 1, j - 1), (0, 1))
    pi, qi = fib_i.index(p), fib_i.index(q)
    images = []
    for x in target:
        xi = fib_j.index(x)
        rests = np.argwhere(tensor[pi, xi])
        if not len(rests):
            raise UnfillableError(f"no Q-tuple through {p} and {x}", witness=(p, x))
        seen = set()
        for rest in rests:
            col = tensor[(qi, slice(None)) + tuple(int(r) for r in rest)]
            hits = np.flatnonzero(col)
            if len(hits) != 1:
                raise StructuralError(f"substituting {q} for {p} leaves {len(hits)} fillers")
            seen.add(int(hits[0]))
        if len(seen) != 1:
            raise StructuralError(f"transport of {x} depends on the completion")
        images.append(fib_j[seen.pop()])
    if sorted(images) != sorted(target):
        raise StructuralError("transport leaves the framed fiber or is not a bijection")
    return TransportPermutation(i, j, p, q, frame, target, tuple(images))


def _home_fiber(H, w):
    fib = H.fiber(tuple(w))
    if not fib:
        raise StructuralError(f"no top cells over {w}")
    head = tuple(H.project(fib[0]))
    return tuple(f for f in fib if tuple(H.project(f)) == head)


def admissible_frames(H: Polygroupoid, p, i: int = 1, j: int | None = None) -> list:
    """Every frame ``f'`` usable for transport out of ``p``'s fiber at positions ``(i, j)``."""
    n = H.n
    j = n + 1 if j is None else j
    w = p.spine
    out = []
    for v in H.vertex_ids:
        if v in w:
            continue
        a = tuple(w[: i - 1]) + (v,) + tuple(w[i - 1:])
        w2 = delete(a, j)
        shared = H.project(p)[(j - 1) - 1 if j > i else j - 1]
        slot = (i - 1) - 1 if i > j else i - 1
        frames = []
        for x in H.fiber(w2):
            fr = tuple(H.project(x))
            if fr[slot] == shared and fr not in frames:
                frames.append(fr)
        out.extend(frames)
    return out


def canonical_frame(H: Polygroupoid, p) -> tuple:
    if H.m <= H.n:
        raise CapacityError("an auxiliary vertex is needed", count=H.m, bound=H.n + 1)
    frames = admissible_frames(H, p)
    if not frames:
        raise UnfillableError(f"no frame next to {p}", witness=(p,))
    return frames[0]


def _partition(H, fiber, frame):
    n = H.n
    keys = {}
    for r, s in itertools.product(fiber, repeat=2):
        keys[(r, s)] = transport(H, 1, n + 1, r, s, frame).table
    return keys


def pair_classes(H: Polygroupoid, w, frame=None) -> list:
    """Classes of pairs from the fiber over ``w``; class ``k`` contains ``(r0, fiber[k])``."""
    if H.m <= H.n:
        raise CapacityError("an auxiliary vertex is needed", count=H.m, bound=H.n + 1)
    fiber = _home_fiber(H, w)
    frame = canonical_frame(H, fiber[0]) if frame is None else tuple(frame)
    keys = _partition(H, fiber, frame)
    by_key = {}
    for pair, key in keys.items():
        by_key.setdefault(key, []).append(pair)
    classes = []
    for s in fiber:
        cls = by_key[keys[(fiber[0], s)]]
        if cls in classes:
            raise StructuralError("two first-column pairs share a class")
        classes.append(cls)
    if sum(len(c) for c in classes) != len(fiber) ** 2:
        raise StructuralError("some pair class has no representative of the form (r0, s)")
    return classes


def frame_independent(H: Polygroupoid, w) -> tuple:
    """Compare the pair partitions over every admissible frame; returns ``(ok, frames_checked)``."""
    fiber = _home_fiber(H, w)
    ref = None
    frames = admissible_frames(H, fiber[0])
    for fr in frames:
        keys = _partition(H, fiber, fr)
        part = frozenset(frozenset(p for p in keys if keys[p] == k) for k in set(keys.values()))
        if ref is None:
            ref = part
        elif part != ref:
            return False, frames
    return True, frames


def completion_independent(H: Polygroupoid, w) -> tuple:
    """Evaluate transport for every pair, every frame and every position pair; returns ``(ok, count)``."""
    fiber = _home_fiber(H, w)
    n = H.n
    count = 0
    for i, j in itertools.permutations(range(1, n + 2), 2):
        for fr in admissible_frames(H, fiber[0], i, j):
            for r, s in itertools.product(fiber, repeat=2):
                try:
                    transport(H, i, j, r, s, fr)
                except StructuralError:
                    return False, count
                count += 1
    return True, count


@dataclass
class RecoveredGroup:
    spine: tuple
    fiber: tuple
    classes: list
    mul: list  # mul[a][b] is the class of a . b
    frame: tuple
    action: dict = field(default_factory=dict)  # cell -> tuple of images, one per class

    @property
    def order(self) -> int:
        return len(self.classes)

    @property
    def identity(self) -> int:
        return 0

    def product(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul[x][a]
            k += 1
        return k

    @property
    def exponent(self) -> int:
        out = 1
        for a in range(self.order):
            k = self.element_order(a)
            out = out * k // np.gcd(out, k)
        return int(out)

    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in range(self.order) for b in range(self.order))

    def isomorphism_from(self, spec: GroupSpec):
        return find_isomorphism(spec, range(self.order), self.product, 0)

    def structure(self) -> GroupSpec | None:
        for spec in abelian_specs(self.order):
            if self.isomorphism_from(spec) is not None:
                return spec
        return None

    def act(self, a: int, f):
        return self.action[f][a]


def _prime_factors(N):
    out, p = {}, 2
    while p * p <= N:
        while N % p == 0:
            out[p] = out.get(p, 0) + 1
            N //= p
        p += 1
    if N > 1:
        out[N] = out.get(N, 0) + 1
    return out


def _partitions(k, largest=None):
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


def abelian_specs(order: int) -> list:
    """One spec per isomorphism type of abelian group of the given order (primary form)."""
    if order < 2:
        return []
    per_prime = [[tuple(p**e for e in part) for part in _partitions(k)] for p, k in sorted(_prime_factors(order).items())]
    return [GroupSpec(sum(choice, ())) for choice in itertools.product(*per_prime)]


def _multiplication(classes):
    index = {}
    for k, cls in enumerate(classes):
        for pair in cls:
            index[pair] = k
    N = len(classes)
    mul = [[None] * N for _ in range(N)]
    for a, b in itertools.product(range(N), repeat=2):
        # [(s,t)] . [(r,s)] = [(r,t)]
        for s, t in classes[a]:
            for r, s2 in classes[b]:
                if s2 != s:
                    continue
                c = index[(r, t)]
                if mul[a][b] is None:
                    mul[a][b] = c
                elif mul[a][b] != c:
                    raise StructuralError(f"product is ill-defined on {(s, t)}, {(r, s)}")
        if mul[a][b] is None:
            raise StructuralError("classes do not compose")
    return mul, index


def _spread_action(H, classes, fiber):
    """Carry the class labelling to every top fiber along transports."""
    n = H.n
    home = {f: {} for f in fiber}
    for k, cls in enumerate(classes):
        for r, s in cls:
            home[r][k] = s
    action = {f: tuple(home[f][k] for k in range(len(classes))) for f in fiber}
    labelled = {(fiber[0].spine, tuple(H.project(fiber[0])))}
    queue = deque([fiber])
    # only adjacent positions: there the transport of (p, alpha p) is alpha itself,
    # while positions i, j further apart carry alpha to alpha^((-1)^(i+j+1))
    moves = [(i, i + 1) for i in range(1, n + 1)] + [(i + 1, i) for i in range(1, n + 1)]
    while queue:
        fib = queue.popleft()
        p = fib[0]
        for i, j in moves:
            for fr in admissible_frames(H, p, i, j):
                key = (frame_spine(fr), fr)
                if key in labelled:
                    continue
                target = target_fiber(H, fr)
                if not target:
                    continue
                tables = [transport(H, i, j, p, action[p][k], fr) for k in range(len(classes))]
                for x in target:
                    action[x] = tuple(t(x) for t in tables)
                labelled.add(key)
                queue.append(target)
    return action


def recover_group(H: Polygroupoid, w=None, frame=None, spread: bool = True) -> RecoveredGroup:
    w = next(iter(H.spines(H.n))) if w is None else tuple(w)
    fiber = _home_fiber(H, w)
    frame = canonical_frame(H, fiber[0]) if frame is None else tuple(frame)
    classes = pair_classes(H, w, frame)
    if len(classes) != len(fiber):
        raise StructuralError(f"found {len(classes)} pair classes on a fiber of size {len(fiber)}")
    mul, _ = _multiplication(classes)
    R = RecoveredGroup(tuple(w), fiber, classes, mul, frame)
    if spread:
        R.action = _spread_action(H, classes, fiber)
    return R


def check_standard_action(H: Polygroupoid, R: RecoveredGroup) -> AxiomReport:
    """Fiber preservation, regularity, compatibility with the product and adjacent-pair Q invariance."""
    verdicts = []
    N = R.order
    top = list(H.cells(H.n))
    missing = [f for f in top if f not in R.action]
    if missing:
        verdicts.append(Verdict("fiber", "fail", "the action does not reach every top cell", (missing[0],)))
        return AxiomReport({v.family: v for v in verdicts})
    bad = next(((f, k) for f in top for k in range(N)
                if R.action[f][k].spine != f.spine or tuple(H.project(R.action[f][k])) != tuple(H.project(f))), None)
    verdicts.append(Verdict("fiber", "fail" if bad else "pass", "" if not bad else "an element leaves the fiber", bad))
    bad = None
    for f in top:
        if R.action[f][0] != f:
            bad = (f, 0)
            break
        fib = [x for x in H.fiber(f.spine) if tuple(H.project(x)) == tuple(H.project(f))]
        if sorted(R.action[f]) != sorted(fib):
            bad = (f,)
            break
    verdicts.append(Verdict("regular", "fail" if bad else "pass", "" if not bad else "not free and transitive", bad))
    bad = None
    for f in top:
        for a, b in itertools.product(range(N), repeat=2):
            if R.action[R.action[f][b]][a] != R.action[f][R.mul[a][b]]:
                bad = (f, a, b)
                break
        if bad:
            break
    verdicts.append(Verdict("product", "fail" if bad else "pass", "" if not bad else "action does not respect the product", bad))
    bad = None
    for tup in H.iter_q_tuples():
        for i in range(H.n):
            for a in range(1, N):
                moved = tup[:i] + (R.action[tup[i]][a], R.action[tup[i + 1]][a]) + tup[i + 2:]
                if not H.q_holds(moved):
                    bad = (tup, i + 1, a)
                    break
            if bad:
                break
        if bad:
            break
    verdicts.append(Verdict("adjacent", "fail" if bad else "pass", "" if not bad else "adjacent pair shift breaks Q", bad))
    bad = None
    for f in top:
        for a, b in itertools.product(range(N), repeat=2):
            if R.action[R.action[f][a]][b] != R.action[R.action[f][b]][a]:
                bad = (f, a, b)
                break
        if bad:
            break
    verdicts.append(Verdict("commute", "fail" if bad else "pass", "" if not bad else "actions do not commute", bad))
    return AxiomReport({v.family: v for v in verdicts})
