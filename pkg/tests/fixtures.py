"""Random explicit-law structures and corruptions of their pgx text."""
from __future__ import annotations

import itertools
import random

from polygroupoids import Cell, ExplicitPolygroupoid, GroupSpec
from polygroupoids.perms import all_perms


def delete(w, i):
    return tuple(w[: i - 1]) + tuple(w[i:])


def _lower(x):
    return (x.spine[1], x.spine[0]) if x.level == 2 else None


def _compatible(proj, cells):
    k = len(cells) - 1
    rows = [proj(c) for c in cells]
    return all(rows[j - 1][i - 1] == rows[i - 1][j - 2] for i in range(1, k + 2) for j in range(i + 1, k + 2))


def random_explicit(rng: random.Random, n=None, m=None, group=None):
    n = rng.choice([2, 3, 4]) if n is None else n
    m = (n + 1 if n > 2 else rng.randint(3, 4)) if m is None else m
    G = GroupSpec.parse(rng.choice(["2", "3", "2x2"]) if group is None else group)
    names = [f"x{i}" for i in range(m)] if rng.random() < 0.5 else [f"v{i}" for i in range(m)]
    fibers = {}
    for k in range(2, n + 1):
        for w in itertools.permutations(range(m), k):
            fibers[(k, w)] = rng.randint(1, 2) if k < n else rng.randint(1, 3)
    proj = {}

    def project(x):
        return _lower(x) if x.level == 2 else proj[x]

    for k in range(3, n + 1):
        for w in itertools.permutations(range(m), k):
            for i in range(fibers[(k, w)]):
                c = Cell(k, w, i)
                proj[c] = _compatible_row(rng, project, fibers, w, canonical=(i == 0))
    top = [Cell(n, w, i) for (k, w), cnt in fibers.items() if k == n for i in range(cnt)]
    q = set()
    for ground in rng.sample(list(itertools.permutations(range(m), n + 1)), min(6, m)):
        fibs = [[Cell(n, delete(ground, i), j) for j in range(fibers[(n, delete(ground, i))])]
                for i in range(1, n + 2)]
        for _ in range(3):
            q.add(tuple(rng.choice(f) for f in fibs))
    action = inverses = None
    if rng.random() < 0.6:
        action = {(g, c): rng.choice(top) for g in G.elements for c in top}
    if rng.random() < 0.6:
        inverses = {(s, c): rng.choice(top) for s in all_perms(n) for c in top}
    return ExplicitPolygroupoid(n, names, G, fibers, proj, sorted(q), action, inverses)


def _compatible_row(rng, project, fibers, w, canonical=False):
    # index-0 cells project onto index-0 cells, so a compatible row always exists
    k = len(w)
    if canonical:
        return tuple(Cell(k - 1, delete(w, i), 0) for i in range(1, k + 1))
    choices = [[Cell(k - 1, delete(w, i), j) for j in range(fibers[(k - 1, delete(w, i))])]
               for i in range(1, k + 1)]
    options = list(itertools.product(*choices))
    rng.shuffle(options)
    for row in options:
        if k == 3 or _compatible(project, row):
            return row
    raise AssertionError("no compatible row")


# corruptions: each returns (text, expected line number)


def _lines_of(text):
    return text.splitlines()


def corrupt_version(rng, text):
    L = _lines_of(text)
    L[0] = "pgx 2"
    return "\n".join(L), 1


def corrupt_dangling(rng, text):
    L = _lines_of(text)
    idx = [i for i, l in enumerate(L) if l.split()[0] in ("q", "act", "iota")]
    i = rng.choice(idx)
    toks = L[i].split()
    pos = rng.choice([k for k, t in enumerate(toks) if k > 0 and t not in ("->",) and not t[0].isdigit()])
    toks[pos] = "nosuchcell"
    L[i] = " ".join(toks)
    return "\n".join(L), i + 1


def corrupt_section(rng, text):
    L = _lines_of(text)
    i = rng.randint(5, len(L))
    L.insert(i, "frobnicate 1 2 3")
    return "\n".join(L), i + 1


def corrupt_duplicate_id(rng, text):
    L = _lines_of(text)
    idx = [i for i, l in enumerate(L) if l.startswith("fiber")]
    i, j = sorted(rng.sample(idx, 2))
    first = L[i].split()[-1]
    L[j] = L[j] + " " + first
    return "\n".join(L), j + 1


def corrupt_projection(rng, text, E):
    """Swap a projection entry for a cell over the wrong face, or break compatibility."""
    L = _lines_of(text)
    idx = [i for i, l in enumerate(L) if l.startswith("proj")]
    if not idx:
        return None
    i = rng.choice(idx)
    toks = L[i].split()
    entries = toks[3:]
    if len(entries) >= 2:
        a, b = rng.sample(range(len(entries)), 2)
        entries[a], entries[b] = entries[b], entries[a]
    L[i] = " ".join(toks[:3] + entries)
    return "\n".join(L), i + 1


def incompatible_row_text(rng, E, text):
    """Replace one entry of a top projection row by another cell over the same face
    so that the row stops being compatible; ``None`` when no such swap exists."""
    from polygroupoids.pgx import _cell_ids

    ids = _cell_ids(E)
    back = {v: k for k, v in ids.items()}
    rows = E.projection_rows()

    def project(x):
        return _lower(x) if x.level == 2 else rows[x]

    L = _lines_of(text)
    order = [i for i, l in enumerate(L) if l.startswith("proj")]
    rng.shuffle(order)
    for i in order:
        toks = L[i].split()
        row = [back[t] for t in toks[3:]]
        if row[0].level < 3:
            continue
        for pos, x in enumerate(row):
            for y in E.fiber(x.spine):
                if y == x:
                    continue
                new = row[:pos] + [y] + row[pos + 1:]
                if not _compatible(project, new):
                    toks[3 + pos] = ids[y]
                    L[i] = " ".join(toks)
                    return "\n".join(L), i + 1
    return None
