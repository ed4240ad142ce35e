"""The line-oriented ``pgx`` text format.

Standard-law files carry only the header; explicit-law files list every
table.  Cell ids are opaque tokens local to the file.
"""
from __future__ import annotations

import itertools

from . import perms
from .core import Cell, ExplicitPolygroupoid, Polygroupoid, delete, is_compatible
from .errors import ParseError, StructuralError
from .groups import GroupSpec
from .standard import StandardPolygroupoid, to_explicit

VERSION = 1
SECTIONS = ("fiber", "proj", "q", "iota", "act")
HEADER = ("pgx", "n", "group", "vertices", "law")


def _cell_ids(E: ExplicitPolygroupoid) -> dict:
    names = E.cell_names or {}
    ids = {}
    k = 0
    for level in range(2, E.n + 1):
        for w in E.spines(level):
            for c in E.fiber(w):
                if c in names:
                    ids[c] = names[c]
                else:
                    ids[c] = f"c{k}"
                    k += 1
    if len(set(ids.values())) != len(ids):
        raise StructuralError("cell names are not distinct")
    return ids


def serialize(H: Polygroupoid, explicit: bool = False) -> str:
    """Text for ``H``; standard models are written compactly unless ``explicit``."""
    G = H.group
    lines = [f"pgx {VERSION}", f"n {H.n}", f"group {G if G is not None else 'none'}",
             "vertices " + " ".join(H.names)]
    if type(H) is StandardPolygroupoid and not explicit:
        lines.append("law standard")
        return "\n".join(lines) + "\n"
    E = H if isinstance(H, ExplicitPolygroupoid) else to_explicit(H)
    lines.append("law explicit")
    ids = _cell_ids(E)
    name = E.names
    for level in range(2, E.n + 1):
        for w in E.spines(level):
            fib = E.fiber(w)
            if fib:
                lines.append(f"fiber {level} " + " ".join(name[v] for v in w) + " : "
                             + " ".join(ids[c] for c in fib))
    for c, row in E.projection_rows().items():
        lines.append(f"proj {ids[c]} : " + " ".join(ids[x] for x in row))
    for tup in sorted(E.q_set):
        lines.append("q " + " ".join(ids[c] for c in tup))
    if E.inverse_table is not None:
        for (s, c), d in sorted(E.inverse_table.items()):
            lines.append(f"iota {perms.format_perm(s)} {ids[c]} -> {ids[d]}")
    if E.action_table is not None:
        for (g, c), d in sorted(E.action_table.items()):
            lines.append(f"act {GroupSpec.format_element(g)} {ids[c]} -> {ids[d]}")
    return "\n".join(lines) + "\n"


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if line:
            yield no, line


class _Reader:
    def __init__(self, text):
        self.rows = list(_lines(text))
        self.pos = 0

    def header(self, key):
        if self.pos >= len(self.rows):
            raise ParseError(self.rows[-1][0] + 1 if self.rows else 1, f"missing '{key}' line")
        no, toks = self.rows[self.pos]
        if toks[0] != key:
            raise ParseError(no, f"expected '{key}', found '{toks[0]}'")
        self.pos += 1
        return no, toks[1:]


def parse(text: str) -> Polygroupoid:
    r = _Reader(text)
    no, rest = r.header("pgx")
    if rest != [str(VERSION)]:
        raise ParseError(no, f"unsupported format version {' '.join(rest) or '(none)'}")
    no, rest = r.header("n")
    try:
        (n,) = rest
        n = int(n)
    except ValueError:
        raise ParseError(no, "n takes one integer") from None
    if n < 2:
        raise ParseError(no, "arity must be at least 2")
    no, rest = r.header("group")
    if len(rest) != 1:
        raise ParseError(no, "group takes one spec such as 2x2")
    group = None
    if rest[0] != "none":
        try:
            group = GroupSpec.parse(rest[0])
        except StructuralError as e:
            raise ParseError(no, str(e)) from None
    no, names = r.header("vertices")
    if len(set(names)) != len(names):
        raise ParseError(no, "vertex names must be distinct")
    no, rest = r.header("law")
    if rest == ["standard"]:
        if group is None:
            raise ParseError(no, "the standard law needs a group")
        if r.pos < len(r.rows):
            ln, toks = r.rows[r.pos]
            raise ParseError(ln, f"standard-law files take no '{toks[0]}' lines")
        return StandardPolygroupoid(n, group, names)
    if rest != ["explicit"]:
        raise ParseError(no, f"unknown law {' '.join(rest) or '(none)'}")
    return _parse_explicit(r.rows[r.pos:], n, group, names, no)


def _parse_explicit(rows, n, group, names, law_line):
    vid = {v: i for i, v in enumerate(names)}
    by_kind = {k: [] for k in SECTIONS}
    for no, toks in rows:
        if toks[0] not in by_kind:
            raise ParseError(no, f"unknown section '{toks[0]}'")
        by_kind[toks[0]].append((no, toks[1:]))

    cells, fibers, where = {}, {}, {}
    for no, toks in by_kind["fiber"]:
        if ":" not in toks:
            raise ParseError(no, "fiber lines read 'fiber <level> <spine...> : <cell-ids...>'")
        cut = toks.index(":")
        head, ids = toks[:cut], toks[cut + 1:]
        try:
            level = int(head[0])
        except (ValueError, IndexError):
            raise ParseError(no, "fiber level must be an integer") from None
        spine = head[1:]
        if not 2 <= level <= n or len(spine) != level:
            raise ParseError(no, f"fiber of level {level} needs a spine of {level} vertices, at most level {n}")
        bad = [v for v in spine if v not in vid]
        if bad:
            raise ParseError(no, f"unknown vertex '{bad[0]}'")
        w = tuple(vid[v] for v in spine)
        if len(set(w)) != len(w):
            raise ParseError(no, "spine repeats a vertex")
        if (level, w) in fibers:
            raise ParseError(no, f"fiber over {' '.join(spine)} declared twice")
        fibers[(level, w)] = len(ids)
        for i, cid in enumerate(ids):
            if cid in cells or cid in vid:
                raise ParseError(no, f"cell id '{cid}' is already in use")
            cells[cid] = Cell(level, w, i)
            where[cells[cid]] = no

    def cell(no, cid):
        if cid not in cells:
            raise ParseError(no, f"dangling cell id '{cid}'")
        return cells[cid]

    def top(no, cid):
        c = cell(no, cid)
        if c.level != n:
            raise ParseError(no, f"cell '{cid}' is not a top cell")
        return c

    projections, proj_line = {}, {}
    for no, toks in by_kind["proj"]:
        if len(toks) < 2 or toks[1] != ":":
            raise ParseError(no, "proj lines read 'proj <cell-id> : <cell-ids...>'")
        c = cell(no, toks[0])
        if c.level < 3:
            raise ParseError(no, "level-2 cells project to their vertices implicitly")
        if c in projections:
            raise ParseError(no, f"second projection row for '{toks[0]}'")
        row = tuple(cell(no, x) for x in toks[2:])
        if len(row) != c.level:
            raise ParseError(no, f"projection row needs {c.level} entries")
        for i, x in enumerate(row, start=1):
            if x.level != c.level - 1 or x.spine != delete(c.spine, i):
                raise ParseError(no, f"projection {i} does not lie over face {i}")
        projections[c] = row
        proj_line[c] = no
    for c, no in where.items():
        if c.level >= 3 and c not in projections:
            raise ParseError(no, "a cell on this line has no projection row")

    def lower(x):
        return projections[x] if x.level >= 3 else (x.spine[1], x.spine[0])

    class _Rows:
        # just enough of a structure for is_compatible on parsed rows
        def project(self, x):
            return lower(x)

    for c, row in projections.items():
        if not is_compatible(_Rows(), row):
            raise ParseError(proj_line[c], "projection row is not compatible")

    q = []
    for no, toks in by_kind["q"]:
        if len(toks) != n + 1:
            raise ParseError(no, f"q lines list {n + 1} cells")
        q.append(tuple(top(no, x) for x in toks))

    inverses = None
    if by_kind["iota"]:
        inverses = {}
        for no, toks in by_kind["iota"]:
            if len(toks) != 4 or toks[2] != "->":
                raise ParseError(no, "iota lines read 'iota <perm> <cell-id> -> <cell-id>'")
            try:
                s = perms.parse_perm(toks[0], n)
            except ValueError as e:
                raise ParseError(no, str(e)) from None
            key = (s, top(no, toks[1]))
            if key in inverses:
                raise ParseError(no, "duplicate iota entry")
            inverses[key] = top(no, toks[3])
        _complete(inverses, itertools.product(perms.all_perms(n), _tops(fibers, n)),
                  by_kind["iota"][-1][0], "iota")

    action = None
    if by_kind["act"]:
        if group is None:
            raise ParseError(by_kind["act"][0][0], "an action needs a group")
        action = {}
        for no, toks in by_kind["act"]:
            if len(toks) != 4 or toks[2] != "->":
                raise ParseError(no, "act lines read 'act <g> <cell-id> -> <cell-id>'")
            try:
                g = group.parse_element(toks[0])
            except StructuralError as e:
                raise ParseError(no, str(e)) from None
            key = (g, top(no, toks[1]))
            if key in action:
                raise ParseError(no, "duplicate act entry")
            action[key] = top(no, toks[3])
        _complete(action, itertools.product(group.elements, _tops(fibers, n)),
                  by_kind["act"][-1][0], "act")

    cell_names = {c: cid for cid, c in cells.items()}
    try:
        return ExplicitPolygroupoid(n, names, group, fibers, projections, q, action, inverses,
                                    cell_names)
    except StructuralError as e:
        raise ParseError(law_line, str(e)) from None


def _tops(fibers, n):
    return [Cell(n, w, i) for (level, w), k in fibers.items() if level == n for i in range(k)]


def _complete(table, keys, line, kind):
    for key in keys:
        if key not in table:
            raise ParseError(line, f"{kind} table has no entry for {key[1]}")


def load(path) -> Polygroupoid:
    with open(path) as fh:
        return parse(fh.read())


def dump(H: Polygroupoid, path, explicit: bool = False):
    with open(path, "w") as fh:
        fh.write(serialize(H, explicit))
