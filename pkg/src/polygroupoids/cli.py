"""The ``pgx`` command line.

Exit status: 0 on success or a passing verdict, 1 on a failing
mathematical verdict, 2 on usage, parse or capacity errors.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys

from .amalgamation import (AmalgamationProblem, nonuniqueness_witness, problem_from_shape,
                           problem_shapes, uniqueness_check)
from .core import FAMILIES, check_axioms
from .errors import ParseError, PolygroupoidError, UnfillableError
from .filling import (build_simplex_family, defect_of_family, horn_fill, structure_defect,
                      twist)
from .groups import GroupSpec, enumerate_group_automorphisms
from .morphisms import (AutomorphismRep, Star, automorphism_census, automorphism_from_star,
                        certify, compose_reps, factor_automorphism, is_isomorphic,
                        lift_vertex_permutation, realize, recompose)
from .pgx import dump, load, serialize
from .recovery import check_standard_action, completion_independent, frame_independent, recover_group
from .standard import build_standard

# every --json report has this shape; "result" is command specific
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "status", "exit_code", "message", "result"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "status": {"enum": ["pass", "fail", "error"]},
        "exit_code": {"enum": [0, 1, 2]},
        "message": {"type": "string"},
        "result": {"type": ["object", "null"]},
    },
}

EXIT = {"pass": 0, "fail": 1, "error": 2}


class UsageError(Exception):
    pass


# tokens


def _vertices(H, text):
    toks = [t for t in text.replace(",", " ").split() if t]
    index = {v: i for i, v in enumerate(H.names)}
    bad = [t for t in toks if t not in index]
    if bad:
        raise UsageError(f"unknown vertex '{bad[0]}'")
    return [index[t] for t in toks]


def format_cell(H, c) -> str:
    if isinstance(c, int):
        return H.names[c]
    names = getattr(H, "cell_names", None)
    if names and c in names:
        return names[c]
    return ",".join(H.names[v] for v in c.spine) + f":{H.fiber_index(c)}"


def parse_cell(H, tok):
    """A file cell id, or ``<spine>:<index in fiber>``."""
    names = getattr(H, "cell_names", None)
    if names:
        for c, cid in names.items():
            if cid == tok:
                return c
    if ":" not in tok:
        raise UsageError(f"bad cell reference '{tok}'")
    spine, idx = tok.rsplit(":", 1)
    w = tuple(_vertices(H, spine))
    fib = H.fiber(w)
    try:
        return fib[int(idx)]
    except (ValueError, IndexError):
        raise UsageError(f"no cell '{idx}' over {spine}") from None


def _element(H, text):
    if H.group is None:
        raise UsageError("the structure has no group")
    return H.group.parse_element(text)


def _fmt(g):
    return GroupSpec.format_element(g)


# commands


def cmd_build(args):
    G = GroupSpec.parse(args.group)
    names = args.names.split(",") if args.names else None
    H = build_standard(args.n, G, args.vertices, names)
    text = serialize(H, explicit=args.explicit)
    out = {"n": H.n, "group": str(G), "vertices": list(H.names),
           "law": "explicit" if args.explicit else "standard"}
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        return "pass", f"built n={H.n} group={G} on {H.m} vertices", out
    if args.json:
        out["text"] = text
        return "pass", "", out
    return "pass", text.rstrip("\n"), out


def cmd_check(args):
    H = load(args.file)
    which = args.axioms.split(",") if args.axioms else None
    if which:
        bad = [w for w in which if w not in FAMILIES]
        if bad:
            raise UsageError(f"unknown axiom family '{bad[0]}'; choose from {', '.join(FAMILIES)}")
    report = check_axioms(H, which)
    lines = [f"{v.family}: {v.status}" + (f" ({v.message})" if v.message else "")
             for v in report.verdicts.values()]
    status = "pass" if report.passed else "fail"
    return status, "\n".join(lines), {
        "families": {k: {"status": v.status, "message": v.message} for k, v in report.verdicts.items()}}


def cmd_fill(args):
    H = load(args.file)
    toks = args.faces
    if len(toks) != H.n + 1 or toks.count("_") != 1:
        raise UsageError(f"give {H.n + 1} faces with exactly one '_'")
    cells = [None if t == "_" else parse_cell(H, t) for t in toks]
    try:
        c = horn_fill(H, cells)
    except UnfillableError as e:
        return "fail", f"no filler: {e}", {"cell": None}
    return "pass", format_cell(H, c), {"cell": format_cell(H, c), "position": toks.index("_") + 1}


def cmd_defect(args):
    H = load(args.file)
    value = structure_defect(H)
    out = {"defect": _fmt(value)}
    lines = [f"defect {_fmt(value)}"]
    if args.family:
        fams = {}
        grounds = [tuple(_vertices(H, args.ground))] if args.ground else H.grounds(H.n + 2)
        for ground in itertools.islice(grounds, args.limit):
            d = defect_of_family(H, build_simplex_family(H, ground))
            key = ",".join(H.names[v] for v in ground)
            fams[key] = _fmt(d)
            lines.append(f"{key}: {_fmt(d)}")
        out["families"] = fams
    return "pass", "\n".join(lines), out


def cmd_twist(args):
    H = load(args.file)
    g = _element(H, args.g)
    T = twist(H, g)
    dump(T, args.output)
    return "pass", f"twisted by {_fmt(g)} into {args.output}", {"g": _fmt(g), "output": args.output}


def cmd_iso(args):
    H, H2 = load(args.file1), load(args.file2)
    chi = is_isomorphic(H, H2)
    if chi is None:
        return "fail", "not isomorphic", {"isomorphic": False}
    ok, why = certify(chi)
    vmap = {H.names[v]: H2.names[u] for v, u in chi.vmap.items()}
    gmap = {_fmt(g): _fmt(chi.map_group(g)) for g in H.group.basis()}
    msg = "isomorphic: " + " ".join(f"{a}->{b}" for a, b in vmap.items())
    if not ok:
        return "fail", f"constructed map failed certification: {why}", {"isomorphic": False}
    return "pass", msg, {"isomorphic": True, "certified": ok, "vertex_map": vmap, "group_map": gmap}


def _format_rep(H, rep: AutomorphismRep):
    S = Star.default(H)
    return {"vertices": [H.names[v] for v in rep.vperm],
            "group": rep.gaut.format(),
            "shift": {",".join(H.names[x] for x in u): _fmt(t) for u, t in zip(S.tuples, rep.tmap)}}


def _all_reps(H):
    S = Star.default(H)
    G = H.group
    for vperm in itertools.permutations(H.vertex_ids):
        for gaut in enumerate_group_automorphisms(G):
            for tmap in itertools.product(G.elements, repeat=len(S.tuples)):
                yield AutomorphismRep(vperm, gaut, tmap)


def cmd_aut(args):
    H = load(args.file)
    report = automorphism_census(H)
    out = {"order": report.order, "formula": report.formula, "method": report.method,
           "consistent": report.consistent}
    lines = [str(report.order)]
    status = "pass" if report.consistent else "fail"
    if args.list:
        listed = []
        for rep in itertools.islice(_all_reps(H), args.limit):
            ok, _ = certify(realize(H, rep))
            if not ok:
                status = "fail"
            listed.append(_format_rep(H, rep))
            lines.append(json.dumps(listed[-1]))
        out["automorphisms"] = listed
    if not args.count and not args.list:
        lines[0] = (f"order {report.order} (formula {report.formula}, "
                    f"{report.method}, {'consistent' if report.consistent else 'inconsistent'})")
    return status, "\n".join(lines), out


def _sigma(H, args):
    vperm = tuple(_vertices(H, args.sigma))
    if sorted(vperm) != list(H.vertex_ids):
        raise UsageError("--sigma must list every vertex once")
    rep = lift_vertex_permutation(H, vperm)
    if args.shift:
        S = Star.default(H)
        phi = {}
        for item in args.shift:
            if "=" not in item:
                raise UsageError(f"bad shift '{item}', expected VERTS=ELT")
            verts, elt = item.split("=", 1)
            u = tuple(_vertices(H, verts))
            if u not in S.tuples:
                raise UsageError(f"{verts} is not a default star tuple")
            phi[u] = _element(H, elt)
        rep = compose_reps(H, rep, automorphism_from_star(H, S, phi))
    return rep


def cmd_factor(args):
    H = load(args.file)
    A, B = _vertices(H, args.a), _vertices(H, args.b)
    sigma = _sigma(H, args)
    fac = factor_automorphism(H, A, B, sigma)
    chi = recompose(H, fac)
    same = chi == realize(H, sigma)
    ok, why = certify(chi)
    word = "".join(side for side, _ in fac.tau)
    status = "pass" if same and ok else "fail"
    msg = f"tau word {word or '(empty)'}; recomposition {'matches' if same else 'differs'}"
    return status, msg, {"word": word, "recomposes": same, "certified": ok,
                         "sigma_a": _format_rep(H, fac.sigma_a), "sigma_b": _format_rep(H, fac.sigma_b)}


def cmd_recover(args):
    H = load(args.file)
    R = recover_group(H)
    spec = R.structure()
    report = check_standard_action(H, R)
    out = {"order": R.order, "structure": None if spec is None else str(spec),
           "abelian": R.is_abelian(), "exponent": R.exponent,
           "action": {k: v.status for k, v in report.verdicts.items()}}
    passed = report.passed and R.is_abelian() and spec is not None
    if args.full:
        w = R.spine
        fi, _ = frame_independent(H, w)
        ci, _ = completion_independent(H, w)
        out.update(frame_independent=fi, completion_independent=ci)
        passed = passed and fi and ci
    msg = f"group {out['structure']} of order {R.order}"
    return "pass" if passed else "fail", msg, out


def _problems(H, args):
    if args.blocks:
        blocks = [_vertices(H, b) for b in args.blocks.split(";")]
        base = _vertices(H, args.base) if args.base else []
        if len(blocks) != args.k:
            raise UsageError(f"--blocks lists {len(blocks)} blocks, --k says {args.k}")
        return [AmalgamationProblem(H, tuple(blocks), frozenset(base))]
    return [problem_from_shape(H, b, sizes) for b, sizes in problem_shapes(H.m, args.k)]


def cmd_amalg(args):
    H = load(args.file)
    if args.k < 1:
        raise UsageError("--k must be positive")
    verdicts, lines = [], []
    for P in _problems(H, args):
        v = uniqueness_check(H, P)
        d = P.describe()
        d.update(status=v.status, solutions=v.solutions, mode=v.mode)
        d["base"] = [H.names[x] for x in d["base"]]
        d["blocks"] = [[H.names[x] for x in b] for b in d["blocks"]]
        verdicts.append(d)
        lines.append(f"base {{{','.join(d['base'])}}} blocks "
                     + " ".join("{" + ",".join(b) + "}" for b in d["blocks"]) + f": {v.status}")
    status = "pass" if all(d["status"] == "unique" for d in verdicts) else "fail"
    return status, "\n".join(lines), {"problems": verdicts}


def cmd_witness(args):
    H = load(args.file)
    w = _vertices(H, args.tuple)
    W = nonuniqueness_witness(H, w)
    if W is None:
        return "fail", "the acting group is trivial", {"witness": None}
    ok, why = W.certify(H)
    out = {"cell": format_cell(H, W.cell), "image": format_cell(H, W.automorphism(W.cell)),
           "q_tuple": [format_cell(H, c) for c in W.q_tuple], "position": W.position,
           "certified": ok}
    msg = f"{out['cell']} -> {out['image']}" + ("" if ok else f" (not certified: {why})")
    return "pass" if ok else "fail", msg, out


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a structured report")
    p = argparse.ArgumentParser(prog="pgx", description="finite n-ary polygroupoids")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", parents=[common], help="write a standard model")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--group", required=True, help="cyclic factors, e.g. 2x2")
    s.add_argument("--vertices", type=int, required=True)
    s.add_argument("--names", help="comma separated vertex names")
    s.add_argument("--explicit", action="store_true", help="write every table")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("check", parents=[common], help="run the axiom families")
    s.add_argument("file")
    s.add_argument("--axioms", help="comma separated subset of " + ",".join(FAMILIES))
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("fill", parents=[common], help="fill a horn; '_' marks the gap")
    s.add_argument("file")
    s.add_argument("--faces", nargs="+", required=True)
    s.set_defaults(func=cmd_fill)

    s = sub.add_parser("defect", parents=[common], help="defect of the structure")
    s.add_argument("file")
    s.add_argument("--family", action="store_true", help="also list family defects")
    s.add_argument("--ground", help="one ground of n+2 vertices")
    s.add_argument("--limit", type=int, default=50)
    s.set_defaults(func=cmd_defect)

    s = sub.add_parser("twist", parents=[common], help="twist Q by a group element")
    s.add_argument("file")
    s.add_argument("--g", required=True, help="element, coordinates joined by '.'")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_twist)

    s = sub.add_parser("iso", parents=[common], help="test isomorphism")
    s.add_argument("file1")
    s.add_argument("file2")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("aut", parents=[common], help="automorphism census")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true")
    g.add_argument("--list", action="store_true")
    s.add_argument("--limit", type=int, default=20)
    s.set_defaults(func=cmd_aut)

    s = sub.add_parser("factor", parents=[common], help="factor an automorphism over A and B")
    s.add_argument("file")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--sigma", required=True, help="images of the vertices in order")
    s.add_argument("--shift", action="append", help="STAR-TUPLE=ELT, repeatable")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("recover", parents=[common], help="recover the acting group")
    s.add_argument("file")
    s.add_argument("--full", action="store_true", help="also check frame independence")
    s.set_defaults(func=cmd_recover)

    s = sub.add_parser("amalg", parents=[common], help="uniqueness of amalgamation")
    s.add_argument("file")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--blocks", help="blocks separated by ';', vertices by ','")
    s.add_argument("--base", help="base vertices")
    s.set_defaults(func=cmd_amalg)

    s = sub.add_parser("witness", parents=[common], help="a failure witness over n+1 vertices")
    s.add_argument("file")
    s.add_argument("--tuple", required=True)
    s.set_defaults(func=cmd_witness)
    return p


def _emit(args, status, message, result):
    code = EXIT[status]
    if getattr(args, "json", False):
        print(json.dumps({"command": args.command, "status": status, "exit_code": code,
                          "message": message, "result": result}))
    elif message:
        stream = sys.stderr if status == "error" else sys.stdout
        print(message, file=stream)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse has already printed its message
        return e.code if isinstance(e.code, int) else 2
    try:
        status, message, result = args.func(args)
    except ParseError as e:
        return _emit(args, "error", f"parse error: {e}", None)
    except (UsageError, PolygroupoidError, OSError, ValueError) as e:
        return _emit(args, "error", f"error: {e}", None)
    return _emit(args, status, message, result)


if __name__ == "__main__":
    sys.exit(main())
