"""Command line front end.

Subcommands map onto the library layers: diagram hygiene (validate,
heights, vershik), dimension group queries (k0-class, positivity),
invariants (spectrum), the equivalence deciders (weak, tau, kconj,
conjugator), numerical semigroup arithmetic (frobenius), and certificate
re-checking (verify).  Every report embeds the bounds it ran with, so an
Unknown verdict names the exact search that was exhausted; --format picks
json or a flat key:value table and --out redirects the report to a file.

Exit codes: 0 the command completed and the verdict (including No, Failed
or Unknown) is in the report; 1 input or usage error; 2 capability error,
i.e. a bound of the exact arithmetic was exceeded.
"""

import argparse
import json
import sys

from .bratteli import (
    CELL_CAP,
    CapabilityError,
    DiagramStructureError,
    DiagramSyntaxError,
    LevelRangeError,
    MAX_PATH,
    class_of_clopen,
    heights,
    load_diagram,
    min_path,
    path_rank,
    validate,
    vershik_successor,
)
from .classify import (
    StageError,
    conjugate_at_resolution,
    conjugator_certificate,
    decide_k_conjugacy,
    decide_tau,
    decide_weak,
    frobenius,
    ladder_certificate,
    tau_certificate,
    verify_certificate,
    weak_certificate,
)
from .dimgroup import DimGroup
from .invariants import periodic_spectrum


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _common_flags(sub):
    sub.add_argument("--depth", type=int, default=40, help="search depth bound")
    sub.add_argument("--primes", type=int, default=97, help="prime cutoff")
    sub.add_argument(
        "--max-level", dest="max_level", type=int, default=None, help="level cap"
    )
    sub.add_argument("--format", choices=("table", "json"), default="table")
    sub.add_argument("--out", default=None, help="write the report to a file")


def _build_parser():
    parser = _Parser(prog="cantorconj", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs.required = True

    sub = subs.add_parser("validate", help="primitivity and ordering report")
    sub.add_argument("diagram")
    sub.set_defaults(handler=_cmd_validate)

    sub = subs.add_parser("heights", help="tower heights at a level")
    sub.add_argument("diagram")
    sub.add_argument("level", type=int)
    sub.set_defaults(handler=_cmd_heights)

    sub = subs.add_parser("k0-class", help="class of a union of cells")
    sub.add_argument("diagram")
    sub.add_argument("level", type=int)
    sub.add_argument("cells", nargs="+", metavar="V:J")
    sub.set_defaults(handler=_cmd_k0_class)

    sub = subs.add_parser("positivity", help="sign of a class")
    sub.add_argument("diagram")
    sub.add_argument("level", type=int)
    sub.add_argument("vector", metavar="C1,C2,...")
    sub.set_defaults(handler=_cmd_positivity)

    sub = subs.add_parser("spectrum", help="divisor set, prime by prime")
    sub.add_argument("diagram")
    sub.set_defaults(handler=_cmd_spectrum)

    sub = subs.add_parser("weak", help="weak approximate conjugacy")
    sub.add_argument("a")
    sub.add_argument("b")
    sub.set_defaults(handler=_cmd_weak)

    sub = subs.add_parser("tau", help="approximate tau-conjugacy")
    sub.add_argument("a")
    sub.add_argument("b")
    sub.set_defaults(handler=_cmd_tau)

    sub = subs.add_parser("kconj", help="approximate K-conjugacy")
    sub.add_argument("a")
    sub.add_argument("b")
    sub.add_argument("--span", type=int, default=12, help="ladder level span bound")
    sub.add_argument("--base", type=int, default=3, help="ladder base level bound")
    sub.set_defaults(handler=_cmd_kconj)

    sub = subs.add_parser("conjugator", help="conjugacy at a fixed resolution")
    sub.add_argument("a")
    sub.add_argument("b")
    sub.add_argument("level", type=int)
    sub.add_argument("--lookahead", type=int, default=None)
    sub.set_defaults(handler=_cmd_conjugator)

    sub = subs.add_parser("verify", help="re-check a certificate file")
    sub.add_argument("certificate")
    sub.add_argument("systems", nargs="+")
    sub.set_defaults(handler=_cmd_verify)

    sub = subs.add_parser("vershik", help="successor orbit of a tower")
    sub.add_argument("diagram")
    sub.add_argument("--level", type=int, default=1)
    sub.add_argument("--vertex", type=int, default=0)
    sub.add_argument("--limit", type=int, default=0, help="0 walks the whole tower")
    sub.set_defaults(handler=_cmd_vershik)

    sub = subs.add_parser("frobenius", help="representability threshold")
    sub.add_argument("generators", nargs="+", type=int)
    sub.set_defaults(handler=_cmd_frobenius)

    for sub in subs.choices.values():
        _common_flags(sub)
    return parser


def _cell(token):
    v, j = token.split(":")
    return (int(v), int(j))


def _vector(token):
    return tuple(int(x) for x in token.split(","))


def _element_json(e):
    return {"level": e.level, "vector": list(e.vector)}


def _obstruction_json(o):
    return {"kind": o.kind, "witness": o.witness}


def _cmd_validate(args):
    try:
        d = load_diagram(args.diagram)
    except (DiagramSyntaxError, DiagramStructureError) as e:
        return {"ok": False, "primitive": None, "issues": [str(e)]}
    rep = validate(d, args.depth)
    return {
        "ok": rep.ok,
        "primitive": rep.primitive,
        "primitivity_level": rep.primitivity_level,
        "properly_ordered": rep.properly_ordered,
        "issues": list(rep.issues),
    }


def _cmd_heights(args):
    d = load_diagram(args.diagram)
    return {"level": args.level, "heights": list(heights(d, args.level))}


def _cmd_k0_class(args):
    d = load_diagram(args.diagram)
    e = class_of_clopen(d, args.level, tuple(_cell(t) for t in args.cells))
    return {"element": _element_json(e)}


def _cmd_positivity(args):
    d = load_diagram(args.diagram)
    grp = DimGroup(d)
    e = grp.element(args.level, _vector(args.vector))
    res = grp.is_positive(e, args.depth)
    return {
        "element": _element_json(e),
        "verdict": res.verdict,
        "witness_level": res.witness_level,
    }


def _cmd_spectrum(args):
    d = load_diagram(args.diagram)
    trunc = periodic_spectrum(d, args.primes, depth=args.depth)
    return {"spectrum": trunc.to_json()}


def _cmd_weak(args):
    a, b = load_diagram(args.a), load_diagram(args.b)
    res = decide_weak(a, b, prime_cutoff=args.primes, depth=args.depth)
    out = {"verdict": res.verdict, "witness": res.witness}
    if res.verdict == "weak":
        out["forward"] = [t.to_json() for t in res.forward]
        out["backward"] = [t.to_json() for t in res.backward]
        out["certificate"] = weak_certificate(res, a, b)
    return out


def _cmd_tau(args):
    a, b = load_diagram(args.a), load_diagram(args.b)
    res = decide_tau(a, b, prime_cutoff=args.primes, depth=args.depth)
    out = {
        "verdict": res.verdict,
        "obstructions": [_obstruction_json(o) for o in res.obstructions],
    }
    if res.verdict == "tau":
        out["certificate"] = tau_certificate(res, a, b)
    return out


def _cmd_kconj(args):
    a, b = load_diagram(args.a), load_diagram(args.b)
    res = decide_k_conjugacy(
        a,
        b,
        max_span=args.span,
        max_base=args.base,
        prime_cutoff=args.primes,
        depth=args.depth,
    )
    out = {
        "verdict": res.verdict,
        "obstructions": [_obstruction_json(o) for o in res.obstructions],
        "note": res.note,
    }
    if res.ladder is not None:
        out["ladder"] = res.ladder.to_json()
        out["certificate"] = ladder_certificate(res.ladder, a, b)
    return out


def _cmd_conjugator(args):
    a, b = load_diagram(args.a), load_diagram(args.b)
    try:
        bundle = conjugate_at_resolution(a, b, args.level, args.lookahead, args.depth)
    except StageError as e:
        out = {"verdict": "failed", "stage": e.stage, "message": str(e)}
        if e.obstruction is not None:
            out["obstruction"] = _obstruction_json(e.obstruction)
        return out
    return {
        "verdict": bundle.report.verdict,
        "checked": bundle.report.checked,
        "unresolved": bundle.report.unresolved,
        "morphism": bundle.morphism.to_json(),
        "element": bundle.corrector.to_json(),
        "certificate": conjugator_certificate(
            bundle.corrector,
            bundle.sigma.target_level,
            bundle.blocks,
            bundle.images,
        ),
    }


def _cmd_verify(args):
    with open(args.certificate, "r", encoding="utf-8") as fh:
        cert = json.load(fh)
    if not isinstance(cert, dict):
        raise ValueError("certificate file must hold a JSON object")
    loaded = [load_diagram(p) for p in args.systems]
    chk = verify_certificate(cert, loaded)
    return {"claim": cert.get("claim"), "ok": chk.ok, "reason": chk.reason}


def _cmd_vershik(args):
    d = load_diagram(args.diagram)
    hs = heights(d, args.level)
    if not 0 <= args.vertex < len(hs):
        raise ValueError("vertex %d out of range" % args.vertex)
    height = hs[args.vertex]
    limit = args.limit if args.limit > 0 else height
    if limit > CELL_CAP:
        raise CapabilityError(
            "orbit enumeration caps at %d floors, tower has %d" % (CELL_CAP, height)
        )
    path = min_path(d, args.vertex, args.level)
    orbit = []
    for _ in range(limit):
        entry = {
            "floor": path_rank(d, path) + 1,
            "path": [list(edge) for edge in path],
        }
        nxt = vershik_successor(d, path)
        if nxt is MAX_PATH:
            entry["successor"] = "max"
            orbit.append(entry)
            break
        entry["successor"] = "next"
        orbit.append(entry)
        path = nxt
    return {
        "level": args.level,
        "vertex": args.vertex,
        "height": height,
        "orbit": orbit,
    }


def _cmd_frobenius(args):
    return {
        "generators": list(args.generators),
        "threshold": frobenius(args.generators),
    }


def _table_lines(obj, prefix=""):
    lines = []
    for key in sorted(obj):
        val = obj[key]
        name = prefix + str(key)
        if isinstance(val, dict):
            lines.extend(_table_lines(val, name + "."))
        elif isinstance(val, (list, tuple)):
            lines.append("%s: %s\n" % (name, json.dumps(val)))
        else:
            lines.append("%s: %s\n" % (name, val))
    return lines


def _emit(report, fmt, out):
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = "".join(_table_lines(report))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print("usage error: %s" % e, file=sys.stderr)
        return 1
    try:
        payload = args.handler(args)
    except (CapabilityError, LevelRangeError) as e:
        print("capability error: %s" % e, file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print("input error: %s" % e, file=sys.stderr)
        return 1
    bounds = {}
    for key in ("depth", "primes", "span", "base", "max_level"):
        if getattr(args, key, None) is not None:
            bounds[key] = getattr(args, key)
    report = {"command": args.command, "bounds": bounds}
    report.update(payload)
    _emit(report, args.format, args.out)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
