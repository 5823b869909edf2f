"""Command-line front end.

Exit codes: 0 on success or PASS, 1 on FAIL (with a witness printed), 2 on
usage errors and guarded-size refusals.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import chain as fc
from . import omega as om
from . import system as fs
from . import trees
from .bisim import bisim_at, sim_level
from .errors import FinalChainError
from .props import SUITES, run_suite


class UsageError(Exception):
    pass


def load_system(arg: str) -> fs.PointedSystem | fs.GenSystem:
    """A builtin name (``dead``, ``v3``, ``z2``, ``vset:{0,2}``, ``vomega``) or a JSON path."""
    if arg == "dead":
        return fs.dead()
    if arg == "vomega":
        return fs.von_omega()
    if m := re.fullmatch(r"v(\d+)", arg):
        return fs.von_neumann(int(m[1]))
    if m := re.fullmatch(r"z(\d+)", arg):
        return fs.zermelo(int(m[1]))
    if m := re.fullmatch(r"vset:\{([\d,\s]*)\}", arg):
        return fs.von_set(int(t) for t in m[1].split(",") if t.strip())
    try:
        return fs.load(arg)
    except FileNotFoundError:
        raise UsageError(f"no builtin system or file named {arg!r}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{arg}: invalid JSON ({exc})") from None


def _finite(arg: str) -> fs.PointedSystem:
    x = load_system(arg)
    if not isinstance(x, fs.PointedSystem):
        raise UsageError(f"{arg} is not a finite system")
    return x


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_levels(args) -> int:
    if args.count:
        print(sum(1 for _ in fc.level_enumerate(args.n)))
        return 0
    for a in sorted(fc.level_enumerate(args.n)):
        print(fc.to_text(a))
    return 0


def cmd_project(args) -> int:
    a = fc.project(load_system(args.system), args.n)
    if args.json:
        _print_json(fc.to_json(a))
    else:
        print(fc.to_text(a))
    return 0


def cmd_bisim(args) -> int:
    x, y = _finite(args.x), _finite(args.y)
    if args.level is not None:
        ok = bisim_at(x, y, args.level)
        print(f"{'related' if ok else 'not related'} at level {args.level}")
        return 0 if ok else 1
    v = sim_level(x, y)
    if v.bisimilar:
        print("bisimilar")
        return 0
    print(f"distinguished at level {int(v.level)}")
    for m in v.witness:
        side = "left" if m.side == 0 else "right"
        answer = "no answer" if m.response is None else f"answered by {m.response!r}"
        print(f"  attack {side} -> {m.attack!r}, {answer}")
    return 1


def cmd_audit(args) -> int:
    r = fc.audit(args.j, args.i)
    out = {
        "map": [r.j, r.i],
        "surjective": r.surjective,
        "injective": r.injective,
        "collision": None if r.collision is None else [fc.to_text(a) for a in r.collision],
        "missed": None if r.missed is None else fc.to_text(r.missed),
        "witnesses_verified": fc.verify_audit(r),
    }
    _print_json(out)
    return 0 if out["witnesses_verified"] else 1


def cmd_succ(args) -> int:
    target = args.target
    if target.startswith("{") or target == "()":
        a = fc.parse(target)
        for b in sorted(fc.transition_successors(a, allow_root_loop=True)):
            print(fc.to_text(b))
        return 0
    a = om.branch_of(load_system(target), target)
    if args.to is not None:
        b = om.branch_of(load_system(args.to), args.to)
        v = om.succ_check(a, b, args.depth)
        _print_json(om.verdict_json(v))
        return 0 if om.holds(v) else 1
    if a.finite:
        for b in om.successors(a):
            print(json.dumps(b.display(args.depth)))
        return 0
    # infinitely branching: show the successor channel instead of a list
    C = om.successor_channel(a, args.depth)
    for j in C.indices():
        print(f"{j}: " + " ".join(fc.to_text(x) for x in sorted(C.level(j))))
    return 0


def cmd_encode(args) -> int:
    print("{" + ",".join(map(str, sorted(trees.bits_encode(args.bits)))) + "}")
    return 0


def parse_channel(arg: str, depth: int):
    kind, _, rest = arg.partition(":")
    if kind == "range":
        names = [t for t in rest.split(",") if t]
        U = om.BranchSet([om.branch_of(load_system(n), n) for n in names], depth)
        return om.range_channel(U, depth)
    if kind == "cover":
        return om.cover_channel(load_system(rest))
    raise UsageError(f"channel arg must be range:<systems> or cover:<system>, got {arg!r}")


def cmd_konig(args) -> int:
    C = parse_channel(args.channel, args.depth)
    b = om.konig_extract(C, args.depth)
    _print_json({"branch": b.name, "levels": b.display(args.depth)})
    return 0


def cmd_embed(args) -> int:
    if args.kind == "beta":
        E = trees.beta_embedding(args.depth)
    else:
        if not args.subseq:
            raise UsageError("embed pad needs --subseq, e.g. --subseq 0,2,4")
        E = trees.pad_embedding(int(t) for t in args.subseq.split(","))
    bad = E.violations()
    out = E.to_json()
    out["violations"] = bad
    _print_json(out)
    return 1 if bad else 0


def cmd_props(args) -> int:
    if args.list:
        print("\n".join(SUITES))
        return 0
    names = list(SUITES) if args.suite in (None, "all") else [args.suite]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES)}")
    failed = 0
    for name in names:
        r = run_suite(name, args.seed, args.samples)
        print(r.line())
        failed += not r.passed
    return 1 if failed else 0


def cmd_dot(args) -> int:
    kind, _, rest = args.object.partition(":")
    if kind == "binary":
        D = trees.complete_binary(int(rest))
        sys.stdout.write(trees.to_dot(D, trees.whole_channel(D)))
    elif kind == "chain":
        D = trees.final_chain(int(rest))
        sys.stdout.write(trees.to_dot(D))
    elif kind == "beta":
        depth = int(rest)
        C = trees.channel_image(trees.beta_embedding(depth), trees.whole_channel(trees.complete_binary(depth)))
        sys.stdout.write(trees.to_dot(C.chain, C))
    elif kind in ("range", "cover"):
        C = parse_channel(args.object, args.depth)
        sys.stdout.write(trees.to_dot(C.chain, C, depth=args.depth))
    else:
        raise UsageError("dot object must be binary:N, chain:N, beta:N, range:<systems> or cover:<system>")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finalchain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("levels", help="enumerate a finite level of the final chain")
    s.add_argument("n", type=int)
    s.add_argument("--count", action="store_true", help="print only the number of elements")
    s.set_defaults(func=cmd_levels)

    s = sub.add_parser("project", help="coalgebra projection of a system")
    s.add_argument("system")
    s.add_argument("n", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("bisim", help="bisimilarity, or the approximant at one level")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--level", type=int)
    s.set_defaults(func=cmd_bisim)

    s = sub.add_parser("audit", help="injectivity/surjectivity of a connecting map")
    s.add_argument("j", type=int)
    s.add_argument("i", type=int)
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("succ", help="successors of an element or of a branch at omega")
    s.add_argument("target", help="element text such as '{{},{()}}@2', or a system")
    s.add_argument("--depth", type=int, default=trees.DEFAULT_DEPTH)
    s.add_argument("--to", help="check whether this system's branch is a successor")
    s.set_defaults(func=cmd_succ)

    s = sub.add_parser("encode", help="encode a bit string as a finite set of ordinals")
    s.add_argument("bits")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("konig", help="extract a full branch from a channel")
    s.add_argument("channel", help="range:v0,z2,... or cover:vomega")
    s.add_argument("--depth", type=int, default=trees.DEFAULT_DEPTH)
    s.set_defaults(func=cmd_konig)

    s = sub.add_parser("embed", help="describe and verify a cofinal embedding")
    s.add_argument("kind", choices=["beta", "pad"])
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--subseq")
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("props", help="run proposition suites")
    s.add_argument("--suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--list", action="store_true")
    s.set_defaults(func=cmd_props)

    s = sub.add_parser("dot", help="DOT export of a chain or channel")
    s.add_argument("object", help="binary:N, chain:N, beta:N, range:<systems> or cover:<system>")
    s.add_argument("--depth", type=int, default=4)
    s.set_defaults(func=cmd_dot)
    return p


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with fc.session():
            return args.func(args)
    except (UsageError, FinalChainError, ValueError) as exc:
        print(f"finalchain: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
