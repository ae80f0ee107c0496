"""Command-line front end: ``qgroupoid verify | generate | selftest``.

Exit codes: 0 when every check passes, 1 when some check fails, 2 on bad
input (unparseable file, unknown generator, bad parameters, I/O errors).
"""

import argparse
import json
import sys

from . import fixtures as fx
from . import groupoid as gp
from .corepresentation import regular_rep, sign_rep, trivial_rep
from .matrix_kernel import DEFAULT_TOL
from .selftest import PROPERTIES, selftest
from .serialization import Instance, ParseError, load, save, to_json
from .verify import CHECK_GROUPS, verify_instance

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
GENERATORS = ("trivial", "pair", "group", "action", "quantum", "rep", "fixture")
REPS = {"trivial": trivial_rep, "regular": regular_rep, "sign": sign_rep}


class BadParams(ValueError):
    pass


def _write_json(obj, path):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _report_dict(rep, inst=None):
    d = rep.to_dict()
    if inst is not None:
        d["instance"] = {"kind": inst.kind, "name": inst.name}
    return d


# -- generate ---------------------------------------------------------------------

def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise BadParams(f"generate {args.kind} needs {', '.join(missing)}")


def make_instance(args):
    """Instance described by the ``generate`` arguments."""
    k = args.kind
    if k == "trivial":
        G = gp.generate("trivial")
    elif k == "pair":
        _need(args, "n")
        if args.n < 1:
            raise BadParams("--n must be positive")
        G = gp.generate("pair", n=args.n)
    elif k == "group":
        _need(args, "table")
        G = gp.generate("group", table=args.table)
    elif k == "action":
        _need(args, "table", "perms")
        try:
            perms = json.loads(args.perms)
        except json.JSONDecodeError as exc:
            raise BadParams(f"--perms is not JSON: {exc}") from None
        G = gp.generate("action", table=args.table, perms=perms)
        G.name = f"action({args.table})"
    elif k == "quantum":
        _need(args, "group")
        T, names = gp.named_table(args.group)
        from .quantum_groupoid import group_algebra_bundle
        return Instance("quantum_bundle", f"C[{args.group}]",
                        {"bundle": group_algebra_bundle(T, names, name=f"C[{args.group}]")})
    elif k == "rep":
        _need(args, "groupoid")
        G = _groupoid_arg(args.groupoid)
        R = REPS[args.rep](G)
        return Instance("representation", f"{R.name}-{G.name}", {"rep": R, "delta_scale": 1.0})
    elif k == "fixture":
        _need(args, "name")
        try:
            return fx.get(args.name)
        except KeyError:
            raise BadParams(f"unknown fixture {args.name!r}; choose from {fx.names()}") from None
    else:
        raise BadParams(f"unknown generator {k!r}")
    return Instance("groupoid", G.name, {"groupoid": G, "haar_weights": None})


def _groupoid_arg(s):
    """A groupoid given as a fixture name or as a path to a groupoid file."""
    if s in fx.FIXTURES and fx.FIXTURES[s]().kind == "groupoid":
        return fx.get(s).payload["groupoid"]
    inst = load(s)
    if inst.kind != "groupoid":
        raise BadParams(f"{s}: expected a groupoid file, got {inst.kind}")
    return inst.payload["groupoid"]


def cmd_generate(args):
    inst = make_instance(args)
    if args.out in (None, "-"):
        sys.stdout.write(to_json(inst) + "\n")
        return EXIT_PASS
    save(inst, args.out)
    if load(args.out) != inst:
        raise RuntimeError(f"{args.out}: emitted file does not round-trip")
    print(f"wrote {inst.kind} {inst.name!r} to {args.out}")
    return EXIT_PASS


# -- verify -----------------------------------------------------------------------

def cmd_verify(args):
    inst = load(args.path)
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    rep = verify_instance(inst, args.tol, checks)
    print(rep.format())
    if args.json:
        _write_json(_report_dict(rep, inst), args.json)
    return EXIT_PASS if rep.passed else EXIT_FAIL


# -- selftest ---------------------------------------------------------------------

def cmd_selftest(args):
    rep = selftest(args.seed, args.tol, inject_fault=args.inject_fault)
    print(rep.format())
    if args.json:
        _write_json(rep.to_dict(), args.json)
    return EXIT_PASS if rep.passed else EXIT_FAIL


# -- entry point ------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="qgroupoid", description="Verify finite quantum groupoid instances.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check every axiom of an instance file")
    v.add_argument("path")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--json", metavar="OUT", help="write the machine-readable report here ('-' for stdout)")
    groups = sorted({g for gs in CHECK_GROUPS.values() for g in gs})
    v.add_argument("--checks", help="comma-separated check groups: " + ", ".join(groups))
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("generate", help="write an instance file")
    g.add_argument("kind", choices=GENERATORS)
    g.add_argument("--n", type=int, help="pair: number of objects")
    g.add_argument("--table", help="group/action: z1..zN or s3")
    g.add_argument("--perms", help="action: JSON list of permutations, one per group element")
    g.add_argument("--group", help="quantum: z1..zN or s3")
    g.add_argument("--groupoid", help="rep: groupoid fixture name or groupoid file")
    g.add_argument("--rep", choices=sorted(REPS), default="trivial", help="rep: which representation")
    g.add_argument("--name", help="fixture: name of a built-in instance")
    g.add_argument("--out", help="output path (default stdout)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("selftest", help="run the seeded property suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--json", metavar="OUT")
    s.add_argument("--inject-fault", choices=[n for n, _ in PROPERTIES], help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, BadParams, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
