"""Command-line front end: generation, construction, verification, queries,
and determinant benchmarking, with JSON artifacts and stable exit codes.

Exit codes: 0 all checks pass, 1 a verification failed (the report is
still written), 2 input or usage error.
"""

import argparse
import json
import statistics
import sys
import time

from . import __version__, checks, maps
from . import exactla as la
from .mpoly import ParseError, Poly
from .projgeo import FlatsInstance, ProjPoint, random_general_flats, transversal_through
from .scalar import FieldCtx

GENERATE_RANGE = (2, 6)
BENCH_CAPS = {"minor_dp": 6, "bareiss": 5}


def parse_field(text):
    """--field qq|fp:<p>, validated by the field constructor."""
    if text == "qq":
        return FieldCtx.rationals()
    if text.startswith("fp:"):
        return FieldCtx.prime(int(text[3:], 10))
    raise ValueError(f"unknown field {text!r} (expected qq or fp:<prime>)")


# ---- artifact serialization ---------------------------------------------


def dump_json(obj, path):
    text = json.dumps(obj, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def map_to_dict(inst, vmap, inv):
    d = inst.to_dict(__version__)
    d["Q"] = [q.to_dict() for q in vmap.Q]
    d["components"] = [c.to_dict() for c in vmap.components]
    d["b"] = [[str(c) for c in row] for row in inv.b]
    d["g"] = [g.to_dict() for g in inv.g]
    d["inverse_components"] = [c.to_dict() for c in inv.inverse_components]
    d["dual_flats"] = [
        {"j": f.j, "f2": [str(c) for c in f.a]} for f in inv.dual_flats
    ]
    return d


def map_from_dict(d):
    """Rebuild instance, map, and inverse data verbatim from a map file.

    Nothing is trusted here: the verification suite re-derives every
    claimed property, so a tampered file fails the corresponding check
    rather than being silently repaired on load.
    """
    inst = FlatsInstance.from_dict(d)
    ctx = inst.ctx
    n1 = inst.n + 1
    qs = [Poly.from_dict(q, n1, ctx) for q in d["Q"]]
    components = [Poly.from_dict(c, n1, ctx) for c in d["components"]]
    vmap = maps.VeneroniMap(
        n=inst.n, ctx=ctx, flats=list(inst.flats), Q=qs, components=components
    )
    b = [[ctx.parse(s) for s in row] for row in d["b"]]
    g = [Poly.from_dict(p, n1, ctx) for p in d["g"]]
    icomps = [Poly.from_dict(c, n1, ctx) for c in d["inverse_components"]]
    from .projgeo import Flat

    duals = [
        Flat(rec["j"], tuple(ctx.parse(s) for s in rec["f2"]))
        for rec in d["dual_flats"]
    ]
    inv = maps.InverseData(b=b, g=g, inverse_components=icomps, dual_flats=duals)
    return inst, vmap, inv


def load_instance(args, need_field=True):
    """Instance from -i (flats or map file) or from -n/--seed flags.

    Returns (inst, vmap, inv) where the map parts are None unless the
    input was a map file.
    """
    if args.input is not None:
        d = load_json(args.input)
        if "Q" in d:
            return map_from_dict(d)
        return FlatsInstance.from_dict(d), None, None
    if args.n is None:
        raise ValueError("need -i FILE or -n N")
    ctx = parse_field(args.field) if need_field else FieldCtx.rationals()
    inst = random_general_flats(args.n, args.seed, ctx, bound=args.bound)
    return inst, None, None


# ---- subcommands ---------------------------------------------------------


def cmd_generate(args):
    n = args.n
    if n is None or not GENERATE_RANGE[0] <= n <= GENERATE_RANGE[1]:
        print(
            f"error: -n must be in {GENERATE_RANGE[0]}..{GENERATE_RANGE[1]}",
            file=sys.stderr,
        )
        return 2
    ctx = parse_field(args.field)
    try:
        inst = random_general_flats(n, args.seed, ctx, bound=args.bound)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    dump_json(inst.to_dict(__version__), args.output)
    print(f"retries: {inst.retries}", file=sys.stderr)
    return 0


def cmd_build(args):
    inst, vmap, inv = load_instance(args)
    if vmap is None:
        try:
            vmap, inv = checks.build_all(inst)
        except maps.ConstructionError as exc:
            print(f"error: construction failed: {exc}", file=sys.stderr)
            return 1
    dump_json(map_to_dict(inst, vmap, inv), args.output)
    return 0


def cmd_verify(args):
    inst, vmap, inv = load_instance(args)
    report = checks.run_suite(
        inst,
        vmap,
        inv,
        level=args.level,
        k=args.samples,
        seed=args.seed if args.input is None or args.seed_given else None,
        force_symbolic=args.force_symbolic,
        timings=args.timings,
        version=__version__,
    )
    if args.output is not None:
        dump_json(report.to_dict(), args.output)
    if args.json:
        if args.output is None:
            dump_json(report.to_dict(), None)
    else:
        for c in report.checks:
            line = f"{c.name}: {c.status}"
            if c.status == "skip":
                line += f" ({c.witness.get('reason', '')})"
            print(line)
        print(report.summary)
    return 0 if report.ok else 1


def cmd_transversal(args):
    inst, vmap, _ = load_instance(args)
    ctx = inst.ctx
    try:
        p = ProjPoint.parse(args.point, ctx)
    except (ValueError, ZeroDivisionError, ParseError) as exc:
        print(f"error: bad point: {exc}", file=sys.stderr)
        return 2
    if len(p) != inst.n + 1:
        print(f"error: point must have {inst.n + 1} coordinates", file=sys.stderr)
        return 2
    omit = set(args.omit or [])
    if any(j < 0 or j > inst.n for j in omit):
        print(f"error: --omit indices must be in 0..{inst.n}", file=sys.stderr)
        return 2
    queried = [f for f in inst.flats if f.j not in omit]
    res = transversal_through(p, queried, ctx)

    def fmt_param(m):
        return None if m is None else f"{ctx.format(m[0])}:{ctx.format(m[1])}"

    if args.json:
        out = {"kind": res.kind, "queried": [f.j for f in queried]}
        if res.kind == "unique":
            out["line"] = [res.line.base.format(), res.line.dir.format()]
            out["meetings"] = [
                {"j": f.j, "param": fmt_param(m)}
                for f, m in zip(queried, res.meeting_params)
            ]
        elif res.kind == "family":
            out["dim"] = res.dim
            out["basis"] = [b.format() for b in res.basis]
        dump_json(out, None)
        return 0
    if res.kind == "unique":
        print("unique transversal")
        print(f"  through: {res.line.base.format()}")
        print(f"  and:     {res.line.dir.format()}")
        for f, m in zip(queried, res.meeting_params):
            print(f"  meets flat {f.j} at parameter {fmt_param(m)}")
    elif res.kind == "family":
        print(f"family of transversals, dimension {res.dim}")
        for b in res.basis:
            print(f"  basis point: {b.format()}")
    else:
        print("no transversal")
    return 0


def cmd_demo(args):
    ns = [args.n] if args.n else [3, 4]
    ctx = parse_field(args.field)
    failed = False
    for n in ns:
        if n not in (3, 4):
            print(f"error: demos exist for n=3 and n=4 only, not n={n}", file=sys.stderr)
            return 2
        inst = random_general_flats(n, args.seed, ctx, bound=args.bound)
        if n == 3:
            count, disc_ok = checks.count_transversals_n3(inst.flats, ctx, args.seed)
            m, lines = checks.transversal_lines_n3(inst.flats, ctx, args.seed)
            print(f"n=3 seed={args.seed}: meeting form {m.text(['s', 't'])}")
            print(
                f"  {count} transversals to the four lines"
                f" (discriminant nonzero: {disc_ok})"
            )
            if lines:
                for line in lines:
                    print(
                        f"  explicit line through {line.base.format()}"
                        f" and {line.dir.format()}"
                    )
            else:
                print("  the two lines are conjugate over this field")
            failed |= count != 2 or not disc_ok
        else:
            res = checks.residual_component_example(inst.flats, ctx, args.seed)
            print(f"n=4 seed={args.seed}: residual plane point")
            if res.status == "pass":
                w = res.witness
                print(f"  q = {w['q']} lies on Q_0 and Q_1")
                print("  two lines through q meet four of the five flats each")
                print("  no line through q meets all five flats")
            else:
                print(f"  FAILED: {res.witness}")
                failed = True
    return 1 if failed else 0


def cmd_bench(args):
    strategies = args.strategies.split(",")
    for s in strategies:
        if s not in BENCH_CAPS:
            print(f"error: unknown strategy {s!r}", file=sys.stderr)
            return 2
    lo, hi = args.n_min, args.n_max
    if lo < 2 or hi < lo:
        print("error: bad n range", file=sys.stderr)
        return 2
    for s in strategies:
        if hi > BENCH_CAPS[s] and not args.force:
            print(
                f"error: {s} is capped at n={BENCH_CAPS[s]} (use --force to override)",
                file=sys.stderr,
            )
            return 2
    reps = max(1, args.reps)
    print(f"{'n':>2} {'strategy':>9} {'median_ms':>10} {'det_terms':>24} {'composition_terms':>18}")
    for n in range(lo, hi + 1):
        inst = random_general_flats(n, args.seed, FieldCtx.rationals(), bound=args.bound)
        b = maps.build_matrix_B(inst.flats, inst.ctx)
        minors = [maps.minor_matrix(b, i) for i in range(n + 1)]
        results = {}
        for s in strategies:
            times = []
            dets = None
            for _ in range(reps):
                t0 = time.perf_counter()
                dets = [la.det_poly_matrix(m, s) for m in minors]
                times.append((time.perf_counter() - t0) * 1000.0)
            results[s] = dets
            terms = [len(d.terms) for d in dets]
            if n <= 5:
                prod = Poly.var(0, n + 1, inst.ctx.one)
                for i in range(n + 1):
                    prod = prod * dets[i].div_var(i)
                comp_terms = str(len(prod.terms))
            else:
                comp_terms = "-"
            print(
                f"{n:>2} {s:>9} {statistics.median(times):>10.2f}"
                f" {str(terms):>24} {comp_terms:>18}"
            )
        first = results[strategies[0]]
        for s in strategies[1:]:
            if results[s] != first:
                print(f"error: strategies disagree at n={n}", file=sys.stderr)
                return 1
    return 0


# ---- entry point ---------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="veneroni",
        description=(
            "Construct and verify the birational transformations of P^n"
            " defined by n+1 general codimension-2 flats."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, io=True):
        p.add_argument("-n", type=int, default=None, help="ambient dimension")
        p.add_argument("--seed", type=int, default=0, help="instance seed")
        p.add_argument("--bound", type=int, default=9, help="coefficient bound")
        p.add_argument(
            "--field", default="qq", help="ground field: qq or fp:<prime>"
        )
        if io:
            p.add_argument("-i", "--input", default=None, help="input JSON file")
            p.add_argument("-o", "--output", default=None, help="output JSON file")

    g = sub.add_parser("generate", help="write a random general flats file")
    common(g)
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("build", help="construct the map and its inverse")
    common(b)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run the full verification suite")
    common(v)
    v.add_argument("--level", choices=("fast", "full"), default="full")
    v.add_argument("-k", "--samples", type=int, default=20, help="sample count")
    v.add_argument("--json", action="store_true", help="print the JSON report")
    v.add_argument(
        "--force-symbolic",
        action="store_true",
        help=(
            "prove the composition identity symbolically even for n=5"
            " (exact but slow: expect tens of minutes)"
        ),
    )
    v.add_argument(
        "--timings",
        action="store_true",
        help="record per-check wall time (breaks byte-identical reruns)",
    )
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("transversal", help="query transversals through a point")
    common(t)
    t.add_argument("--point", required=True, help='e.g. "1,2/3,0,5,1"')
    t.add_argument(
        "--omit",
        type=int,
        nargs="*",
        default=None,
        help="flat indices to leave out of the query",
    )
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_transversal)

    d = sub.add_parser("demo", help="run the n=3 and n=4 narrative examples")
    common(d, io=False)
    d.set_defaults(func=cmd_demo)

    hb = sub.add_parser("bench", help="time the determinant strategies")
    common(hb, io=False)
    hb.add_argument("--n-min", type=int, default=2)
    hb.add_argument("--n-max", type=int, default=4)
    hb.add_argument(
        "--strategies", default="minor_dp,bareiss", help="comma-separated list"
    )
    hb.add_argument("--reps", type=int, default=3, help="median of this many runs")
    hb.add_argument("--force", action="store_true", help="ignore the size caps")
    hb.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "seed"):
        args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(
            f"error: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError, ParseError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
