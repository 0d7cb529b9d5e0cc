"""Command-line front end: ``qcover construct | verify | bounds | stats``.

Exit codes: 0 success (and fully covered), 1 uncovered targets, 2 usage or
file errors, 3 resource caps, 4 search or construction failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import bounds
from .design import Design
from .errors import QCoverError, ResourceLimitError
from .gfq import field_of_order
from .projgeom import DEFAULT_CAP, gaussian, unit_span
from .qcdfile import read_design, write_design

FAMILIES = ("632", "842", "843", "2n32", "3n8-42", "2n43")
BOUND_FAMILIES = ("2n32", "3n8-42", "43")


def ambient(family: str, n: int | None) -> tuple[int, int, int]:
    """(ambient dimension, block dimension, covered dimension)."""
    if family == "632":
        return 6, 3, 2
    if family == "842":
        return 8, 4, 2
    if family == "843":
        return 8, 4, 3
    if n is None:
        raise QCoverError(f"--n is required for family {family}")
    if family == "2n32":
        return 2 * n, 3, 2
    if family == "3n8-42":
        return 3 * n + 8, 4, 2
    return 2 * n, 4, 3


def predicted_size(family: str, n: int | None, q: int) -> int:
    return {
        "632": lambda: bounds.size_632(q),
        "842": lambda: bounds.size_842(q),
        "843": lambda: bounds.size_843(q),
        "2n32": lambda: bounds.size_2n32(n, q),
        "3n8-42": lambda: bounds.size_3n8_42(n, q),
        "2n43": lambda: bounds.size_2n43(n, q),
    }[family]()


def parse_range(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def build(args) -> tuple[Design, dict]:
    from . import designs, quadrics
    from .spreads import read_parallelism

    F = field_of_order(args.q)
    xset = read_design(args.xset).gens if args.xset else None
    par = None
    if args.parallelism:
        p = read_parallelism(args.parallelism, F)
        par = (p, p)
    fam, n = args.family, args.n
    if fam == "632":
        d632 = quadrics.build_design_632(F, X=xset, budget=args.budget)
        d = d632.design()
        gamma, total, parts = quadrics.hyperplane_census_632(d632)
        if args.export_xset:
            write_design(Design(F, 6, 3, 2, d632.X, "632-X", {"role": "X"}), args.export_xset)
        return d, {"census": total, "census_parts": parts, "x_search": d632.stats}
    if fam == "842":
        d, tr = designs.build_842(F)
    elif fam == "843":
        d, tr = designs.build_843(F, par)
    elif fam == "2n32":
        d, tr = designs.build_2n32(n, F, xset=xset)
    elif fam == "3n8-42":
        d, tr = designs.build_3n8_42(n, F)
    else:
        d, tr = designs.build_2n43(n, F, parallelism_pair=par)
    return d, {"alpha": tr.alpha, "beta": tr.beta, "parts": tr.parts}


def cmd_construct(args) -> int:
    from .verify import verify_covering

    N, k, r = ambient(args.family, args.n)
    verify = not args.no_verify
    if verify and gaussian(N, r, args.q) > args.cap:
        raise ResourceLimitError(
            f"verification would enumerate {gaussian(N, r, args.q)} targets (cap {args.cap}); use --no-verify"
        )
    t0 = time.perf_counter()
    d, info = build(args)
    elapsed = time.perf_counter() - t0
    print(f"family={args.family} q={args.q} n={N} k={k} r={r}")
    print(f"size={d.size} predicted={predicted_size(args.family, args.n, args.q)} build_time={elapsed:.2f}s")
    for key, val in info.items():
        print(f"{key}={json.dumps(val, sort_keys=True, default=str)}")
    if args.out:
        write_design(d, args.out)
        print(f"wrote {args.out}")
    if verify:
        rep = verify_covering(d, "count", workers=args.workers, cap=args.cap)
        print(rep.as_table())
        return 0 if rep.complete else 1
    return 0


def cmd_verify(args) -> int:
    from .verify import verify_covering

    d = read_design(args.path)
    rep = verify_covering(d, "count" if args.multiplicity else "mark", workers=args.workers, cap=args.cap)
    print(rep.as_kv() if args.kv else rep.as_table())
    return 0 if rep.complete else 1


def bounds_rows(family: str, ns: list[int], qs: list[int]) -> list[bounds.BoundsRow]:
    rows = []
    for q in qs:
        if family == "43":
            rows += [bounds.bounds_43("c843", q), bounds.bounds_43("c1043", q)]
        elif family == "2n32":
            rows += [bounds.bounds_2n32(n, q) for n in ns]
        else:
            rows += [bounds.bounds_3n8_42(n, q) for n in ns]
    return rows


def format_rows(rows: list[bounds.BoundsRow]) -> str:
    head = ("family", "n", "q", "lower", "upper", "constructed", "closed_form")
    body = [
        (
            r.family,
            "" if r.n is None else str(r.n),
            str(r.q),
            str(r.lower),
            str(r.upper),
            "" if r.constructed is None else str(r.constructed),
            "" if r.upper_closed_form is None else str(r.upper_closed_form),
        )
        for r in rows
    ]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    fmt = lambda cells: "  ".join(c.rjust(w) for c, w in zip(cells, widths))
    return "\n".join([fmt(head)] + [fmt(b) for b in body])


def cmd_bounds(args) -> int:
    default_n = {"2n32": "3", "3n8-42": "0", "43": "0"}[args.family]
    ns = parse_range(args.n or default_n)
    qs = parse_range(args.q)
    print(format_rows(bounds_rows(args.family, ns, qs)))
    return 0


def cmd_stats(args) -> int:
    from .designs import lambda_2n43, measure_alpha_beta

    d = read_design(args.path)
    F = d.field
    print(f"family={d.family} q={d.q} n={d.n} k={d.k} r={d.r} blocks={d.size}")
    print(f"duplicates={d.duplicate_count()}")
    if d.meta:
        print("meta=" + json.dumps(d.meta, sort_keys=True))
    if d.family in ("632", "842", "2n32", "3n8_42"):
        gamma = unit_span(F, d.n, range(2, d.n + 1))
        print(f"census_X1=0={d.census(gamma)}")
    elif d.family in ("843", "2n43") and d.n % 2 == 0:
        alpha, betas = measure_alpha_beta(d, lambda_2n43(F, d.n // 2))
        print(f"alpha={alpha} betas={betas}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcover", description="q-covering designs: build, verify, bound.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a design, optionally verify and write it")
    c.add_argument("--family", required=True, choices=FAMILIES)
    c.add_argument("--n", type=int)
    c.add_argument("--q", type=int, default=2)
    c.add_argument("--out")
    c.add_argument("--no-verify", action="store_true")
    c.add_argument("--parallelism", help=".qps file with a 1-parallelism of PG(3,q)")
    c.add_argument("--xset", help=".qcd file with an X set for the Klein-quadric design")
    c.add_argument("--export-xset", help="write the X set used to this .qcd file")
    c.add_argument("--budget", type=int, default=2_000_000, help="exact-cover node budget")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check that a .qcd design covers everything")
    v.add_argument("path")
    v.add_argument("--multiplicity", action="store_true", help="count multiplicities and print a histogram")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--kv", action="store_true", help="key=value output")
    v.add_argument("--cap", type=int, default=DEFAULT_CAP)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", help="tabulate lower/upper bounds")
    b.add_argument("--family", required=True, choices=BOUND_FAMILIES)
    b.add_argument("--n", help="e.g. 3..6 or 3,5")
    b.add_argument("--q", default="2", help="e.g. 2,3")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("stats", help="summarise a .qcd design")
    s.add_argument("path")
    s.set_defaults(func=cmd_stats)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except QCoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
