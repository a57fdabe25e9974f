"""Command-line front end: construct, verify, simulate, and compare.

Exit codes: 0 success, 1 semantic failure (invalid array or failed decode),
2 usage or parse error, 3 input artifact fails verification.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .analysis import (
    SystemParams,
    compare_sweep,
    search_min_r1,
)
from .hierarchy import (
    Hpda,
    build_grouping,
    build_hybrid,
    format_hpda,
    grouping_params,
    load_hpda,
    loads_from_hpda,
    parse_hpda,
    verify_hpda,
)
from .pda import PdaFormatError, format_pda, load_pda, mn_pda, parse_pda, verify_pda
from .simulation import DecodingError, DemandVector, simulate, worst_case_demand

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_BAD_ARTIFACT = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_construct_pda(args: argparse.Namespace) -> int:
    try:
        p = mn_pda(args.k, args.t)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(format_pda(p), args.out)
    return EXIT_OK


def _summary_line(h: Hpda) -> str:
    loads = loads_from_hpda(h)
    return (
        f"F={h.f} Z1={h.z1} Z2={h.z2} R1={loads.r1} R2={loads.r2}"
        f" ({float(loads.r1):.4f}, {float(loads.r2):.4f})"
    )


def _cmd_construct_hpda(args: argparse.Namespace) -> int:
    if args.kind == "grouping":
        try:
            h = build_grouping(args.k1, args.k2, args.t)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        try:
            outer = load_pda(args.a)
            inner = load_pda(args.b)
        except (OSError, PdaFormatError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for name, p in (("outer", outer), ("inner", inner)):
            report = verify_pda(p)
            if not report.valid:
                print(f"error: {name} array fails verification:", file=sys.stderr)
                for v in report.violations:
                    print(f"  {v.condition} at {v.coords}: {v.message}", file=sys.stderr)
                return EXIT_BAD_ARTIFACT
        try:
            h = build_hybrid(outer, inner)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_ARTIFACT
    summary = _summary_line(h)
    if args.out:
        Path(args.out).write_text(format_hpda(h))
        print(summary)
    else:
        sys.stdout.write(format_hpda(h))
        print(summary, file=sys.stderr)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    first = text.split(None, 1)[0] if text.split() else ""
    try:
        if first == "HPDA":
            h = parse_hpda(text)
            report = verify_hpda(h)
            label = f"HPDA K1={h.k1} K2={h.k2} F={h.f} Z1={h.z1} Z2={h.z2}"
        elif first == "PDA":
            p = parse_pda(text)
            report = verify_pda(p)
            label = f"PDA K={p.k} F={p.f} Z={p.z} S={p.s}"
        else:
            print("error: file is neither a PDA nor an HPDA", file=sys.stderr)
            return EXIT_USAGE
    except PdaFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if report.valid:
        print(f"valid {label}")
        return EXIT_OK
    print(f"invalid {label}")
    for v in report.violations:
        print(f"  {v.condition} at {v.coords}: {v.message}")
    return EXIT_INVALID


def _parse_demand(text: str, k1: int, k2: int) -> DemandVector:
    entries = tuple(int(tok) for tok in text.split(","))
    return DemandVector(k1=k1, k2=k2, entries=entries)


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        h = load_hpda(args.path)
    except (OSError, PdaFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.demand:
            d = _parse_demand(args.demand, h.k1, h.k2)
        else:
            d = worst_case_demand(h.k1, h.k2, args.files)
        result = simulate(h, args.files, args.packet_bytes, d, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DecodingError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_INVALID
    t = result.transcript
    flag = "success" if result.success else "failure"
    print(f"{flag} R1={t.server_packets}/{t.f} R2={max(t.mirror_packets(k) for k in t.mirror_signals)}/{t.f}")
    for k1 in sorted(t.mirror_signals):
        print(f"mirror {k1}: {t.mirror_packets(k1)} packets")
    if args.transcript:
        t.dump(args.transcript)
    return EXIT_OK if result.success else EXIT_INVALID


def _fmt_cell(value, decimals: bool) -> str:
    if value is None:
        return "-"
    if isinstance(value, Fraction) and decimals:
        return f"{float(value):.4f}"
    return str(value)


def _cmd_compare(args: argparse.Namespace) -> int:
    t_list = [int(tok) for tok in args.t.split(",") if tok.strip()] if args.t else []
    try:
        rows = compare_sweep(args.k1, args.k2, args.n, t_list)
        step = Fraction(args.grid_step)
        searched = []
        for t in t_list:
            loads, _, _ = grouping_params(args.k1, args.k2, t)
            params = SystemParams(
                k1=args.k1,
                k2=args.k2,
                n_files=args.n,
                m1=loads.m1_ratio * args.n,
                m2=loads.m2_ratio * args.n,
            )
            for formula in ("knmd", "wwcy"):
                _, r1, r2 = search_min_r1(formula, params, step)
                searched.append(
                    (f"{formula}-search", t, loads.m1_ratio, loads.m2_ratio, r1, r2)
                )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    header = ("scheme", "t", "m1_ratio", "m2_ratio", "r1", "r2", "f")
    records = [
        (r.scheme, r.t, r.m1_ratio, r.m2_ratio, r.r1, r.r2, r.f) for r in rows
    ] + [(s, t, m1, m2, r1, r2, None) for s, t, m1, m2, r1, r2 in searched]
    records.sort(key=lambda rec: (rec[1], rec[0]))

    if args.format == "json":
        payload = []
        for scheme, t, m1, m2, r1, r2, f in records:
            payload.append(
                {
                    "scheme": scheme,
                    "t": t,
                    "m1_ratio": str(m1),
                    "m2_ratio": str(m2),
                    "r1": None if r1 is None else str(r1),
                    "r2": None if r2 is None else str(r2),
                    "r1_value": None if r1 is None else float(r1),
                    "r2_value": None if r2 is None else float(r2),
                    "f": f,
                    "feasible": r1 is not None,
                }
            )
        print(json.dumps(payload, indent=2))
    else:
        print("\t".join(header))
        for rec in records:
            print("\t".join(_fmt_cell(v, decimals=True) for v in rec))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpda",
        description="Construct, verify, simulate and compare two-layer coded caching arrays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c_pda = sub.add_parser("construct-pda", help="write a single-layer array")
    c_pda.add_argument("kind", choices=["mn"])
    c_pda.add_argument("--k", type=int, required=True, help="number of users")
    c_pda.add_argument("--t", type=int, required=True, help="memory lattice point")
    c_pda.add_argument("--out", help="output path (default: stdout)")
    c_pda.set_defaults(handler=_cmd_construct_pda)

    c_hpda = sub.add_parser("construct-hpda", help="write a hierarchical array")
    kinds = c_hpda.add_subparsers(dest="kind", required=True)
    grouping = kinds.add_parser("grouping", help="group a single MN array by mirror")
    grouping.add_argument("--k1", type=int, required=True, help="mirrors")
    grouping.add_argument("--k2", type=int, required=True, help="users per mirror")
    grouping.add_argument("--t", type=int, required=True)
    grouping.add_argument("--out")
    grouping.set_defaults(handler=_cmd_construct_hpda)
    hybrid = kinds.add_parser("hybrid", help="compose two arrays: outer x inner")
    hybrid.add_argument("--a", required=True, help="outer (mirror-layer) array file")
    hybrid.add_argument("--b", required=True, help="inner (user-layer) array file")
    hybrid.add_argument("--out")
    hybrid.set_defaults(handler=_cmd_construct_hpda)

    verify = sub.add_parser("verify", help="verify an array file (auto-detected)")
    verify.add_argument("path")
    verify.set_defaults(handler=_cmd_verify)

    sim = sub.add_parser("simulate", help="run placement, delivery, and decoding")
    sim.add_argument("path", help="HPDA file")
    sim.add_argument("--files", type=int, required=True, help="library size N")
    sim.add_argument("--packet-bytes", type=int, default=64)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--demand", help="comma-separated file indices, lex user order")
    sim.add_argument("--transcript", help="dump all signals to this path")
    sim.set_defaults(handler=_cmd_simulate)

    cmp_ = sub.add_parser("compare", help="tabulate schemes at grouping memory points")
    cmp_.add_argument("--k1", type=int, required=True)
    cmp_.add_argument("--k2", type=int, required=True)
    cmp_.add_argument("--n", type=int, required=True)
    cmp_.add_argument("--t", default="", help="comma-separated t values")
    cmp_.add_argument("--grid-step", default="1/100", help="alpha-beta search step")
    cmp_.add_argument(
        "--format",
        choices=["table", "json"],
        default=os.environ.get("HPDA_FORMAT", "table"),
    )
    cmp_.set_defaults(handler=_cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code else EXIT_OK
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
