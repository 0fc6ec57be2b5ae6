"""Command-line entry point: ``carmex <command> ...``.

Exit status is 0 on success, 1 when a verification or integrity check
fails, and 2 on a usage error. Data goes to stdout or ``--out``;
diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import store
from .arith import factorize
from .carmichael import ORACLE_CAP, brute_scan, format_ratio, index_of, korselt, lehmer_index
from .largeprime import ScanRange, scan
from .runner import default_threads, parse_units, run_enumeration
from .search import SearchConfig, enumerate_d3, smallest_with_d
from .stats import build_report, dump_json, render_tables, write_plots

log = logging.getLogger("carmex")

DEFAULT_LIMIT = 10**9
DEFAULT_SPLIT = 10**4
DEFAULT_THRESHOLD = 64

_NUMBER = re.compile(r"^(?:(\d+(?:\.\d*)?)(?:[eE]\+?(\d+))?|(\d+)\^(\d+)|(\d+(?:\.\d*)?)\*10\^(\d+))$")


class UsageError(Exception):
    pass


def parse_natural(text: str) -> int:
    """Exact integer from '1000', '1_000', '1e12', '2.5e9', '10^12' or '2*10^12'."""
    s = text.strip().replace("_", "")
    m = _NUMBER.match(s)
    if not m:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    mant, exp, base, power, mant2, exp2 = m.groups()
    if base is not None:
        return int(base) ** int(power)
    if mant2 is not None:
        mant, exp = mant2, exp2
    value = Fraction(mant) * 10 ** int(exp or 0)
    if value.denominator != 1:
        raise argparse.ArgumentTypeError(f"not an exact integer: {text!r}")
    return int(value)


def _emit(rf: store.ResultFile, out: str | None) -> None:
    if out:
        Path(out).write_text(store.dumps(rf))
        log.info("wrote %d records to %s", len(rf.records), out)
    else:
        sys.stdout.write(store.dumps(rf))


def _config(args) -> SearchConfig:
    X = args.limit
    split = min(args.split, math.isqrt(X)) if args.split is not None else min(DEFAULT_SPLIT, math.isqrt(X))
    try:
        return SearchConfig(
            limit=X,
            d_min=args.d_min,
            d_max=args.d_max,
            threshold=args.threshold,
            split=split,
            units=parse_units(args.units) if args.units else None,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_enumerate(args) -> int:
    cfg = _config(args)
    try:
        recs = run_enumeration(cfg, threads=args.threads, checkpoint=args.checkpoint,
                               progress=lambda uid, k: log.debug("unit %s: %d", uid, k))
    except store.CheckpointMismatch as exc:
        raise UsageError(str(exc)) from None
    unit = args.units if args.units else "all"
    _emit(store.write(recs, limit=cfg.limit, strategy="enumerate", unit=unit), args.out)
    return 0


def cmd_enumerate_d3(args) -> int:
    if args.limit < 561:
        raise UsageError("limit must be at least 561")
    recs = enumerate_d3(SearchConfig(limit=args.limit, d_max=3))
    _emit(store.write(recs, limit=args.limit, strategy="enumerate-d3"), args.out)
    return 0


def cmd_scan(args) -> int:
    try:
        r = ScanRange(args.p_lo, args.p_hi, args.limit)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    recs = sorted(scan(r))
    _emit(store.write(recs, limit=args.limit, strategy="scan", unit=f"L:{r.p_lo}-{r.p_hi}"), args.out)
    return 0


def cmd_verify(args) -> int:
    try:
        rf = store.read(args.file)
    except (store.StoreError, OSError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return 1
    print(f"{args.file}: {len(rf.records)} records verified (limit {rf.limit})")
    return 0


def cmd_check(args) -> int:
    n = args.n
    f = factorize(n) if n > 1 else []
    factors = " ".join(" ".join([str(p)] * e) for p, e in f)
    yes = korselt(n, f)
    composite = n > 3 and sum(e for _, e in f) > 1
    index = str(index_of(n, f)) if yes else "-"
    lehmer = "-"
    if composite:
        l = lehmer_index(n, f)
        lehmer = format_ratio(l.numerator, l.denominator, 5)
    print(f"Carmichael: {'yes' if yes else 'no'}; factors {factors}; index {index}; lehmer {lehmer}")
    return 0 if yes else 1


def cmd_stats(args) -> int:
    try:
        rf = store.read(args.input, verify=not args.no_verify)
    except (store.StoreError, OSError) as exc:
        print(f"stats: {exc}", file=sys.stderr)
        return 1
    limit = args.limit or rf.limit
    if limit > rf.limit:
        raise UsageError(f"--limit {limit} exceeds the file's limit {rf.limit}")
    recs = [r for r in rf.records if r.n <= limit]
    rep = build_report(recs, limit)
    bad = rep.check_invariants()
    tables = render_tables(rep)
    wanted = args.tables.split(",") if args.tables else list(tables)
    for name in wanted:
        if name not in tables:
            raise UsageError(f"unknown table {name!r}; choose from {', '.join(tables)}")
        sys.stdout.write(f"## {name}\n{tables[name]}\n")
    if args.plots:
        write_plots(rep, args.plots)
    if args.json:
        dump_json(rep, args.json)
    for msg in bad:
        print(f"stats: invariant violated: {msg}", file=sys.stderr)
    return 1 if bad else 0


def cmd_smallest(args) -> int:
    if args.d < 3:
        raise UsageError("--d must be at least 3")
    n = smallest_with_d(args.d, args.cap)
    if n is None:
        print(f"not found below {args.cap}")
        return 1
    print(n)
    return 0


def cmd_oracle(args) -> int:
    if args.limit > ORACLE_CAP:
        raise UsageError(f"oracle limit capped at {ORACLE_CAP}")
    _emit(store.write(brute_scan(args.limit), limit=max(args.limit, 1), strategy="oracle"), args.out)
    return 0


def cmd_merge(args) -> int:
    try:
        merged = store.merge([store.read(p) for p in args.files])
    except (store.StoreError, OSError) as exc:
        print(f"merge: {exc}", file=sys.stderr)
        return 1
    _emit(merged, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    nat = parse_natural
    p = argparse.ArgumentParser(prog="carmex", description="Enumerate and tabulate Carmichael numbers.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="tree search plus large-prime scan up to a limit")
    e.add_argument("--limit", type=nat, default=DEFAULT_LIMIT)
    e.add_argument("--split", type=nat, help=f"largest prime handled by the tree (default {DEFAULT_SPLIT})")
    e.add_argument("--d-min", type=int, default=3)
    e.add_argument("--d-max", type=int)
    e.add_argument("--threshold", type=nat, default=DEFAULT_THRESHOLD)
    e.add_argument("--units", help="restrict to leading-prime units, e.g. '3;5;7,11'")
    e.add_argument("--threads", type=int, default=default_threads())
    e.add_argument("--out")
    e.add_argument("--checkpoint")
    e.set_defaults(func=cmd_enumerate)

    d3 = sub.add_parser("enumerate-d3", help="all three-prime Carmichael numbers up to a limit")
    d3.add_argument("--limit", type=nat, required=True)
    d3.add_argument("--out")
    d3.set_defaults(func=cmd_enumerate_d3)

    s = sub.add_parser("scan", help="large-prime scan for largest primes in (p-lo, p-hi]")
    s.add_argument("--p-lo", type=nat, required=True)
    s.add_argument("--p-hi", type=nat, required=True)
    s.add_argument("--limit", type=nat, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_scan)

    v = sub.add_parser("verify", help="re-check every line of a result file")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("check", help="factor N and report Korselt, index and Lehmer index")
    c.add_argument("n", type=nat)
    c.set_defaults(func=cmd_check)

    st = sub.add_parser("stats", help="tables computed from a result file")
    st.add_argument("--in", dest="input", required=True)
    st.add_argument("--limit", type=nat)
    st.add_argument("--tables", help="comma-separated subset of table names")
    st.add_argument("--plots", help="directory for the figure series")
    st.add_argument("--json", help="write the structured dump here")
    st.add_argument("--no-verify", action="store_true", help="skip the per-line Korselt check on load")
    st.set_defaults(func=cmd_stats)

    sm = sub.add_parser("smallest", help="smallest Carmichael number with d prime factors")
    sm.add_argument("--d", type=int, required=True)
    sm.add_argument("--cap", type=nat, required=True)
    sm.set_defaults(func=cmd_smallest)

    o = sub.add_parser("oracle", help="brute-force Fermat scan (small limits only)")
    o.add_argument("--limit", type=nat, required=True)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("merge", help="merge result files")
    m.add_argument("files", nargs="+")
    m.add_argument("--out")
    m.set_defaults(func=cmd_merge)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "threads", 1) < 1:
        print("carmex: --threads must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"carmex: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
