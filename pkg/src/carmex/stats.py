"""Statistics over a complete sorted list of Carmichael numbers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .arith import FactorizationBudgetError, factorize, get_sieve
from .carmichael import CarmichaelRecord, format_ratio, korselt

MODULI = (5, 7, 11, 12)
TABLE_PRIMES = tuple(p for p in get_sieve().primes if 3 <= p <= 97)


class IntegrityError(ValueError):
    pass


def fmt(x: float, places: int) -> str:
    """Round half to even at ``places`` decimals."""
    return str(Decimal(x).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def decades(limit: int, start: int = 3) -> list[int]:
    """Exponents n >= start with 10**n <= limit."""
    out = []
    n = start
    while 10**n <= limit:
        out.append(n)
        n += 1
    return out


def tabulation_bounds(limit: int) -> list[int]:
    """Column bounds used by the residue and prime tables."""
    bounds = [10**n for n in decades(limit)]
    if 25 * 10**9 <= limit:
        bounds.append(25 * 10**9)
    return sorted(bounds)


def _check_sorted(records: Sequence[CarmichaelRecord]) -> None:
    for a, b in zip(records, records[1:]):
        if a.n >= b.n:
            raise IntegrityError(f"records not sorted and deduplicated at {b.n}")


def count_tables(records: Sequence[CarmichaelRecord], limit: int):
    """C(10^n) and C(d, 10^n) for every 10^n <= limit, keyed by n and (d, n)."""
    _check_sorted(records)
    counts: dict[int, int] = {}
    by_d: dict[tuple[int, int], int] = {}
    ns = decades(limit)
    i = 0
    running: dict[int, int] = {}
    for n in ns:
        bound = 10**n
        while i < len(records) and records[i].n <= bound:
            d = records[i].d
            running[d] = running.get(d, 0) + 1
            i += 1
        counts[n] = i
        for d, c in running.items():
            by_d[(d, n)] = c
    return counts, by_d


def k_of(X: int, C: int) -> float:
    """Solve C = X exp(-k log X logloglog X / loglog X) for k."""
    if X < 16:
        raise ValueError("X must be at least 16")
    if C < 1:
        raise ValueError("C must be positive")
    lx = math.log(X)
    llx = math.log(lx)
    return math.log(X / C) * llx / (lx * math.log(llx))


def count_from_k(X: int, k: float) -> float:
    lx = math.log(X)
    llx = math.log(lx)
    return X * math.exp(-k * lx * math.log(llx) / llx)


def swift_ratio(c_n: int, c_prev: int) -> float:
    if c_prev == 0:
        raise ValueError("previous count is zero")
    return c_n / c_prev


def exponent_of(X: int, C: int) -> float:
    if X <= 1 or C < 1:
        raise ValueError("need X > 1 and C >= 1")
    return math.log(C) / math.log(X)


def residue_table(records: Sequence[CarmichaelRecord], bounds: Iterable[int], moduli=MODULI):
    """{m: {class: {bound: count}}} for N <= bound."""
    bounds = sorted(bounds)
    table = {m: {c: {b: 0 for b in bounds} for c in range(m)} for m in moduli}
    for r in records:
        for m in moduli:
            row = table[m][r.n % m]
            for b in bounds:
                if r.n <= b:
                    row[b] += 1
    return table


def prime_tables(records: Sequence[CarmichaelRecord], bounds: Iterable[int], primes=TABLE_PRIMES):
    """Counts of N <= bound divisible by p, and with p as least prime."""
    bounds = sorted(bounds)
    divides = {p: {b: 0 for b in bounds} for p in primes}
    least = {p: {b: 0 for b in bounds} for p in primes}
    wanted = set(primes)
    for r in records:
        hits = [b for b in bounds if r.n <= b]
        for p in r.primes:
            if p in wanted:
                for b in hits:
                    divides[p][b] += 1
        if r.primes[0] in wanted:
            for b in hits:
                least[r.primes[0]][b] += 1
    return divides, least


def index_report(records: Iterable[CarmichaelRecord], cap: int = 100):
    """(index, N, primes) for every record with index below cap."""
    rows = [(r.index, r.n, r.primes) for r in records if r.index < cap]
    return sorted(rows)


def lehmer_report(records: Iterable[CarmichaelRecord], threshold: Fraction | int = 2):
    """(lehmer index, N, primes) with (N-1)/phi(N) >= threshold, compared exactly."""
    t = Fraction(threshold)
    rows = [
        (r.lehmer(), r.n, r.primes)
        for r in records
        if (r.n - 1) * t.denominator >= t.numerator * r.lehmer_den
    ]
    return sorted(rows)


def sd_ratio(d: int, S: int) -> float:
    """log S / (2 log 2 (d-1) log(d-1)), natural logs."""
    if d <= 2:
        raise ValueError("d must be at least 3")
    return math.log(S) / (2 * math.log(2) * (d - 1) * math.log(d - 1))


@dataclass(frozen=True)
class Table3Check:
    d: int
    n: int
    status: str  # "pass", "fail" or "inconclusive"
    detail: str = ""


def verify_table3(entries: Iterable[tuple[int, int]], rho_budget: int | None = 10**7) -> list[Table3Check]:
    """Factor each claimed S_d and confirm d distinct primes satisfying Korselt.

    Minimality is not checked here.
    """
    out = []
    for d, n in entries:
        try:
            f = factorize(n, rho_budget=rho_budget)
        except FactorizationBudgetError as exc:
            out.append(Table3Check(d, n, "inconclusive", str(exc)))
            continue
        if len(f) != d:
            out.append(Table3Check(d, n, "fail", f"{len(f)} distinct primes"))
        elif not korselt(n, f):
            out.append(Table3Check(d, n, "fail", "Korselt condition fails"))
        else:
            out.append(Table3Check(d, n, "pass", " ".join(str(p) for p, _ in f)))
    return out


def plot_series(counts: dict[int, int]):
    """Figure data: (n, k(10^n)) and (n, log C / log 10^n)."""
    ns = sorted(n for n, c in counts.items() if c > 0 and 10**n >= 16)
    return (
        [(n, k_of(10**n, counts[n])) for n in ns],
        [(n, exponent_of(10**n, counts[n])) for n in ns],
    )


@dataclass
class StatsReport:
    limit: int
    counts: dict[int, int]
    counts_by_d: dict[tuple[int, int], int]
    k_series: list[tuple[int, float]]
    swift_series: list[tuple[int, float]]
    exponent_series: list[tuple[int, float]]
    residue_tables: dict
    prime_div_table: dict
    least_prime_table: dict
    index_report: list
    lehmer_report: list
    sd_table: dict[int, tuple[int, float]] = field(default_factory=dict)

    @property
    def bounds(self) -> list[int]:
        return tabulation_bounds(self.limit)

    def max_d(self) -> int:
        return max((d for d, _ in self.counts_by_d), default=3)

    def check_invariants(self) -> list[str]:
        """Cross-sum identities; returns a list of violations (empty when sound)."""
        bad = []
        for n, c in self.counts.items():
            s = sum(v for (d, m), v in self.counts_by_d.items() if m == n)
            if s != c:
                bad.append(f"sum over d at 10^{n} is {s}, expected {c}")
        decade_of = {10**n: n for n in self.counts}
        for b in self.bounds:
            cols = {m: sum(row[b] for row in classes.values()) for m, classes in self.residue_tables.items()}
            expected = self.counts[decade_of[b]] if b in decade_of else next(iter(cols.values()), 0)
            for m, col in cols.items():
                if col != expected:
                    bad.append(f"mod {m} column at {b} sums to {col}, expected {expected}")
            if 5 in self.residue_tables and 5 in self.prime_div_table:
                if self.residue_tables[5][0][b] != self.prime_div_table[5][b]:
                    bad.append(f"class 0 mod 5 differs from divisibility by 5 at {b}")
            if 12 in self.residue_tables and 3 in self.prime_div_table:
                r12 = self.residue_tables[12]
                if r12[3][b] + r12[9][b] != self.prime_div_table[3][b]:
                    bad.append(f"classes 3, 9 mod 12 differ from divisibility by 3 at {b}")
                if any(r12[c][b] for c in range(0, 12, 2)):
                    bad.append(f"even class mod 12 is populated at {b}")
            for p in self.least_prime_table:
                if self.least_prime_table[p][b] > self.prime_div_table[p][b]:
                    bad.append(f"least-prime count exceeds divisor count for {p} at {b}")
            if 3 in self.least_prime_table and self.least_prime_table[3][b] != self.prime_div_table[3][b]:
                bad.append(f"p = 3 counts differ at {b}")
        return bad


def build_report(records: Sequence[CarmichaelRecord], limit: int, index_cap: int = 100,
                 lehmer_threshold: Fraction | int = 2, sd_entries: Iterable[tuple[int, int]] = ()) -> StatsReport:
    counts, by_d = count_tables(records, limit)
    k_series, exponent_series = plot_series(counts)
    swift = [(n, swift_ratio(counts[n], counts[n - 1])) for n in sorted(counts) if counts.get(n - 1)]
    bounds = tabulation_bounds(limit)
    divides, least = prime_tables(records, bounds)
    return StatsReport(
        limit=limit,
        counts=counts,
        counts_by_d=by_d,
        k_series=k_series,
        swift_series=swift,
        exponent_series=exponent_series,
        residue_tables=residue_table(records, bounds),
        prime_div_table=divides,
        least_prime_table=least,
        index_report=index_report(records, index_cap),
        lehmer_report=lehmer_report(records, lehmer_threshold),
        sd_table={d: (S, sd_ratio(d, S)) for d, S in sd_entries},
    )


# ---------------------------------------------------------------- output

def _bound_label(b: int) -> str:
    n = round(math.log10(b))
    return f"10^{n}" if 10**n == b else (f"25*10^9" if b == 25 * 10**9 else str(b))


def render_tables(rep: StatsReport) -> dict[str, str]:
    """Tab-separated text, one entry per table."""
    out: dict[str, str] = {}
    ns = sorted(rep.counts)
    out["counts"] = "n\tC(10^n)\n" + "".join(f"{n}\t{rep.counts[n]}\n" for n in ns)
    ds = list(range(3, rep.max_d() + 1))
    lines = ["n\t" + "\t".join(map(str, ds)) + "\ttotal"]
    for n in ns:
        lines.append(f"{n}\t" + "\t".join(str(rep.counts_by_d.get((d, n), 0)) for d in ds) + f"\t{rep.counts[n]}")
    out["counts_by_d"] = "\n".join(lines) + "\n"
    swift = dict(rep.swift_series)
    out["k"] = "n\tk(10^n)\tC(10^n)/C(10^(n-1))\n" + "".join(
        f"{n}\t{fmt(k, 5)}\t{fmt(swift[n], 3) if n in swift else ''}\n" for n, k in rep.k_series
    )
    out["exponent"] = "n\tlog C/(n log 10)\n" + "".join(
        f"{n}\t{fmt(e, 5)}\n" for n, e in rep.exponent_series if n >= 4
    )
    bounds = rep.bounds
    head = "\t".join(_bound_label(b) for b in bounds)
    lines = [f"m\tc\t{head}"]
    for m, classes in rep.residue_tables.items():
        for c, row in classes.items():
            lines.append(f"{m}\t{c}\t" + "\t".join(str(row[b]) for b in bounds))
    out["residues"] = "\n".join(lines) + "\n"
    for name, table in (("primes", rep.prime_div_table), ("least_primes", rep.least_prime_table)):
        lines = [f"p\t{head}"] + [f"{p}\t" + "\t".join(str(row[b]) for b in bounds) for p, row in table.items()]
        out[name] = "\n".join(lines) + "\n"
    out["index"] = "i\tN\tfactors\n" + "".join(
        f"{i}\t{n}\t{' '.join(map(str, ps))}\n" for i, n, ps in rep.index_report
    )
    out["lehmer"] = "l\tN\tfactors\n" + "".join(
        f"{format_ratio(l.numerator, l.denominator, 5)}\t{n}\t{' '.join(map(str, ps))}\n"
        for l, n, ps in rep.lehmer_report
    )
    if rep.sd_table:
        out["sd"] = "d\tS_d\tratio\n" + "".join(
            f"{d}\t{S}\t{fmt(r, 9)}\n" for d, (S, r) in sorted(rep.sd_table.items())
        )
    return out


def report_dict(rep: StatsReport) -> dict:
    """Machine-readable dump, one object per table; integers stay exact."""
    return {
        "limit": rep.limit,
        "counts": [{"n": n, "count": c} for n, c in sorted(rep.counts.items())],
        "counts_by_d": [{"d": d, "n": n, "count": c} for (d, n), c in sorted(rep.counts_by_d.items())],
        "k": [{"n": n, "k": k} for n, k in rep.k_series],
        "swift": [{"n": n, "ratio": r} for n, r in rep.swift_series],
        "exponent": [{"n": n, "exponent": e} for n, e in rep.exponent_series],
        "residues": [
            {"m": m, "class": c, "bound": b, "count": v}
            for m, classes in rep.residue_tables.items() for c, row in classes.items() for b, v in row.items()
        ],
        "primes": [{"p": p, "bound": b, "count": v} for p, row in rep.prime_div_table.items() for b, v in row.items()],
        "least_primes": [{"p": p, "bound": b, "count": v} for p, row in rep.least_prime_table.items() for b, v in row.items()],
        "index": [{"index": i, "n": n, "primes": list(ps)} for i, n, ps in rep.index_report],
        "lehmer": [
            {"num": l.numerator, "den": l.denominator, "value": format_ratio(l.numerator, l.denominator, 5),
             "n": n, "primes": list(ps)}
            for l, n, ps in rep.lehmer_report
        ],
        "sd": [{"d": d, "S": str(S), "ratio": r} for d, (S, r) in sorted(rep.sd_table.items())],
    }


def write_plots(rep: StatsReport, directory: str | Path) -> list[Path]:
    """Two-column text files for the k(X) and exponent figures."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, series in (("k_series.dat", rep.k_series), ("exponent_series.dat", rep.exponent_series)):
        p = d / name
        p.write_text("".join(f"{n} {v:.6f}\n" for n, v in series))
        paths.append(p)
    return paths


def dump_json(rep: StatsReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report_dict(rep), indent=1) + "\n")
