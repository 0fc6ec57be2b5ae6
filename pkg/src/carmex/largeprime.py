"""Large-prime variation: fix the largest prime p and walk its cofactors.

If p is the largest prime of a Carmichael N = m*p then p - 1 | N - 1 forces
m = 1 (mod p - 1), so m runs over 1 + k(p - 1) up to X/p. Each candidate is
screened with a base-2 Fermat test before m is factored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .arith import factorize, fermat_probable, primes_between
from .carmichael import CarmichaelRecord


@dataclass(frozen=True)
class ScanRange:
    p_lo: int
    p_hi: int
    limit: int

    def __post_init__(self) -> None:
        if not 0 <= self.p_lo < self.p_hi:
            raise ValueError("need p_lo < p_hi")
        if self.p_hi > math.isqrt(self.limit):
            raise ValueError("p_hi exceeds isqrt(limit)")


def scan_prime(p: int, limit: int) -> list[CarmichaelRecord]:
    """Carmichael numbers N <= limit whose largest prime factor is p."""
    out = []
    step = p - 1
    m = p + step  # k = 1 gives m = p, which cannot be a cofactor
    top = limit // p
    while m <= top:
        N = m * p
        if fermat_probable(N):
            f = factorize(m)
            if (
                len(f) >= 2
                and f[-1][0] < p
                and all(e == 1 for _, e in f)
                and all((N - 1) % (q - 1) == 0 for q, _ in f)
            ):
                out.append(CarmichaelRecord(N, tuple(q for q, _ in f) + (p,)))
        m += step
    return out


def scan(r: ScanRange) -> Iterator[CarmichaelRecord]:
    """Records whose largest prime lies in (p_lo, p_hi], grouped by that prime."""
    for p in primes_between(max(r.p_lo, 2), r.p_hi):
        if p == 2:
            continue
        yield from scan_prime(p, r.limit)


def split_range(r: ScanRange, parts: int) -> list[ScanRange]:
    """Cut (p_lo, p_hi] into roughly equal-work subranges.

    Work per prime falls off like 1/p^2, so cuts are evenly spaced in 1/p.
    """
    parts = max(1, parts)
    lo_inv = 1 / max(r.p_lo, 1)
    hi_inv = 1 / r.p_hi
    cuts = [r.p_lo]
    for i in range(1, parts):
        c = int(1 / (lo_inv - (lo_inv - hi_inv) * i / parts))
        if cuts[-1] < c < r.p_hi:
            cuts.append(c)
    cuts.append(r.p_hi)
    return [ScanRange(a, b, r.limit) for a, b in zip(cuts, cuts[1:])]
