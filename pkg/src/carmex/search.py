"""Depth-first search over ascending prime sequences p_1 < ... < p_d.

A node holds a prefix of r primes with product P and L = lcm(p_i - 1).
Any Carmichael N = P*Q extending it needs N = 1 (mod L), i.e. Q in the
class P^-1 mod L. At every node with r >= 2 the one-prime completions are
read off the divisors of P - 1 (the last prime p has p - 1 | P - 1); the
children then cover every N with at least r + 2 primes. When the progression
of admissible Q up to X/P is short the node enumerates it directly instead.

Only numbers whose largest prime factor is at most ``cfg.bound`` are emitted;
the complement is found by :mod:`carmex.largeprime`.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .arith import divisors, factorize, fermat_probable, get_sieve, is_prime
from .carmichael import CarmichaelRecord

Unit = tuple[int, ...]


@dataclass(frozen=True)
class SearchConfig:
    limit: int
    d_min: int = 3
    d_max: int | None = None
    threshold: int = 64
    split: int | None = None
    units: tuple[Unit, ...] | None = None
    pair_budget: int = 10**6

    def __post_init__(self) -> None:
        if self.limit < 561:
            raise ValueError("limit must be at least 561")
        if self.threshold < 1:
            raise ValueError("threshold must be positive")
        if self.d_min < 3:
            raise ValueError("d_min must be at least 3")
        if self.d_max is not None and self.d_max < self.d_min:
            raise ValueError("d_max below d_min")
        if self.split is not None and not 3 <= self.split <= math.isqrt(self.limit):
            raise ValueError("split must lie in [3, isqrt(limit)]")

    @property
    def bound(self) -> int:
        """Largest prime factor allowed in emitted numbers."""
        return self.split if self.split is not None else math.isqrt(self.limit)

    def admits(self, d: int) -> bool:
        return d >= self.d_min and (self.d_max is None or d <= self.d_max)


class PrefixState(NamedTuple):
    primes: tuple[int, ...] = ()
    P: int = 1
    L: int = 1

    @property
    def last(self) -> int:
        return self.primes[-1] if self.primes else 2


@dataclass
class SearchStats:
    nodes: int = 0
    early: int = 0
    pair: int = 0
    last_prime: int = 0
    candidates: int = 0
    by_unit: dict = field(default_factory=dict)


def _min_completion(after: int, k: int, limit: int) -> int:
    """Product of the k smallest primes above ``after`` (capped past limit)."""
    primes = get_sieve().primes
    i = bisect_right(primes, after)
    if i + k <= len(primes):
        return math.prod(primes[i : i + k])
    prod = math.prod(primes[i:])
    q = max(after, primes[-1])
    for _ in range(k - (len(primes) - i)):
        q += 2
        prod *= q
        if prod > limit:
            break
    return prod


def extend(s: PrefixState, p: int, cfg: SearchConfig) -> PrefixState | None:
    """Append prime p to the prefix, or None when no admissible N can follow."""
    if p <= s.last:
        raise ValueError("primes must be appended in ascending order")
    k = max(1, cfg.d_min - len(s.primes) - 1)
    if s.P * p * _min_completion(p, k, cfg.limit) > cfg.limit:
        return None
    return _coprime_child(s, p, cfg.limit)


def _coprime_child(s: PrefixState, p: int, limit: int) -> PrefixState | None:
    # gcd(P', L') = 1 and L' <= X; the size bound is the caller's job
    if s.L % p == 0 or math.gcd(s.P, p - 1) != 1:
        return None
    L = s.L // math.gcd(s.L, p - 1) * (p - 1)
    if L > limit:
        return None
    return PrefixState(s.primes + (p,), s.P * p, L)


def _record(primes: Iterable[int]) -> CarmichaelRecord:
    # the constructor re-checks Korselt on every emission
    return CarmichaelRecord.from_primes(primes)


def complete_last_prime(s: PrefixState, cfg: SearchConfig) -> list[CarmichaelRecord]:
    """All N = P*p with a single further prime p (p - 1 divides P - 1)."""
    if len(s.primes) < 2:
        raise ValueError("need at least two primes in the prefix")
    top = min(cfg.bound, cfg.limit // s.P)
    if top <= s.last:
        return []
    target = pow(s.P, -1, s.L)
    out = []
    for e in divisors(factorize(s.P - 1)):
        p = e + 1
        if p > top:
            break
        if p > s.last and p % s.L == target % s.L and is_prime(p):
            out.append(_record(s.primes + (p,)))
    return out


def pair_loop_cost(s: PrefixState) -> int:
    """Rough number of (A, B) trials complete_pair needs at this node."""
    return s.P * s.P * max(1, s.P.bit_length()) // max(1, s.last)


def complete_pair(s: PrefixState, cfg: SearchConfig) -> list[CarmichaelRecord]:
    """All N = P*q*r with primes last < q < r.

    q - 1 | P*r - 1 and r - 1 | P*q - 1 give P*r - 1 = A(q - 1) and
    P*q - 1 = B(r - 1) with 1 <= B < P and A*B > P^2. Eliminating r,
    q = (P(B - 1) + B(A - 1)) / (A*B - P^2), which decreases in A, so the
    window q_min <= q <= q_max bounds A on both sides for each B.
    """
    if not s.primes:
        raise ValueError("need a nonempty prefix")
    P, L = s.P, s.L
    sieve = get_sieve()
    q_min = sieve.first_at_least(s.last + 1) if s.last < sieve.limit else s.last + 2
    q_max = min(math.isqrt(cfg.limit // P), cfg.bound)
    out = []
    if q_max < q_min:
        return out
    P2 = P * P
    for B in range(1, P):
        base = P * (B - 1) - B
        a_hi = (base + q_min * P2) // (B * (q_min - 1))
        a_lo = max(P2 // B + 1, -(-(base + q_max * P2) // (B * (q_max - 1))))
        assert B < P and a_hi * B * (q_min - 1) <= base + q_min * P2
        for A in range(a_lo, a_hi + 1):
            den = A * B - P2
            num = base + A * B
            if num % den:
                continue
            q = num // den
            t = P * q - 1
            if t % B:
                continue
            r = t // B + 1
            if r <= q or q < q_min or r > cfg.bound:
                continue
            N = P * q * r
            if N > cfg.limit or (N - 1) % L:
                continue
            if (N - 1) % (q - 1) or (N - 1) % (r - 1):
                continue
            if math.gcd(P, (q - 1) * (r - 1)) != 1:
                continue
            if is_prime(q) and is_prime(r):
                out.append(_record(s.primes + (q, r)))
    out.sort()
    return out


def candidate_count(s: PrefixState, cfg: SearchConfig) -> int:
    return max(0, (cfg.limit // s.P - s.last) // s.L)


def early_terminate(s: PrefixState, cfg: SearchConfig) -> list[CarmichaelRecord]:
    """Walk Q = P^-1 (mod L) up to X/P directly and keep the Korselt hits."""
    if not s.primes:
        raise ValueError("need a nonempty prefix")
    P, L, last = s.P, s.L, s.last
    r = len(s.primes)
    top = cfg.limit // P
    c = pow(P, -1, L) if L > 1 else 0
    Q = last + 1 + (c - last - 1) % L
    out = []
    while Q <= top:
        N = P * Q
        if fermat_probable(N):
            f = factorize(Q)
            if (
                f
                and f[0][0] > last
                and all(e == 1 for _, e in f)
                and cfg.admits(r + len(f))
                and f[-1][0] <= cfg.bound
                and all((N - 1) % (q - 1) == 0 for q, _ in f)
            ):
                out.append(_record(s.primes + tuple(q for q, _ in f)))
        Q += L
    return out


def _walk(s: PrefixState, cfg: SearchConfig, out: list, stats: SearchStats) -> None:
    stats.nodes += 1
    r = len(s.primes)
    if r >= 1 and candidate_count(s, cfg) <= cfg.threshold:
        stats.early += 1
        out += early_terminate(s, cfg)
        return
    if r >= 2 and cfg.admits(r + 1):
        stats.last_prime += 1
        out += complete_last_prime(s, cfg)
    if cfg.d_max is not None and r + 2 > cfg.d_max:
        return
    if cfg.d_max == r + 2 and r >= 1 and pair_loop_cost(s) <= cfg.pair_budget:
        stats.pair += 1
        out += complete_pair(s, cfg)
        return
    _children(s, cfg, out, stats)


def _children(s: PrefixState, cfg: SearchConfig, out: list, stats: SearchStats) -> None:
    primes = get_sieve().primes
    room = cfg.limit // s.P
    k = max(1, cfg.d_min - len(s.primes) - 1)
    i = bisect_right(primes, s.last)
    stop = min(bisect_right(primes, cfg.bound - 1), len(primes) - k)
    while i < stop:
        p = primes[i]
        # children are ordered, so the first overweight one ends the loop
        if p * (primes[i + 1] if k == 1 else math.prod(primes[i + 1 : i + 1 + k])) > room:
            break
        child = _coprime_child(s, p, cfg.limit)
        if child is not None:
            _walk(child, cfg, out, stats)
        i += 1


def default_units(cfg: SearchConfig) -> list[Unit]:
    """One unit per admissible leading prime."""
    sieve = get_sieve(cfg.bound + 1)
    units = []
    for p in sieve.primes[1:]:
        if p >= cfg.bound or p * _min_completion(p, cfg.d_min - 1, cfg.limit) > cfg.limit:
            break
        units.append((p,))
    return units


def search_unit(cfg: SearchConfig, unit: Unit, stats: SearchStats | None = None) -> list[CarmichaelRecord]:
    """Every admissible N <= X whose smallest primes are exactly ``unit``."""
    stats = stats if stats is not None else SearchStats()
    get_sieve(cfg.bound + 1)
    s = PrefixState()
    for p in unit:
        if p <= s.last or not is_prime(p) or p >= cfg.bound:
            return []
        nxt = extend(s, p, cfg)
        if nxt is None:
            return []
        s = nxt
    out: list[CarmichaelRecord] = []
    _walk(s, cfg, out, stats)
    out.sort()
    return out


def enumerate_all(cfg: SearchConfig, stats: SearchStats | None = None) -> Iterator[CarmichaelRecord]:
    """Stream the records of every work unit, unit by unit."""
    for unit in cfg.units if cfg.units is not None else default_units(cfg):
        yield from search_unit(cfg, unit, stats)


def run_search(cfg: SearchConfig) -> list[CarmichaelRecord]:
    return sorted(enumerate_all(cfg))


def enumerate_d3(cfg: SearchConfig) -> list[CarmichaelRecord]:
    """Complete list of three-prime Carmichael numbers up to cfg.limit."""
    cfg = SearchConfig(limit=cfg.limit, d_min=3, d_max=3, threshold=cfg.threshold,
                       split=cfg.split, units=cfg.units, pair_budget=cfg.pair_budget)
    sieve = get_sieve(cfg.bound + 1)
    root = PrefixState()
    out = []
    for p in sieve.primes[1:]:
        if p * p * p >= cfg.limit:
            break
        if cfg.units is not None and (p,) not in cfg.units:
            continue
        s = extend(root, p, cfg)
        if s is not None:
            out += complete_pair(s, cfg)
    out.sort()
    return out


def odd_primorial(d: int) -> int:
    """Product of the first d odd primes, a floor for any d-prime Carmichael number."""
    return math.prod(get_sieve().primes[1 : d + 1])


def smallest_with_d(d: int, cap: int) -> int | None:
    """Smallest Carmichael number with exactly d primes, searched up to cap."""
    if d < 3:
        raise ValueError("d must be at least 3")
    X = max(561, odd_primorial(d))
    while True:
        X = min(X, cap)
        if X >= 561:
            found = run_search(SearchConfig(limit=X, d_min=d, d_max=d))
            if found:
                return found[0].n
        if X >= cap:
            return None
        X *= 2
