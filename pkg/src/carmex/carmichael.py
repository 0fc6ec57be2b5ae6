"""Korselt's criterion, the Carmichael and Euler functions, and a brute-force oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .arith import Factorization, factorize, is_prime, lcm

ORACLE_CAP = 10**6


def korselt(n: int, f: Factorization) -> bool:
    """True iff n is squarefree with at least three primes and p-1 | n-1 for each."""
    if len(f) < 3 or any(e != 1 for _, e in f):
        return False
    return all((n - 1) % (p - 1) == 0 for p, _ in f)


def is_carmichael(n: int) -> bool:
    if n < 561 or n % 2 == 0:
        return False
    return korselt(n, factorize(n))


def carmichael_lambda(f: Factorization) -> int:
    """Exponent of the unit group modulo the factored integer."""
    result = 1
    for p, e in f:
        if p == 2:
            local = 1 if e == 1 else 2 if e == 2 else 1 << (e - 2)
        else:
            local = p ** (e - 1) * (p - 1)
        result = lcm(result, local, limit=None)
    return result


def euler_phi(f: Factorization) -> int:
    return math.prod(p ** (e - 1) * (p - 1) for p, e in f)


def index_of(n: int, f: Factorization) -> int:
    """i(n) = (n-1)/lambda(n), exact. ValueError unless n is Carmichael."""
    if not korselt(n, f):
        raise ValueError(f"{n} is not a Carmichael number")
    return (n - 1) // carmichael_lambda(f)


def lehmer_index(n: int, f: Factorization) -> Fraction:
    """(n-1)/phi(n) as an exact fraction."""
    if n < 4 or (len(f) == 1 and f[0][1] == 1):
        raise ValueError(f"{n} is not composite")
    return Fraction(n - 1, euler_phi(f))


def format_ratio(num: int, den: int, places: int) -> str:
    """Decimal rendering of num/den, rounded half to even, using integers only."""
    scale = 10**places
    q, r = divmod(num * scale, den)
    if 2 * r > den or (2 * r == den and q % 2 == 1):
        q += 1
    whole, frac = divmod(q, scale)
    return f"{whole}.{frac:0{places}d}" if places else str(whole)


@dataclass(frozen=True, order=True)
class CarmichaelRecord:
    n: int
    primes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.primes) < 3:
            raise ValueError(f"{self.n}: fewer than three prime factors")
        if any(a >= b for a, b in zip(self.primes, self.primes[1:])):
            raise ValueError(f"{self.n}: primes not strictly ascending")
        if math.prod(self.primes) != self.n:
            raise ValueError(f"{self.n}: product of primes differs")
        if any((self.n - 1) % (p - 1) for p in self.primes):
            raise ValueError(f"{self.n}: Korselt condition fails")

    @classmethod
    def from_primes(cls, primes) -> "CarmichaelRecord":
        primes = tuple(sorted(primes))
        return cls(math.prod(primes), primes)

    @property
    def d(self) -> int:
        return len(self.primes)

    @property
    def factorization(self) -> Factorization:
        return [(p, 1) for p in self.primes]

    @cached_property
    def lam(self) -> int:
        return carmichael_lambda(self.factorization)

    @property
    def index(self) -> int:
        return (self.n - 1) // self.lam

    @property
    def lehmer_num(self) -> int:
        return self.n - 1

    @cached_property
    def lehmer_den(self) -> int:
        return euler_phi(self.factorization)

    def lehmer(self) -> Fraction:
        return Fraction(self.lehmer_num, self.lehmer_den)

    def certify(self) -> bool:
        """Check primality of every listed factor (the constructor does the rest)."""
        return all(is_prime(p) for p in self.primes)


def record_for(n: int) -> CarmichaelRecord | None:
    """Factor n and return its record if it is Carmichael."""
    f = factorize(n)
    if not korselt(n, f):
        return None
    return CarmichaelRecord(n, tuple(p for p, _ in f))


def _is_composite(n: int) -> bool:
    # trial division keeps the oracle independent of the primality code
    if n < 4:
        return False
    if n % 2 == 0:
        return True
    return any(n % k == 0 for k in range(3, math.isqrt(n) + 1, 2))


def fermat_oracle(n: int, cap: int = ORACLE_CAP) -> bool:
    """Decide the defining congruence b^(n-1) = 1 (mod n) over every coprime base."""
    if n > cap:
        raise ValueError(f"{n} exceeds oracle cap {cap}")
    if n < 3:
        return False
    if math.gcd(2, n) == 1 and pow(2, n - 1, n) != 1:
        return False
    if not _is_composite(n):
        return False
    # b = n - 1 only matters for even n, where it always fails
    for b in range(2, n):
        if math.gcd(b, n) == 1 and pow(b, n - 1, n) != 1:
            return False
    return True


def _trial_primes(n: int) -> tuple[int, ...]:
    out = []
    k = 2
    while k * k <= n:
        while n % k == 0:
            out.append(k)
            n //= k
        k += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def brute_scan(limit: int, cap: int = ORACLE_CAP) -> list[CarmichaelRecord]:
    """Every n <= limit passing fermat_oracle, with trial-division factors."""
    if limit > cap:
        raise ValueError(f"limit {limit} exceeds oracle cap {cap}")
    return [
        CarmichaelRecord(n, _trial_primes(n))
        for n in range(3, limit + 1)
        if fermat_oracle(n, cap)
    ]
