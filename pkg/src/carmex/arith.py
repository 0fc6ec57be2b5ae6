"""Exact integer arithmetic: modular operations, primality, factorization.

Python integers are unbounded, so products of two values below 2**63 are
exact without a double-width multiply. The working range of the engine is
``[0, 10**18]``; a few routines accept larger inputs for verification of the
big table entries.
"""
from __future__ import annotations

import math
import os
from bisect import bisect_left, bisect_right
from typing import Iterator

import gmpy2
import numpy as np

WORKING_LIMIT = 10**18
DEFAULT_SIEVE_LIMIT = 10**6
MAX_DIVISORS = 1 << 24

# (bound, bases): strong-probable-prime bases that are exhaustive below bound.
_MR_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_MR_13 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_13_BOUND = 3317044064679887385961981

Factorization = list[tuple[int, int]]


class NoInverseError(ValueError):
    """Raised when an inverse modulo m does not exist."""


class TooManyDivisorsError(OverflowError):
    """Raised when a divisor list would exceed MAX_DIVISORS entries."""


class FactorizationBudgetError(RuntimeError):
    """Raised when rho exceeds its iteration budget on a cofactor."""


# ---------------------------------------------------------------- sieve

def sieve_flags(limit: int) -> np.ndarray:
    """Boolean array ``flags`` with ``flags[i]`` true iff ``i`` is prime."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[: min(2, limit + 1)] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


class PrimeSieve:
    """Read-only table of primes up to ``limit``.

    Built once; lookups are plain indexing so instances can be shared
    freely between workers (forked processes get a copy-on-write view).
    """

    def __init__(self, limit: int) -> None:
        self.limit = max(limit, 10)
        flags = sieve_flags(self.limit)
        self._flags = flags.tobytes()
        self.primes: list[int] = np.flatnonzero(flags).tolist()

    def __contains__(self, n: int) -> bool:
        return 0 <= n <= self.limit and self._flags[n] == 1

    def count_upto(self, x: int) -> int:
        return bisect_right(self.primes, x)

    def index_after(self, x: int) -> int:
        """Index of the first prime strictly greater than ``x``."""
        return bisect_right(self.primes, x)

    def between(self, lo: int, hi: int) -> list[int]:
        """Primes ``p`` with ``lo < p <= hi`` (``hi`` within the table)."""
        return self.primes[bisect_right(self.primes, lo) : bisect_right(self.primes, hi)]

    def first_at_least(self, x: int) -> int:
        i = bisect_left(self.primes, x)
        return self.primes[i] if i < len(self.primes) else 0


_sieve: PrimeSieve | None = None


def sieve_limit() -> int:
    raw = os.environ.get("CARMEX_SIEVE_LIMIT")
    return int(raw) if raw else DEFAULT_SIEVE_LIMIT


def get_sieve(at_least: int = 0) -> PrimeSieve:
    """Shared sieve, rebuilt larger only when a caller needs more primes."""
    global _sieve
    if _sieve is None or _sieve.limit < at_least:
        _sieve = PrimeSieve(max(at_least, sieve_limit()))
    return _sieve


def primes_between(lo: int, hi: int, segment: int = 1 << 18) -> Iterator[int]:
    """Stream primes ``p`` with ``lo < p <= hi`` by a segmented sieve."""
    if hi <= lo or hi < 2:
        return
    base = get_sieve(math.isqrt(hi) + 1)
    small = np.array(base.between(1, math.isqrt(hi)), dtype=np.int64)
    start = max(lo + 1, 2)
    while start <= hi:
        stop = min(start + segment, hi + 1)
        flags = np.ones(stop - start, dtype=bool)
        for p in small:
            p = int(p)
            first = max(p * p, (start + p - 1) // p * p)
            if first >= stop:
                continue
            flags[first - start :: p] = False
        for off in np.flatnonzero(flags).tolist():
            yield start + off
        start = stop


# ---------------------------------------------------------------- modular

def mul_mod(a: int, b: int, m: int) -> int:
    if m <= 0:
        raise ValueError("modulus must be positive")
    return a * b % m


def pow_mod(b: int, e: int, m: int) -> int:
    """``b**e mod m`` by left-to-right square-and-multiply over mul_mod."""
    if m <= 0:
        raise ValueError("modulus must be positive")
    if e < 0:
        raise ValueError("negative exponent")
    result = 1 % m
    b %= m
    for bit in bin(e)[2:]:
        result = mul_mod(result, result, m)
        if bit == "1":
            result = mul_mod(result, b, m)
    return result


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def lcm(a: int, b: int, limit: int | None = WORKING_LIMIT) -> int:
    """Least common multiple; OverflowError if it exceeds ``limit``."""
    if a == 0 or b == 0:
        return 0
    value = a // math.gcd(a, b) * b
    if limit is not None and value > limit:
        raise OverflowError(f"lcm({a}, {b}) exceeds {limit}")
    return value


def inv_mod(a: int, m: int) -> int:
    if m < 2:
        raise ValueError("modulus must be at least 2")
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NoInverseError(f"{a} has no inverse modulo {m}") from None


# ---------------------------------------------------------------- primality

def fermat_probable(n: int, base: int = 2) -> bool:
    """base**(n-1) == 1 (mod n); a necessary condition for Carmichael n."""
    return gmpy2.powmod(base, n - 1, n) == 1


def _strong_probable_prime(n: int, base: int, d: int, s: int) -> bool:
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas(n: int) -> bool:
    """Strong Lucas probable-prime test with Selfridge parameters."""
    if math.isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = (n + 1) // 2
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality below 3.3e24; Baillie-PSW above."""
    sieve = get_sieve()
    if n <= sieve.limit:
        return n in sieve
    for p in sieve.primes[:25]:
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < 1 << 64:
        bases = _MR_64
    elif n < _MR_13_BOUND:
        bases = _MR_13
    else:
        return _strong_probable_prime(n, 2, d, s) and _strong_lucas(n)
    return all(_strong_probable_prime(n, a % n, d, s) for a in bases if a % n)


# ---------------------------------------------------------------- factoring

_TRIAL_BOUND = 1000


def _rho(n: int, budget: int | None) -> int:
    """A nontrivial factor of odd composite ``n`` (Brent's cycle search).

    The polynomial constant runs 1, 2, 3, ... so results are reproducible.
    """
    spent = 0
    for c in range(1, 1 << 20):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            spent += r
            if budget is not None and spent > budget:
                raise FactorizationBudgetError(f"rho budget exhausted on {n}")
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise FactorizationBudgetError(f"rho found no factor of {n}")


def _split(n: int, out: list[int], budget: int | None) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out.append(m)
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += (r, r)
            continue
        f = _rho(m, budget)
        stack += (f, m // f)


def factorize(n: int, rho_budget: int | None = None) -> Factorization:
    """Complete factorization as ascending (prime, exponent) pairs.

    Trial division by primes below 1000, then Brent-Pollard rho on
    whatever is left. ``rho_budget`` caps rho iterations per cofactor.
    """
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    result: Factorization = []
    sieve = get_sieve()
    for p in sieve.primes:
        if p > _TRIAL_BOUND or p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            result.append((p, e))
    if n > 1:
        if n < _TRIAL_BOUND * _TRIAL_BOUND:
            result.append((n, 1))
        else:
            big: list[int] = []
            _split(n, big, rho_budget)
            big.sort()
            for p in big:
                if result and result[-1][0] == p:
                    result[-1] = (p, result[-1][1] + 1)
                else:
                    result.append((p, 1))
    return result


def factor_value(f: Factorization) -> int:
    return math.prod(p**e for p, e in f)


def divisors(f: Factorization) -> list[int]:
    count = math.prod(e + 1 for _, e in f)
    if count > MAX_DIVISORS:
        raise TooManyDivisorsError(f"{count} divisors")
    divs = [1]
    for p, e in f:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    divs.sort()
    return divs
