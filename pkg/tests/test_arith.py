import math

import pytest
from hypothesis import given, settings, strategies as st

from carmex import arith
from carmex.arith import (
    NoInverseError,
    PrimeSieve,
    divisors,
    factor_value,
    factorize,
    fermat_probable,
    gcd,
    inv_mod,
    is_prime,
    lcm,
    mul_mod,
    pow_mod,
    primes_between,
)
from oracles import trial_factor, trial_is_prime


# ---- mul_mod / pow_mod

def test_mul_mod_examples():
    assert mul_mod(2, 3, 5) == 1
    assert mul_mod(7, 1, 11) == 7
    # cross-checked with Python's big integers
    assert mul_mod(999999999999999989, 2, 10**18) == 999999999999999978


@given(st.integers(1, 2**63), st.data())
def test_mul_mod_matches_bigint(m, data):
    a = data.draw(st.integers(0, m - 1))
    b = data.draw(st.integers(0, m - 1))
    assert mul_mod(a, b, m) == (a * b) % m


def test_pow_mod_examples():
    assert pow_mod(5, 0, 7) == 1
    assert pow_mod(2, 560, 561) == 1
    assert pow_mod(2, 340, 341) == 1
    assert pow_mod(3, 340, 341) == 56


@given(st.integers(0, 10**20), st.integers(0, 10**6), st.integers(2, 2**64))
def test_pow_mod_matches_builtin(b, e, m):
    assert pow_mod(b, e, m) == pow(b, e, m)


def test_pow_mod_rejects_bad_modulus():
    with pytest.raises(ValueError):
        pow_mod(2, 3, 0)


# ---- gcd / lcm / inverse

def test_gcd_lcm_examples():
    assert gcd(2, 10) == 2
    assert lcm(2, 10) == 10
    assert lcm(lcm(2, 10), 16) == 80
    assert lcm(6, lcm(22, 40)) == 1320


def test_lcm_overflow_is_signalled():
    with pytest.raises(OverflowError):
        lcm(10**10 + 1, 10**10)
    assert lcm(10**10 + 1, 10**10, limit=None) == (10**10 + 1) * 10**10


def test_inv_mod_examples():
    assert inv_mod(1, 7) == 1
    assert inv_mod(3, 80) == 27
    with pytest.raises(NoInverseError):
        inv_mod(2, 4)


@given(st.integers(2, 10**18), st.integers(0, 10**18))
def test_inv_mod_property(m, a):
    try:
        x = inv_mod(a, m)
    except NoInverseError:
        assert math.gcd(a, m) != 1
    else:
        assert 0 <= x < m
        assert mul_mod(a % m, x, m) == 1 % m


# ---- primality

def test_is_prime_examples():
    assert is_prime(2)
    assert not is_prime(1)
    assert not is_prime(0)
    assert is_prime(704988733)
    assert not is_prime(561)


def test_is_prime_exhaustive_to_a_million():
    sieve = PrimeSieve(10**6)
    # plain bytearray sieve, independent of the numpy one
    flags = bytearray([1]) * (10**6 + 1)
    flags[0] = flags[1] = 0
    for i in range(2, 1001):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    mismatches = [n for n in range(10**6 + 1) if is_prime(n) != bool(flags[n])]
    assert mismatches == []
    assert len(sieve.primes) == sum(flags) == 78498


def test_witness_path_without_sieve(monkeypatch):
    # a tiny sieve forces every n above 100 through the Miller-Rabin path
    monkeypatch.setattr(arith, "_sieve", PrimeSieve(100))
    bad = [n for n in range(2, 200_000) if is_prime(n) != trial_is_prime(n)]
    assert bad == []


@pytest.mark.parametrize("n", [
    2047, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383,
    341550071728321, 3825123056546413051,  # strong pseudoprimes to small bases
    561, 41041, 825265, 994018226608901845, 804230935331967001,
])
def test_is_prime_rejects_pseudoprimes(n):
    assert not is_prime(n)


@pytest.mark.parametrize("p", [
    2**31 - 1, 2**61 - 1, 2**89 - 1, 2**107 - 1, 2**127 - 1,  # Mersenne primes
    2**64 - 59,  # largest prime below 2^64
    10**24 + 7,
])
def test_is_prime_large_primes(p):
    assert is_prime(p)


@pytest.mark.parametrize("a, b", [
    (193707721, 761838257287),  # 2^67 - 1
    (1287836182261, 2575672364521),  # strong pseudoprime to the first 13 primes
    (399165290221, 798330580441),
    (2**61 - 1, 2**89 - 1),
])
def test_is_prime_large_composites(a, b):
    assert not is_prime(a * b)


@given(st.integers(10**6, 10**12))
@settings(max_examples=300)
def test_is_prime_random_against_trial_division(n):
    assert is_prime(n) == trial_is_prime(n)


def test_fermat_probable():
    assert fermat_probable(561)
    assert fermat_probable(341)
    assert not fermat_probable(341, base=3)
    assert not fermat_probable(15)


# ---- sieve

def test_prime_sieve_queries():
    s = PrimeSieve(100)
    assert s.primes[:5] == [2, 3, 5, 7, 11]
    assert s.count_upto(100) == 25
    assert s.between(10, 30) == [11, 13, 17, 19, 23, 29]
    assert s.first_at_least(90) == 97
    assert 97 in s and 91 not in s


@given(st.integers(0, 3 * 10**6), st.integers(0, 5000), st.sampled_from([64, 1000, 1 << 18]))
@settings(max_examples=60)
def test_primes_between_matches_trial_division(lo, width, segment):
    hi = lo + width
    assert list(primes_between(lo, hi, segment)) == [n for n in range(lo + 1, hi + 1) if trial_is_prime(n)]


# ---- factorization

def test_factorize_examples():
    assert factorize(1) == []
    assert factorize(561) == [(3, 1), (11, 1), (17, 1)]
    assert factorize(994018226608901845) == [(5, 1), (13, 1), (1733, 1), (12517, 1), (704988733, 1)]


def test_factorize_rejects_nonpositive():
    with pytest.raises(ValueError):
        factorize(0)


@given(st.integers(1, 10**12))
@settings(max_examples=300)
def test_factorize_matches_trial_division(n):
    assert factorize(n) == trial_factor(n)


@given(st.lists(st.integers(2, 10**9), min_size=1, max_size=4))
@settings(max_examples=100)
def test_factorize_recomposes(parts):
    n = math.prod(parts)
    f = factorize(n)
    assert factor_value(f) == n
    assert [p for p, _ in f] == sorted({p for p, _ in f})
    assert all(is_prime(p) for p, _ in f)


def test_factorize_prime_squares_and_semiprimes():
    p, q = 1000003, 999983
    assert factorize(p * p) == [(p, 2)]
    assert factorize(p * q) == [(q, 1), (p, 1)]
    assert factorize(p**3 * q * 2**5) == [(2, 5), (q, 1), (p, 3)]


def test_factorize_budget():
    n = (2**61 - 1) * (2**31 - 1) * 1000003 * 1000033
    with pytest.raises(arith.FactorizationBudgetError):
        factorize(n * 10000019 * 10000079, rho_budget=10)


# ---- divisors

def test_divisors_examples():
    assert divisors([(2, 4)]) == [1, 2, 4, 8, 16]
    assert divisors([(2, 5)]) == [1, 2, 4, 8, 16, 32]
    assert divisors([]) == [1]


@given(st.integers(1, 10**9))
@settings(max_examples=200)
def test_divisors_property(n):
    f = factorize(n)
    ds = divisors(f)
    assert len(ds) == math.prod(e + 1 for _, e in f)
    assert all(n % d == 0 for d in ds)
    assert ds == sorted(set(ds))
