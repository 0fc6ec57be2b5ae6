"""Independent oracles: plain trial division, no package code involved."""


def trial_is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def trial_factor(n):
    out = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return sorted(out.items())


def naive_carmichael(n):
    """Korselt by trial division, written independently of the package."""
    f = trial_factor(n)
    if len(f) < 2 or any(e > 1 for _, e in f):
        return False
    return all((n - 1) % (p - 1) == 0 for p, _ in f)


def upto(records, bound):
    return [r for r in records if r.n <= bound]
