"""Small integer utilities: sieving, factoring, divisor functions."""

from functools import reduce
from math import gcd, isqrt

import numpy as np


def primes_up_to(n):
    """Return all primes ``p <= n`` as a sorted list (sieve of Eratosthenes)."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


def prime_count(n):
    return len(primes_up_to(n))


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def factorize(n):
    """Prime factorisation of ``|n|`` as a dict ``{p: e}`` (trial division)."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n):
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def sigma1(n):
    return sum(divisors(n))


def num_divisors(n):
    return reduce(lambda acc, e: acc * (e + 1), factorize(n).values(), 1)


def coprime(m, n):
    return gcd(m, n) == 1


def valuation(n, p):
    """p-adic valuation of a nonzero integer."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v
