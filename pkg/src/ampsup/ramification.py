"""Local invariants of (a, b / Q): Hilbert symbols and ramified primes."""

import math
from dataclasses import dataclass

from .arith import factorize, is_prime, valuation
from .errors import ConfigurationError, InconsistencyError, InputError

INFINITY = math.inf


def legendre(u, p):
    """Legendre symbol (u | p) for an odd prime p not dividing u."""
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _is_infinite_place(p):
    return p is None or p == INFINITY or (isinstance(p, str) and p.lower() in ("inf", "infinity", "oo"))


def hilbert_symbol(a, b, p):
    """Hilbert symbol (a, b)_p in {+1, -1}.

    ``p`` is a prime or the infinite place (``math.inf`` or ``"inf"``).
    The value is -1 exactly when (a, b / Q_p) is a division algebra.
    """
    a, b = int(a), int(b)
    if a == 0 or b == 0:
        raise InputError("Hilbert symbol needs nonzero arguments")
    if _is_infinite_place(p):
        return -1 if (a < 0 and b < 0) else 1
    if not isinstance(p, int) or not is_prime(p):
        raise InputError(f"{p!r} is not a prime")
    alpha, beta = valuation(a, p), valuation(b, p)
    u, v = a // p**alpha, b // p**beta
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2  # noqa: E731
        omega = lambda x: ((x * x - 1) // 8) % 2  # noqa: E731
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u, p) ** beta * legendre(v, p) ** alpha


@dataclass(frozen=True)
class RamificationData:
    """Finite ramified primes plus the derived integers q and D.

    Only maximal orders are modelled, so the Eichler part of q is trivial
    and ``q = D = product of ramified primes``.
    """

    ramified_primes: tuple
    q: int
    D: int

    @property
    def discriminant(self):
        return math.prod(self.ramified_primes)


def ramified_primes(params):
    """Ramification data of the algebra described by ``params``."""
    a, b = params.a, params.b
    candidates = sorted(set(factorize(2 * a * b)))
    primes = tuple(p for p in candidates if hilbert_symbol(a, b, p) == -1)
    if len(primes) % 2:
        raise InconsistencyError(
            f"odd number of ramified primes {primes} for ({a},{b}); Hilbert symbols are inconsistent"
        )
    if not primes:
        raise ConfigurationError(f"({a},{b}) is unramified everywhere, hence split (M_2(Q))")
    q = math.prod(primes)
    return RamificationData(primes, q, q)
