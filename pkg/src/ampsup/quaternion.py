"""Exact arithmetic in a rational quaternion algebra (a, b / Q).

Elements are stored by their coordinates on the basis 1, i, j, ij with
``i*i = a``, ``j*j = b`` and ``ij = -ji``.  All coordinates are
:class:`fractions.Fraction`, so norms, traces and products are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, InputError

DEFAULT_HEIGHT = 50


def as_fraction(x):
    """Coerce ints, Fractions and ``"p/q"`` strings to a reduced Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise InputError(f"cannot interpret {x!r} as an exact rational")


def find_isotropic_vector(a, b, height=DEFAULT_HEIGHT):
    """Search for a nonzero integer zero of ``x0^2 - a x1^2 - b x2^2 + ab x3^2``.

    Every coordinate is bounded by ``height`` in absolute value.  The form
    splits as ``A(x0, x1) - b * A(x2, x3)`` with ``A(s, t) = s^2 - a t^2``,
    so a zero exists iff some value of ``A`` on one half matches ``b * A``
    on the other half with not both halves zero.  Returns the vector or None.
    """
    r = np.arange(-height, height + 1, dtype=np.int64)
    s, t = np.meshgrid(r, r, indexing="ij")
    s, t = s.ravel(), t.ravel()
    left = s * s - a * t * t
    right = b * left  # same grid, scaled; value of b*(x2^2 - a x3^2)
    nonzero = (s != 0) | (t != 0)

    def _match(lhs, lhs_mask, rhs, rhs_mask):
        common = np.intersect1d(lhs[lhs_mask], rhs[rhs_mask])
        if common.size == 0:
            return None
        v = common[0]
        i = np.flatnonzero(lhs_mask & (lhs == v))[0]
        j = np.flatnonzero(rhs_mask & (rhs == v))[0]
        return i, j

    everything = np.ones_like(nonzero)
    hit = _match(left, nonzero, right, everything) or _match(left, everything, right, nonzero)
    if hit is None:
        return None
    i, j = hit
    return (int(s[i]), int(t[i]), int(s[j]), int(t[j]))


@dataclass(frozen=True)
class AlgebraParams:
    """Parameters of the quaternion algebra (a, b / Q).

    Construction rejects algebras that are definite (a, b < 0) or whose norm
    form has an integer zero of height at most ``height_check``.
    """

    a: int
    b: int
    height_check: int = field(default=DEFAULT_HEIGHT, compare=False)

    def __post_init__(self):
        if not isinstance(self.a, (int, np.integer)) or not isinstance(self.b, (int, np.integer)):
            raise ConfigurationError("a and b must be integers")
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        if self.a == 0 or self.b == 0:
            raise ConfigurationError("a and b must be nonzero")
        if self.a < 0 and self.b < 0:
            raise ConfigurationError(
                f"({self.a},{self.b}) is definite: the algebra is not split at infinity"
            )
        zero = find_isotropic_vector(self.a, self.b, self.height_check)
        if zero is not None:
            raise ConfigurationError(
                f"norm form of ({self.a},{self.b}) vanishes at {zero}: not a division algebra"
            )

    @property
    def radicand(self):
        """The square root used by the real embedding: ``a`` if positive, else ``b``."""
        return self.a if self.a > 0 else self.b

    def element(self, *coords):
        return QuaternionElement(self, tuple(as_fraction(c) for c in coords))

    def one(self):
        return self.element(1, 0, 0, 0)

    def basis(self):
        return tuple(self.element(*row) for row in np.eye(4, dtype=int).tolist())


@dataclass(frozen=True)
class QuaternionElement:
    algebra: AlgebraParams
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != 4:
            raise InputError("a quaternion has exactly four coordinates")
        object.__setattr__(self, "coords", tuple(as_fraction(c) for c in self.coords))

    def _check(self, other):
        if not isinstance(other, QuaternionElement):
            return NotImplemented
        if other.algebra != self.algebra:
            raise ConfigurationError("quaternions belong to different algebras")
        return other

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.element(other, 0, 0, 0)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return QuaternionElement(self.algebra, tuple(x + y for x, y in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return QuaternionElement(self.algebra, tuple(-x for x in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuaternionElement(self.algebra, tuple(x * other for x in self.coords))
        if self._check(other) is NotImplemented:
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def norm(self):
        return norm(self)

    def trace(self):
        return trace(self)

    def conjugate(self):
        return conjugate(self)

    def is_scalar(self):
        return all(c == 0 for c in self.coords[1:])

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def multiply(alpha, beta):
    """Product in (a, b / Q) using i^2 = a, j^2 = b, ij = -ji."""
    if alpha.algebra != beta.algebra:
        raise ConfigurationError("quaternions belong to different algebras")
    a, b = alpha.algebra.a, alpha.algebra.b
    x0, x1, x2, x3 = alpha.coords
    y0, y1, y2, y3 = beta.coords
    return QuaternionElement(
        alpha.algebra,
        (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ),
    )


def norm(alpha):
    a, b = alpha.algebra.a, alpha.algebra.b
    x0, x1, x2, x3 = alpha.coords
    return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3


def trace(alpha):
    return 2 * alpha.coords[0]


def conjugate(alpha):
    x0, x1, x2, x3 = alpha.coords
    return QuaternionElement(alpha.algebra, (x0, -x1, -x2, -x3))


@dataclass(frozen=True)
class QuadExt:
    """``u + v*sqrt(d)`` with rational u, v; d is a fixed non-square integer."""

    u: Fraction
    v: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "u", as_fraction(self.u))
        object.__setattr__(self, "v", as_fraction(self.v))

    def _lift(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise InputError("mixing different quadratic fields")
            return other
        return QuadExt(as_fraction(other), Fraction(0), self.d)

    def __add__(self, other):
        other = self._lift(other)
        return QuadExt(self.u + other.u, self.v + other.v, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.u, -self.v, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return QuadExt(
            self.u * other.u + self.d * self.v * other.v,
            self.u * other.v + self.v * other.u,
            self.d,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return QuadExt(self.u, -self.v, self.d)

    def is_rational(self):
        return self.v == 0

    def to_float(self):
        return float(self.u) + float(self.v) * math.sqrt(self.d)

    def to_mpf(self):
        import mpmath

        return mpmath.mpf(self.u.numerator) / self.u.denominator + (
            mpmath.mpf(self.v.numerator) / self.v.denominator
        ) * mpmath.sqrt(self.d)


@dataclass(frozen=True)
class EmbeddedMatrix:
    """A 2x2 matrix with entries in Q(sqrt d), stored row-major."""

    entries: tuple  # (p, q, r, s) for [[p, q], [r, s]]

    def det(self):
        p, q, r, s = self.entries
        return p * s - q * r

    def trace(self):
        return self.entries[0] + self.entries[3]

    def __matmul__(self, other):
        p, q, r, s = self.entries
        P, Q, R, S = other.entries
        return EmbeddedMatrix((p * P + q * R, p * Q + q * S, r * P + s * R, r * Q + s * S))

    def __eq__(self, other):
        return isinstance(other, EmbeddedMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)


def embed(alpha):
    """Image of ``alpha`` in M_2(Q(sqrt d)), real because d > 0.

    With a > 0 this is ``[[x0 + x1 r, x2 + x3 r], [b (x2 - x3 r), x0 - x1 r]]``
    with ``r = sqrt(a)``.  When a < 0 the roles of i and j are swapped and
    ``r = sqrt(b)``:  ``[[x0 + x2 r, x1 - x3 r], [a (x1 + x3 r), x0 - x2 r]]``.
    """
    A = alpha.algebra
    a, b = A.a, A.b
    x0, x1, x2, x3 = alpha.coords
    if a > 0:
        d = a
        return EmbeddedMatrix(
            (QuadExt(x0, x1, d), QuadExt(x2, x3, d), QuadExt(b * x2, -b * x3, d), QuadExt(x0, -x1, d))
        )
    if b > 0:
        d = b
        return EmbeddedMatrix(
            (QuadExt(x0, x2, d), QuadExt(x1, -x3, d), QuadExt(a * x1, a * x3, d), QuadExt(x0, -x2, d))
        )
    raise ConfigurationError("no real embedding: both a and b are negative")


def to_real(m, precision=53):
    """Floating image of an embedded matrix.

    ``precision`` is a mantissa size in bits; up to 53 gives a float64
    numpy array, anything larger an ``mpmath.matrix`` at that precision.
    """
    if precision <= 53:
        return np.array([e.to_float() for e in m.entries], dtype=float).reshape(2, 2)
    import mpmath

    with mpmath.workprec(int(precision)):
        vals = [e.to_mpf() for e in m.entries]
        return mpmath.matrix([[vals[0], vals[1]], [vals[2], vals[3]]])
