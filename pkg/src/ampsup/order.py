"""Orders in a quaternion algebra: verification, integer tables, config I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .quaternion import DEFAULT_HEIGHT, AlgebraParams, QuaternionElement, as_fraction, embed, to_real
from .ramification import ramified_primes


def _det(rows):
    """Exact determinant of a square Fraction matrix (Gaussian elimination)."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def _solve_left(rows, target):
    """Solve ``c @ rows = target`` exactly for the row vector c."""
    n = len(rows)
    # transpose so we solve rows^T c^T = target^T
    aug = [[rows[j][i] for j in range(n)] + [target[i]] for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(aug[i][n] for i in range(n))


@dataclass(frozen=True)
class OrderBasis:
    """A Z-basis e0..e3 of a (candidate) order, given as quaternions."""

    algebra: AlgebraParams
    basis: tuple

    def __post_init__(self):
        if len(self.basis) != 4:
            raise ConfigurationError("an order basis has exactly four elements")
        if any(e.algebra != self.algebra for e in self.basis):
            raise ConfigurationError("basis elements belong to another algebra")
        if _det(self.coord_matrix) == 0:
            raise ConfigurationError("basis elements are linearly dependent")

    @classmethod
    def from_rows(cls, algebra, rows):
        return cls(algebra, tuple(QuaternionElement(algebra, tuple(as_fraction(x) for x in r)) for r in rows))

    @cached_property
    def coord_matrix(self):
        return tuple(e.coords for e in self.basis)

    @cached_property
    def gram(self):
        """Trace pairing ``Tr(e_i e_j)``."""
        return tuple(tuple((ei * ej).trace() for ej in self.basis) for ei in self.basis)

    @cached_property
    def discriminant(self):
        return abs(_det(self.gram))

    @cached_property
    def index(self):
        """Covolume ratio of Z<1, i, j, ij> to this lattice."""
        return 1 / abs(_det(self.coord_matrix))

    def coords_of(self, elem):
        """Coordinates of a quaternion on this basis (exact, possibly non-integral)."""
        return _solve_left(self.coord_matrix, elem.coords)

    def element(self, coords):
        total = [Fraction(0)] * 4
        for c, e in zip(coords, self.basis):
            c = as_fraction(int(c) if isinstance(c, np.integer) else c)
            for t in range(4):
                total[t] += c * e.coords[t]
        return QuaternionElement(self.algebra, tuple(total))

    @cached_property
    def structure_constants(self):
        """``s[i][j]`` = coordinates of ``e_i * e_j`` on the basis."""
        return tuple(tuple(self.coords_of(ei * ej) for ej in self.basis) for ei in self.basis)

    @cached_property
    def one_coords(self):
        return self.coords_of(self.algebra.one())

    @cached_property
    def tables(self):
        """Integer tables for fast arithmetic on order coordinates.

        Only valid once :func:`verify_order` has confirmed integrality.
        """
        return IntegerTables.build(self)

    @cached_property
    def real_basis(self):
        """Float images of the basis in SL_2-type real 2x2 matrices, shape (4, 2, 2)."""
        return np.stack([to_real(embed(e)) for e in self.basis])


@dataclass(frozen=True)
class IntegerTables:
    struct: np.ndarray  # (4, 4, 4): e_i e_j = sum_k struct[i, j, k] e_k
    pairing: np.ndarray  # (4, 4): Tr(e_i conj(e_j)), so 2 N(c) = c^T pairing c
    traces: np.ndarray  # (4,)
    one: np.ndarray  # (4,)
    conj: np.ndarray  # (4, 4): coords of conj(x) = conj @ coords of x

    @classmethod
    def build(cls, order):
        def as_int(x):
            if x.denominator != 1:
                raise ConfigurationError("order tables requested for a non-integral basis")
            return int(x)

        struct = np.array(
            [[[as_int(c) for c in prod] for prod in row] for row in order.structure_constants], dtype=np.int64
        )
        pairing = np.array(
            [[as_int((ei * ej.conjugate()).trace()) for ej in order.basis] for ei in order.basis], dtype=np.int64
        )
        traces = np.array([as_int(e.trace()) for e in order.basis], dtype=np.int64)
        one = np.array([as_int(c) for c in order.one_coords], dtype=np.int64)
        conj = np.outer(one, traces) - np.eye(4, dtype=np.int64)
        return cls(struct, pairing, traces, one, conj)

    def multiply(self, x, y):
        """Product of coordinate vectors; broadcasts over leading axes."""
        return np.einsum("...i,...j,ijk->...k", x, y, self.struct)

    def conjugate(self, x):
        return x @ self.conj.T

    def norm(self, x):
        """Reduced norm of integer coordinate vectors (exact in int64)."""
        return np.einsum("...i,ij,...j->...", x, self.pairing, x) // 2

    def trace(self, x):
        return x @ self.traces


@dataclass
class OrderReport:
    """Outcome of :func:`verify_order`; ``failures`` names every failed check."""

    checks: dict
    discriminant: Fraction
    expected_discriminant: int
    ramified_primes: tuple
    index: Fraction
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": self.checks,
            "failures": self.failures,
            "discriminant": str(self.discriminant),
            "expected_discriminant": self.expected_discriminant,
            "ramified_primes": list(self.ramified_primes),
            "index": str(self.index),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def verify_order(order):
    """Check that ``order`` is a maximal order of its algebra.

    Runs unit containment, ring closure, integrality, the denominator
    bound and the discriminant test; never raises on a failed check.
    """
    ram = ramified_primes(order.algebra)
    expected = math.prod(ram.ramified_primes) ** 2
    checks = {}
    checks["unit_containment"] = all(c.denominator == 1 for c in order.one_coords)
    checks["ring_closure"] = all(
        c.denominator == 1 for row in order.structure_constants for prod in row for c in prod
    )
    checks["integrality"] = all(
        e.trace().denominator == 1 and e.norm().denominator == 1 for e in order.basis
    )
    max_den = max(c.denominator for e in order.basis for c in e.coords)
    checks["denominator_bound"] = max_den <= max(order.index, 1)
    checks["discriminant"] = order.discriminant == expected
    failures = [name for name, ok in checks.items() if not ok]
    return OrderReport(checks, order.discriminant, expected, ram.ramified_primes, order.index, failures)


@dataclass(frozen=True)
class OrderConfig:
    algebra: AlgebraParams
    order: OrderBasis
    height_check: int
    raw: dict

    @property
    def canonical_json(self):
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))


def parse_config(raw):
    try:
        height = int(raw.get("height_check", DEFAULT_HEIGHT))
        algebra = AlgebraParams(int(raw["a"]), int(raw["b"]), height)
        rows = raw["order_basis"]
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ConfigurationError("order_basis must be a 4x4 array")
        order = OrderBasis.from_rows(algebra, [[Fraction(str(x)) for x in r] for r in rows])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"malformed algebra config: {exc}") from exc
    return OrderConfig(algebra, order, height, raw)


def load_config(path=None):
    """Load an algebra/order config; ``None`` gives the bundled disc-6 default."""
    if path is None:
        text = resources.files("ampsup.data").joinpath("disc6.json").read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw)


@lru_cache(maxsize=None)
def default_order():
    """The (-1, 3) algebra with basis {1, i, j, (1+i+j+ij)/2}, verified."""
    cfg = load_config()
    report = verify_order(cfg.order)
    if not report.passed:
        raise ConfigurationError(f"bundled order failed verification: {report.failures}")
    return cfg.order
