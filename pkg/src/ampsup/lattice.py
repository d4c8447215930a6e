"""Norm-n order elements in hyperbolic balls, and Hecke coset decompositions.

An order element with reduced norm n > 0 acts on the upper half-plane
through its real image m.  With ``g_z`` the frame sending i to z,

    ||g_z^-1 m g_w||_F^2 = 2 n cosh d(z, m w),

and the left side is a positive-definite quadratic form in the four order
coordinates (the *majorant*).  A hyperbolic ball therefore becomes an
ellipsoid, and its lattice points are found by Fincke-Pohst style pruned
search.  The innermost coordinate is not searched at all: given the other
three, the norm equation is a quadratic in it and is solved exactly.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import geometry
from .arith import factorize
from .errors import ConditioningError, InputError, ResourceError, VerificationError
from .ramification import ramified_primes

PRUNE_MARGIN = 1e-6
BOUNDARY_TOL = 1e-9
DEFAULT_BUDGET = 5_000_000
COSET_BASE_POINT = complex(0.1, 1.2)


@dataclass(frozen=True)
class MajorantForm:
    """Gram matrix of ``c -> ||g_z^-1 phi(c) g_w||_F^2`` on order coordinates."""

    z: complex
    w: complex
    images: np.ndarray  # (4, 2, 2) conjugated basis images
    gram: np.ndarray
    upper: np.ndarray  # R with gram = R^T R

    def __call__(self, coords):
        c = np.asarray(coords, dtype=float)
        return np.einsum("...i,ij,...j->...", c, self.gram, c)

    def fincke_pohst(self):
        """Diagonal weights and off-diagonal shifts of the completed-square form."""
        R = self.upper
        diag = np.diag(R) ** 2
        shift = R / np.diag(R)[:, None]
        return diag, shift


def majorant(order, z, w=None):
    """Majorant form for the ball around ``z`` (and second point ``w``, default z)."""
    w = z if w is None else w
    geometry._check_points(z, w)
    images = geometry.frame_inverse(z) @ order.real_basis @ geometry.frame(w)
    gram = np.einsum("iab,jab->ij", images, images)
    try:
        lower = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"majorant at z={z} is not numerically positive definite") from exc
    return MajorantForm(complex(z), complex(w), images, gram, lower.T)


@dataclass
class LatticeBall:
    """Elements of norm n with ``cosh d(z, alpha w) <= cosh_cap`` (order coordinates)."""

    order: object
    n: int
    z: complex
    w: complex
    cosh_cap: float
    coords: np.ndarray  # (M, 4) int64, lexicographically sorted
    cosh_dist: np.ndarray  # (M,)
    complete: bool = True

    def __len__(self):
        return len(self.coords)

    def elements(self):
        return [self.order.element(c) for c in self.coords.tolist()]

    def matrices(self):
        """Real 2x2 images, shape (M, 2, 2)."""
        return np.einsum("mi,iab->mab", self.coords.astype(float), self.order.real_basis)

    @property
    def u_values(self):
        return (self.cosh_dist - 1) / 2

    def contains(self, coords):
        key = tuple(int(c) for c in coords)
        return key in {tuple(r) for r in self.coords.tolist()}

    def is_negation_closed(self):
        rows = {tuple(r) for r in self.coords.tolist()}
        return all(tuple(-x for x in r) in rows for r in rows)

    def restrict(self, cosh_cap):
        """Sub-ball with a smaller cap (same centre)."""
        keep = self.cosh_dist <= cosh_cap * (1 + BOUNDARY_TOL)
        return LatticeBall(
            self.order, self.n, self.z, self.w, cosh_cap, self.coords[keep], self.cosh_dist[keep], self.complete
        )

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "c0", "c1", "c2", "c3", "x0", "x1", "x2", "x3", "cosh_dist"])
        for c, cd in zip(self.coords.tolist(), self.cosh_dist.tolist()):
            q = self.order.element(c).coords
            writer.writerow([self.n, *c, *(str(x) for x in q), repr(cd)])
        return buf.getvalue()


def _ragged_arange(lo, hi):
    """Concatenate ``arange(lo[i], hi[i] + 1)``; also return the owning index."""
    counts = np.maximum(hi - lo + 1, 0)
    total = int(counts.sum())
    owner = np.repeat(np.arange(len(lo)), counts)
    starts = np.cumsum(counts) - counts
    offsets = np.arange(total) - np.repeat(starts, counts)
    return np.repeat(lo, counts) + offsets, owner


def _search_layer(c3_values, diag, shift, bound, pairing, n):
    """All (c0..c3) with prescribed c3, norm n and majorant below ``bound``.

    Pruning uses ``bound`` (already padded); the innermost coordinate is
    the root of ``pairing00 c0^2 + 2 b c0 + (beta^T P beta - 2n) = 0``.
    """
    out = []
    A = int(pairing[0, 0])
    for c3 in c3_values:
        rem2 = bound - diag[3] * c3 * c3
        if rem2 < 0:
            continue
        centre2 = -shift[2, 3] * c3
        r2 = math.sqrt(rem2 / diag[2])
        c2 = np.arange(math.ceil(centre2 - r2), math.floor(centre2 + r2) + 1, dtype=np.int64)
        if c2.size == 0:
            continue
        rem1 = rem2 - diag[2] * (c2 + shift[2, 3] * c3) ** 2
        ok = rem1 >= 0
        c2, rem1 = c2[ok], rem1[ok]
        centre1 = -(shift[1, 2] * c2 + shift[1, 3] * c3)
        r1 = np.sqrt(rem1 / diag[1])
        lo = np.ceil(centre1 - r1).astype(np.int64)
        hi = np.floor(centre1 + r1).astype(np.int64)
        c1, owner = _ragged_arange(lo, hi)
        if c1.size == 0:
            continue
        c2r = c2[owner]
        c3r = np.full_like(c1, c3)
        beta = np.stack([np.zeros_like(c1), c1, c2r, c3r], axis=1)
        b = beta @ pairing[0]
        quad = np.einsum("mi,ij,mj->m", beta, pairing, beta)
        disc = b * b - A * (quad - 2 * n)
        has = disc >= 0
        if not has.any():
            continue
        beta, b, disc = beta[has], b[has], disc[has]
        r = np.floor(np.sqrt(disc.astype(float))).astype(np.int64)
        r -= (r * r > disc).astype(np.int64)
        r += ((r + 1) * (r + 1) <= disc).astype(np.int64)
        square = r * r == disc
        beta, b, r = beta[square], b[square], r[square]
        for sgn in (1, -1):
            if sgn == -1:
                keep = r != 0  # a double root was already taken
                beta_s, b_s, r_s = beta[keep], b[keep], r[keep]
            else:
                beta_s, b_s, r_s = beta, b, r
            num = -b_s + sgn * r_s
            integral = num % A == 0
            if integral.any():
                sol = beta_s[integral].copy()
                sol[:, 0] = num[integral] // A
                out.append(sol)
    if not out:
        return np.zeros((0, 4), dtype=np.int64)
    return np.concatenate(out)


def _sorted_unique(coords):
    if len(coords) == 0:
        return coords.reshape(0, 4)
    coords = np.unique(coords, axis=0)  # lexicographic
    return coords


def enumerate_ball(order, n, z, cosh_cap, *, w=None, budget=DEFAULT_BUDGET, workers=1):
    """Every order element alpha with N(alpha) = n and cosh d(z, alpha w) <= cosh_cap.

    ``w`` defaults to ``z``.  The result is sorted lexicographically by
    coordinates, so it does not depend on ``workers``.  Raises
    :class:`ResourceError` (with the partial ball attached) when more than
    ``budget`` elements are found.
    """
    n = int(n)
    if n < 1:
        raise InputError("n must be a positive integer")
    if not cosh_cap >= 1:
        raise InputError("cosh_cap must be at least 1")
    w = z if w is None else w
    tables = order.tables
    form = majorant(order, z, w)
    diag, shift = form.fincke_pohst()
    cap_q = 2 * n * cosh_cap
    bound = cap_q * (1 + PRUNE_MARGIN)
    r3 = math.sqrt(bound / diag[3])
    c3_values = list(range(-math.floor(r3), math.floor(r3) + 1))
    if workers > 1 and len(c3_values) > 1:
        chunks = [c3_values[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    _search_layer,
                    chunks,
                    [diag] * workers,
                    [shift] * workers,
                    [bound] * workers,
                    [tables.pairing] * workers,
                    [n] * workers,
                )
            )
        found = np.concatenate(parts)
    else:
        found = _search_layer(c3_values, diag, shift, bound, tables.pairing, n)
    found = _sorted_unique(found)
    # exact norm filter (redundant with the exact root solve, kept as a guard)
    found = found[tables.norm(found) == n]
    q = form(found)
    inside = q <= cap_q * (1 + BOUNDARY_TOL)
    found, q = found[inside], q[inside]
    ball = LatticeBall(order, n, complex(z), complex(w), float(cosh_cap), found, q / (2 * n))
    if len(found) > budget:
        ball.complete = False
        ball.coords, ball.cosh_dist = found[:budget], ball.cosh_dist[:budget]
        raise ResourceError(f"ball for n={n}, cap={cosh_cap} exceeds budget of {budget} elements", partial=ball)
    return ball


def counting_function(order, n, z, rho, **kwargs):
    """Norm-n elements moving z by ``u(z, alpha z) = sinh^2(d/2) <= rho``."""
    if rho < 0:
        raise InputError("rho must be non-negative")
    return enumerate_ball(order, n, z, 1 + 2 * rho, **kwargs)


def _as_coords(order, x):
    if hasattr(x, "coords") and hasattr(x, "algebra"):
        c = order.coords_of(x)
        if any(v.denominator != 1 for v in c):
            raise InputError(f"{x} is not in the order")
        return np.array([int(v) for v in c], dtype=np.int64)
    return np.asarray(x, dtype=np.int64)


def same_coset(order, alpha, beta, n):
    """True iff ``Gamma alpha = Gamma beta``, i.e. ``alpha conj(beta) / n`` lies in the order."""
    t = order.tables
    a, b = _as_coords(order, alpha), _as_coords(order, beta)
    if int(t.norm(a)) != n or int(t.norm(b)) != n:
        raise InputError(f"both elements must have reduced norm {n}")
    prod = t.multiply(a, t.conjugate(b))
    return bool(np.all(prod % n == 0))


def reduce_to_cosets(order, coords, n):
    """Greedy partition of norm-n elements into left Gamma-cosets.

    Returns ``(rep_indices, assignment)``: the first unassigned element
    starts a new class and claims everything equivalent to it.
    """
    t = order.tables
    coords = np.asarray(coords, dtype=np.int64)
    assignment = np.full(len(coords), -1, dtype=np.int64)
    reps = []
    while True:
        free = np.flatnonzero(assignment < 0)
        if free.size == 0:
            break
        r = free[0]
        prod = t.multiply(coords[free], t.conjugate(coords[r]))
        same = np.all(prod % n == 0, axis=1)
        assignment[free[same]] = len(reps)
        reps.append(r)
    return np.array(reps, dtype=np.int64), assignment


@dataclass
class CosetDecomposition:
    n: int
    reps: np.ndarray  # (degree, 4) order coordinates
    degree: int
    cosh_cap: float
    history: list = field(default_factory=list)  # (cosh_cap, count) per refinement

    def to_csv(self, order):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "rep", "c0", "c1", "c2", "c3", "x0", "x1", "x2", "x3"])
        for i, c in enumerate(self.reps.tolist()):
            writer.writerow([self.n, i, *c, *(str(x) for x in order.element(c).coords)])
        return buf.getvalue()


_DEGREE_CACHE = {}


def degree_relation_holds(deg, m, n):
    """``deg(m) deg(n) == sum_{d | (m, n)} d deg(mn / d^2)`` for a degree function."""
    g = gcd(m, n)
    rhs = sum(d * deg(m * n // (d * d)) for d in range(1, g + 1) if g % d == 0)
    return deg(m) * deg(n) == rhs


def coset_reps(order, n, *, z=COSET_BASE_POINT, start_cap=2.0, max_cap=4096.0, audit=True, budget=DEFAULT_BUDGET):
    """Representatives of Gamma \\ Gamma(n).

    Grows the ball around ``z`` by doubling ``cosh_cap`` until the number of
    cosets is unchanged across two doublings, then (for n prime to the
    discriminant) audits the Hecke degree relations against the degrees of
    the prime-power factors.  A failed audit raises, it is never ignored.
    """
    n = int(n)
    key = (order, n, complex(z))
    if key in _DEGREE_CACHE:
        return _DEGREE_CACHE[key]
    cap = start_cap
    history = []
    while True:
        ball = enumerate_ball(order, n, z, cap, budget=budget)
        # closest elements first, so reps are short
        by_dist = np.lexsort((*ball.coords.T[::-1], ball.cosh_dist))
        coords = ball.coords[by_dist]
        rep_idx, _ = reduce_to_cosets(order, coords, n)
        history.append((cap, len(rep_idx)))
        counts = [c for _, c in history[-3:]]
        if len(counts) == 3 and counts[0] == counts[1] == counts[2] and counts[0] > 0:
            break
        cap *= 2
        if cap > max_cap:
            raise ResourceError(f"coset count for n={n} did not stabilise below cosh_cap={max_cap}", partial=history)
    deco = CosetDecomposition(n, coords[rep_idx], len(rep_idx), history[-1][0], history)
    if audit:
        _audit_degree(order, n, deco.degree, z)
    _DEGREE_CACHE[key] = deco
    return deco


def hecke_degree(order, n, **kwargs):
    return coset_reps(order, n, **kwargs).degree


def _audit_degree(order, n, degree, z):
    D = ramified_primes(order.algebra).D
    if n == 1:
        if degree != 1:
            raise VerificationError(f"deg(1) = {degree}, expected 1")
        return
    if gcd(n, D) != 1:
        return
    deg = lambda m: degree if m == n else hecke_degree(order, m, z=z)  # noqa: E731
    fac = factorize(n)
    if len(fac) > 1:
        p, e = next(iter(fac.items()))
        m = p**e
        if not degree_relation_holds(deg, m, n // m):
            raise VerificationError(f"degree relation fails for {m} * {n // m}: deg({n}) = {degree}")
        return
    (p, e), = fac.items()
    if e >= 2 and not degree_relation_holds(deg, p, p ** (e - 1)):
        raise VerificationError(f"degree relation fails for {p} * {p ** (e - 1)}: deg({n}) = {degree}")


@dataclass(frozen=True)
class IwSarRow:
    n: int
    elements: int
    small_count: int
    small_sum: float
    tail_sum: float
    integral: float
    comparison: float


def iw_sar_report(order, n_max, z, k, *, cosh_cap=None, budget=DEFAULT_BUDGET):
    """Small-ball and remainder sums of ``cosh^-k(d/2)`` over norm-n elements.

    For each n <= n_max prime to D, the ball ``cosh d <= cosh_cap`` around z
    is split at ``u = n^-3``; ``comparison`` is n times the tail integral.
    """
    from .amplifier import tail_integral

    if k < 4 or k % 2:
        raise InputError("k must be an even integer >= 4")
    D = ramified_primes(order.algebra).D
    rows = []
    for n in range(1, n_max + 1):
        if gcd(n, D) != 1:
            continue
        cap = cosh_cap if cosh_cap is not None else _default_cap(k)
        ball = enumerate_ball(order, n, z, cap, budget=budget)
        log_terms = -(k / 2) * np.log1p(ball.u_values)
        small = ball.u_values <= n**-3.0 * (1 + BOUNDARY_TOL)
        small_sum = float(np.sum(np.exp(log_terms[small])))
        tail_sum = float(np.sum(np.exp(log_terms[~small])))
        integral = tail_integral(n, k) if k >= 6 else math.nan
        rows.append(IwSarRow(n, len(ball), int(small.sum()), small_sum, tail_sum, integral, n * integral))
    return rows


def _default_cap(k):
    # cosh^-k(d/2) = (2 / (1 + cosh d))^(k/2) falls below ~1e-16 relative
    return min(256.0, max(4.0, 2 * 10 ** (32 / k) - 1))


def iw_sar_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "elements", "small_count", "small_sum", "tail_sum", "integral", "comparison"])
    for r in rows:
        writer.writerow([r.n, r.elements, r.small_count, repr(r.small_sum), repr(r.tail_sum), repr(r.integral), repr(r.comparison)])
    return buf.getvalue()
