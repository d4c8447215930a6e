"""Weight-k Bergman kernel of a cocompact arithmetic group, by its Poincare-type series.

For gamma in the unit group, the series term at (z, w) is

    ((k-1) (2i)^k / 4 pi) (z - conj(gamma w))^-k conj(j(gamma, w))^-k,

and after the Petersson weights ``(Im z Im w)^(k/2)`` its absolute value is
``((k-1)/4 pi) cosh^-k(d(z, gamma w)/2)``.  The series is truncated to a
hyperbolic ball ``cosh d <= cosh_cap``; the neglected part is bounded by
an empirical shell-growth model (reported as UNCERTIFIED-EMPIRICAL).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from math import gcd

import numpy as np

from . import geometry
from .errors import InputError, PrecisionError
from .lattice import DEFAULT_BUDGET, enumerate_ball
from .logscale import LogScaledReal
from .ramification import ramified_primes

TAIL_STATUS = "UNCERTIFIED-EMPIRICAL"
TAIL_SAFETY = 1.25
START_CAP = 4.0
MAX_CAP = 2.0**20


def check_weight(k):
    if int(k) != k or k < 4 or k % 2:
        raise InputError(f"weight must be an even integer >= 4 (S_k is zero for odd k), got {k}")
    return int(k)


def log_prefactor(k):
    return math.log((k - 1) / (4 * math.pi))


def log_term_from_u(u, k):
    """``log(((k-1)/4pi) cosh^-k(d/2))`` with ``u = sinh^2(d/2)``."""
    return log_prefactor(k) - 0.5 * k * np.log1p(u)


def term_magnitude(d, k):
    """Petersson magnitude of one series term at hyperbolic distance ``d``."""
    k = check_weight(k)
    if d < 0:
        raise InputError("distance must be non-negative")
    u = math.sinh(d / 2) ** 2
    return LogScaledReal.from_log(float(log_term_from_u(u, k)))


def term_magnitude_mp(d, k, dps=50):
    """Extended-precision value of :func:`term_magnitude` (as an mpmath number)."""
    import mpmath

    with mpmath.workdps(dps):
        d = mpmath.mpf(d)
        return (k - 1) / (4 * mpmath.pi) * mpmath.cosh(d / 2) ** (-k)


def shell_tail(cosh_values, cosh_cap, k, log_pref):
    """Empirical bound on ``sum prefactor * cosh^-k(d/2)`` over ``cosh d > cosh_cap``.

    Counts in the last two doubling shells of ``cosh d`` give a growth ratio
    g; shell j beyond the cap is assumed to hold ``c_last * g^j`` elements,
    each at most the term value at the shell's inner edge.  g is floored at
    2 (hyperbolic area doubles with cosh d) and inflated by TAIL_SAFETY.
    """
    cosh_values = np.asarray(cosh_values)
    c_last = int(np.count_nonzero((cosh_values > cosh_cap / 2) & (cosh_values <= cosh_cap)))
    c_prev = int(np.count_nonzero((cosh_values > cosh_cap / 4) & (cosh_values <= cosh_cap / 2)))
    g = c_last / c_prev if c_prev else 2.0
    g = max(g, 2.0) * TAIL_SAFETY
    base = max(c_last, 1)
    logs = []
    for j in range(1, 4000):
        inner = cosh_cap * 2.0 ** (j - 1)
        lt = math.log(base) + j * math.log(g) + log_pref - 0.5 * k * math.log((1 + inner) / 2)
        logs.append(lt)
        if j > 2 and lt < logs[0] - 80:
            break
        if j > 2 and logs[-1] >= logs[-2]:
            return math.inf
    return float(LogScaledReal.sum_logs(logs))


@dataclass
class KernelEvaluation:
    z: complex
    w: complex
    k: int
    log_scale: float  # signed value = mantissa * exp(log_scale)
    mantissa: complex
    magnitude: LogScaledReal  # sum of Petersson magnitudes over the ball
    tail_bound: float
    terms_used: int
    cosh_cap: float
    psl: bool = False
    tail_status: str = TAIL_STATUS

    @property
    def signed_value(self):
        """Petersson-weighted kernel value ``(Im z Im w)^(k/2) B(z, w)``."""
        return self.mantissa * math.exp(self.log_scale)

    @property
    def magnitude_bound(self):
        return float(self.magnitude)


def _unit_images(order, z, w, cosh_cap, ball, budget):
    """Real images of norm-1 elements with ``cosh d(z, gamma w) <= cosh_cap``, plus sort keys."""
    if ball is None:
        ball = enumerate_ball(order, 1, z, cosh_cap, w=w, budget=budget)
        mats = ball.matrices()
        coshd = ball.cosh_dist
        coords = ball.coords
    else:
        if ball.n != 1:
            raise InputError("kernel evaluation needs a ball of norm-1 elements")
        spread = float(geometry.dist(ball.z, z) + geometry.dist(ball.w, w))
        if cosh_cap * math.exp(spread) > ball.cosh_cap * (1 + 1e-12):
            raise InputError("supplied ball does not cover the requested cap at these points")
        mats = ball.matrices()
        coshd = geometry.cosh_dist(z, geometry.mobius(mats, w))
        keep = coshd <= cosh_cap * (1 + 1e-9)
        mats, coshd, coords = mats[keep], coshd[keep], ball.coords[keep]
    order_idx = np.lexsort((*coords.T[::-1], coshd))
    return mats[order_idx], coshd[order_idx]


def _evaluate(order, z, w, k, cosh_cap, psl, ball, budget):
    mats, coshd = _unit_images(order, z, w, cosh_cap, ball, budget)
    gw = geometry.mobius(mats, w)
    j = geometry.j_factor(mats, w)
    y, v = z.imag, w.imag
    t = 2j * math.sqrt(y * v) / ((z - np.conj(gw)) * np.conj(j))
    logs = k * np.log(t)
    shift = float(np.max(logs.real)) if len(logs) else 0.0
    mantissa = complex(np.sum(np.exp(logs - shift)))
    lp = log_prefactor(k)
    u = (coshd - 1) / 2
    mag_logs = log_term_from_u(u, k)
    scale = lp + shift
    magnitude = LogScaledReal.sum_logs(mag_logs)
    tail = shell_tail(coshd, cosh_cap, k, lp)
    if psl:
        scale -= math.log(2)
        magnitude = magnitude * 0.5
        tail /= 2
    return KernelEvaluation(complex(z), complex(w), k, scale, mantissa, magnitude, tail, len(mats), float(cosh_cap), psl)


def kernel_petersson(order, z, w, k, cosh_cap=None, *, tol=None, ball=None, psl=False, max_cap=MAX_CAP, budget=DEFAULT_BUDGET):
    """Truncated Bergman kernel at (z, w) with Petersson weights applied.

    With ``cosh_cap=None`` the cap doubles from START_CAP until the tail
    bound is below ``tol``.  A tail above ``tol`` raises
    :class:`PrecisionError`.  ``ball`` may be a precomputed norm-1 ball
    around another centre that covers the requested cap.
    """
    k = check_weight(k)
    z, w = complex(z), complex(w)
    geometry._check_points(z, w)
    if cosh_cap is None:
        if tol is None:
            raise InputError("give cosh_cap or tol")
        cap = START_CAP
        while True:
            ev = _evaluate(order, z, w, k, cap, psl, ball, budget)
            if ev.tail_bound <= tol:
                return ev
            cap *= 2
            if cap > max_cap:
                raise PrecisionError(
                    f"tail bound {ev.tail_bound:.3g} > tol {tol:g} at cosh_cap {ev.cosh_cap:g}; "
                    "a larger cosh_cap (or a smaller tolerance target) is needed"
                )
    ev = _evaluate(order, z, w, k, cosh_cap, psl, ball, budget)
    if tol is not None and ev.tail_bound > tol:
        raise PrecisionError(
            f"tail bound {ev.tail_bound:.3g} > tol {tol:g} at cosh_cap {cosh_cap:g}; try a larger cosh_cap"
        )
    return ev


def covering_ball(order, points, cosh_cap, budget=DEFAULT_BUDGET):
    """One norm-1 ball that serves kernel evaluations at every point in ``points``.

    Uses ``cosh d(c, g c) <= e^(2 d(c, z)) cosh d(z, g z)`` for the centre c.
    """
    points = np.asarray(points)
    centre = complex(np.mean(points.real), math.exp(np.mean(np.log(points.imag))))
    spread = float(np.max(geometry.dist(centre, points)))
    return enumerate_ball(order, 1, centre, cosh_cap * math.exp(2 * spread) * (1 + 1e-9), budget=budget)


@dataclass
class HeckeKernelValue:
    """Sum of ``((k-1)/4pi) cosh^-k(d(z, gamma z)/2)`` over norm-n elements."""

    n: int
    k: int
    z: complex
    ball_sum: LogScaledReal
    small_ball: LogScaledReal  # part with u <= n^-3
    remainder: LogScaledReal
    tail_bound: float
    terms_used: int
    cosh_cap: float

    @property
    def value(self):
        """Upper bound: ball sum plus the empirical tail."""
        return self.ball_sum + LogScaledReal.from_float(self.tail_bound)

    def csv_row(self):
        return [self.n, self.k, repr(self.value.log10), repr(float(self.small_ball)), repr(self.tail_bound), self.terms_used]


HECKE_CSV_HEADER = ["n", "k", "value_log10", "small_ball_part", "tail_part", "terms_used"]


def hecke_csv(values):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HECKE_CSV_HEADER)
    for v in values:
        writer.writerow(v.csv_row())
    return buf.getvalue()


def hecke_translate_kernel(order, z, n, k, cosh_cap=None, *, tol=None, max_cap=MAX_CAP, budget=DEFAULT_BUDGET):
    """Hecke translate ``T_n |B(z, .)|_pet`` bounded by its unfolded series over norm-n elements."""
    k = check_weight(k)
    n = int(n)
    D = ramified_primes(order.algebra).D
    if gcd(n, D) != 1:
        raise InputError(f"n={n} is not prime to the discriminant {D}")
    z = complex(z)

    def _eval(cap):
        ball = enumerate_ball(order, n, z, cap, budget=budget)
        order_idx = np.lexsort((*ball.coords.T[::-1], ball.cosh_dist))
        u = ball.u_values[order_idx]
        logs = log_term_from_u(u, k)
        small = u <= n**-3.0 * (1 + 1e-9)
        tail = shell_tail(ball.cosh_dist, cap, k, log_prefactor(k))
        return HeckeKernelValue(
            n,
            k,
            z,
            LogScaledReal.sum_logs(logs),
            LogScaledReal.sum_logs(logs[small]),
            LogScaledReal.sum_logs(logs[~small]),
            tail,
            len(u),
            float(cap),
        )

    if cosh_cap is not None:
        hv = _eval(cosh_cap)
        if tol is not None and hv.tail_bound > tol:
            raise PrecisionError(f"tail bound {hv.tail_bound:.3g} > tol {tol:g}; try a larger cosh_cap")
        return hv
    if tol is None:
        raise InputError("give cosh_cap or tol")
    cap = START_CAP
    while True:
        hv = _eval(cap)
        if hv.tail_bound <= tol:
            return hv
        cap *= 2
        if cap > max_cap:
            raise PrecisionError(f"tail bound {hv.tail_bound:.3g} > tol {tol:g} at cosh_cap {hv.cosh_cap:g}")


@dataclass(frozen=True)
class PrefactorCheck:
    frak_n: int
    elements: int
    max_route_discrepancy: float  # cusp-form normalisation vs L^2 normalisation
    max_term_discrepancy: float  # L^2 weight times series term vs term_magnitude(dist)


def hecke_prefactor_check(order, z, k, m, n, d, cosh_cap=4.0, budget=DEFAULT_BUDGET):
    """Termwise check of the weight bookkeeping for ``frak_n = m n / d^2``.

    For each norm-frak_n element gamma, the identity term of B(z, gamma z)
    is weighted two ways:
      cusp route   y^k (d^2/mn)^((k-1)/2) frak_n^(k-1) |j(gamma, z)|^-k |term|
      L^2 route    (d / sqrt(mn)) (y Im(gamma z))^(k/2) |term|
    and the L^2 weight without the d/sqrt(mn) factor is compared with
    term_magnitude(d(z, gamma z)).  Returns the worst relative discrepancies.
    """
    k = check_weight(k)
    if (m * n) % (d * d):
        raise InputError("d^2 must divide m n")
    frak = m * n // (d * d)
    z = complex(z)
    ball = enumerate_ball(order, frak, z, cosh_cap, budget=budget)
    mats = ball.matrices()
    y = z.imag
    gz = geometry.mobius(mats, z)
    j = geometry.j_factor(mats, z)
    log_series = log_prefactor(k) + k * math.log(2) - k * np.log(np.abs(z - np.conj(gz)))
    cusp = (
        k * math.log(y)
        + 0.5 * (k - 1) * math.log(d * d / (m * n))
        + (k - 1) * math.log(frak)
        - k * np.log(np.abs(j))
        + log_series
    )
    l2_weight = 0.5 * k * np.log(y * gz.imag) + log_series
    l2 = math.log(d / math.sqrt(m * n)) + l2_weight
    direct = np.array([term_magnitude(float(x), k).log for x in geometry.dist(z, gz)])
    route = float(np.max(np.abs(np.expm1(cusp - l2)))) if len(mats) else 0.0
    term = float(np.max(np.abs(np.expm1(l2_weight - direct)))) if len(mats) else 0.0
    return PrefactorCheck(frak, len(mats), route, term)
