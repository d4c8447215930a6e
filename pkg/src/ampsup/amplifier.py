"""Amplification calculus: amplifier coefficients, moment sums, the tail
integral, the final bound and its optimisation in N.

Everything here is elementary real analysis on top of the Hecke/kernel
modules; true Hecke eigenvalues are never computed.  The coefficient
attached to a prime is only known through the Deligne-type cap
``|eta(p)| <= 2 p^eps`` and the relation ``eta(p)^2 - eta(p^2) = 1``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy import integrate, special

from .arith import divisors, num_divisors, primes_up_to
from .errors import DegenerateAmplifierError, InputError
from .ramification import ramified_primes

PRIME = "eta(p)"
SQUARE = -1


@dataclass(frozen=True)
class AmplifierPlan:
    N: int
    D: int
    alphas: dict  # n -> PRIME (unknown eigenvalue) or SQUARE (-1)
    prime_count: int

    @property
    def support(self):
        return sorted(self.alphas)

    @property
    def primes(self):
        return [n for n, r in sorted(self.alphas.items()) if r == PRIME]


def build_amplifier(N, D):
    """Coefficients at primes p <= sqrt(N) and their squares, skipping p | D."""
    if N < 1 or D < 1:
        raise InputError("N and D must be positive")
    alphas = {}
    for p in primes_up_to(math.isqrt(N)):
        p = int(p)
        if D % p == 0:
            continue
        alphas[p] = PRIME
        alphas[p * p] = SQUARE
    return AmplifierPlan(N, D, alphas, sum(1 for r in alphas.values() if r == PRIME))


@dataclass(frozen=True)
class EigenvalueBoundModel:
    """Worst-case model of normalised eigenvalues ``|eta(n)| <= d(n) n^eps``."""

    epsilon: float = 0.0

    def eta_bound(self, n):
        return num_divisors(n) * n**self.epsilon

    def alpha_bound(self, plan, n):
        role = plan.alphas.get(n)
        if role is None:
            return 0.0
        return self.eta_bound(n) if role == PRIME else 1.0


def amplified_value(plan, eta_primes):
    """``sum_n alpha_n eta(n)`` with ``alpha_p = eta(p)`` and ``eta(p^2) = eta(p)^2 - 1``.

    Any real values for eta(p) give exactly ``prime_count``; this is the
    lower-bound mechanism of the amplifier.
    """
    total = 0.0
    for p in plan.primes:
        t = eta_primes[p]
        total += t * t + SQUARE * (t * t - 1)
    return total


def moment_sums(plan, model=None):
    """``(S1, S2, L) = (sum |alpha|^2, (sum |alpha|)^2, prime_count^2)`` under the caps."""
    model = model or EigenvalueBoundModel()
    if not plan.alphas:
        raise DegenerateAmplifierError(
            f"amplifier for N={plan.N}, D={plan.D} is empty; the lower bound L would be 0"
        )
    bounds = [model.alpha_bound(plan, n) for n in plan.support]
    return sum(b * b for b in bounds), sum(bounds) ** 2, plan.prime_count**2


# -- tail integral ------------------------------------------------------------


@dataclass(frozen=True)
class TailIntegral:
    n: int
    k: int
    first: float  # int (1+u)^-k/2 over [n^-3, inf), by quadrature
    first_closed: float
    second: float  # int u^-3/4 (1+u)^-k/2 over [n^-3, inf), by quadrature

    @property
    def total(self):
        return self.first + self.second

    @property
    def first_rel_error(self):
        return abs(self.first - self.first_closed) / self.first_closed


def _quad(f, a, b):
    val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def tail_integral_parts(n, k):
    if k < 6:
        raise InputError("tail integral needs k >= 6")
    if n < 1:
        raise InputError("n must be a positive integer")
    a = float(n) ** -3
    x = a / (1 + a)
    m = k / 2
    # t = u / (1 + u) maps [a, inf) to [x, 1)
    first = _quad(lambda t: (1 - t) ** (m - 2), x, 1.0)
    closed = (1 + a) ** (1 - m) / (m - 1)
    # then s = t^(1/4) removes the t^(-3/4) singularity
    second = _quad(lambda s: 4 * (1 - s**4) ** (m - 1.25), x**0.25, 1.0)
    return TailIntegral(int(n), int(k), first, closed, second)


def tail_integral(n, k):
    """``int_{n^-3}^inf ((1+u)^-k/2 + u^-3/4 (1+u)^-k/2) du`` by adaptive quadrature."""
    return tail_integral_parts(n, k).total


def tail_second_beta(n, k):
    """Second summand as an incomplete beta function (independent of the quadrature)."""
    a = float(n) ** -3
    x = a / (1 + a)
    p, q = 0.25, k / 2 - 0.25
    return special.beta(p, q) * special.betaincc(p, q, x)


@dataclass
class TailCheck:
    epsilon: float
    exponent: float
    rows: list  # (n, k, lhs, shape, ratio)
    constant: float

    @property
    def finite(self):
        return math.isfinite(self.constant)


def tail_estimate_check(n_values, k_values, eps=0.0, exponent=13 / 4):
    """Ratio of ``n^(1+eps) k I(n, k)`` to ``n^(exponent+eps) (n^3/(n^3+1))^(k/2)``.

    The fitted constant is the largest ratio over the scan.
    """
    rows = []
    for n in n_values:
        for k in k_values:
            log_lhs = (1 + eps) * math.log(n) + math.log(k) + math.log(tail_integral(n, k))
            log_shape = (exponent + eps) * math.log(n) + (k / 2) * math.log1p(-1 / (float(n) ** 3 + 1))
            rows.append((n, k, math.exp(log_lhs), math.exp(log_shape), math.exp(log_lhs - log_shape)))
    const = max(r[4] for r in rows) if rows else math.nan
    return TailCheck(eps, exponent, rows, const)


# -- final bound --------------------------------------------------------------


@dataclass(frozen=True)
class BoundTerms:
    k: float
    N: float
    term1: float
    log_term2: float

    @property
    def term2(self):
        return math.exp(self.log_term2) if self.log_term2 < 709 else math.inf

    @property
    def rhs(self):
        return self.term1 + self.term2

    @property
    def log_rhs(self):
        return float(np.logaddexp(math.log(self.term1), self.log_term2))


def bound_rhs(k, N, eps=0.0, term2_exponent=11 / 2, precision="double"):
    """``k / N^(1/2 - eps)`` and ``N^(e + eps) (1 - 1/(N^3+1))^(k/2)``, the latter in logs.

    ``term2_exponent`` defaults to 11/2; 13/2 gives the variant carried
    by the un-normalised display.  ``precision="extended"`` uses mpmath.
    """
    if precision == "extended":
        import mpmath

        with mpmath.workdps(40):
            kk, NN = mpmath.mpf(k), mpmath.mpf(N)
            t1 = kk / NN ** (mpmath.mpf(0.5) - eps)
            lt2 = (term2_exponent + eps) * mpmath.log(NN) + kk / 2 * mpmath.log1p(-1 / (NN**3 + 1))
            return BoundTerms(float(k), float(N), float(t1), float(lt2))
    if N < 1 or k < 1:
        raise InputError("need N >= 1 and k >= 1")
    t1 = k / N ** (0.5 - eps)
    lt2 = (term2_exponent + eps) * math.log(N) + (k / 2) * math.log1p(-1 / (float(N) ** 3 + 1))
    return BoundTerms(float(k), float(N), t1, lt2)


def _log_rhs_grid(k, Ns, eps=0.0, term2_exponent=11 / 2):
    Ns = np.asarray(Ns, dtype=float)
    lt1 = math.log(k) - (0.5 - eps) * np.log(Ns)
    lt2 = (term2_exponent + eps) * np.log(Ns) + (k / 2) * np.log1p(-1 / (Ns**3 + 1))
    return np.logaddexp(lt1, lt2)


def solve_balanced_N(k, tol=1e-12):
    """Root of ``12 N^3 ln N = k`` by Newton steps kept inside a shrinking bracket."""
    if k <= 0:
        raise InputError("k must be positive")
    f = lambda N: 12 * N**3 * math.log(N) - k
    lo, hi = 1.0, max(2.0, k ** (1 / 3))
    N = 0.5 * (lo + hi)
    for _ in range(200):
        fN = f(N)
        if fN > 0:
            hi = N
        else:
            lo = N
        dfN = 12 * N**2 * (3 * math.log(N) + 1)
        step = N - fN / dfN
        N_new = step if lo < step < hi else 0.5 * (lo + hi)
        if abs(N_new - N) <= tol * N:
            return N_new
        N = N_new
    return N


@dataclass(frozen=True)
class OptimalN:
    k: float
    N_balanced: float
    rhs_balanced: float
    N_grid: int
    rhs_grid: float

    @property
    def residual(self):
        return abs(12 * self.N_balanced**3 * math.log(self.N_balanced) - self.k)

    @property
    def ratio(self):
        return self.rhs_balanced / self.rhs_grid


def optimal_N(k, eps=0.0):
    """N from ``12 N^3 ln N = k`` and the integer minimiser over ``2..ceil(k^(1/3))``."""
    if k < 100:
        raise InputError("optimal_N needs k >= 100")
    Np = solve_balanced_N(k)
    Ns = np.arange(2, max(3, math.ceil(k ** (1 / 3))) + 1)
    logs = _log_rhs_grid(k, Ns, eps)
    i = int(np.argmin(logs))
    return OptimalN(float(k), Np, bound_rhs(k, Np, eps).rhs, int(Ns[i]), float(np.exp(logs[i])))


def asymptotic_ratio(N):
    """``(1 - 1/(N^3+1))^(6 N^3 ln N) * N^6``; tends to 1."""
    N = float(N)
    return math.exp(6 * N**3 * math.log(N) * math.log1p(-1 / (N**3 + 1)) + 6 * math.log(N))


@dataclass
class BoundCurve:
    rows: list  # (k, N_choice, term1, term2, rhs, log_slope)
    slope: float
    drop_term2: bool = False

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "N_choice", "term1", "term2", "rhs", "log_slope"])
        for row in self.rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
        return buf.getvalue()


def exponent_fit(k_min, k_max, samples=40, *, eps=0.0, drop_term2=False, term2_exponent=11 / 2):
    """Least-squares slope of ``log rhs(k, N(k))`` in ``log k``, N from ``12 N^3 ln N = k``."""
    if k_max / k_min < 1e3 - 1e-9:
        raise InputError("exponent_fit needs k_max / k_min >= 1000")
    if samples < 2:
        raise InputError("need at least two samples")
    ks = np.geomspace(k_min, k_max, samples)
    rows, logk, logr = [], [], []
    for k in ks:
        k = float(k)
        N = solve_balanced_N(k)
        b = bound_rhs(k, N, eps, term2_exponent)
        t2 = 0.0 if drop_term2 else b.term2
        lr = math.log(b.term1) if drop_term2 else b.log_rhs
        slope = (lr - logr[-1]) / (math.log(k) - logk[-1]) if logr else ""
        logk.append(math.log(k))
        logr.append(lr)
        rows.append((k, N, b.term1, t2, b.term1 + t2, slope))
    fit = float(np.polyfit(logk, logr, 1)[0])
    return BoundCurve(rows, fit, drop_term2)


# -- amplified inequality -----------------------------------------------------


@dataclass
class AmplifiedReport:
    k: int
    N: int
    z: complex
    epsilon: float
    frak_values: list
    hecke: dict  # frak_n -> HeckeKernelValue fields
    lhs: float  # sum |a_m a_n| sum_d (d/sqrt(mn)) T_frak |B|_pet
    termwise_package: float  # same with T_frak replaced by the two-term bound
    package: float  # N^eps S1 k + S2 N^(11/2+eps) (1 - 1/(N^3+1))^(k/2)
    fitted_constant: float  # lhs / package
    max_route_discrepancy: float
    max_term_discrepancy: float
    prefactor_elements: int
    entries: list = field(default_factory=list)

    def to_dict(self):
        return {
            "k": self.k,
            "N": self.N,
            "z": [self.z.real, self.z.imag],
            "epsilon": self.epsilon,
            "frak_values": self.frak_values,
            "hecke": self.hecke,
            "lhs": self.lhs,
            "termwise_package": self.termwise_package,
            "package": self.package,
            "fitted_constant": self.fitted_constant,
            "max_route_discrepancy": self.max_route_discrepancy,
            "max_term_discrepancy": self.max_term_discrepancy,
            "prefactor_elements": self.prefactor_elements,
            "entries": self.entries,
        }


def amplified_inequality_check(order, z, k, N, eps=0.0, *, tol=1e-10, prefactor_cap=4.0, budget=None):
    """Evaluate the amplified inequality term by term at one point.

    For each (m, n) in the amplifier support and d | (m, n) the Hecke
    translate at ``frak = mn/d^2`` is computed from the lattice, weighted
    by the coefficient caps and ``d / sqrt(mn)``, and compared with the
    two-term package.  The weight bookkeeping is also checked elementwise.
    """
    from .bergman import check_weight, hecke_prefactor_check, hecke_translate_kernel
    from .lattice import DEFAULT_BUDGET

    k = check_weight(k)
    if k > 60 or N > 30:
        raise InputError("amplified_inequality_check is a desk check: needs k <= 60 and N <= 30")
    budget = budget or DEFAULT_BUDGET
    D = ramified_primes(order.algebra).D
    plan = build_amplifier(N, D)
    model = EigenvalueBoundModel(eps)
    S1, S2, _ = moment_sums(plan, model)

    triples = []
    for m in plan.support:
        for n in plan.support:
            for d in divisors(gcd(m, n)):
                triples.append((m, n, d, m * n // (d * d)))
    fraks = sorted({t[3] for t in triples})
    hecke = {f: hecke_translate_kernel(order, z, f, k, tol=tol, budget=budget) for f in fraks}

    lhs = termwise = 0.0
    route = term = 0.0
    elements = 0
    checked = set()
    entries = []
    for m, n, d, f in triples:
        w = model.alpha_bound(plan, m) * model.alpha_bound(plan, n)
        scale = d / math.sqrt(m * n)
        value = float(hecke[f].value)
        pkg = (d * d / (m * n)) ** (0.5 - eps) * k + math.exp(
            (11 / 4 + eps) * math.log(f) + (k / 2) * math.log1p(-1 / (float(f) ** 3 + 1))
        )
        lhs += w * scale * value
        termwise += w * pkg
        entries.append({"m": m, "n": n, "d": d, "frak_n": f, "weight": w, "term": scale * value, "package": pkg})
        if (m, n, d) not in checked:
            checked.add((m, n, d))
            pc = hecke_prefactor_check(order, z, k, m, n, d, cosh_cap=prefactor_cap, budget=budget)
            route = max(route, pc.max_route_discrepancy)
            term = max(term, pc.max_term_discrepancy)
            elements += pc.elements
    package = N**eps * S1 * k + S2 * bound_rhs(k, N, eps).term2
    return AmplifiedReport(
        k,
        N,
        complex(z),
        eps,
        fraks,
        {
            str(f): {
                "value": float(h.value),
                "small_ball": float(h.small_ball),
                "remainder": float(h.remainder),
                "tail_bound": h.tail_bound,
                "terms_used": h.terms_used,
                "cosh_cap": h.cosh_cap,
            }
            for f, h in hecke.items()
        },
        lhs,
        termwise,
        package,
        lhs / package,
        route,
        term,
        elements,
        entries,
    )
