import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ampsup.amplifier import (
    EigenvalueBoundModel,
    amplified_inequality_check,
    amplified_value,
    asymptotic_ratio,
    bound_rhs,
    build_amplifier,
    exponent_fit,
    moment_sums,
    optimal_N,
    solve_balanced_N,
    tail_estimate_check,
    tail_integral,
    tail_integral_parts,
    tail_second_beta,
)
from ampsup.arith import prime_count
from ampsup.errors import DegenerateAmplifierError, InputError


def test_plans():
    p = build_amplifier(25, 6)
    assert p.support == [5, 25] and p.prime_count == 1
    p = build_amplifier(100, 6)
    assert p.support == [5, 7, 25, 49] and p.prime_count == 2
    p = build_amplifier(4, 6)
    assert p.support == [] and p.prime_count == 0
    with pytest.raises(DegenerateAmplifierError):
        moment_sums(p)


@given(st.integers(4, 20000), st.sampled_from([6, 10, 14, 15, 35]))
def test_plan_support_invariants(N, D):
    p = build_amplifier(N, D)
    assert all(1 <= n <= N and math.gcd(n, D) == 1 for n in p.support)
    assert p.prime_count == sum(1 for q in range(2, math.isqrt(N) + 1) if all(q % r for r in range(2, q)) and D % q)


def test_moment_sums():
    assert moment_sums(build_amplifier(25, 6)) == (5.0, 9.0, 1)
    s1, s2, L = moment_sums(build_amplifier(100, 6), EigenvalueBoundModel(0.0))
    assert (s1, s2, L) == (10.0, 36.0, 4)


def test_moment_sum_shapes():
    ratios = []
    for N in np.geomspace(100, 1e6, 12).astype(int):
        plan = build_amplifier(int(N), 6)
        s1, s2, L = moment_sums(plan)
        ratios.append(s1 / math.sqrt(N))
        assert L == (prime_count(math.isqrt(int(N))) - 2) ** 2
        assert s2 <= (4 * plan.prime_count) ** 2
    assert max(ratios) < 5


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_amplifier_lower_bound_identity(vals):
    plan = build_amplifier(100, 6)
    eta = dict(zip([5, 7], vals))
    assert amplified_value(plan, eta) == pytest.approx(plan.prime_count)


def test_tail_integral_closed_form_and_oracles():
    t = tail_integral_parts(1, 6)
    assert t.first == pytest.approx(1 / 8, rel=1e-13)
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda u: u ** mpmath.mpf(-0.75) * (1 + u) ** -3, [1, 10, mpmath.inf])
    assert t.second == pytest.approx(float(ref), rel=1e-11)
    for n, k in [(1, 6), (3, 40), (20, 200), (50, 20)]:
        t = tail_integral_parts(n, k)
        assert t.first_rel_error < 1e-10
        assert t.second == pytest.approx(tail_second_beta(n, k), rel=1e-10)


def test_tail_integral_monotone_in_k():
    for n in (1, 5, 30):
        vals = [tail_integral(n, k) for k in (6, 12, 24, 48, 96)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_tail_integral_guards():
    with pytest.raises(InputError):
        tail_integral(2, 4)
    with pytest.raises(InputError):
        tail_integral(0, 10)


def test_tail_estimate_constant_is_finite():
    tc = tail_estimate_check(range(2, 21), range(20, 201, 60))
    assert tc.finite and tc.constant > 0
    assert all(r[4] <= tc.constant for r in tc.rows)


def test_bound_rhs_values():
    b = bound_rhs(27631, 10)
    with mpmath.workdps(40):
        t1 = mpmath.mpf(27631) / mpmath.sqrt(10)
        t2 = mpmath.mpf(10) ** 5.5 * (1 - mpmath.mpf(1) / 1001) ** (mpmath.mpf(27631) / 2)
    assert b.term1 == pytest.approx(float(t1), rel=1e-14)
    assert b.term2 == pytest.approx(float(t2), rel=1e-10)
    assert round(b.term1, 1) == 8737.7 and round(b.term2, 3) == 0.318
    assert bound_rhs(27631, 10, precision="extended").term2 == pytest.approx(b.term2, rel=1e-12)
    one = bound_rhs(40, 1)
    assert one.term1 == 40 and one.term2 == pytest.approx(2.0**-20)


def test_bound_rhs_monotone_in_N():
    k = 1e6
    t1 = [bound_rhs(k, N).term1 for N in range(2, 80)]
    t2 = [bound_rhs(k, N).log_term2 for N in range(2, 80)]
    assert all(b < a for a, b in zip(t1, t1[1:]))
    assert all(b > a for a, b in zip(t2, t2[1:]))
    assert math.isinf(bound_rhs(100, 1e4).term2) is False


def test_alternative_exponent_flag():
    a = bound_rhs(1e5, 12)
    b = bound_rhs(1e5, 12, term2_exponent=13 / 2)
    assert b.log_term2 - a.log_term2 == pytest.approx(math.log(12))


def test_balanced_N():
    assert solve_balanced_N(12000 * math.log(10)) == pytest.approx(10.0, rel=1e-12)
    for k in np.geomspace(100, 1e12, 20):
        N = solve_balanced_N(k)
        assert abs(12 * N**3 * math.log(N) - k) <= 1e-6 * k
    o = optimal_N(27631)
    assert o.N_balanced == pytest.approx(10.0, abs=1e-5)
    with pytest.raises(InputError):
        optimal_N(50)


def test_grid_minimum_by_brute_force():
    k = 1e5
    o = optimal_N(k)
    rhs = {N: bound_rhs(k, N).rhs for N in range(2, 60)}
    assert o.N_grid == min(rhs, key=rhs.get)


def test_asymptotic_ratio():
    vals = [asymptotic_ratio(N) for N in range(10, 61)]
    assert all(0.99 < v < 1.01 for v in vals)
    assert abs(vals[-1] - 1) < abs(vals[0] - 1)


def test_exponent_fit_and_ablation():
    full = exponent_fit(1e5, 1e9, 40)
    half = exponent_fit(1e5, 1e8, 40)
    only1 = exponent_fit(1e5, 1e9, 40, drop_term2=True)
    assert abs(full.slope - 5 / 6) <= 0.02
    assert abs(full.slope - half.slope) < 0.02
    assert abs(only1.slope - full.slope) < 1e-3  # term1 binds under N(k)
    assert full.rows[0][5] == "" and len(full.rows) == 40
    assert full.to_csv().splitlines()[0] == "k,N_choice,term1,term2,rhs,log_slope"
    with pytest.raises(InputError):
        exponent_fit(1e5, 1e7, 10)


def test_amplified_check_small(order):
    rep = amplified_inequality_check(order, 0.3 + 1.7j, 40, 25)
    assert rep.frak_values == [1, 5, 25, 125, 625]
    assert rep.max_route_discrepancy < 1e-8 and rep.max_term_discrepancy < 1e-8
    assert 0 < rep.lhs and math.isfinite(rep.fitted_constant)
    with pytest.raises(InputError):
        amplified_inequality_check(order, 1j, 80, 25)
