"""Extinction and explosion time laws against composition and summation oracles.

Frozen expectations below were produced by an independent script that iterates
the one-step map on the tail variables directly (no closed forms) and sums:

    case1   E[T0]        = 1.6066951524152913
    case3   E[T0 | fin]  = 1.6066951524154127
    case5b  E[T0 | fin]  = 1.9407112290405852
    case5b  E[T1 | fin]  = 8/3
    case5b  E[T]         = 2.448880035378841

The theta = 1/2 critical value pi^2/6 and the case5 value 8/3 are analytic:
the transformed tail recursions linearize to (n+1)^(-2) and 2 a^n - a^(2n).
"""

import math
import warnings

import numpy as np
import pytest

from thetagw import (
    ConditioningWarning,
    DomainError,
    RegimeError,
    absorption_tails,
    conditional_t1_cdf,
    expected_absorption,
    gumbel_limit,
)


def quiet_expected(p):
    # several cases legitimately condition on a null event; silence the warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        return expected_absorption(p)


def test_tails_match_composition(per_case):
    # closed forms against n-fold composition, every case, n <= 50
    name, p, tag = per_case
    tails = absorption_tails(p)
    for n in range(0, 51):
        it0, it1 = tails.via_iteration(n)
        assert abs(tails.t0_tail(n) - it0) < 1e-10, (name, n)
        if not tag.regular:
            assert abs(tails.t1_tail(n) - it1) < 1e-10, (name, n)
        assert abs(tails.t_tail(n) - (it0 + it1)) < 1e-10, (name, n)


def test_tail_identities(per_case):
    name, p, tag = per_case
    tails = absorption_tails(p)
    n = np.linspace(0.0, 60.0, 121)
    t0, t1, tt = tails.t0_tail(n), tails.t1_tail(n), tails.t_tail(n)
    assert np.all(t0 >= -1e-15) and np.all(t1 >= -1e-15)
    assert np.all(np.diff(t0) <= 1e-15)
    assert np.max(np.abs(tt - (t0 + t1))) < 1e-12
    # at n = 0 nothing is absorbed yet
    assert tails.t_tail(0.0) == pytest.approx(1.0, abs=1e-12)
    assert tails.t0_tail(0.0) == pytest.approx(p.q, abs=1e-12)


def test_tails_regular_vs_explosive(desk):
    # proper laws keep t1 flat at the surviving mass; explosive ones decay
    t_reg = absorption_tails(desk["case3"][0])
    assert t_reg.explosion_mass == 0.0
    assert t_reg.t1_tail(40.0) == 0.5
    t_exp = absorption_tails(desk["case5b"][0])
    assert t_exp.explosion_mass == pytest.approx(0.7)
    assert t_exp.t1_tail(40.0) < 1e-11


def test_case6_exact_geometric(desk):
    p, _ = desk["case6"]
    tails = absorption_tails(p)
    for n in range(0, 30):
        assert tails.t0_tail(n) == pytest.approx(0.3 * 0.5**n, rel=1e-14)
        assert tails.t1_tail(n) == pytest.approx(0.7 * 0.5**n, rel=1e-14)
        assert tails.t_tail(n) == pytest.approx(0.5**n, rel=1e-14)


def test_expected_case1(desk):
    e = quiet_expected(desk["case1"][0])
    assert e.e_t0_given_finite == pytest.approx(1.6066951524152913, abs=1e-10)
    assert math.isnan(e.e_t1_given_finite)
    assert e.e_t == e.e_t0_given_finite
    assert not (e.t0_divergent or e.t1_divergent or e.t_divergent)


def test_expected_critical_divergent(desk):
    # theta = 1, a = 1: tail 1/(1+n), harmonic, so E[T0] = inf
    e = quiet_expected(desk["case2"][0])
    assert e.t0_divergent and e.e_t0_given_finite == math.inf
    assert e.t_divergent and e.e_t == math.inf


def test_expected_critical_half_theta(desk):
    # theta = 1/2, a = c = 1: tail (1+n)^(-2), E[T0] = pi^2/6
    e = quiet_expected(desk["case2h"][0])
    assert not e.t0_divergent
    assert e.e_t0_given_finite == pytest.approx(math.pi**2 / 6.0, abs=1e-9)


def test_expected_case3(desk):
    e = quiet_expected(desk["case3"][0])
    assert e.e_t0_given_finite == pytest.approx(1.6066951524154127, abs=1e-9)
    assert math.isnan(e.e_t1_given_finite)
    # survival forever has probability 1/2, so E[T] diverges
    assert e.t_divergent and e.e_t == math.inf


def test_expected_case5(desk):
    e = quiet_expected(desk["case5"][0])
    assert math.isnan(e.e_t0_given_finite)
    assert e.e_t1_given_finite == pytest.approx(8.0 / 3.0, abs=1e-10)
    assert e.e_t == pytest.approx(8.0 / 3.0, abs=1e-10)


def test_expected_case5b(desk):
    e = quiet_expected(desk["case5b"][0])
    assert e.e_t0_given_finite == pytest.approx(1.9407112290405852, abs=1e-9)
    assert e.e_t1_given_finite == pytest.approx(8.0 / 3.0, abs=1e-9)
    assert e.e_t == pytest.approx(2.448880035378841, abs=1e-9)


def test_expected_case6_exact(desk):
    # the two-point law gives E = 1/(1-a) with no summation at all
    e = expected_absorption(desk["case6"][0])
    assert (e.e_t0_given_finite, e.e_t1_given_finite, e.e_t) == (2.0, 2.0, 2.0)


def test_null_conditioning_warns(desk):
    with pytest.warns(ConditioningWarning):
        expected_absorption(desk["case1"][0])  # no explosions to condition on
    with pytest.warns(ConditioningWarning):
        expected_absorption(desk["case5"][0])  # no extinctions


def test_conditional_t1_cdf(desk):
    # case5: P(T1 <= n | explosion) = (1 - a^n)^2 analytically
    p, _ = desk["case5"]
    for n in range(0, 20):
        assert conditional_t1_cdf(p, n) == pytest.approx((1.0 - 0.5**n) ** 2, abs=1e-12)
    assert conditional_t1_cdf(p, -3) == 0.0
    with pytest.raises(RegimeError):
        conditional_t1_cdf(desk["case1"][0], 5)


def test_gumbel_record_theta_path():
    ge = gumbel_limit(0.5, 0.0, 0.0, theta=-0.1, big_a=1.0)
    rec = ge.record
    assert rec.r == math.inf and rec.w == 1.0
    assert rec.eps == 0.1
    assert rec.shift == pytest.approx(math.log(0.1) / math.log(0.5), rel=1e-14)
    # Gumbel mean on the log_a scale
    assert rec.mean == pytest.approx(-0.5772156649015329 / math.log(0.5), rel=1e-12)
    assert ge.limit_cdf == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_gumbel_exact_brackets_limit():
    # deviation shrinks as theta -> 0-; light version of the sweep
    devs = []
    for theta in (-0.1, -0.01):
        ge0 = gumbel_limit(0.5, 0.0, 0.0, theta=theta)
        shift = ge0.record.shift
        worst = 0.0
        for n in range(0, int(shift) + 40):
            ev = gumbel_limit(0.5, 0.0, n - shift, theta=theta)
            worst = max(worst, abs(ev.exact_floor - ev.limit_cdf))
        devs.append(worst)
    assert devs[1] < devs[0] < 0.05


def test_gumbel_r_zero_branch():
    # theta = 0 with A in (1, 2): eps = 1/ln(1/(A-1)), w = 1
    ge = gumbel_limit(0.5, 0.0, 1.0, theta=0.0, big_a=1.5)
    assert ge.record.r == 0.0 and ge.record.w == 1.0
    assert ge.record.eps == pytest.approx(1.0 / math.log(2.0), rel=1e-14)
    assert ge.exact_floor >= 0.0


def test_gumbel_finite_r():
    # pick A so the declared r matches the path value
    theta, r = -0.1, 0.5
    big_a = 1.0 + math.exp(-r / abs(theta))
    ge = gumbel_limit(0.5, 0.0, 0.0, theta=theta, big_a=big_a, r=r)
    assert ge.record.w == pytest.approx(1.0 - math.exp(-0.5), rel=1e-12)
    with pytest.raises(RegimeError):
        gumbel_limit(0.5, 0.0, 0.0, theta=theta, big_a=big_a, r=2.5)


def test_gumbel_r_only_is_limit_only():
    ge = gumbel_limit(0.5, 0.2, 1.0, r=1.0)
    assert math.isnan(ge.exact_floor) and math.isnan(ge.exact_ceil)
    w = 1.0 - math.exp(-1.0)
    assert ge.limit_cdf == pytest.approx(math.exp(-w * 0.5), rel=1e-14)


def test_gumbel_rejections():
    with pytest.raises(RegimeError):
        gumbel_limit(0.5, 0.0, 0.0, theta=0.5)
    with pytest.raises(RegimeError):
        gumbel_limit(0.5, 0.0, 0.0, theta=0.0, big_a=1.0)
    with pytest.raises(RegimeError):
        gumbel_limit(0.5, 0.0, 0.0)
    with pytest.raises(DomainError):
        gumbel_limit(1.5, 0.0, 0.0, theta=-0.1)
    with pytest.raises(DomainError):
        gumbel_limit(0.5, 1.0, 0.0, theta=-0.1)


def test_real_valued_n_interpolates(desk):
    p, _ = desk["case6"]
    tails = absorption_tails(p)
    # closed forms accept fractional n and sit between the integer values
    lo, mid, hi = tails.t_tail(3.0), tails.t_tail(3.5), tails.t_tail(4.0)
    assert hi < mid < lo
