import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import zeta

from zygmund.errors import DivergentTail
from zygmund.psi import Power, PowerLog
from zygmund.series import converges, direct_sum, tail_integral, tail_sum


@pytest.mark.parametrize("r,n,q,m", [(1.5, 16, 1, 0), (2.0, 1, 1, 0), (1.0, 2, 2, 0),
                                     (0.9, 100, 2, 0), (2.0, 8, 2, 2), (1.2, 5, 1.5, 0.5)])
def test_power_tails_match_hurwitz_zeta(r, n, q, m):
    ts = tail_sum(Power(r), n, q, m, tol=1e-10)
    exact = zeta(r * q - m, n)
    assert ts.lower <= exact + 1e-15 <= ts.upper + 2e-15
    assert ts.value == pytest.approx(exact, rel=1e-10)


def test_classical_values():
    assert tail_sum(Power(2.0), 1).value == pytest.approx(math.pi ** 2 / 6, rel=1e-12)
    assert tail_sum(Power(1.0), 2, q=2).value == pytest.approx(math.pi ** 2 / 6 - 1, rel=1e-12)
    assert tail_sum(Power(1.5), 16).value == pytest.approx(0.5, rel=0.05)


@pytest.mark.parametrize("fam,q,m", [(Power(0.5), 2, 0), (Power(1.0), 1, 0), (PowerLog(2, 0.4, 4), 2, 0),
                                     (PowerLog(1, 1, 3), 1, 0)])
def test_divergent_tails(fam, q, m):
    assert not converges(fam, q, m)
    with pytest.raises(DivergentTail):
        tail_sum(fam, 1, q, m)


def test_borderline_log_convergence():
    # t^-1 log^-gamma: converges only for gamma > 1
    assert converges(PowerLog(1, 1.01, 3))
    assert not converges(PowerLog(1, 1.0, 3))
    assert converges(PowerLog(2, 0.6, 4), 2, 0)


@pytest.mark.parametrize("fam,q", [(PowerLog(2, 1.2, 4), 2), (PowerLog(1, 2, 8), 1), (PowerLog(3, 1, 6), 1.5)])
def test_powerlog_tail_is_stable_under_cutoff(fam, q):
    m = q - 2 if q != 1 else 0
    a = tail_sum(fam, 10, q, m, cutoff=10 ** 5, tol=1e-6)
    b = tail_sum(fam, 10, q, m, cutoff=4 * 10 ** 6, tol=1e-6)
    assert abs(a.value - b.value) <= a.err + b.err
    assert b.lower <= a.value + a.err and a.value - a.err <= b.upper


def test_powerlog_integral_against_direct_sum():
    # head to 1e6 directly, then the integral bracket around what remains
    fam = PowerLog(1, 2, 8)
    ts = tail_sum(fam, 1000, tol=1e-9)
    direct = direct_sum(fam, 1000, 10 ** 6)
    hi, _ = tail_integral(fam, 10 ** 6)
    lo, _ = tail_integral(fam, 10 ** 6 + 1)
    assert direct + lo - 1e-12 <= ts.value <= direct + hi + 1e-12


@settings(max_examples=25, deadline=None)
@given(r=st.floats(1.1, 3.0), n=st.integers(1, 5000))
def test_tail_value_inside_integral_bracket(r, n):
    # for a decreasing summand: int_n^inf f <= sum_{k>=n} f <= f(n) + int_n^inf f
    fam = Power(r)
    ts = tail_sum(fam, n, tol=1e-8)
    integral, _ = tail_integral(fam, n)
    assert integral <= ts.value <= n ** -r + integral
    assert ts.err <= 1e-8 * ts.value


def test_tail_rejects_bad_index():
    with pytest.raises(ValueError):
        tail_sum(Power(2.0), 0)


def test_direct_sum_chunks_in_order():
    k = np.arange(3, 2_500_001, dtype=float)
    assert direct_sum(Power(2.0), 3, 2_500_000) == pytest.approx(float(np.sum(k ** -2.0)), rel=1e-13)
