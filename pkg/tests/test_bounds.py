import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import zeta

from zygmund.bounds import (conditions_report, fit_slope, mc_simplified_bound, order_holds,
                            ratio_relations, tail_sum_l1, tail_sum_pprime, theorem3_bound,
                            theorem3_constraints, theory_bound)
from zygmund.class_error import ClassSpec
from zygmund.errors import ConfigError, ConstraintViolated, DivergentTail
from zygmund.psi import Power, PowerLog
from zygmund.series import direct_sum, tail_integral


def test_tail_sum_pprime_examples():
    assert tail_sum_pprime(ClassSpec(Power(1.0), 0, 2), 2) == pytest.approx(math.pi ** 2 / 6 - 1, rel=1e-10)
    v = tail_sum_pprime(ClassSpec(Power(0.9), 0, 2), 100)
    assert v == pytest.approx(100 ** -0.8 / 0.8, rel=0.02)
    # direct summation oracle to 10^7 terms plus the integral beyond
    ref = direct_sum(Power(0.9), 100, 10 ** 7, q=2) + tail_integral(Power(0.9), 10 ** 7 + 0.5, q=2)[0]
    assert v == pytest.approx(ref, rel=1e-8)
    with pytest.raises(DivergentTail):
        tail_sum_pprime(ClassSpec(Power(0.5), 0, 2), 1)
    with pytest.raises(ConfigError):
        tail_sum_pprime(ClassSpec(Power(2.0), 0, 1), 1)


def test_tail_sum_l1_examples():
    assert tail_sum_l1(Power(2.0), 1) == pytest.approx(math.pi ** 2 / 6, rel=1e-10)
    assert tail_sum_l1(Power(1.5), 16) == pytest.approx(0.5, rel=0.05)
    assert tail_sum_l1(Power(1.5), 16) == pytest.approx(zeta(1.5, 16), rel=1e-10)
    with pytest.raises(DivergentTail):
        tail_sum_l1(Power(1.0), 1)


@pytest.mark.parametrize("q", [1.5, 2.0, 4.0])
def test_pprime_sum_inside_integral_bracket(q):
    p = q / (q - 1)
    spec = ClassSpec(Power(0.9), 0, p)
    for n in (5, 300):
        f = lambda t: t ** (-0.9 * q + q - 2)  # noqa: E731
        integral = tail_integral(Power(0.9), n, q, q - 2)[0]
        v = tail_sum_pprime(spec, n)
        assert integral <= v <= f(n) + integral


def test_theory_bound_variants():
    b = theory_bound(ClassSpec(Power(0.9), 0, 2), 64)
    assert b.variant == "T1_tail_pprime"
    assert b.value == pytest.approx(math.sqrt(zeta(1.8, 64)), rel=1e-8)
    b = theory_bound(ClassSpec(Power(1.5), 1, 1), 16)
    assert (b.variant, b.value, b.method) == ("T1_p1_sin", 0.25, "closed_form")
    b = theory_bound(ClassSpec(Power(1.5), 0, 1), 16)
    assert b.variant == "T1_p1_cos" and b.value == pytest.approx(0.5, rel=0.05)


def test_mc_simplified_examples():
    b = mc_simplified_bound(ClassSpec(Power(0.9), 0, 2), 64)
    assert b.value == pytest.approx(64 ** -0.4, rel=1e-12) and b.applicable
    assert b.value == pytest.approx(0.1895, abs=1e-4)
    assert mc_simplified_bound(ClassSpec(Power(1.5), 0, 1), 16).value == pytest.approx(0.25)
    b = mc_simplified_bound(ClassSpec(PowerLog(2, 1.2, 4), 0, 2), 64)
    assert not b.applicable and b.note


def test_theorem3_examples():
    b = theorem3_bound(PowerLog(2, 1.2, 4), 100)
    assert b.value == pytest.approx(math.log(100) ** 0.5 / math.log(104) ** 1.2, rel=1e-12)
    fam = PowerLog(1, 2, 8)
    psi100 = float(fam.eval(100.0))
    assert theorem3_bound(fam, 100, beta=0).value == pytest.approx(psi100 * 100 * math.log(100), rel=1e-12)
    assert theorem3_bound(fam, 100, beta=1).value == pytest.approx(psi100 * 100, rel=1e-12)


@pytest.mark.parametrize("fam,msg", [(PowerLog(2, 0.4, 4), "gamma > 1/p'"), (PowerLog(2, 1.2, 3), "K > e"),
                                     (PowerLog(1, 1.0, 8), "gamma > 1"), (PowerLog(1, 2, 7), "K > e^gamma")])
def test_theorem3_constraints(fam, msg):
    with pytest.raises(ConstraintViolated, match=msg.replace("^", r"\^")):
        theorem3_bound(fam, 100)


def test_theorem3_domain():
    with pytest.raises(ValueError):
        theorem3_bound(PowerLog(2, 1.2, 4), 1)
    with pytest.raises(ConfigError):
        theorem3_bound(Power(1.5), 10)
    theorem3_constraints(PowerLog(3, 1.0, 5))


@settings(max_examples=50)
@given(p=st.floats(1.1, 6), gamma=st.floats(0.1, 3), n=st.integers(2, 10 ** 8))
def test_theorem3_is_arithmetic_identity(p, gamma, n):
    q = p / (p - 1)
    K = math.exp(gamma * q / 2) + 1
    fam = PowerLog(p, gamma, K)
    if gamma <= 1 / q:
        return
    psi = n ** (-1 / p) * math.log(n + K) ** -gamma
    assert theorem3_bound(fam, n).value == pytest.approx(psi * n ** (1 / p) * math.log(n) ** (1 / q), rel=1e-12)


def test_parity_switch_grows_like_log():
    fam = PowerLog(1, 2, 8)
    ratio = lambda n: (theory_bound(ClassSpec(fam, 0, 1), n).value  # noqa: E731
                       / theory_bound(ClassSpec(fam, 1, 1), n).value)
    assert theory_bound(ClassSpec(fam, 1, 1), 256).variant == "T1_p1_sin"
    assert ratio(2 ** 16) >= 1.5 * ratio(2 ** 8)


@pytest.mark.parametrize("spec", [ClassSpec(Power(0.9), 0, 2), ClassSpec(Power(1.5), 0, 1),
                                  ClassSpec(Power(1.5), 1, 1), ClassSpec(Power(2.0), 0, 3)])
def test_mc_over_theory_bounded_on_powers(spec):
    r = [mc_simplified_bound(spec, n).value / theory_bound(spec, n).value for n in 2 ** np.arange(3, 14)]
    assert 0.1 <= min(r) and max(r) <= 10


def test_ratio_relations_examples():
    (l1,) = ratio_relations(ClassSpec(Power(1.5), 0, 1), [2 ** j for j in range(15)])
    assert l1.expected == "bounded" and l1.ok
    assert l1.ratios[-1] == pytest.approx(0.5, rel=1e-3)
    (pl,) = ratio_relations(ClassSpec(PowerLog(1, 2, 8), 0, 1), [2 ** j for j in range(3, 15)])
    assert pl.expected == "vanishing" and pl.ok and pl.trend < 0.5
    # (gamma - 1)/ln n is the leading behaviour; the ratio of the two stays moderate
    assert pl.ratios[-1] * math.log(2 ** 14) == pytest.approx(1.0, rel=0.5)
    rs = ratio_relations(ClassSpec(Power(2.0), 0, 2), [2 ** j for j in range(15)])
    assert {r.name for r in rs} == {"pprime", "l1"} and all(r.ok for r in rs)


def test_conditions_examples():
    rep = conditions_report(ClassSpec(Power(0.9), 0, 2, 1))
    assert rep.all_ok
    assert "2.5" in rep.alpha_threshold.evidence
    assert "GM+ A = 1" in rep.gm_ga.evidence
    assert conditions_report(ClassSpec(Power(1.5), 0, 1, 1)).all_ok
    rep = conditions_report(ClassSpec(Power(1.5), 0, 1, 0.25))
    assert rep.failed == ["gm_ga"]
    assert "FAIL" in rep.text()


def test_conditions_divergent():
    rep = conditions_report(ClassSpec(Power(0.5), 0, 2, 1))
    assert not rep.convergence.ok and "diverges" in rep.convergence.evidence


def test_conditions_alpha_threshold_fails():
    # g_{3/4} = t^{0.05} increases, so no alpha threshold can hold
    rep = conditions_report(ClassSpec(Power(0.7), 0, 4 / 3, 1))
    assert not rep.alpha_threshold.ok


def test_fit_slope_and_order():
    n = 2.0 ** np.arange(3, 13)
    assert fit_slope(n, 3 * n ** -0.4) == pytest.approx(-0.4, abs=1e-12)
    ok, su, sb = order_holds(n, 2 * n ** -0.5, n ** -0.5)
    assert ok and su == pytest.approx(sb)
    ok, *_ = order_holds(n, 2 * n ** -0.5, n ** -0.5, band=(0.99, 1.01))
    assert not ok
    ok, *_ = order_holds(n, n ** -0.5, n ** -0.2)
    assert not ok
    with pytest.raises(ValueError):
        fit_slope([1, 2], [1, 2])
