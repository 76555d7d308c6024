import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import zeta

from zygmund import filters
from zygmund.class_error import (CSV_HEADER, ClassSpec, error_bracket, lower_bound, parseval_upper,
                                 residual_profile, upper_bound)
from zygmund.errors import ConfigError, DivergentTail
from zygmund.kernels import phase
from zygmund.psi import Power, PowerLog

N2_VALUE = math.sqrt(math.pi * (0.25 + math.pi ** 2 / 6 - 1)) / math.pi


def check_witness(br, tol=1e-9):
    w = br.witness
    norm = float(np.sum(w.weights * np.abs(w.phi) ** br.spec.p)) ** (1 / br.spec.p)
    assert norm <= 1 + tol
    assert w.norm == pytest.approx(norm, rel=1e-12)
    assert abs(w.mean) <= tol
    assert w.achieved == br.lower


# -- profile ----------------------------------------------------------------


def test_profile_examples():
    prof = residual_profile(ClassSpec(Power(1.0), 0, 2, 1), 2)
    assert prof.head.tolist() == [0.5]
    prof = residual_profile(ClassSpec(Power(2.0), 0, 2, 2), 4)
    np.testing.assert_allclose(prof.head, [1 / 16] * 3, rtol=1e-15)
    prof = residual_profile(ClassSpec(Power(2.0), 0.3, 2, 2), 1)
    assert prof.head.size == 0
    assert prof.tail.start == 1


@given(r=st.floats(0.6, 3), s=st.floats(0.2, 4), n=st.integers(2, 300))
def test_profile_head_in_range(r, s, n):
    prof = residual_profile(ClassSpec(Power(r), 0, 2, s), n)
    psi = Power(r).eval(np.arange(1, n, dtype=float))
    assert np.all(prof.head > 0) and np.all(prof.head <= psi)


def test_profile_requires_convergence():
    with pytest.raises(DivergentTail):
        residual_profile(ClassSpec(Power(0.5), 0, 2), 4)
    with pytest.raises(DivergentTail):
        residual_profile(ClassSpec(Power(1.0), 0, 1), 4)
    with pytest.raises(ValueError):
        residual_profile(ClassSpec(Power(2.0), 0, 2), 0)


def test_class_spec_validation():
    with pytest.raises(ConfigError):
        ClassSpec(Power(1.0), 0, 0.5)
    with pytest.raises(ConfigError):
        ClassSpec(Power(1.0), 0, 2, s=0)
    with pytest.raises(ConfigError):
        ClassSpec(Power(1.0), 0, 2, filter_kind="abel")
    assert ClassSpec(Power(1.0), 0, 1).p_prime == math.inf
    assert ClassSpec(Power(1.0), 0, 4).p_prime == pytest.approx(4 / 3)


def test_parity():
    assert ClassSpec(Power(1.5), 1, 1).cos_zero
    assert ClassSpec(Power(1.5), -3, 1).cos_zero
    assert not ClassSpec(Power(1.5), 2, 1).cos_zero
    near = ClassSpec(Power(1.5), 1 + 1e-14, 1)
    assert near.near_odd and not near.cos_zero
    with pytest.warns(RuntimeWarning):
        error_bracket(ClassSpec(Power(2.0), 1 + 1e-14, 2), 4, 1e-3)


# -- upper / Parseval -------------------------------------------------------


def test_upper_examples():
    spec = ClassSpec(Power(1.0), 0, 2, 1)
    assert upper_bound(spec, 2) == pytest.approx(N2_VALUE, rel=1e-6)
    assert N2_VALUE == pytest.approx(0.5337, abs=1e-4)
    pure = math.sqrt(math.pi * zeta(2, 1)) / math.pi
    assert upper_bound(spec, 1) == pytest.approx(pure, rel=1e-6)
    u = upper_bound(ClassSpec(Power(2.0), 0, 1, 1), 1)
    assert u == pytest.approx(math.pi / 6, abs=1e-6)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_parseval_oracle_closed_form(n):
    spec = ClassSpec(Power(1.0), 0, 2, 1)
    head = sum((1 / k * k / n) ** 2 for k in range(1, n))
    ref = math.sqrt(math.pi * (head + zeta(2, n))) / math.pi
    assert parseval_upper(spec, n) == pytest.approx(ref, rel=1e-10)
    assert upper_bound(spec, n) == pytest.approx(ref, rel=1e-6)


def test_parseval_needs_p2():
    with pytest.raises(ConfigError):
        parseval_upper(ClassSpec(Power(2.0), 0, 1), 3)


@pytest.mark.parametrize("spec", [ClassSpec(Power(0.9), 0.5, 2, 2), ClassSpec(PowerLog(2, 1.2, 4), 0, 2, 1)])
def test_upper_matches_parseval_on_slow_families(spec):
    for n in (3, 50):
        assert upper_bound(spec, n, 1e-4) == pytest.approx(parseval_upper(spec, n), rel=1e-6)


def test_upper_decreases_in_n():
    for spec in (ClassSpec(Power(0.9), 0, 2, 1), ClassSpec(Power(2.0), 1, 2, 2)):
        vals = [upper_bound(spec, n, 1e-3) for n in (1, 2, 4, 8, 16, 32, 64)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


# -- lower bound / witnesses ------------------------------------------------


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_p2_duality_equality(n):
    br = error_bracket(ClassSpec(Power(1.0), 0, 2, 1), n, 1e-6)
    assert abs(br.upper - br.lower) <= 1e-3 * br.upper
    check_witness(br)


def test_p1_witness_reaches_half_oscillation():
    # Lambda = pi^2/6 - pi t/2 + t^2/4 on [0, 2pi]: max pi^2/6, min -pi^2/12
    L, w = lower_bound(ClassSpec(Power(2.0), 0, 1, 1), 1, 1e-6)
    assert L == pytest.approx(math.pi / 8, abs=1e-4)
    assert L <= math.pi / 8 + 1e-9
    assert w.norm == pytest.approx(1.0, abs=1e-12)
    assert abs(w.mean) <= 1e-12


def test_p1_sine_profile_is_odd():
    # an odd profile has max = -min, so the Hoelder value is attained
    br = error_bracket(ClassSpec(Power(1.5), 1, 1, 1), 16, 1e-5)
    assert br.lower == pytest.approx(br.upper, rel=1e-4)
    check_witness(br)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_general_p_witness(p):
    br = error_bracket(ClassSpec(Power(1.2), 0.5, p, 1), 8, 1e-4)
    check_witness(br)
    assert br.consistent
    assert br.lower >= 0.8 * br.upper


@settings(max_examples=12, deadline=None)
@given(r=st.floats(1.1, 2.5), beta=st.sampled_from([0, 0.5, 1, 1.7]),
       p=st.sampled_from([1.0, 1.5, 2.0, 4.0]), s=st.floats(0.5, 3), n=st.integers(1, 40))
def test_sandwich(r, beta, p, s, n):
    br = error_bracket(ClassSpec(Power(r), beta, p, s), n, 1e-4)
    assert br.lower <= br.upper + br.quad_err + br.trunc_err
    assert min(br.upper, br.lower, br.quad_err, br.trunc_err) >= 0
    check_witness(br)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_shift_invariance(p):
    spec = ClassSpec(Power(1.5), 0.5, p, 1)
    a = error_bracket(spec, 8, 1e-6)
    b = error_bracket(spec, 8, 1e-6, offset=0.123456)
    slack = a.quad_err + b.quad_err + a.trunc_err + b.trunc_err + 1e-9
    assert abs(a.upper - b.upper) <= slack


def test_zygmund_one_matches_fejer_bracket():
    z = error_bracket(ClassSpec(Power(0.9), 0.5, 2, 1), 32, 1e-4)
    f = error_bracket(ClassSpec(Power(0.9), 0.5, 2, 1, "fejer"), 32, 1e-4)
    assert (z.upper, z.lower) == (f.upper, f.lower)


def test_fourier_filter_has_pure_tail_profile():
    prof = residual_profile(ClassSpec(Power(2.0), 0, 2, 1, "fourier"), 5)
    assert np.all(prof.head == 0)


# -- representation ---------------------------------------------------------


def member(spec, phi_a, phi_b, a0):
    """Coefficients of the class member generated by phi (finite, mean zero)."""
    c, s = phase(spec.beta)
    k = np.arange(1, len(phi_a) + 1, dtype=float)
    psi = spec.family.eval(k)
    return filters.TrigPolynomial(a0, psi * (phi_a * c - phi_b * s), psi * (phi_b * c + phi_a * s))


@pytest.mark.parametrize("beta,s", [(0, 1), (0.5, 2), (1, 1.5), (1.7, 0.5)])
def test_deviation_at_origin_matches_profile_pairing(beta, s):
    rng = np.random.default_rng(7)
    spec = ClassSpec(Power(1.3), beta, 2, s)
    n, deg = 6, 12
    pa, pb = rng.normal(size=deg), rng.normal(size=deg)
    prof = residual_profile(spec, n)
    M = 256
    lam = filters.sample(prof.polynomial(deg), M)
    phi = filters.sample(filters.TrigPolynomial(0.0, pa, pb), M)
    pairing = (2 * math.pi / M) * float(np.dot(lam, phi)) / math.pi
    for a0 in (0.0, 3.7, -12.5):
        f = member(spec, pa, pb, a0)
        z = filters.apply_filter(f, spec.summation_filter(n))
        dev = filters.eval_poly(f, 0.0) - filters.eval_poly(z, 0.0)
        assert dev == pytest.approx(pairing, abs=1e-12)


def test_csv_row():
    br = error_bracket(ClassSpec(Power(2.0), 0, 2, 1), 3, 1e-4, keep_witness=False)
    assert CSV_HEADER == "family,p,beta,s,n,U,L,quad_err,trunc_err"
    fields = br.csv_row().split(",")
    assert fields[0] == "power:r=2" and fields[4] == "3"
    assert float(fields[5]) == br.upper
    assert br.witness is None
