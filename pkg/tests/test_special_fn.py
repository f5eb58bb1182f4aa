import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphcesaro.errors import DegreeRangeError, DomainError
from sphcesaro.special_fn import (
    CesaroOrder,
    GegenbauerParam,
    cesaro_coeff,
    cesaro_multiplier,
    cesaro_multipliers,
    clamp_cosine,
    gegenbauer_eval,
    gegenbauer_profile,
    log_gamma_ratio,
)

T_GRID = np.linspace(-1.0, 1.0, 101)


@pytest.mark.parametrize(
    "nu, k, t, expected",
    [(0.5, 2, 1.0, 1.0), (0.7, 1, 0.3, 0.42), (0.5, 3, 0.5, -0.4375), (1.5, 2, 1.0, 6.0)],
)
def test_gegenbauer_examples(nu, k, t, expected):
    assert gegenbauer_eval(GegenbauerParam(nu, 8), k, t) == pytest.approx(expected, rel=1e-14, abs=1e-15)


def test_profile_examples():
    assert list(gegenbauer_profile(GegenbauerParam(0.5, 2), 1.0)) == [1.0, 1.0, 1.0]
    assert list(gegenbauer_profile(GegenbauerParam(0.5, 0), -0.3)) == [1.0]
    p = GegenbauerParam(1.0, 3)
    prof = gegenbauer_profile(p, 0.25)
    assert [float(v) for v in prof] == [gegenbauer_eval(p, k, 0.25) for k in range(4)]


def test_gegenbauer_against_mpmath():
    for nu in (0.5, 1.0, 1.5, 2.5):
        p = GegenbauerParam(nu, 40)
        for t in (-0.9, -0.2, 0.3, 0.77):
            prof = gegenbauer_profile(p, t)
            for k in (0, 1, 5, 17, 40):
                ref = float(mpmath.gegenbauer(k, nu, t))
                assert abs(prof[k] - ref) <= 1e-11 * max(1.0, abs(ref))


@pytest.mark.parametrize("nu", [0.5, 1.0, 1.5, 2.5])
def test_recurrence_parity_and_endpoint(nu):
    prof = gegenbauer_profile(GegenbauerParam(nu, 64), T_GRID)
    flipped = gegenbauer_profile(GegenbauerParam(nu, 64), -T_GRID)
    for k in range(2, 65):
        resid = 2 * (k + nu - 1) * T_GRID * prof[k - 1] - (k + 2 * nu - 2) * prof[k - 2] - k * prof[k]
        assert np.max(np.abs(resid)) <= 1e-10 * max(1.0, np.max(np.abs(prof[k])))
    for k in range(65):
        assert np.max(np.abs(flipped[k] - (-1) ** k * prof[k])) <= 1e-12 * max(1.0, np.max(np.abs(prof[k])))
    ends = gegenbauer_profile(GegenbauerParam(nu, 256), 1.0)
    for k in range(257):
        ref = log_gamma_ratio(k + 2 * nu, 2 * nu) / math.factorial(k) if k < 150 else math.exp(
            math.lgamma(k + 2 * nu) - math.lgamma(2 * nu) - math.lgamma(k + 1)
        )
        assert ends[k] == pytest.approx(ref, rel=1e-10)


def test_gegenbauer_errors():
    with pytest.raises(DomainError):
        GegenbauerParam(0.0, 3)
    with pytest.raises(DegreeRangeError):
        GegenbauerParam(0.5, 5000)
    p = GegenbauerParam(0.5, 3)
    with pytest.raises(DegreeRangeError):
        gegenbauer_eval(p, 4, 0.1)
    with pytest.raises(DomainError):
        gegenbauer_eval(p, 1, 1.0 + 1e-9)
    assert gegenbauer_eval(p, 1, 1.0 + 5e-13) == 1.0
    assert clamp_cosine(-1.0 - 5e-13) == -1.0


@pytest.mark.parametrize("alpha, n, expected", [(0.0, 17, 1.0), (1.0, 3, 4.0), (0.5, 3, 2.1875)])
def test_cesaro_coeff_examples(alpha, n, expected):
    assert cesaro_coeff(CesaroOrder(alpha), n) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_cesaro_product_identity(alpha):
    for n in list(range(0, 80)) + [100, 255, 256, 400, 512]:
        a = cesaro_coeff(alpha, n)
        with mpmath.workdps(30):
            ref = mpmath.gamma(n + alpha + 1) / (mpmath.gamma(alpha + 1) * mpmath.factorial(n))
        assert a == pytest.approx(float(ref), rel=1e-10)


def test_cesaro_regime_switch_agrees():
    # both evaluation paths at the switchover degree
    for alpha in (0.25, 0.5, 1.0, 2.0, 3.7):
        direct = math.prod((alpha + j) / j for j in range(1, 65))
        assert cesaro_coeff(alpha, 64) == pytest.approx(direct, rel=1e-13)
        via_log = math.exp(math.lgamma(66 + alpha) - math.lgamma(66) - math.lgamma(alpha + 1))
        assert cesaro_coeff(alpha, 65) == pytest.approx(via_log, rel=1e-12)


def test_cesaro_monotone_for_nonnegative_order():
    for alpha in (0.0, 0.3, 1.0):
        vals = [cesaro_coeff(alpha, n) for n in range(300)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        CesaroOrder(-1.0)


@pytest.mark.parametrize("alpha, n, k, expected", [(0.5, 9, 0, 1.0), (0.0, 9, 5, 1.0), (1.0, 3, 1, 0.75)])
def test_multiplier_examples(alpha, n, k, expected):
    assert cesaro_multiplier(alpha, n, k) == pytest.approx(expected, rel=1e-15)


def test_multiplier_range_and_limit():
    with pytest.raises(DegreeRangeError):
        cesaro_multiplier(1.0, 3, 4)
    for alpha in (0.5, 1.0, 2.0):
        m = cesaro_multipliers(alpha, 50)
        assert np.all(m > 0) and np.all(m <= 1) and np.all(np.diff(m) <= 0)
        for k in (1, 2, 5):
            seq = [cesaro_multiplier(alpha, n, k) for n in (100 * k, 200 * k, 400 * k, 800 * k)]
            assert all(b > a for a, b in zip(seq, seq[1:]))
            assert all(v > 1 - 10 * k * alpha / n for v, n in zip(seq, (100 * k, 200 * k, 400 * k, 800 * k)))


@pytest.mark.parametrize("a, b, expected", [(5, 3, 12.0), (4.5, 1.5, 13.125), (7.25, 7.25, 1.0)])
def test_log_gamma_ratio_examples(a, b, expected):
    assert log_gamma_ratio(a, b) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(min_value=0.01, max_value=1e6),
    d=st.floats(min_value=-40.0, max_value=40.0),
)
def test_log_gamma_ratio_relative_accuracy(a, d):
    b = a + d
    if b <= 0:
        b = a
    with mpmath.workdps(40):
        ref = mpmath.exp(mpmath.loggamma(mpmath.mpf(a)) - mpmath.loggamma(mpmath.mpf(b)))
    if not (1e-300 < ref < 1e300):
        return
    assert abs(log_gamma_ratio(a, b) / float(ref) - 1.0) <= 1e-12


def test_log_gamma_ratio_domain():
    with pytest.raises(DomainError):
        log_gamma_ratio(0.0, 1.0)
    with pytest.raises(DomainError):
        log_gamma_ratio(1.0, -2.0)
