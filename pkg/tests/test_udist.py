import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ufe import InvalidInputError, Interval, NormalUncertain
from ufe.udist import acceptance_interval, ai_half_width, cdf, ci_half_width, confidence_interval, inv

finite = st.floats(-1e6, 1e6, allow_nan=False)
sigmas = st.floats(1e-3, 1e3, allow_nan=False)
probs = st.floats(1e-9, 1 - 1e-9, allow_nan=False)


def _bisect_inv(alpha, d):
    # independent of the closed-form inverse
    lo, hi = d.e - 1e3 * d.sigma, d.e + 1e3 * d.sigma
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid, d) < alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_cdf_at_center_is_half():
    assert cdf(3.0, NormalUncertain(3.0, 2.0)) == 0.5


def test_cdf_matches_logistic_form():
    d = NormalUncertain(1.0, 2.0)
    for z in (-5.0, 0.0, 0.3, 4.0):
        want = 1.0 / (1.0 + math.exp(math.pi * (d.e - z) / (math.sqrt(3) * d.sigma)))
        assert cdf(z, d) == pytest.approx(want, rel=1e-14)


def test_cdf_saturates_without_overflow():
    d = NormalUncertain(0.0, 1e-3)
    assert cdf(1e6, d) == 1.0
    assert cdf(-1e6, d) == 0.0


def test_inv_of_0975_is_k_sigma():
    k = math.sqrt(3) / math.pi * math.log(39)
    assert inv(0.975, NormalUncertain(0.0, 1.0)) == pytest.approx(k, rel=1e-14)
    assert k == pytest.approx(2.0198273956703003, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.001, 0.025, 0.3, 0.5, 0.9, 0.975])
def test_inv_agrees_with_bisection(alpha):
    d = NormalUncertain(-2.0, 1.7)
    assert inv(alpha, d) == pytest.approx(_bisect_inv(alpha, d), abs=1e-9)


@given(finite, sigmas, probs)
def test_cdf_inverts_inv(e, sigma, alpha):
    d = NormalUncertain(e, sigma)
    assert cdf(inv(alpha, d), d) == pytest.approx(alpha, rel=1e-6, abs=1e-12)


# beyond ~8 sigma the cdf sits within 1e-6 of 0 or 1 and the round trip loses digits
@given(finite, sigmas, st.floats(-8, 8))
def test_inv_inverts_cdf(e, sigma, t):
    d = NormalUncertain(e, sigma)
    z = e + t * sigma
    assert inv(cdf(z, d), d) == pytest.approx(z, abs=1e-6 * (abs(e) + sigma))


@given(finite, sigmas, st.floats(0, 30))
def test_cdf_symmetry(e, sigma, t):
    d = NormalUncertain(e, sigma)
    assert cdf(e + t * sigma, d) + cdf(e - t * sigma, d) == pytest.approx(1.0, abs=1e-12)


@given(finite, sigmas, probs)
def test_inv_symmetry(e, sigma, alpha):
    d = NormalUncertain(e, sigma)
    assert inv(alpha, d) + inv(1 - alpha, d) == pytest.approx(2 * e, abs=1e-7 * (abs(e) + sigma))


@given(sigmas, st.floats(0.001, 0.5))
def test_ai_and_ci_share_half_width(sigma, alpha):
    # AI at alpha and CI at 1 - alpha cut the same tails
    level = 1 - alpha
    assert ai_half_width(sigma, alpha) == pytest.approx(ci_half_width(sigma, level), rel=1e-12)


def test_exact_decimal_levels_match_bitwise():
    assert ai_half_width(1.165, 0.05) == ci_half_width(1.165, 0.95)


def test_ai_endpoints_are_quantiles():
    d = NormalUncertain(4.302, 1.114)
    ai = acceptance_interval(d.e, d.sigma, 0.05)
    assert ai.lo == pytest.approx(inv(0.025, d), abs=1e-12)
    assert ai.hi == pytest.approx(inv(0.975, d), abs=1e-12)


def test_interval_boundary_counts_as_inside():
    iv = Interval(-1.0, 1.0)
    assert not iv.excludes(1.0)
    assert not iv.excludes(-1.0)
    assert iv.excludes(1.0000001)


def test_interval_helpers():
    iv = confidence_interval(3.0, 1.0, 0.95)
    assert iv.center == pytest.approx(3.0)
    assert iv.shifted(2.0).center == pytest.approx(5.0)
    assert iv.as_list() == [iv.lo, iv.hi]


@pytest.mark.parametrize("bad", [
    lambda: NormalUncertain(0.0, 0.0),
    lambda: NormalUncertain(0.0, -1.0),
    lambda: NormalUncertain(float("nan"), 1.0),
    lambda: inv(0.0, NormalUncertain(0.0, 1.0)),
    lambda: inv(1.0, NormalUncertain(0.0, 1.0)),
    lambda: ci_half_width(1.0, 1.0),
    lambda: Interval(1.0, 0.0),
])
def test_invalid_inputs_raise(bad):
    with pytest.raises(InvalidInputError):
        bad()
