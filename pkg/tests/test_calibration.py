import numpy as np
import pytest
from _strategies import seeds
from hypothesis import given
from scipy.special import loggamma

from ancrc import calibration as cal
from ancrc.errors import SectorViolation, ZeroWeight
from ancrc.geometry import AnGeometry
from ancrc.special import bernoulli_poly

# weights with zhat = 1 inside the sector: Re alpha1 > 0.2, Re s < -0.2
GEO = AnGeometry(2, 0.9 + 0.3j, -1.6 + 0.4j)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_normalization_slopes(n):
    geo, zh = cal.sample_sector(np.random.default_rng(100 + n), n)
    for r in cal.normalization_check(geo, zh, K=4):
        assert r.slope >= 4.5, r


def test_epsilon_limit_ratio():
    rep = cal.epsilon_check(GEO, 1.0, phases=(0.8, 1.9))
    assert rep.passed, rep
    assert rep.err_fine < rep.err_coarse


def test_a_diagonal_slope():
    rep = cal.a_diagonal_check(GEO, 1.0, K=4)
    assert rep.slope >= 4.5, rep


@pytest.mark.parametrize("c,d", [(1.0, 0.0), (0.7 + 0.4j, 0.3 - 0.2j), (1.8 - 0.5j, -0.6 + 0.9j)])
def test_stirling_remainder_slope(c, d):
    rep = cal.stirling_check(c, d, K=4)
    assert rep.slope >= 4.5, rep


def test_stirling_series_first_coefficient():
    # B_2(1 - d)/2 = (d^2 - d + 1/6)/2
    d, c = 0.3 + 0.2j, 1.4 - 0.1j
    s = cal.stirling_series(c, d, 3)
    assert s.coeffs[0] == pytest.approx((d * d - d + 1 / 6) / 2 / c)


def test_stirling_series_d1_uses_bernoulli_numbers():
    s = cal.stirling_series(1.0, 1.0, 5)
    want = [1 / 12, 0, -1 / 360, 0, 1 / 1260]
    assert np.allclose(s(0.1), sum(w * 0.1 ** (k + 1) for k, w in enumerate(want)))


def test_stirling_remainder_small_at_large_argument():
    # K = 0 leaves the full Stirling correction, about 1/(12 x)
    r = cal.stirling_remainder(1.0, 0.0, 0.01, 0)
    x = 100.0
    want = loggamma(x) - (x - 0.5) * np.log(x) + x - 0.5 * np.log(2 * np.pi)
    assert r == pytest.approx(want, rel=1e-10)


def test_stirling_series_rejects_zero_c():
    with pytest.raises(ValueError):
        cal.stirling_series(0, 0.5, 3)


def test_calibration_prefactor_at_zero_order():
    w = (0.7 + 0.2j, -1.1j, 0.4 - 0.2j)
    out = cal.tseng_calibration(w, [(1, 2, 0)], 3, K=0)
    x = np.array([1, 2, 0]) / 3
    want = sum(-np.log(wi) * (xi - 0.5) for wi, xi in zip(w, x)) - 0.5 * np.log(w[2])
    assert out.log_prefactor[0] == pytest.approx(want)
    assert out.series[0].is_zero()


def test_calibration_argument_checks():
    with pytest.raises(ValueError):
        cal.tseng_calibration((1.0, 2.0), [(0, 0)], 1, K=13)
    with pytest.raises(ZeroWeight):
        cal.tseng_calibration((1.0, 0.0), [(0, 0)], 1)
    with pytest.raises(ValueError):
        cal.tseng_calibration((1.0, 2.0), [(0,)], 1)


@pytest.mark.parametrize("i", [1, 2, 3])
def test_resolution_calibration_matches_odd_closed_form(i):
    D = cal.resolution_calibration(GEO, K=7)
    closed = cal.deltaY_closed(GEO, i, 7)
    z = 0.05 + 0.02j
    assert D.log_at(z)[i - 1] == pytest.approx(complex(closed(z)), rel=1e-12)


def test_orbifold_calibration_untwisted_entry():
    D = cal.orbifold_calibration(GEO, K=4)
    a1, a2, s = GEO.alpha1, GEO.alpha2, GEO.s
    # the untwisted sector has all l = 0: B_1(0) = -1/2 against the -1/2 log e(V^0)
    assert D.log_prefactor[-1] == pytest.approx(0.0, abs=1e-14)
    z = 0.1
    want = sum((-w) ** (-1) * bernoulli_poly(2, 0.0) / 2 * z for w in (-a1, -a2, s))
    assert D.series[-1](z) == pytest.approx(want, rel=0.01)


def test_lr_matching_requires_phases_or_rng():
    with pytest.raises(ValueError):
        cal.lr_matching_check(GEO, 1.0)


def test_sector_violation():
    with pytest.raises(SectorViolation):
        cal.normalization_check(GEO, -1.0)


@given(seeds())
def test_sampled_pairs_lie_in_sector(seed):
    geo, zh = cal.sample_sector(np.random.default_rng(seed), 2)
    assert cal.in_sector(geo, zh)
    assert abs(abs(zh) - 1) < 1e-12


def test_fit_slope_power_law():
    zs = [0.3 * 2.0 ** -m for m in range(6)]
    assert cal.fit_slope(zs, [abs(z) ** 5 for z in zs]) == pytest.approx(5.0)
    assert cal.fit_slope(zs, [0.0] * 6) == float("inf")


def test_large_radius_point_sizes():
    t = cal.large_radius_point(GEO, 1e-3, (0.5, 1.0))
    assert np.allclose(np.abs(np.exp(t[:2])), 1e-3)
    assert t[2] == 0
