"""R-calibration data at series level and the asymptotic matching checks.

The identities here are Poincare asymptotics in z, so they are tested by
sampling along a ray z = z0 2^-m inside the Stokes sector and fitting the
log-log slope of the remainder.  Gamma values along the ray are taken with
mpmath at 40 digits so the fitted remainders stay far above round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath as mp
import numpy as np

from .errors import SectorViolation, ZeroWeight
from .geometry import AnGeometry, atiyah_bott_matrix
from .mirror import HurwitzPoint, canonical_frame, lattice_coords
from .series import LaurentZ
from .special import bernoulli_poly

_DPS = 40


@dataclass(frozen=True)
class CalibrationSeries:
    """Entries exp(log_prefactor[k] + series[k](z)), truncated at z^K."""

    log_prefactor: tuple
    series: tuple
    K: int

    def __call__(self, z: complex) -> np.ndarray:
        return np.array([np.exp(c + complex(s(z))) for c, s in zip(self.log_prefactor, self.series)])

    def log_at(self, z: complex) -> np.ndarray:
        return np.array([c + complex(s(z)) for c, s in zip(self.log_prefactor, self.series)])


def tseng_calibration(weights: Sequence[complex], l_values: Sequence[Sequence[int]], order: int, K: int = 6,
                      log_euler: Sequence[complex] | None = None) -> CalibrationSeries:
    """exp(sum_i sum_k s_ik B_(k+1)(l_i(g)/|g|) z^k/(k+1)!) / sqrt(e(V^0)), one entry per sector g.

    s_i0 = -log w_i, s_ik = (-w_i)^-k (k-1)!.  ``l_values[g]`` lists l_i(g) for
    every line bundle.  e(V^0) is the product of the weights with l_i(g) = 0
    unless ``log_euler`` gives its logarithm per sector.
    """
    if K > 12:
        raise ValueError("truncation order above 12 is not supported")
    w = [complex(x) for x in weights]
    if any(x == 0 for x in w):
        raise ZeroWeight("line-bundle weight is zero")
    consts, sers = [], []
    for g, ls in enumerate(l_values):
        if len(ls) != len(w):
            raise ValueError("l_values rows must match the number of weights")
        c = 0j
        coeffs = [0j] * K
        for wi, li in zip(w, ls):
            x = li / order
            c += -np.log(wi) * bernoulli_poly(1, x)
            for k in range(1, K + 1):
                # s_ik / (k+1)! = (-w)^-k (k-1)!/(k+1)! = (-w)^-k / (k(k+1))
                coeffs[k - 1] += (-wi) ** (-k) * bernoulli_poly(k + 1, x) / (k * (k + 1))
        if log_euler is None:
            c -= 0.5 * sum(np.log(wi) for wi, li in zip(w, ls) if li == 0)
        else:
            c -= 0.5 * complex(log_euler[g])
        consts.append(complex(c))
        sers.append(LaurentZ.make(1, coeffs))
    return CalibrationSeries(tuple(consts), tuple(sers), K)


def orbifold_calibration(geo: AnGeometry, K: int = 6) -> CalibrationSeries:
    """D_X: bundle weights (-alpha1, -alpha2, s) and l(j) = (N - j, j, 0); entry N is untwisted."""
    N = geo.N
    ls = [(N - j, j, 0) for j in range(1, N)] + [(0, 0, 0)]
    return tseng_calibration((-geo.alpha1, -geo.alpha2, geo.s), ls, N, K)


def resolution_calibration(geo: AnGeometry, K: int = 6) -> CalibrationSeries:
    """D_Y at every fixed point: odd series in z built from (w_i^-, w_i^+, s)."""
    consts, sers = [], []
    for i in range(1, geo.N + 1):
        c = tseng_calibration((geo.wminus(i), geo.wplus(i), geo.s), [(0, 0, 0)], 1, K)
        # the sqrt of the Euler class cancels the k = 0 term exactly
        consts.append(0j)
        sers.append(c.series[0])
    return CalibrationSeries(tuple(consts), tuple(sers), K)


def deltaY_closed(geo: AnGeometry, i: int, K: int) -> LaurentZ:
    """-sum_k B_2k z^(2k-1)/(2k(2k-1)) ((w^+)^(1-2k) + (w^-)^(1-2k) + s^(1-2k)), k with 2k-1 <= K."""
    wm, wp, s = geo.wminus(i), geo.wplus(i), geo.s
    coeffs = [0j] * K
    for k in range(1, (K + 1) // 2 + 1):
        if 2 * k - 1 > K:
            break
        B = float(bernoulli_poly(2 * k, 0.0).real)
        coeffs[2 * k - 2] = -B / (2 * k * (2 * k - 1)) * (wp ** (1 - 2 * k) + wm ** (1 - 2 * k) + s ** (1 - 2 * k))
    return LaurentZ.make(1, coeffs)


def stirling_series(c: complex, d: complex, K: int) -> LaurentZ:
    """sum_(k=1..K) B_(k+1)(1-d)/(k(k+1)) (z/c)^k."""
    c = complex(c)
    if c == 0:
        raise ValueError("c must be nonzero")
    return LaurentZ.make(1, [bernoulli_poly(k + 1, 1 - d) / (k * (k + 1)) * c ** (-k) for k in range(1, K + 1)])


def stirling_remainder(c: complex, d: complex, z: complex, K: int) -> complex:
    """log[Gamma(x+d) x^-x e^x x^(1/2-d)/sqrt(2 pi)] minus the K-term series, x = c/z."""
    with mp.workdps(_DPS):
        x = mp.mpc(c) / mp.mpc(z)
        lhs = mp.loggamma(x + d) - x * mp.log(x) + x + (mp.mpf(1) / 2 - d) * mp.log(x) - mp.log(2 * mp.pi) / 2
        ser = mp.mpc(0)
        for k in range(1, K + 1):
            ser += mp.bernpoly(k + 1, 1 - mp.mpc(d)) / (k * (k + 1)) * x ** (-k)
        return complex(lhs - ser)


def fit_slope(zs: Sequence[complex], errs: Sequence[float], floor: float = 1e-28) -> float:
    """Least-squares slope of log|err| against log|z|, ignoring points at the noise floor."""
    x = np.log(np.abs(np.asarray(zs)))
    y = np.asarray(errs, dtype=float)
    keep = y > floor
    if keep.sum() < 2:
        return float("inf")
    return float(np.polyfit(x[keep], np.log(y[keep]), 1)[0])


def in_sector(geo: AnGeometry, zhat: complex, margin: float = 0.2) -> bool:
    """S_+: Re(alpha1/zhat) > margin and Re(s/zhat) < -margin (zhat of unit modulus)."""
    zhat = complex(zhat) / abs(zhat)
    return (geo.alpha1 / zhat).real > margin and (geo.s / zhat).real < -margin


def sample_sector(rng: np.random.Generator, n: int, margin: float = 0.2, tries: int = 10000):
    """Random weights and a unit direction zhat with the pair inside S_+."""
    for _ in range(tries):
        a1 = complex(*rng.normal(size=2))
        a2 = complex(*rng.normal(size=2))
        zh = np.exp(1j * rng.uniform(-np.pi, np.pi))
        try:
            geo = AnGeometry(n, a1, a2)
        except Exception:
            continue
        if in_sector(geo, zh, margin) and min(abs(a1), abs(a2), abs(a1 + a2)) > 0.1:
            return geo, complex(zh)
    raise SectorViolation("could not sample weights inside the Stokes sector")


def _check_sector(geo: AnGeometry, zhat: complex):
    if not in_sector(geo, zhat, 0.0):
        raise SectorViolation("direction of z lies outside S_+ for these weights")


def _mp_weights(geo: AnGeometry, i: int):
    """(w_i^-, w_i^+, s) at working precision, so that w- + w+ + s = 0 holds exactly."""
    a1, a2 = mp.mpc(geo.alpha1), mp.mpc(geo.alpha2)
    return (i - 1) * a1 + (i - geo.n - 2) * a2, -i * a1 + (geo.N - i) * a2, a1 + a2


def normalization_logs(geo: AnGeometry, z: complex, K: int) -> list:
    """log(c_k e^(u0/z) z / N^X) per sector k, c_k = (D_X)_k / (D2)_kk, at 40 digits.

    Sector k of the period matrix carries the calibration of sector N - k.
    Square roots are fixed by continuity inside S_+: sqrt(s) = i sqrt(z) sqrt(-s/z)
    and sqrt(alpha1 alpha2 s) = -i z sqrt(alpha1/z) sqrt(-alpha2/z) sqrt(s).
    Each value tends to 0 with an O(z^(K+1)) remainder.
    """
    with mp.workdps(_DPS):
        return [complex(v) for v in _normalization_logs(geo, z, K)]


def _normalization_logs(geo, z, K):
    with mp.workdps(_DPS):
        n, N = geo.n, geo.N
        a1, a2 = mp.mpc(geo.alpha1), mp.mpc(geo.alpha2)
        s = a1 + a2
        zz = mp.mpc(z)
        zh = zz / abs(zz)
        X, b = a1 / zz, s / zz
        half_log_s = 1j * mp.pi / 2 + mp.log(zz) / 2 + mp.log(-s / zz) / 2
        half_log_e3 = -1j * mp.pi / 2 + mp.log(zz) + mp.log(X) / 2 + mp.log(-a2 / zz) / 2 + half_log_s
        L = mp.log(-a2 / zh) - mp.log(a1 / zh) + 1j * mp.pi
        u0 = a1 * mp.log(a1 / zh) + a2 * mp.log(-a2 / zh) - s * mp.log(-s / zh)
        logN = mp.log(-1 / b) + mp.log(zz) / 2 - mp.log(2 * mp.pi) / 2
        out = []
        for k in range(1, N + 1):
            if k <= n:
                j = N - k
                x = mp.mpf(j) / N
                ser = mp.mpc(0)
                for m in range(1, K + 1):
                    Bx = mp.bernpoly(m + 1, x)
                    ser += (-Bx / (-a1) ** m + Bx / a2 ** m - mp.bernoulli(m + 1) / s ** m) * zz ** m / (m * (m + 1))
                ld = (mp.mpf(1) / 2 - x) * L + ser - half_log_s
                lD = (1j * mp.pi * (1 + mp.mpf(k) / N) + mp.loggamma(X - mp.mpf(k) / N + 1) + mp.loggamma(1 - b)
                      - mp.loggamma(X - mp.mpf(k) / N + 1 - b))
            else:
                ser = mp.mpc(0)
                for m in range(1, K + 1):
                    if 2 * m - 1 > K:
                        break
                    ser += ((a1 ** (1 - 2 * m) + a2 ** (1 - 2 * m) - s ** (1 - 2 * m)) * mp.bernoulli(2 * m)
                            * zz ** (2 * m - 1) / (2 * m * (2 * m - 1)))
                ld = ser - half_log_e3
                lD = mp.loggamma(X) + mp.loggamma(1 - b) - mp.log(zz) - mp.loggamma(1 - b + X)
            out.append(ld - lD + u0 / zz + mp.log(zz) - logN)
        return out


def normalization_matrix(geo: AnGeometry, z: complex, K: int) -> np.ndarray:
    """Formal prefactors of the normalization matrix times z / N^X.

    Entry (i, j) is (1/N) sum_k omega^((i-j)k) c_k e^(u0/z) z/N^X; the full entry
    carries the extra factor exp(2 pi i (j - i) alpha1/z), which is pure
    exponential and does not affect the formal z-series.  The target is the
    identity with an O(z^(K+1)) remainder.
    """
    return np.array(_normalization_matrix(geo, z, K).tolist(), dtype=complex)


def _normalization_matrix(geo, z, K):
    N = geo.N
    with mp.workdps(_DPS):
        r = [mp.exp(v) for v in _normalization_logs(geo, z, K)]
        M = mp.matrix(N, N)
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                M[i - 1, j - 1] = mp.fsum(mp.expjpi(mp.mpf(2 * (i - j) * k) / N) * r[k - 1]
                                          for k in range(1, N + 1)) / N
        return M


@dataclass
class SlopeReport:
    identity: str
    n: int
    slope: float
    threshold: float
    samples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.slope) and self.slope >= self.threshold)


def _ray(zhat: complex, z0: float, m_values):
    return [z0 * 2.0 ** (-m) * zhat for m in m_values]


def normalization_check(geo: AnGeometry, zhat: complex, K: int = 4, z0: float = 0.3,
                        m_values=range(0, 7)) -> list[SlopeReport]:
    """Slopes of the diagonal and off-diagonal remainders along z = z0 2^-m zhat."""
    _check_sector(geo, zhat)
    zs = _ray(zhat, z0, m_values)
    diag, off = [], []
    N = geo.N
    for z in zs:
        # remainders are measured at working precision, below double round-off
        with mp.workdps(_DPS):
            M = _normalization_matrix(geo, z, K)
            diag.append(float(max(abs(M[i, i] - 1) for i in range(N))))
            off.append(float(max((abs(M[i, j]) for i in range(N) for j in range(N) if i != j), default=0)))
    thr = K + 0.5
    return [SlopeReport("calib.normalization_diagonal", geo.n, fit_slope(zs, diag), thr, diag),
            SlopeReport("calib.normalization_offdiagonal", geo.n, fit_slope(zs, off), thr, off)]


# --- large radius -----------------------------------------------------------


def log_epsilon_times_z(geo: AnGeometry, i: int, zhat: complex) -> complex:
    """z log eps_i = -w+ log(-w+/z) - w- log(w-/z) - s log(-s/z) - i pi (N - i) s.

    The log z terms cancel because w- + w+ + s = 0, so only the direction of z enters.
    """
    zh = complex(zhat) / abs(zhat)
    wm, wp, s = geo.wminus(i), geo.wplus(i), geo.s
    return complex(-wp * np.log(-wp / zh) - wm * np.log(wm / zh) - s * np.log(-s / zh)
                   - 1j * np.pi * (geo.N - i) * s)


def u_classical(geo: AnGeometry, t) -> np.ndarray:
    """u_cl^i = t_N + alpha2 sum_(j>=i)(N-j) t_j + alpha1 sum_(j<i) j t_j."""
    t = np.asarray(t, dtype=complex)
    return atiyah_bott_matrix(geo) @ t


def large_radius_point(geo: AnGeometry, eps: float, phases, t_N: complex = 0j) -> np.ndarray:
    """t_j = log eps + i phase_j, so that every exp(t_j) is of size eps."""
    return np.array([np.log(eps) + 1j * p for p in phases] + [t_N], dtype=complex)


def epsilon_limit_residuals(geo: AnGeometry, t, zhat: complex) -> np.ndarray:
    """|u^i - u_cl^i - z log eps_i| after removing the nearest 2 pi i (Z alpha1 + Z alpha2) shift."""
    hp = HurwitzPoint.from_t(geo, t)
    u = np.array(canonical_frame(hp).u)
    ucl = u_classical(geo, t)
    out = []
    for i in range(1, geo.N + 1):
        d = u[i - 1] - ucl[i - 1] - log_epsilon_times_z(geo, i, zhat)
        c = np.round(lattice_coords(d, geo.alpha1, geo.alpha2, 2j * np.pi))
        out.append(abs(d - 2j * np.pi * (c[0] * geo.alpha1 + c[1] * geo.alpha2)))
    return np.array(out)


@dataclass
class TwoScaleReport:
    identity: str
    n: int
    err_coarse: float
    err_fine: float
    ratio: float
    scale_ratio: float
    rel_tol: float = 0.2

    @property
    def passed(self) -> bool:
        return bool(abs(self.ratio / self.scale_ratio - 1) <= self.rel_tol)


def epsilon_check(geo: AnGeometry, zhat: complex, phases, eps=(1e-3, 1e-4)) -> TwoScaleReport:
    e1 = float(epsilon_limit_residuals(geo, large_radius_point(geo, eps[0], phases), zhat).max())
    e2 = float(epsilon_limit_residuals(geo, large_radius_point(geo, eps[1], phases), zhat).max())
    return TwoScaleReport("calib.epsilon_ucl_limit", geo.n, e1, e2, e1 / e2, eps[0] / eps[1])


def log_A_diagonal(geo: AnGeometry, i: int, z: complex) -> complex:
    """log A_ii = i pi (N-i) b + log z + log Gamma(1 + w-/z) - log Gamma(1-b) - log Gamma(-w+/z)."""
    return complex(_log_A_diagonal(geo, i, z))


def _log_A_diagonal(geo, i, z):
    with mp.workdps(_DPS):
        zz = mp.mpc(z)
        wm, wp, s = _mp_weights(geo, i)
        b = s / zz
        v = (1j * mp.pi * (geo.N - i) * b + mp.log(zz) + mp.loggamma(1 + wm / zz) - mp.loggamma(1 - b)
             - mp.loggamma(-wp / zz))
        return v


def log_A_target(geo: AnGeometry, i: int, z: complex, K: int) -> complex:
    """log of (eps_i^(1/z) D_Y,i)^-1 z sqrt(w-/z) sqrt(-w+/z) / sqrt(2 pi (-b)), D_Y truncated at z^K."""
    return complex(_log_A_target(geo, i, z, K))


def _log_A_target(geo, i, z, K):
    with mp.workdps(_DPS):
        zz = mp.mpc(z)
        zh = zz / abs(zz)
        wm, wp, s = _mp_weights(geo, i)
        zle = (-wp * mp.log(-wp / zh) - wm * mp.log(wm / zh) - s * mp.log(-s / zh)
               - 1j * mp.pi * (geo.N - i) * s)
        dy = mp.mpc(0)
        for k in range(1, K + 1):
            if 2 * k - 1 > K:
                break
            dy += (-mp.bernoulli(2 * k) / (2 * k * (2 * k - 1)) * zz ** (2 * k - 1)
                   * (wp ** (1 - 2 * k) + wm ** (1 - 2 * k) + s ** (1 - 2 * k)))
        v = (-zle / zz - dy + mp.log(zz) + mp.log(wm / zz) / 2 + mp.log(-wp / zz) / 2
             - mp.log(2 * mp.pi * (-s / zz)) / 2)
        return v


def a_diagonal_check(geo: AnGeometry, zhat: complex, K: int = 4, z0: float = 0.3,
                     m_values=range(0, 7)) -> SlopeReport:
    """Slope of max_i |A_ii / target_i - 1| along the ray (branches compared through exp)."""
    _check_sector(geo, zhat)
    zs = _ray(zhat, z0, m_values)
    errs = []
    for z in zs:
        e = 0.0
        for i in range(1, geo.N + 1):
            with mp.workdps(_DPS):
                d = _log_A_diagonal(geo, i, z) - _log_A_target(geo, i, z, K)
                e = max(e, float(abs(mp.exp(d) - 1)))
        errs.append(e)
    return SlopeReport("calib.A_diagonal_asymptotics", geo.n, fit_slope(zs, errs), K + 0.5, errs)


def stirling_check(c: complex, d: complex, K: int = 4, z0: float = 0.3, m_values=range(0, 7)) -> SlopeReport:
    zs = _ray(1.0, z0, m_values)
    errs = [abs(stirling_remainder(c, d, z, K)) for z in zs]
    return SlopeReport("calib.stirling", 0, fit_slope(zs, errs), K + 0.5, errs)


def lr_matching_check(geo: AnGeometry, zhat: complex, K: int = 4, phases=None,
                      rng: np.random.Generator | None = None) -> list:
    """Large-radius side of the calibration matching: the eps_i / u_cl limit and the A_ii asymptotics.

    The large-radius phases are given directly or drawn from ``rng``.
    """
    if phases is None:
        if rng is None:
            raise ValueError("pass phases or a seeded generator")
        phases = rng.uniform(0.3, 2.8, size=geo.n)
    return [epsilon_check(geo, zhat, phases), a_diagonal_check(geo, zhat, K)]
