"""Gamma, Gauss and Lauricella hypergeometric functions, twisted periods.

All multivalued powers use the principal logarithm unless a log is passed in
explicitly.  Continuation of 2F1 past |z| = 1 follows the zero-winding path
around z = 1 (the two-term connection formula with principal (-z)^(-a)).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainNotCovered,
    GammaPole,
    IntegerDifference,
    NearSingularPoint,
    OracleNonConvergence,
    SegmentHitsPuncture,
)

# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def _near_pole(z: complex, tol: float) -> bool:
    return z.real <= 0.5 and abs(z - round(z.real)) < tol


def _loggamma_cont(z: complex) -> complex:
    """Continuous log Gamma on Re z >= 0.5 (Lanczos)."""
    z = z - 1
    x = _LANCZOS[0]
    for k in range(1, 9):
        x += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z: complex) -> complex:
    # log sin(pi z), stable for large |Im z|
    y = z.imag
    if abs(y) < 20:
        return complex(np.log(np.sin(np.pi * z)))
    # sin(pi z) = e^{-i pi z}(e^{2 i pi z} - 1)/(2i) for Im z > 0 and mirrored below
    if y > 0:
        return -1j * np.pi * z + np.log(np.expm1(2j * np.pi * z) / 2j)
    return 1j * np.pi * z + np.log(-np.expm1(-2j * np.pi * z) / 2j)


def _wrap(w: complex) -> complex:
    im = math.remainder(w.imag, 2 * math.pi)
    if im == -math.pi:
        im = math.pi
    return complex(w.real, im)


def log_gamma(z: complex, principal: bool = True) -> complex:
    """log Gamma(z).

    With ``principal`` the imaginary part is reduced to (-pi, pi], i.e. the
    principal log of Gamma(z); otherwise an unnormalized log is returned
    (only its exponential is meaningful).
    """
    z = complex(z)
    if _near_pole(z, 1e-12):
        raise GammaPole(f"Gamma has a pole at {z}")
    if z.real >= 0.5:
        w = _loggamma_cont(z)
    else:
        w = math.log(math.pi) - _log_sin_pi(z) - _loggamma_cont(1 - z)
    return _wrap(w) if principal else w


def gamma(z: complex) -> complex:
    return complex(np.exp(log_gamma(z, principal=False)))


def log_gamma_ratio(num: Sequence[complex], den: Sequence[complex]) -> complex:
    """log of prod Gamma(num) / prod Gamma(den), branch unspecified."""
    return sum(log_gamma(x, False) for x in num) - sum(log_gamma(x, False) for x in den)


def gamma_ratio(num: Sequence[complex], den: Sequence[complex]) -> complex:
    """prod Gamma(num) / prod Gamma(den); a pole in the denominator gives 0."""
    if any(_near_pole(complex(x), 1e-12) for x in den):
        for x in num:
            log_gamma(x, False)  # still raise for a pole upstairs
        return 0j
    return complex(np.exp(log_gamma_ratio(num, den)))


def pochhammer_terms(b: complex, w: complex, m: int) -> np.ndarray:
    """Coefficients (b)_k w^k / k! for k < m, i.e. the series of (1 - w x)^(-b)."""
    out = np.empty(m, dtype=complex)
    out[0] = 1.0
    for k in range(1, m):
        out[k] = out[k - 1] * (b + k - 1) * w / k
    return out


# --- Gauss 2F1 -------------------------------------------------------------


def _2f1_series(a, b, c, z, tol=1e-16, max_terms=1_000_000) -> complex:
    if abs(z) >= 1:
        raise DomainNotCovered("direct 2F1 series needs |z| < 1")
    term = 1.0 + 0j
    total = 1.0 + 0j
    small = 0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) < tol * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise OracleNonConvergence("2F1 series did not converge")


def _check_c(c):
    if _near_pole(complex(c), 1e-10):
        raise GammaPole(f"c = {c} is a nonpositive integer")


def _2f1_inner(a, b, c, z) -> complex:
    """2F1 for |z| <= 1.1 excluding a neighborhood of z = 1."""
    if abs(z) < 0.9:
        return _2f1_series(a, b, c, z)
    # Pfaff: (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)), principal (1-z) is fine for |z| < 1.
    # Of the two symmetric forms take the one with smaller upper parameters, so
    # that c - b or c - a does not grow along contiguous families like (a+k, c+k).
    zp = z / (z - 1)
    if abs(zp) < 0.9 and z.real < 1:
        if abs(a) + abs(c - b) <= abs(b) + abs(c - a):
            return (1 - z) ** (-a) * _2f1_series(a, c - b, c, zp)
        return (1 - z) ** (-b) * _2f1_series(b, c - a, c, zp)
    if abs(z) < 1:
        return _2f1_series(a, b, c, z)
    raise DomainNotCovered(f"2F1 at z = {z} is not covered by series or Pfaff routes")


def _2f1_polynomial(m: int, b, c, z) -> complex:
    """2F1(m, b; c; z) for an integer m <= 0: a finite sum."""
    term = 1.0 + 0j
    total = 1.0 + 0j
    for k in range(-m):
        term *= (m + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    return total


def _2f1_series_d(a, b, c, z) -> tuple[complex, complex]:
    """2F1 and its z-derivative by the direct series (|z| < 0.9)."""
    return _2f1_series(a, b, c, z), a * b / c * _2f1_series(a + 1, b + 1, c + 1, z)


def _taylor_step(a, b, c, x0, f, fp, h, tol=1e-17, max_terms=4000) -> tuple[complex, complex]:
    """Advance (f, f') of the hypergeometric equation from x0 to x0 + h by its Taylor series.

    x(1-x) f'' + (c - (a+b+1) x) f' - ab f = 0 gives a three-term recursion for
    the coefficients at the regular point x0.
    """
    P0, P1 = x0 * (1 - x0), 1 - 2 * x0
    Q0, Q1 = c - (a + b + 1) * x0, -(a + b + 1)
    ab = a * b
    cm, cm1 = f, fp  # c_m, c_(m+1)
    val = cm + cm1 * h
    der = cm1
    hp = h  # h^(m+1)
    small = 0
    for m in range(max_terms):
        cm2 = -((P1 * m + Q0) * (m + 1) * cm1 + (-m * (m - 1) + Q1 * m - ab) * cm) / (P0 * (m + 2) * (m + 1))
        t_val = cm2 * hp * h
        t_der = (m + 2) * cm2 * hp
        val += t_val
        der += t_der
        if abs(t_val) <= tol * abs(val) and abs(t_der) <= tol * max(abs(der), 1e-300):
            small += 1
            if small >= 3:
                return val, der
        else:
            small = 0
        cm, cm1 = cm1, cm2
        hp *= h
    raise OracleNonConvergence("Taylor continuation of 2F1 did not converge")


def _2f1_continued(a, b, c, z) -> complex:
    """2F1 on the principal branch by continuing the ODE along the ray from 0.5 z/|z| to z.

    Each step stays within a third of the distance to the singular points 0 and 1.
    """
    x = 0.5 * z / abs(z)
    f, fp = _2f1_series_d(a, b, c, x)
    for _ in range(10_000):
        rem = z - x
        if abs(rem) == 0:
            return f
        rho = min(abs(x), abs(1 - x))
        h = rem if abs(rem) <= rho / 3 else rem / abs(rem) * rho / 3
        f, fp = _taylor_step(a, b, c, x, f, fp, h)
        x = z if h is rem else x + h
    raise OracleNonConvergence("2F1 continuation took too many steps")


def gauss_2f1(a: complex, b: complex, c: complex, z: complex) -> complex:
    """Gauss hypergeometric function with the zero-winding continuation."""
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    _check_c(c)
    if z == 0:
        return 1.0 + 0j
    if z == 1:
        # Gauss summation
        if (c - a - b).real <= 0:
            raise NearSingularPoint("2F1 diverges at z = 1 for Re(c-a-b) <= 0")
        return gamma_ratio([c, c - a - b], [c - a, c - b])
    for p in (a, b):
        if p.real < 0.5 and abs(p - round(p.real)) < 1e-13:
            # terminating: a polynomial of degree -p, valid for every z
            return _2f1_polynomial(round(p.real), b if p is a else a, c, z)
    if abs(z - 1) < 1e-3:
        raise NearSingularPoint(f"|z - 1| = {abs(z - 1):.2e} is too small")
    if abs(z) <= 1.1 and not (abs(z) > 1 and z.real > 0.5):
        try:
            return _2f1_inner(a, b, c, z)
        except DomainNotCovered:
            pass
    if abs(z) <= 1.5:
        # the 1/z connection loses digits here, especially for large parameters
        return _2f1_continued(a, b, c, z)
    d = a - b
    if abs(d - round(d.real)) < 1e-3:
        # the connection formula degenerates (logarithmic case); continue the ODE
        # instead, which only fails on the branch cut itself
        if z.real > 1 and abs(z.imag) < 1e-12:
            raise IntegerDifference("a - b is an integer and z lies on the branch cut")
        return _2f1_continued(a, b, c, z)
    mz = -z
    w = 1 / z
    t1 = gamma_ratio([c, b - a], [b, c - a]) * mz ** (-a) * _2f1_inner(a, a - c + 1, a - b + 1, w)
    t2 = gamma_ratio([c, a - b], [a, c - b]) * mz ** (-b) * _2f1_inner(b, b - c + 1, b - a + 1, w)
    return t1 + t2


# --- Lauricella F_D ----------------------------------------------------------


@dataclass(frozen=True)
class FDParams:
    a: complex
    b: tuple
    c: complex
    w: tuple

    def __post_init__(self):
        if len(self.b) != len(self.w) or len(self.b) < 1:
            raise ValueError("b and w must have the same positive length")
        _check_c(self.c)

    @property
    def N(self) -> int:
        return len(self.w)


def _homogeneous_coeffs(bs, ws, m: int) -> np.ndarray:
    """Coefficients h_k, k < m, of prod_j (1 - w_j x)^(-b_j)."""
    h = np.zeros(m, dtype=complex)
    h[0] = 1.0
    for b, w in zip(bs, ws):
        h = np.convolve(h, pochhammer_terms(b, w, m))[:m]
    return h


def _fd_outer_sum(a, c, bs, ws, inner: Callable[[int], complex] | None, tol: float) -> complex:
    """sum_k (a)_k/(c)_k h_k(b, w) inner(k), growing the truncation until the tail is small."""
    r = max((abs(w) for w in ws), default=0.0)
    if r >= 1:
        raise DomainNotCovered("outer Lauricella variables must lie in the unit disk")
    m = 32
    while True:
        h = _homogeneous_coeffs(bs, ws, m)
        ratio = np.empty(m, dtype=complex)
        ratio[0] = 1.0
        for k in range(1, m):
            ratio[k] = ratio[k - 1] * (a + k - 1) / (c + k - 1)
        terms = ratio * h
        if inner is not None:
            terms = terms * np.array([inner(k) for k in range(m)])
        total = terms.sum()
        scale = max(abs(total), 1e-300)
        if m >= 8 and np.all(np.abs(terms[-3:]) < tol * scale):
            return complex(total)
        if m >= 1 << 14:
            raise OracleNonConvergence("Lauricella series truncation exceeded 16384 terms")
        m *= 2


def lauricella_fd(p: FDParams, tol: float = 1e-14) -> complex:
    """F_D(a; b; c; w) by the series (all |w| < 1) or the one-variable 2F1 reduction.

    In the reduction the variable of largest modulus is summed in closed form
    by 2F1, which may then lie outside the unit disk (or at w = 1).
    """
    ws = [complex(w) for w in p.w]
    bs = [complex(b) for b in p.b]
    a, c = complex(p.a), complex(p.c)
    if all(w == 0 for w in ws):
        return 1.0 + 0j
    mods = [abs(w) for w in ws]
    if max(mods) < 0.95:
        return _fd_outer_sum(a, c, bs, ws, None, tol)
    j = int(np.argmax(mods))
    rest_w = ws[:j] + ws[j + 1:]
    rest_b = bs[:j] + bs[j + 1:]
    if rest_w and max(abs(w) for w in rest_w) >= 0.95:
        raise DomainNotCovered("more than one Lauricella variable outside |w| < 0.95")
    # the reduction evaluates 2F1(a+k, b; c+k; w) for k up to the outer truncation;
    # keeping the outer variables small keeps k moderate, where 2F1 stays accurate
    if rest_w and max(abs(w) for w in rest_w) >= 0.6:
        raise DomainNotCovered("the 2F1 reduction needs the remaining variables in |w| < 0.6")
    wj, bj = ws[j], bs[j]
    cache = {}

    def inner(k):
        if k not in cache:
            cache[k] = gauss_2f1(a + k, bj, c + k, wj)
        return cache[k]

    if not rest_w:
        return inner(0)
    return _fd_outer_sum(a, c, rest_b, rest_w, inner, tol)


def lauricella_fd_bruteforce(p: FDParams, kmax: int = 60) -> complex:
    """Independent multi-index sum of the F_D series (oracle for N <= 3)."""
    N = p.N
    a, c = complex(p.a), complex(p.c)
    pt = [pochhammer_terms(b, w, kmax + 1) for b, w in zip(p.b, p.w)]
    ratio = np.ones(N * kmax + 1, dtype=complex)
    for k in range(1, N * kmax + 1):
        ratio[k] = ratio[k - 1] * (a + k - 1) / (c + k - 1)
    total = 0j
    for idx in itertools.product(range(kmax + 1), repeat=N):
        num = ratio[sum(idx)]
        for j in range(N):
            num *= pt[j][idx[j]]
        total += num
    return complex(total)


def fd_leading_asymptotics(p: FDParams) -> complex:
    """Leading N+1 monomials of F_D near w = (inf, ..., inf) with |w_i/w_j| -> 0 for i < j.

    Term j (0 <= j < N) carries the j largest variables to the power -b and
    w_{N-j} to the power -a + sum of those b's; the last term carries every
    variable to the power -b_i.
    """
    a, c = complex(p.a), complex(p.c)
    b = [complex(x) for x in p.b]
    w = [complex(x) for x in p.w]
    N = p.N
    total = 0j
    for j in range(N):
        top = sum(b[N - j:])  # b_{N-j+1} + ... + b_N (0-based tail)
        bj = b[N - j - 1]
        g = gamma_ratio([c, a - top, top + bj - a], [a, bj, c - a])
        mono = np.prod([(-w[i]) ** (-b[i]) for i in range(N - j, N)]) if j else 1.0
        mono *= (-w[N - j - 1]) ** (-a + top)
        total += g * mono
    sb = sum(b)
    total += np.prod([(-w[i]) ** (-b[i]) for i in range(N)]) * gamma_ratio([c, a - sb], [a, c - sb])
    return complex(total)


def fd_euler_integral(p: FDParams, level: int | None = None) -> complex:
    """Euler integral representation of F_D (needs Re c > Re a > 0).

    Principal branches of (1 - w_i t)^(-b_i) along t in [0, 1]; this is the
    zero-winding continuation as long as no w_i is real and > 1.
    """
    a, c = complex(p.a), complex(p.c)
    if not (a.real > 0 and (c - a).real > 0):
        raise DomainNotCovered("Euler integral needs Re c > Re a > 0")
    logs = [(complex(b), complex(w)) for b, w in zip(p.b, p.w)]

    def f(s, sc, ls, lsc):
        lg = (a - 1) * ls + (c - a - 1) * lsc
        for b, w in logs:
            lg = lg - b * np.log1p(-w * s)
        return np.exp(lg)

    val = tanh_sinh(f, level=level)
    return val * gamma_ratio([c], [a, c - a])


def toscano_rhs(d: int, b: Sequence[complex], c: complex, w: Sequence[complex]) -> complex:
    """Right side of Toscano's inversion for the Lauricella polynomial F_D(-d; b; c; w)."""
    b = [complex(x) for x in b]
    w = [complex(x) for x in w]
    c = complex(c)
    N = len(w)
    bN, wN = b[-1], w[-1]
    poch = 1.0 + 0j
    for k in range(d):
        poch *= (bN + k) / (c + k)
    new_b = tuple(b[:-1]) + (1 - d - c,)
    new_w = tuple(x / wN for x in w[:-1]) + (1 / wN,)
    inner = lauricella_polynomial(-d, new_b, 1 - d - bN, new_w)
    return (-wN) ** d * poch * inner


def lauricella_polynomial(a: int, b: Sequence[complex], c: complex, w: Sequence[complex]) -> complex:
    """F_D at a nonpositive integer a: a finite sum, valid for any w."""
    if a > 0 or a != int(a):
        raise ValueError("a must be a nonpositive integer")
    d = -int(a)
    m = d + 1
    h = _homogeneous_coeffs([complex(x) for x in b], [complex(x) for x in w], m)
    total = 0j
    ratio = 1.0 + 0j
    for k in range(m):
        total += ratio * h[k]
        ratio *= (a + k) / (complex(c) + k)
    return total


# --- double exponential quadrature ----------------------------------------


@lru_cache(maxsize=16)
def _ts_nodes(level: int):
    h = 2.0 ** (-level)
    tmax = 6.5
    t = np.arange(-int(tmax / h), int(tmax / h) + 1) * h
    u = 0.5 * np.pi * np.sinh(t)
    # s = 1/(1+e^{-2u}), 1 - s = 1/(1+e^{2u}); logs computed without cancellation
    ls = -np.logaddexp(0.0, -2 * u)
    lsc = -np.logaddexp(0.0, 2 * u)
    s = np.exp(ls)
    sc = np.exp(lsc)
    # ds/dt = (pi/2) cosh t / (2 cosh^2 u) = (pi/2) cosh t * s * (1 - s) * 2
    lw = np.log(h * np.pi * np.cosh(t)) + ls + lsc
    return s, sc, ls, lsc, lw


def tanh_sinh(f: Callable, level: int | None = None, tol: float = 1e-13, max_level: int = 9) -> complex:
    """Integral of f over [0, 1] by the tanh-sinh rule.

    ``f(s, 1-s, log s, log(1-s))`` is vectorized; passing the complement and the
    logs lets integrands with algebraic endpoint singularities avoid
    cancellation.  Without ``level`` the step is halved until two successive
    values agree to ``tol`` (relative).
    """
    def at(lv):
        s, sc, ls, lsc, lw = _ts_nodes(lv)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            vals = f(s, sc, ls, lsc) * np.exp(lw)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        return complex(np.sum(vals))

    if level is not None:
        return at(level)
    prev = at(3)
    for lv in range(4, max_level + 1):
        cur = at(lv)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise OracleNonConvergence("tanh-sinh quadrature did not converge")


# --- twisted periods -------------------------------------------------------


@dataclass(frozen=True)
class PeriodParams:
    """Twisted-period inputs: torus weights, kappa_1..kappa_n and z.

    ``log_kappa`` fixes the branch of log kappa_j (default: principal);
    ``log_kappa0`` is log kappa_0 and only enters the overall prefactor.
    """

    n: int
    alpha1: complex
    alpha2: complex
    kappa: tuple
    z: complex
    log_kappa: tuple | None = None
    log_kappa0: complex = 0j

    @classmethod
    def from_geometry(cls, geo, kappa, z, log_kappa=None, log_kappa0=0j):
        return cls(geo.n, geo.alpha1, geo.alpha2, tuple(complex(k) for k in kappa), complex(z),
                   None if log_kappa is None else tuple(complex(x) for x in log_kappa),
                   complex(log_kappa0))

    @property
    def a(self) -> complex:
        return (self.n + 1) * self.alpha1 / self.z

    @property
    def b(self) -> complex:
        return (self.alpha1 + self.alpha2) / self.z

    def logs(self) -> np.ndarray:
        if self.log_kappa is not None:
            return np.array(self.log_kappa, dtype=complex)
        return np.log(np.array(self.kappa, dtype=complex))

    def log_prefactor(self) -> complex:
        # prod_{j=0}^n kappa_j^(alpha1/z)
        return self.log_kappa0 * self.alpha1 / self.z + self.alpha1 / self.z * self.logs().sum()


def _period_variables(pp: PeriodParams, i: int):
    """Lauricella variables and the kappa_i^(-a) log factor for Pi_i."""
    n = pp.n
    kap = np.array(pp.kappa, dtype=complex)
    # the puncture mapped to s = 1 is the Euler kernel (1-s)^(c-a-1) itself
    if i == n + 1:
        return list(kap), 0j
    ki = kap[i - 1]
    ws = [1 / ki] + [kap[k] / ki for k in range(n) if k != i - 1]
    return ws, -pp.a * pp.logs()[i - 1]


def twisted_period(pp: PeriodParams, i: int, method: str = "auto", tol: float = 1e-14) -> complex:
    """Pi_i as Beta(a, 1-b) times a Lauricella function, or by quadrature.

    ``method`` is "series", "quadrature" or "auto" (series when the Lauricella
    arguments are reachable, quadrature otherwise).
    """
    n = pp.n
    if not 1 <= i <= n + 1:
        raise ValueError(f"period index {i} outside 1..{n + 1}")
    if method == "quadrature":
        return twisted_period_quadrature(pp, i)
    a, b = pp.a, pp.b
    ws, lk = _period_variables(pp, i)
    try:
        fd = lauricella_fd(FDParams(a, tuple([b] * len(ws)), 1 + a - b, tuple(ws)), tol=tol)
    except (DomainNotCovered, NearSingularPoint):
        if method == "series":
            raise
        return twisted_period_quadrature(pp, i)
    beta = gamma_ratio([a, 1 - b], [1 + a - b])
    return complex(np.exp(pp.log_prefactor() + lk) * beta * fd)


def twisted_period_quadrature(pp: PeriodParams, i: int, level: int | None = None) -> complex:
    """Euler integral of lambda^(1/z) dq/q over the segment [0, 1/kappa_i].

    Returns the plain line integral, without the z*a normalization of the
    Pochhammer-cycle definition (the two differ by that constant only).
    """
    a, b = pp.a, pp.b
    if not (a.real > 0 and b.real < 1):
        raise DomainNotCovered("quadrature route needs Re a > 0 and Re b < 1")
    ws, lk = _period_variables(pp, i)
    # after q = s/kappa_i the punctures sit at s = 1/w for each variable w
    for w in ws:
        p = 1 / w
        # distance from the puncture to the segment [0, 1]
        t = min(max(p.real, 0.0), 1.0)
        if abs(p - t) < 1e-6:
            raise SegmentHitsPuncture(f"puncture at s = {p} lies on the integration segment")

    def f(s, sc, ls, lsc):
        lg = (a - 1) * ls - b * lsc
        for w in ws:
            lg = lg - b * np.log1p(-w * s)
        return np.exp(lg)

    val = tanh_sinh(f, level=level)
    return complex(np.exp(pp.log_prefactor() + lk) * val)


def period_integral(pp: PeriodParams, i: int, weight: Callable | None = None, level: int | None = None) -> complex:
    """Line integral of weight lambda^(1/z) dq/q over [0, 1/kappa_i], same prefactor as Pi_i.

    ``weight(q, sc)`` is vectorized; sc = 1 - s is the exact complement of the
    rescaled variable, so 1 - kappa_i q can be formed without cancellation at
    the far endpoint.  With no weight this is Pi_i.
    """
    if weight is None:
        return twisted_period_quadrature(pp, i, level)
    a, b = pp.a, pp.b
    if not (a.real > 0 and b.real < 1):
        raise DomainNotCovered("quadrature route needs Re a > 0 and Re b < 1")
    n = pp.n
    ws, lk = _period_variables(pp, i)
    scale = 1.0 if i == n + 1 else 1 / pp.kappa[i - 1]

    def f(s, sc, ls, lsc):
        lg = (a - 1) * ls - b * lsc
        for w in ws:
            lg = lg - b * np.log1p(-w * s)
        return np.exp(lg) * weight(s * scale, sc)

    val = tanh_sinh(f, level=level)
    return complex(np.exp(pp.log_prefactor() + lk) * val)


# --- Bernoulli polynomials --------------------------------------------------


@lru_cache(maxsize=None)
def bernoulli_number(k: int):
    """B_k with B_1 = -1/2, as an exact Fraction."""
    B = [Fraction(1)]
    for m in range(1, k + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / Fraction(m + 1))
    return B[k]


def bernoulli_poly(k: int, x: complex) -> complex:
    """B_k(x) = sum_j C(k, j) B_j x^(k-j)."""
    if k < 0 or k > 30:
        raise ValueError("bernoulli_poly supports 0 <= k <= 30")
    x = complex(x)
    return sum(math.comb(k, j) * float(bernoulli_number(j)) * x ** (k - j) for j in range(k + 1))
