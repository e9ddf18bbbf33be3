"""Laurent polynomials in z, small dense complex matrices and polynomial roots."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateLeadingCoefficient, IllConditioned, SingularMatrix


@dataclass(frozen=True)
class LaurentZ:
    """Finite Laurent polynomial sum_k coeffs[k] z^(lo+k).

    Construct through ``LaurentZ.make`` to get a normalized instance (zero
    leading and trailing coefficients stripped).
    """

    lo: int
    coeffs: tuple

    @classmethod
    def make(cls, lo: int, coeffs: Iterable[complex]) -> "LaurentZ":
        c = [complex(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        start = 0
        while start < len(c) and c[start] == 0:
            start += 1
        c = c[start:]
        if not c:
            return cls(0, ())
        return cls(lo + start, tuple(c))

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "LaurentZ":
        return cls.make(k, [c])

    @classmethod
    def constant(cls, c: complex) -> "LaurentZ":
        return cls.make(0, [c])

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> complex:
        j = k - self.lo
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0j

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if not self.coeffs:
            return np.zeros_like(z)
        # Horner in z, then shift by z^lo
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc * z ** self.lo

    def __add__(self, other: "LaurentZ") -> "LaurentZ":
        if not isinstance(other, LaurentZ):
            other = LaurentZ.constant(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return LaurentZ.make(lo, [self.coeff(k) + other.coeff(k) for k in range(lo, hi + 1)])

    __radd__ = __add__

    def __neg__(self) -> "LaurentZ":
        return LaurentZ(self.lo, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LaurentZ") -> "LaurentZ":
        if not isinstance(other, LaurentZ):
            other = LaurentZ.constant(other)
        return self + (-other)

    def __mul__(self, other) -> "LaurentZ":
        if isinstance(other, LaurentZ):
            return laurent_mul(self, other)
        return LaurentZ.make(self.lo, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def truncate(self, k_max: int) -> "LaurentZ":
        """Drop every term of degree above k_max."""
        if self.is_zero() or self.lo > k_max:
            return LaurentZ(0, ())
        return LaurentZ.make(self.lo, self.coeffs[: k_max - self.lo + 1])


def laurent_mul(p: LaurentZ, q: LaurentZ) -> LaurentZ:
    """Exact product; the degree bounds add."""
    if p.is_zero() or q.is_zero():
        return LaurentZ(0, ())
    c = np.convolve(np.array(p.coeffs, dtype=complex), np.array(q.coeffs, dtype=complex))
    return LaurentZ.make(p.lo + q.lo, c)


def laurent_exp(p: LaurentZ, k_max: int) -> LaurentZ:
    """exp(p) truncated at z^k_max, for p without non-positive powers."""
    if p.is_zero():
        return LaurentZ.constant(1.0)
    if p.lo < 1:
        raise ValueError("laurent_exp needs a series vanishing at z = 0")
    # exp(p) = sum p^m/m!, and p^m starts at z^(m*lo)
    out = LaurentZ.constant(1.0)
    term = LaurentZ.constant(1.0)
    m = 1
    while m * p.lo <= k_max:
        term = (term * p).truncate(k_max) * (1.0 / m)
        out = out + term
        m += 1
    return out.truncate(k_max)


def as_cmatrix(m) -> np.ndarray:
    """Validate a square finite complex matrix and return it as an array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def matrix_inverse(m, max_cond: float = 1e12) -> np.ndarray:
    a = as_cmatrix(m)
    scale = np.abs(a).max()
    if scale == 0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        # an exactly zero pivot is reported as SingularMatrix below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    if np.abs(np.diag(lu)).min() < 1e-13 * scale:
        raise SingularMatrix("pivot below 1e-13 * max|entry|")
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > max_cond:
        raise IllConditioned(f"condition number {cond:.3g} exceeds {max_cond:.1g}")
    return scipy.linalg.lu_solve((lu, piv), np.eye(a.shape[0], dtype=complex))


def poly_eval(coeffs: Sequence[complex], z):
    """Evaluate a polynomial given highest-degree-first coefficients."""
    return np.polyval(np.asarray(coeffs, dtype=complex), z)


def poly_roots(coeffs: Sequence[complex]) -> np.ndarray:
    """All roots of sum coeffs[k] z^(deg-k) (highest degree first).

    Companion-matrix eigenvalues followed by one Newton step per root.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0:
        raise DegenerateLeadingCoefficient("empty coefficient list")
    scale = np.abs(c).max()
    if scale == 0 or abs(c[0]) <= 1e-13 * scale:
        raise DegenerateLeadingCoefficient("leading coefficient is negligible")
    deg = c.size - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    monic = c / c[0]
    comp = np.zeros((deg, deg), dtype=complex)
    comp[0, :] = -monic[1:]
    comp[1:, :-1] = np.eye(deg - 1)
    roots = np.linalg.eigvals(comp)
    dc = np.polyder(c)
    out = []
    for r in roots:
        d = np.polyval(dc, r)
        if d != 0:
            step = np.polyval(c, r) / d
            # a multiple root makes Newton unreliable; keep the eigenvalue then
            if abs(step) < 1e-3 * (1 + abs(r)):
                r = r - step
        out.append(r)
    return np.array(out, dtype=complex)
