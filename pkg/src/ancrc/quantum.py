"""Small quantum cohomology of the resolution and the orbifold, J-functions
from the twisted periods, and the flatness check of the quantum D-module."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crc import matrix_A, matrix_B_inverse, u_limit
from .errors import PoleInQuantumSum
from .geometry import (
    DIVISOR,
    FIXED,
    TWISTED,
    AnGeometry,
    CohVector,
    atiyah_bott_matrix,
    pairing_matrix,
    triple_intersection_Y,
)
from .mirror import HurwitzPoint
from .series import matrix_inverse
from .special import PeriodParams, period_integral, twisted_period


@dataclass(frozen=True)
class QuantumPoint:
    """Point t_1..t_N of the small phase space of Y (t_N multiplies the unit)."""

    geo: AnGeometry
    t: tuple

    def __post_init__(self):
        t = tuple(complex(x) for x in self.t)
        if len(t) == self.geo.n:
            t = t + (0j,)
        if len(t) != self.geo.N:
            raise ValueError(f"expected {self.geo.N} coordinates, got {len(t)}")
        object.__setattr__(self, "t", t)

    def chain_exp(self, l: int, m: int) -> complex:
        """exp(t_l + ... + t_m) for 1 <= l <= m <= n."""
        return complex(np.exp(sum(self.t[l - 1:m])))

    def hurwitz(self) -> HurwitzPoint:
        return HurwitzPoint.from_t(self.geo, self.t)

    def shifted(self, i: int, h: complex) -> "QuantumPoint":
        t = list(self.t)
        t[i - 1] += h
        return QuantumPoint(self.geo, tuple(t))


def three_point_Y(qp: QuantumPoint, i: int, j: int, k: int) -> complex:
    """<phi_i, phi_j, phi_k> at qp: classical triple intersection plus degree sums.

    Insertions of the unit carry no quantum correction.
    """
    geo = qp.geo
    i, j, k = sorted((i, j, k))
    cl = triple_intersection_Y(geo, i, j, k)
    if k == geo.N:
        return cl
    q = 0j
    for l in range(1, i + 1):
        for m in range(k, geo.n + 1):
            e = qp.chain_exp(l, m)
            if abs(1 - e) < 1e-12:
                raise PoleInQuantumSum(f"exp(t_{l} + ... + t_{m}) = 1")
            q += e / (1 - e)
    return cl - q


def structure_constants_Y(qp: QuantumPoint) -> np.ndarray:
    """C[i, j, k] with phi_i o phi_j = sum_k C[i, j, k] phi_k (divisor basis)."""
    N = qp.geo.N
    c = np.zeros((N, N, N), dtype=complex)
    for i in range(1, N + 1):
        for j in range(i, N + 1):
            for k in range(j, N + 1):
                v = three_point_Y(qp, i, j, k)
                for p in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                    c[p[0] - 1, p[1] - 1, p[2] - 1] = v
    eta = divisor_pairing(qp.geo)
    return np.einsum("ijm,mk->ijk", c, matrix_inverse(eta))


def divisor_pairing(geo: AnGeometry) -> np.ndarray:
    N = geo.N
    return np.array([[triple_intersection_Y(geo, i, j, N) for j in range(1, N + 1)] for i in range(1, N + 1)])


def multiplication_matrix_Y(qp: QuantumPoint, i: int, basis: str = DIVISOR) -> np.ndarray:
    """Matrix of phi_i o (.) acting on coordinate vectors in the given basis."""
    C = structure_constants_Y(qp)
    M = C[i - 1].T
    if basis == DIVISOR:
        return M
    if basis == FIXED:
        AB = atiyah_bott_matrix(qp.geo)
        return AB @ M @ matrix_inverse(AB)
    raise ValueError(f"unsupported basis {basis!r}")


def x_to_t(geo: AnGeometry, x, string_shift: bool = True) -> tuple:
    """Affine change of variables from orbifold coordinates x_1..x_N to t_1..t_N.

    t_i = 2 pi i/N + sum_k omega^(-ik)(omega^(k/2) - omega^(-k/2))/N x_k for i <= n
    and t_N = x_N, plus 2 pi i alpha1 with the string shift.
    """
    N = geo.N
    x = np.asarray(x, dtype=complex)
    if x.size != N:
        raise ValueError(f"expected {N} orbifold coordinates")
    t = []
    for i in range(1, N):
        acc = 2j * np.pi / N
        for k in range(1, N):
            acc += geo.om(-i * k) * (geo.om(k / 2) - geo.om(-k / 2)) / N * x[k - 1]
        t.append(acc)
    t.append(x[N - 1] + (2j * np.pi * geo.alpha1 if string_shift else 0))
    return tuple(t)


def hurwitz_from_x(geo: AnGeometry, x) -> HurwitzPoint:
    return HurwitzPoint.from_t(geo, x_to_t(geo, x))


def j_function_X(geo: AnGeometry, x, z: complex, method: str = "auto") -> np.ndarray:
    return j_function(geo, hurwitz_from_x(geo, x), z, "X", method)


def quantum_product(geo: AnGeometry, point, u: CohVector, v: CohVector, side: str = "Y") -> CohVector:
    """u o v at a point of the given side (t-coordinates for Y, x-coordinates for X).

    The orbifold product is the pullback of the resolution product along the
    large-z limit of U and the affine change of variables.
    """
    if side == "Y":
        qp = point if isinstance(point, QuantumPoint) else QuantumPoint(geo, tuple(point))
        uu = _to_divisor(geo, u)
        vv = _to_divisor(geo, v)
        C = structure_constants_Y(qp)
        w = np.einsum("i,j,ijk->k", uu, vv, C)
        return CohVector(DIVISOR, tuple(w))
    if side == "X":
        if u.basis != TWISTED or v.basis != TWISTED:
            raise ValueError("orbifold product takes twisted-sector vectors")
        qp = QuantumPoint(geo, x_to_t(geo, point))
        U0 = u_limit(geo)
        C = structure_constants_Y(qp)
        w = np.einsum("i,j,ijk->k", U0 @ u.array(), U0 @ v.array(), C)
        return CohVector(TWISTED, tuple(matrix_inverse(U0) @ w))
    raise ValueError(f"side must be 'X' or 'Y', got {side!r}")


def _to_divisor(geo: AnGeometry, v: CohVector) -> np.ndarray:
    if v.basis == DIVISOR:
        return v.array()
    if v.basis == FIXED:
        return matrix_inverse(atiyah_bott_matrix(geo)) @ v.array()
    raise ValueError("resolution product takes divisor or fixed-point vectors")


def segment_clearance(hp: HurwitzPoint) -> float:
    """Smallest distance from a puncture to an integration segment, in the rescaled variable.

    Pi_i integrates over q in [0, 1/kappa_i]; after q = s/kappa_i the other
    punctures sit at kappa_i/kappa_k and kappa_i.  Quadrature degrades as this
    distance shrinks.
    """
    kap = list(hp.kappa) + [1.0 + 0j]
    worst = np.inf
    for i, ki in enumerate(kap):
        for k, kk in enumerate(kap):
            if k != i:
                p = ki / kk
                worst = min(worst, abs(p - min(max(p.real, 0.0), 1.0)))
    return float(worst)


def periods(geo: AnGeometry, hp: HurwitzPoint, z: complex, method: str = "auto") -> np.ndarray:
    lk0, lk = hp.logs()
    pp = PeriodParams.from_geometry(geo, hp.kappa, z, log_kappa=lk, log_kappa0=lk0)
    return np.array([twisted_period(pp, i, method=method) for i in range(1, geo.N + 1)])


def j_function(geo: AnGeometry, hp: HurwitzPoint, z: complex, side: str = "Y", method: str = "auto") -> np.ndarray:
    """J from the twisted periods: A Pi on the resolution, B^-1 Pi on the orbifold."""
    P = periods(geo, hp, z, method)
    if side == "Y":
        return matrix_A(geo, z) @ P
    if side == "X":
        return matrix_B_inverse(geo, z) @ P
    raise ValueError(f"side must be 'X' or 'Y', got {side!r}")


def j_function_Y(qp: QuantumPoint, z: complex, method: str = "auto") -> np.ndarray:
    return j_function(qp.geo, qp.hurwitz(), z, "Y", method)


def period_gradient(geo: AnGeometry, hp: HurwitzPoint, z: complex) -> np.ndarray:
    """dP[b, j] = dPi_j/dt_b, from period integrals weighted by the t-fields.

    Differentiating under the integral gives (1/z) int X_b lambda^(1/z) dq/q;
    the moving endpoints are zeros of the integrand when Re b < 0.
    """
    lk0, lk = hp.logs()
    pp = PeriodParams.from_geometry(geo, hp.kappa, z, log_kappa=lk, log_kappa0=lk0)
    N = geo.N
    dP = np.zeros((N, N), dtype=complex)
    for b in range(1, N + 1):
        for j in range(1, N + 1):
            dP[b - 1, j - 1] = period_integral(pp, j, weight=_t_weight(hp, b, j)) / complex(z)
    return dP


def dt_dx(geo: AnGeometry) -> np.ndarray:
    """Jacobian T[a, k] = dt_a/dx_k of the affine change of variables."""
    N = geo.N
    T = np.zeros((N, N), dtype=complex)
    for i in range(1, N):
        for k in range(1, N):
            T[i - 1, k - 1] = geo.om(-i * k) * (geo.om(k / 2) - geo.om(-k / 2)) / N
    T[N - 1, N - 1] = 1.0
    return T


def period_x_gradient(geo: AnGeometry, x, z: complex) -> np.ndarray:
    """D[j, k] = dPi_j/dx_k at orbifold coordinates x."""
    dP = period_gradient(geo, hurwitz_from_x(geo, x), z)
    return (dt_dx(geo).T @ dP).T


def j_gradient(qp: QuantumPoint, z: complex, side: str = "Y") -> np.ndarray:
    """G[b, j] = dJ_j/dt_b."""
    dP = period_gradient(qp.geo, qp.hurwitz(), z)
    M = matrix_A(qp.geo, z) if side == "Y" else matrix_B_inverse(qp.geo, z)
    return dP @ M.T


def _t_weight(hp: HurwitzPoint, b: int, i: int):
    """t-field d log lambda / dt_b on the integration segment of Pi_i."""
    geo = hp.geo
    N = geo.N

    def w(q, sc):
        if b == N:
            return np.ones_like(q)
        out = b * geo.alpha1 + np.zeros_like(q)
        for j in range(1, b + 1):
            kq = hp.kappa[j - 1] * q
            # on the segment of Pi_j, 1 - kappa_j q is exactly the complement
            den = sc if j == i else 1 - kq
            out = out + geo.s * kq / den
        return out

    return w


def flat_sections(qp: QuantumPoint, z: complex) -> np.ndarray:
    """Columns: eta^-1 grad J_j, the cohomology-valued flat sections (divisor basis)."""
    return matrix_inverse(divisor_pairing(qp.geo)) @ j_gradient(qp, z)


def qde_flatness_residual(qp: QuantumPoint, z: complex, i: int, h: float = 1e-5) -> float:
    """||z d xi/dt_i - phi_i o xi|| / ||xi|| over the flat sections xi of the J components.

    Each J component is a scalar solution; its gradient raised by the pairing
    is a horizontal section of the Dubrovin connection.  The t_i derivative is
    a central difference of step h.
    """
    xi = flat_sections(qp, z)
    xp = flat_sections(qp.shifted(i, h), z)
    xm = flat_sections(qp.shifted(i, -h), z)
    lhs = complex(z) * (xp - xm) / (2 * h)
    rhs = multiplication_matrix_Y(qp, i) @ xi
    return float(np.abs(lhs - rhs).max() / np.abs(xi).max())
