"""One-dimensional Landau-Ginzburg mirror of the resolved A_n geometry.

lambda(q) = kappa_0^a1 prod_j kappa_j^a1 q^(N a1) / ((1-q)^s prod_k (1-kappa_k q)^s),
primitive form dq/(s q).  Vector fields are logarithmic derivatives of log lambda:
kappa_j d/dkappa_j gives alpha1 + s kappa_j q/(1 - kappa_j q); the unit direction
(index 0, alias N) gives 1.  Correlators are residues of
X_a X_b X_c / (s^2 q W) dq with W = q d(log lambda)/dq.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import AtPuncture, DegenerateCriticalPoints, IndexOutOfRange
from .geometry import AnGeometry
from .series import matrix_inverse, poly_roots


@dataclass(frozen=True)
class HurwitzPoint:
    geo: AnGeometry
    kappa0: complex
    kappa: tuple
    log_kappa0: complex | None = None
    log_kappa: tuple | None = None

    def __post_init__(self):
        kap = tuple(complex(k) for k in self.kappa)
        object.__setattr__(self, "kappa", kap)
        if len(kap) != self.geo.n:
            raise ValueError(f"expected {self.geo.n} kappa values, got {len(kap)}")
        pts = list(kap) + [1.0]
        if self.kappa0 == 0 or any(k == 0 for k in kap):
            raise ValueError("kappa values must be nonzero")
        for i in range(len(pts)):
            for j in range(i):
                if abs(pts[i] - pts[j]) < 1e-14 * max(1.0, abs(pts[i])):
                    raise ValueError("kappa values must be pairwise distinct and differ from 1")

    @classmethod
    def from_t(cls, geo: AnGeometry, t) -> "HurwitzPoint":
        """Flat coordinates t_1..t_N of the resolution: kappa_j = exp(t_j + ... + t_n),
        log kappa_0 = t_N / alpha1."""
        t = np.asarray(t, dtype=complex)
        if t.size == geo.n:
            t = np.append(t, 0j)
        n = geo.n
        logk = np.array([t[j:n].sum() for j in range(n)])
        lk0 = t[n] / geo.alpha1
        return cls(geo, np.exp(lk0), tuple(np.exp(logk)), lk0, tuple(logk))

    @property
    def n(self) -> int:
        return self.geo.n

    def kappas_ext(self) -> np.ndarray:
        """kappa_1..kappa_n followed by kappa_N = 1 (the puncture at q = 1)."""
        return np.array(list(self.kappa) + [1.0], dtype=complex)

    def logs(self) -> tuple[complex, np.ndarray]:
        lk0 = np.log(self.kappa0) if self.log_kappa0 is None else self.log_kappa0
        lk = np.log(np.array(self.kappa)) if self.log_kappa is None else np.array(self.log_kappa)
        return complex(lk0), lk

    def punctures(self) -> list[complex]:
        return [0j, 1.0 + 0j] + [1 / k for k in self.kappa]


def _check_q(hp: HurwitzPoint, q):
    q = np.asarray(q, dtype=complex)
    for p in hp.punctures():
        if np.any(np.abs(q - p) < 1e-14 * max(1.0, abs(p))):
            raise AtPuncture(f"q = {p} is a puncture of the superpotential")
    return q


def log_superpotential(hp: HurwitzPoint, q):
    """log lambda(q) with principal branches factor by factor."""
    q = _check_q(hp, q)
    g = hp.geo
    lk0, lk = hp.logs()
    out = g.alpha1 * (lk0 + lk.sum()) + g.N * g.alpha1 * np.log(q) - g.s * np.log(1 - q)
    for k in hp.kappa:
        out = out - g.s * np.log(1 - k * q)
    return out


def dlog_superpotential(hp: HurwitzPoint, q):
    """d(log lambda)/dq = N alpha1 / q + s/(1-q) + s sum_k kappa_k/(1 - kappa_k q)."""
    q = _check_q(hp, q)
    g = hp.geo
    out = g.N * g.alpha1 / q + g.s / (1 - q)
    for k in hp.kappa:
        out = out + g.s * k / (1 - k * q)
    return out


def W(hp: HurwitzPoint, q):
    """q d(log lambda)/dq, written without the 1/q pole."""
    q = np.asarray(q, dtype=complex)
    g = hp.geo
    out = g.N * g.alpha1 + g.s * q / (1 - q)
    for k in hp.kappa:
        out = out + g.s * k * q / (1 - k * q)
    return out


def _idx(hp: HurwitzPoint, i: int) -> int:
    N = hp.geo.N
    if i == 0:
        return N
    if not 1 <= i <= N:
        raise IndexOutOfRange(f"index {i} outside 0..{N}")
    return i


def kappa_field(hp: HurwitzPoint, j: int, q):
    """kappa_j d(log lambda)/d kappa_j for j = 1..n; the unit field (j = 0 or N) is 1."""
    j = _idx(hp, j)
    q = np.asarray(q, dtype=complex)
    g = hp.geo
    if j == g.N:
        return np.ones_like(q)
    k = hp.kappa[j - 1]
    return g.alpha1 + g.s * k * q / (1 - k * q)


def t_field(hp: HurwitzPoint, i: int, q):
    """d(log lambda)/dt_i; t_i enters kappa_1..kappa_i, t_N only kappa_0."""
    i = _idx(hp, i)
    q = np.asarray(q, dtype=complex)
    if i == hp.geo.N:
        return np.ones_like(q)
    return sum(kappa_field(hp, j, q) for j in range(1, i + 1))


# --- residues -----------------------------------------------------------------


def residue_closed_form(hp: HurwitzPoint, i: int, j: int, k: int, pole) -> complex:
    """Residue of the kappa-frame three-point integrand at one pole.

    ``pole`` is an index l in 1..n (the puncture 1/kappa_l), "one" (q = 1),
    "zero" or "infinity".  Indices 1..n are kappa_l d/dkappa_l, 0 or N the unit.
    """
    g = hp.geo
    N, s, a1, a2 = g.N, g.s, g.alpha1, g.alpha2
    idx = [_idx(hp, x) for x in (i, j, k)]
    units = sum(1 for x in idx if x == N)
    if pole == "zero":
        return complex(a1 ** (2 - units) / (N * s ** 2))
    if pole == "infinity":
        return complex(-((-a2) ** (2 - units)) / (N * s ** 2))
    if pole == "one":
        return 0j
    l = int(pole)
    if not 1 <= l <= g.n:
        raise IndexOutOfRange(f"pole index {l} outside 1..{g.n}")
    hits = sum(1 for x in idx if x == l)
    if hits < 2:
        return 0j
    kap = hp.kappas_ext()
    if hits == 3:
        tot = ((g.n - 1) * a1 + a2) / s
        for m in range(1, N + 1):
            if m != l:
                tot += kap[m - 1] / (kap[l - 1] - kap[m - 1])
        return complex(tot)
    other = [x for x in idx if x != l][0]
    if other == N:
        return complex(-1 / s)
    return complex(kap[l - 1] / (kap[other - 1] - kap[l - 1]) + a2 / s)


def residue_correlator(hp: HurwitzPoint, i: int, j: int, k: int, pole=None) -> complex:
    """Closed-form residue at ``pole``, or summed over all poles when pole is None."""
    if pole is not None:
        return residue_closed_form(hp, i, j, k, pole)
    poles = ["zero", "infinity", "one"] + list(range(1, hp.geo.n + 1))
    return sum(residue_closed_form(hp, i, j, k, p) for p in poles)


def _contour(f, c: complex, r: float, m: int = 64) -> complex:
    th = 2 * np.pi * np.arange(m) / m
    e = np.exp(1j * th)
    return complex(np.mean(f(c + r * e) * r * e))


def _pole_location(hp: HurwitzPoint, pole) -> complex | None:
    if pole == "zero":
        return 0j
    if pole == "one":
        return 1.0 + 0j
    if pole == "infinity":
        return None
    return 1 / hp.kappa[int(pole) - 1]


def _contour_radius(hp: HurwitzPoint, c: complex) -> float:
    """A third of the distance to the nearest other puncture or critical point."""
    others = [p for p in hp.punctures() if p != c] + list(critical_points(hp))
    return min(abs(c - p) for p in others) / 3


def contour_residue(hp: HurwitzPoint, f, pole, m: int = 64) -> complex:
    """Residue of f(q) dq at a puncture by the trapezoid rule on a small circle."""
    c = _pole_location(hp, pole)
    if c is None:
        # Res_inf f dq = residue at w = 0 of -f(1/w)/w^2 dw
        allp = hp.punctures() + list(critical_points(hp))
        R = 3 * max(abs(p) for p in allp) + 3
        return _contour(lambda w: -f(1 / w) / w ** 2, 0j, 1 / R, m)
    return _contour(f, c, _contour_radius(hp, c), m)


def correlator_integrand(hp: HurwitzPoint, fields):
    """q -> prod(fields)/(s^2 q W); each field is a callable of q."""
    s2 = hp.geo.s ** 2

    def f(q):
        num = np.ones_like(q)
        for X in fields:
            num = num * X(q)
        return num / (s2 * q * W(hp, q))

    return f


def residue_contour(hp: HurwitzPoint, i: int, j: int, k: int, pole, m: int = 64) -> complex:
    fs = [lambda q, a=a: kappa_field(hp, a, q) for a in (i, j, k)]
    return contour_residue(hp, correlator_integrand(hp, fs), pole, m)


def _all_poles(hp: HurwitzPoint):
    return ["zero", "one", "infinity"] + list(range(1, hp.geo.n + 1))


def metric_g(hp: HurwitzPoint, X, Y, frame: str = "t", m: int = 64) -> complex:
    """Residue pairing g(X, Y) summed over the punctures, by contours.

    X and Y are indices in the ``frame`` ("t" flat coordinates or "kappa").
    """
    fld = t_field if frame == "t" else kappa_field
    f = correlator_integrand(hp, [lambda q: fld(hp, X, q), lambda q: fld(hp, Y, q)])
    return sum(contour_residue(hp, f, p, m) for p in _all_poles(hp))


def three_point_t(hp: HurwitzPoint, i: int, j: int, k: int) -> complex:
    """Residue correlator of d/dt_i, d/dt_j, d/dt_k from the kappa-frame closed forms."""
    N = hp.geo.N

    def expand(a):
        a = _idx(hp, a)
        return [N] if a == N else list(range(1, a + 1))

    tot = 0j
    for x in expand(i):
        for y in expand(j):
            for z in expand(k):
                tot += residue_correlator(hp, x, y, z)
    return tot


# --- critical points and canonical coordinates ----------------------------------


def critical_polynomial(hp: HurwitzPoint, eps: complex = 1.0) -> np.ndarray:
    """Coefficients (highest first) of N a1 prod_j (1 - kappa_j q) + eps s sum_j kappa_j q prod_{l!=j}(1 - kappa_l q).

    Its roots are the critical points of log lambda; eps scales the s-terms and
    deforms them to the punctures 1/kappa_j at eps = 0.
    """
    g = hp.geo
    kap = hp.kappas_ext()
    lin = [np.array([-k, 1.0], dtype=complex) for k in kap]
    full = np.array([1.0], dtype=complex)
    for p in lin:
        full = np.polymul(full, p)
    acc = g.N * g.alpha1 * full
    for j in range(len(kap)):
        part = np.array([kap[j], 0.0], dtype=complex)
        for l, p in enumerate(lin):
            if l != j:
                part = np.polymul(part, p)
        acc = np.polyadd(acc, eps * g.s * part)
    return acc


def critical_points(hp: HurwitzPoint, steps: int = 32) -> np.ndarray:
    return _critical_points_cached(hp, steps).copy()


@lru_cache(maxsize=256)
def _critical_points_cached(hp: HurwitzPoint, steps: int) -> np.ndarray:
    """Critical points ordered so that q_i -> 1/kappa_i as the s-terms are switched off.

    Ordering is found by continuation in eps from ~0 to 1 with optimal
    nearest-neighbor matching at each step.
    """
    kap = hp.kappas_ext()
    # a geometric ramp near eps = 0 then linear steps
    eps_list = list(np.geomspace(1e-8, 1.0 / steps, 12)) + list(np.linspace(1.0 / steps, 1.0, steps)[1:])
    prev = 1 / kap
    for eps in eps_list:
        # roots in p = 1/q: the leading coefficient is then N alpha1, which stays
        # well conditioned when the kappa_j are small and widely spread
        r = _polish(hp, eps, 1 / poly_roots(critical_polynomial(hp, eps)[::-1]))
        cost = np.abs(prev[:, None] - r[None, :])
        _, col = linear_sum_assignment(cost)
        prev = r[col]
    return prev


def _polish(hp: HurwitzPoint, eps: complex, q: np.ndarray, steps: int = 3) -> np.ndarray:
    """Newton steps on N a1/q + eps s sum_j kappa_j/(1 - kappa_j q)."""
    g = hp.geo
    kap = hp.kappas_ext()
    q = q.astype(complex)
    for _ in range(steps):
        den = 1 - kap[None, :] * q[:, None]
        f = g.N * g.alpha1 / q + eps * g.s * (kap[None, :] / den).sum(axis=1)
        fp = -g.N * g.alpha1 / q ** 2 + eps * g.s * (kap[None, :] ** 2 / den ** 2).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / fp
        # non-finite steps (vanishing derivative) leave the root unpolished
        ok = np.isfinite(step) & (np.abs(step) < 0.1 * np.abs(q))
        q = np.where(ok, q - step, q)
    return q


@dataclass(frozen=True)
class CanonicalFrame:
    crit_q: tuple
    u: tuple
    delta: tuple


def canonical_frame(hp: HurwitzPoint, z: complex | None = None) -> CanonicalFrame:
    """Critical points, critical values u^i = log lambda(q_i) and norms Delta_i.

    Delta_i = g(d/du^i, d/du^i), with d/du^i obtained by inverting the Jacobian
    du^i/dt_a = (d log lambda / dt_a)(q_i).  Nothing here depends on z.
    """
    q = critical_points(hp)
    N = hp.geo.N
    dmin = min(abs(q[i] - q[j]) for i in range(N) for j in range(i))
    if dmin < 1e-8:
        raise DegenerateCriticalPoints(f"critical points collide (min distance {dmin:.2e})")
    u = log_superpotential(hp, q)
    J = np.array([[t_field(hp, a, qi) for a in range(1, N + 1)] for qi in q])
    G = metric_matrix(hp)
    Ji = matrix_inverse(J)
    Gu = Ji.T @ G @ Ji
    return CanonicalFrame(tuple(q), tuple(np.asarray(u)), tuple(np.diag(Gu)))


def metric_matrix(hp: HurwitzPoint) -> np.ndarray:
    N = hp.geo.N
    G = np.zeros((N, N), dtype=complex)
    for a in range(1, N + 1):
        for b in range(a, N + 1):
            G[a - 1, b - 1] = G[b - 1, a - 1] = metric_g(hp, a, b)
    return G


def delta_critical(hp: HurwitzPoint, q: complex) -> complex:
    """-1/(s^2 q W'(q)) at a critical point: minus the inverse residue there."""
    h = 1e-6 * max(1.0, abs(q))
    Wp = (W(hp, q + h) - W(hp, q - h)) / (2 * h)
    return complex(-1 / (hp.geo.s ** 2 * q * Wp))


def qcr_residual(hp: HurwitzPoint, q) -> np.ndarray:
    """|a/q + b sum_j kappa_j/(1 - kappa_j q)| scaled by z (z cancels)."""
    g = hp.geo
    q = np.asarray(q, dtype=complex)
    out = g.N * g.alpha1 / q
    for k in hp.kappas_ext():
        out = out + g.s * k / (1 - k * q)
    return np.abs(out)


def orbifold_point(geo: AnGeometry) -> HurwitzPoint:
    """kappa_j = omega^(-j) on the branch log kappa_j = 2 pi i (N - j)/N, log kappa_0 = 2 pi i.

    This is the image of x = 0 under the affine change of variables with the
    string shift t_N = x_N + 2 pi i alpha1; on it J^X(0, z) = z 1_N.
    """
    N = geo.N
    lk = tuple(2j * np.pi * (N - j) / N for j in range(1, N))
    return HurwitzPoint(geo, 1.0 + 0j, tuple(np.exp(lk)), 2j * np.pi, lk)


def u_orbifold_closed(geo: AnGeometry) -> np.ndarray:
    """Critical values at the orbifold point: a1 log a1 + a2 log(-a2) - s log(-s) + 2 pi i a1 (j - n/2)."""
    a1, a2, s = geo.alpha1, geo.alpha2, geo.s
    j = np.arange(1, geo.N + 1)
    return a1 * np.log(a1) + a2 * np.log(-a2) - s * np.log(-s) + 2j * np.pi * a1 * (j - geo.n / 2)


def lattice_coords(diff: complex, alpha1: complex, alpha2: complex, unit: complex = 1j * np.pi) -> np.ndarray:
    """Real (m1, m2) with diff = unit (m1 alpha1 + m2 alpha2); integral values mean a branch shift."""
    v1, v2 = unit * alpha1, unit * alpha2
    A = np.array([[v1.real, v2.real], [v1.imag, v2.imag]])
    return np.linalg.solve(A, np.array([diff.real, diff.imag]))
