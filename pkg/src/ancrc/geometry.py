"""Classical torus-equivariant data of [C^3/Z_{n+1}] and its crepant resolution.

Conventions: twisted sectors are k = 1..N (N = n+1) with the untwisted sector
last; divisors phi_1..phi_n plus phi_N = fundamental class; fixed points of
the resolution are P_1..P_N.  Index 0 is accepted as an alias of N wherever an
index names the unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BasisMismatch, GammaPole, IndexOutOfRange, NotGeneric, SineZero
from .special import log_gamma

TWISTED = "twisted"
FIXED = "fixed"
DIVISOR = "divisor"
_BASES = (TWISTED, FIXED, DIVISOR)


@dataclass(frozen=True)
class AnGeometry:
    n: int
    alpha1: complex
    alpha2: complex

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "alpha1", complex(self.alpha1))
        object.__setattr__(self, "alpha2", complex(self.alpha2))
        ws = [self.alpha1, self.alpha2, self.s]
        for i in range(1, self.N + 1):
            ws += [self.wminus(i), self.wplus(i)]
        if min(abs(w) for w in ws) == 0:
            raise NotGeneric("a torus weight or fixed-point weight vanishes")

    @property
    def N(self) -> int:
        return self.n + 1

    @property
    def s(self) -> complex:
        return self.alpha1 + self.alpha2

    @property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.N))

    def om(self, x) -> complex:
        """omega^x with the principal determination e^(2 pi i x / N)."""
        return complex(np.exp(2j * np.pi * x / self.N))

    def wminus(self, i: int) -> complex:
        return (i - 1) * self.alpha1 + (-self.n + i - 2) * self.alpha2

    def wplus(self, i: int) -> complex:
        return -i * self.alpha1 + (self.N - i) * self.alpha2

    def fixed_weights(self) -> np.ndarray:
        """Rows (w_i^-, w_i^+, alpha1 + alpha2) for i = 1..N."""
        return np.array([tangent_weights(self, i) for i in range(1, self.N + 1)])

    def scaled(self, lam: complex) -> "AnGeometry":
        return AnGeometry(self.n, lam * self.alpha1, lam * self.alpha2)


def _index(geo: AnGeometry, i: int, allow_zero: bool = True) -> int:
    if allow_zero and i == 0:
        return geo.N
    if not 1 <= i <= geo.N:
        raise IndexOutOfRange(f"index {i} outside 1..{geo.N}")
    return int(i)


def sample_geometry(rng: np.random.Generator, n: int, lo: float = 0.5, hi: float = 2.0,
                    min_weight: float = 0.05) -> AnGeometry:
    """Weights uniform in the annulus lo <= |alpha| <= hi, redrawn near resonances."""
    while True:
        r = rng.uniform(lo, hi, size=2)
        th = rng.uniform(0, 2 * np.pi, size=2)
        a1, a2 = r * np.exp(1j * th)
        try:
            geo = AnGeometry(n, a1, a2)
        except NotGeneric:
            continue
        ws = np.abs(geo.fixed_weights()).ravel()
        if ws.min() >= min_weight and abs(geo.alpha1) >= min_weight and abs(geo.alpha2) >= min_weight:
            return geo


@dataclass(frozen=True)
class CohVector:
    basis: str
    coords: tuple

    def __post_init__(self):
        if self.basis not in _BASES:
            raise BasisMismatch(f"unknown basis tag {self.basis!r}")
        object.__setattr__(self, "coords", tuple(complex(c) for c in self.coords))

    @classmethod
    def unit(cls, basis: str, N: int, k: int) -> "CohVector":
        v = [0j] * N
        v[(k - 1) % N] = 1.0
        return cls(basis, tuple(v))

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def __len__(self):
        return len(self.coords)


def tangent_weights(geo: AnGeometry, i: int) -> tuple[complex, complex, complex]:
    i = _index(geo, i, allow_zero=False)
    return geo.wminus(i), geo.wplus(i), geo.s


def atiyah_bott_matrix(geo: AnGeometry) -> np.ndarray:
    """Column j holds phi_j restricted to the fixed points P_1..P_N."""
    N = geo.N
    M = np.zeros((N, N), dtype=complex)
    for j in range(1, N + 1):
        for i in range(1, N + 1):
            if j == N:
                M[i - 1, j - 1] = 1.0
            elif i <= j:
                M[i - 1, j - 1] = (N - j) * geo.alpha2
            else:
                M[i - 1, j - 1] = j * geo.alpha1
    return M


def atiyah_bott(geo: AnGeometry, j: int) -> CohVector:
    j = _index(geo, j)
    return CohVector(FIXED, tuple(atiyah_bott_matrix(geo)[:, j - 1]))


def pairing_matrix(geo: AnGeometry, side: str) -> np.ndarray:
    """Gram matrix of the Poincare pairing: twisted-sector basis (X) or fixed points (Y)."""
    N = geo.N
    a1, a2, s = geo.alpha1, geo.alpha2, geo.s
    if side == "X":
        M = np.zeros((N, N), dtype=complex)
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                M[i - 1, j - 1] = ((i == N and j == N) + a1 * a2 * (i + j == N)) / (a1 * a2 * s * N)
        return M
    if side == "Y":
        return np.diag([1 / (geo.wminus(i) * geo.wplus(i) * s) for i in range(1, N + 1)])
    raise ValueError(f"side must be 'X' or 'Y', got {side!r}")


def to_fixed(geo: AnGeometry, v: CohVector) -> np.ndarray:
    if v.basis == FIXED:
        return v.array()
    if v.basis == DIVISOR:
        return atiyah_bott_matrix(geo) @ v.array()
    raise BasisMismatch("twisted-sector classes live on the orbifold side")


def pairing(geo: AnGeometry, side: str, u: CohVector, v: CohVector) -> complex:
    if len(u) != geo.N or len(v) != geo.N:
        raise BasisMismatch("vector length does not match n+1")
    if side == "X":
        if u.basis != TWISTED or v.basis != TWISTED:
            raise BasisMismatch("orbifold pairing takes twisted-sector vectors")
        return complex(u.array() @ pairing_matrix(geo, "X") @ v.array())
    if side == "Y":
        x, y = to_fixed(geo, u), to_fixed(geo, v)
        return complex(x @ pairing_matrix(geo, "Y") @ y)
    raise ValueError(f"side must be 'X' or 'Y', got {side!r}")


def triple_intersection_Y(geo: AnGeometry, i: int, j: int, k: int) -> complex:
    """Equivariant triple intersection of divisors phi_i, phi_j, phi_k on Y."""
    i, j, k = sorted(_index(geo, x) for x in (i, j, k))
    N, a1, a2, s = geo.N, geo.alpha1, geo.alpha2, geo.s
    if i == N:
        return 1 / (N * a1 * a2 * s)
    if j == N:
        return 0j
    if k == N:
        return -i * (N - j) / (N * s) + 0j
    return -(i * j * (N - k) * a1 + i * (N - j) * (N - k) * a2) / (N * s)


def triple_intersection_localization(geo: AnGeometry, i: int, j: int, k: int) -> complex:
    """Same triple intersection by summing restrictions over the fixed points."""
    M = atiyah_bott_matrix(geo)
    e = np.array([geo.wminus(p) * geo.wplus(p) * geo.s for p in range(1, geo.N + 1)])
    cols = [M[:, _index(geo, x) - 1] for x in (i, j, k)]
    return complex(np.sum(cols[0] * cols[1] * cols[2] / e))


def chern_characters(geo: AnGeometry, side: str, z: complex | None = None) -> np.ndarray:
    """Chern characters of the K-theory window, one column per bundle.

    X: entry (k, j) is omega^(jk) for sector k and bundle j (j = N trivial).
    Y: entry (i, j) is exp(2 pi i (N-j) alpha2) for i <= j and exp(2 pi i j alpha1)
    for i > j, with the weights divided by z when z is given.
    """
    N = geo.N
    if side == "X":
        return np.array([[geo.om(j * k) for j in range(1, N + 1)] for k in range(1, N + 1)])
    if side != "Y":
        raise ValueError(f"side must be 'X' or 'Y', got {side!r}")
    sc = 1.0 if z is None else 1 / complex(z)
    M = np.zeros((N, N), dtype=complex)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i <= j:
                M[i - 1, j - 1] = np.exp(2j * np.pi * (N - j) * geo.alpha2 * sc)
            else:
                M[i - 1, j - 1] = np.exp(2j * np.pi * j * geo.alpha1 * sc)
    return M


def _lg(x: complex) -> complex:
    try:
        return log_gamma(x, principal=False)
    except GammaPole as e:
        raise GammaPole(f"Gamma-class factor hits a pole: {e}") from None


def gamma_classes(geo: AnGeometry, side: str, z: complex) -> np.ndarray:
    """Homogenized Gamma-class coefficients per sector (X) or fixed point (Y).

    X, twisted k < N: Gamma(1+s/z) Gamma(k/N - alpha1/z) Gamma(1 - k/N - alpha2/z) / z;
    X, untwisted: Gamma(1+s/z) Gamma(1-alpha1/z) Gamma(1-alpha2/z);
    Y: Gamma(1+s/z) Gamma(1+w_i^+/z) Gamma(1+w_i^-/z).
    """
    z = complex(z)
    N, a1, a2, s = geo.N, geo.alpha1, geo.alpha2, geo.s
    out = np.zeros(N, dtype=complex)
    if side == "X":
        for k in range(1, N + 1):
            if k < N:
                lg = _lg(1 + s / z) + _lg(k / N - a1 / z) + _lg(1 - k / N - a2 / z) - np.log(z)
            else:
                lg = _lg(1 + s / z) + _lg(1 - a1 / z) + _lg(1 - a2 / z)
            out[k - 1] = np.exp(lg)
        return out
    if side == "Y":
        for i in range(1, N + 1):
            out[i - 1] = np.exp(_lg(1 + s / z) + _lg(1 + geo.wplus(i) / z) + _lg(1 + geo.wminus(i) / z))
        return out
    raise ValueError(f"side must be 'X' or 'Y', got {side!r}")


# --- Lagrangian legs ----------------------------------------------------------

EFFECTIVE = "effective"
INEFFECTIVE = "ineffective"


@dataclass(frozen=True)
class DiskConfig:
    """Aganagic-Vafa leg: torus weights (w1, w2, w3) along it and the orbifold
    representation weights (m1, m2, m3); n_e = N / gcd(m1, N)."""

    leg: str
    N: int
    w: tuple
    m: tuple

    def __post_init__(self):
        if abs(sum(self.w)) > 1e-12 * max(1.0, max(abs(x) for x in self.w)):
            raise ValueError("leg weights must sum to zero")

    @property
    def n_e(self) -> int:
        return self.N // np.gcd(int(self.m[0]), self.N)

    @classmethod
    def for_leg(cls, geo: AnGeometry, leg: str) -> "DiskConfig":
        a1, a2, s = geo.alpha1, geo.alpha2, geo.s
        if leg == INEFFECTIVE:
            return cls(leg, geo.N, (s, -a1, -a2), (0, -1, 1))
        if leg == EFFECTIVE:
            return cls(leg, geo.N, (-a1, -a2, s), (-1, 1, 0))
        raise ValueError(f"unknown leg {leg!r}")


def frac(x: float) -> float:
    return x - np.floor(x)


def theta_entries(geo: AnGeometry, dc: DiskConfig, side: str, z: complex) -> np.ndarray:
    """Diagonal of Theta = z^(3/2) pi / (w1 N_loc sin(pi(<k m3/N> - w3/z))).

    On the orbifold N_loc = N and the sector k enters through <k m3/N>.  On the
    resolution the leg only sees trivial isotropy; the ineffective leg meets
    every P_i with third weight w_i^+, the effective leg only meets P_N, with
    weights (-N alpha1, s).  Entries off the leg are zero.
    """
    z = complex(z)
    N = geo.N
    w1, _, w3 = dc.w
    m3 = dc.m[2]
    out = np.zeros(N, dtype=complex)
    z32 = z ** 1.5
    if side == "X":
        for k in range(1, N + 1):
            sn = np.sin(np.pi * (frac(k * m3 / N) - w3 / z))
            if abs(sn) < 1e-14:
                raise SineZero(f"sine factor vanishes for sector {k}")
            out[k - 1] = z32 * np.pi / (w1 * N * sn)
        return out
    if side != "Y":
        raise ValueError(f"side must be 'X' or 'Y', got {side!r}")
    if dc.leg == INEFFECTIVE:
        for i in range(1, N + 1):
            sn = np.sin(-np.pi * geo.wplus(i) / z)
            if abs(sn) < 1e-14:
                raise SineZero(f"sine factor vanishes at P_{i}")
            out[i - 1] = z32 * np.pi / (w1 * sn)
        return out
    sn = np.sin(-np.pi * geo.s / z)
    if abs(sn) < 1e-14:
        raise SineZero("sine factor vanishes at P_N")
    out[N - 1] = z32 * np.pi / (-N * geo.alpha1 * sn)
    return out


def gamma_theta(geo: AnGeometry, side: str, z: complex, dc: DiskConfig | None = None):
    """(Gamma-class coefficients, diagonal Theta matrix) for the given leg."""
    if dc is None:
        dc = DiskConfig.for_leg(geo, INEFFECTIVE)
    return gamma_classes(geo, side, z), np.diag(theta_entries(geo, dc, side, z))


def classical_table(geo: AnGeometry) -> dict:
    """Weights, pairings and triple intersections as plain data."""
    N = geo.N
    trip = {}
    for i in range(1, N + 1):
        for j in range(i, N + 1):
            for k in range(j, N + 1):
                trip[f"{i},{j},{k}"] = triple_intersection_Y(geo, i, j, k)
    return {
        "n": geo.n,
        "alpha1": geo.alpha1,
        "alpha2": geo.alpha2,
        "tangent_weights": [list(tangent_weights(geo, i)) for i in range(1, N + 1)],
        "pairing_X": pairing_matrix(geo, "X").tolist(),
        "pairing_Y": np.diag(pairing_matrix(geo, "Y")).tolist(),
        "atiyah_bott": atiyah_bott_matrix(geo).tolist(),
        "triple_intersections_Y": trip,
    }
