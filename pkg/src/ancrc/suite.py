"""The verification suite: seeded samples, every identity checked against an
independent route, one VerificationReport per identity and parameter point."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy import special as sps

from . import calibration as cal
from . import crc, mirror, quantum
from .errors import AncrcError, ConfigError
from .geometry import (
    EFFECTIVE,
    INEFFECTIVE,
    AnGeometry,
    DiskConfig,
    pairing_matrix,
    sample_geometry,
    triple_intersection_localization,
    triple_intersection_Y,
)
from .report import VerificationReport
from .special import (
    FDParams,
    PeriodParams,
    fd_euler_integral,
    fd_leading_asymptotics,
    gamma,
    gauss_2f1,
    lauricella_fd,
    lauricella_fd_bruteforce,
    lauricella_polynomial,
    toscano_rhs,
    twisted_period,
)

SECTIONS = ("geometry", "special", "mirror", "qde", "u", "ocrc", "monodromy", "calib")

DEFAULT_TOLERANCES = {
    "geometry": 1e-10,
    "special.gamma_vs_scipy": 1e-12,
    "special.gauss_2f1_vs_mpmath": 1e-10,
    "special.fd_series_vs_bruteforce": 1e-9,
    "special.fd_leading_asymptotics": 2e-2,
    "special.toscano": 1e-10,
    "special.beta_point": 1e-10,
    "special.period_series_vs_quadrature": 1e-9,
    "mirror": 1e-9,
    "mirror.delta_vs_critical_residue": 1e-6,
    "qde.flatness": 1e-4,
    "qde": 1e-10,
    "u.symplectic": 1e-9,
    "u.large_z_limit": 1e-4,
    "u": 1e-9,
    "ocrc": 1e-8,
    "ocrc.column_sums": 1e-10,
    "ocrc.effective_selection": 1e-10,
    "ocrc.disk_lemma": 1e-10,
    "monodromy.oracle": 1e-6,
    "monodromy.det": 1e-10,
    "calib.epsilon_ucl_limit": 0.2,
}


@dataclass
class SuiteConfig:
    """Everything that determines a suite run; identical configs give identical reports."""

    n_values: tuple = (1, 2, 3)
    samples: int = 3
    seed: int = 0
    tol: float | None = None
    tolerances: dict = field(default_factory=dict)
    K: int = 4
    d_max: int = 6
    only: tuple | None = None
    workers: int = 1

    def validate(self) -> "SuiteConfig":
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if not self.n_values:
            raise ConfigError("n range is empty")
        for n in self.n_values:
            if int(n) != n or not 1 <= n <= 8:
                raise ConfigError(f"n = {n} outside 1..8")
        if not 1 <= self.K <= 12:
            raise ConfigError("K must lie in 1..12")
        if self.d_max < 1:
            raise ConfigError("d_max must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for s in self.only or ():
            if s not in SECTIONS:
                raise ConfigError(f"unknown section {s!r}; choose from {', '.join(SECTIONS)}")
        return self

    def as_dict(self) -> dict:
        return {
            "n_values": list(self.n_values),
            "samples": self.samples,
            "tol": self.tol,
            "K": self.K,
            "d_max": self.d_max,
            "only": list(self.only) if self.only else None,
        }

    def tolerance(self, identity: str) -> float:
        """Forced tolerance, else the longest matching prefix among overrides and defaults."""
        if self.tol is not None:
            return self.tol
        for table in (self.tolerances, DEFAULT_TOLERANCES):
            best = None
            for key in table:
                if identity == key or identity.startswith(key + "."):
                    if best is None or len(key) > len(best):
                        best = key
            if best is not None:
                return float(table[best])
        raise KeyError(f"no tolerance for {identity}")


class _Collector:
    def __init__(self, cfg: SuiteConfig, n: int):
        self.cfg = cfg
        self.n = n
        self.out: list[VerificationReport] = []

    def lt(self, identity, param, residual, expected_failure=False, **inputs):
        self.out.append(VerificationReport(identity, self.n, param, residual, self.cfg.tolerance(identity),
                                           "lt", expected_failure, inputs))

    def ge(self, identity, param, value, threshold, **inputs):
        self.out.append(VerificationReport(identity, self.n, param, value, threshold, "ge", False, inputs))

    def guard(self, identity, param, fn, **inputs):
        """Run fn(); an exception becomes a failing record with residual inf."""
        try:
            fn()
        except (AncrcError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            inputs["error"] = f"{type(exc).__name__}: {exc}"
            self.lt(identity, param, float("inf"), **inputs)


def _rel(x, y) -> float:
    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    return float(np.abs(x - y).max() / max(np.abs(y).max(), 1e-300))


def sample_tame(rng: np.random.Generator, n: int) -> tuple[AnGeometry, complex]:
    """Weights and z with 0.5 < Re a < 2, |Im a| < 1, -1 < Re b < -0.1, |Im b| < 2.

    In this window every period and its t-gradient is a convergent Euler integral.
    """
    while True:
        geo = sample_geometry(rng, n)
        for _ in range(200):
            a = complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
            z = geo.N * geo.alpha1 / a
            b = geo.s / z
            if -1 < b.real < -0.1 and abs(b.imag) < 2:
                return geo, complex(z)


def _random_t(rng: np.random.Generator, geo: AnGeometry, clearance: float = 0.05) -> np.ndarray:
    """A point with exp(t_j) of moderate size, away from the real axis, whose
    punctures keep a distance from every period integration segment."""
    n = geo.n
    while True:
        t = np.concatenate([rng.normal(scale=0.7, size=n) + 1j * rng.uniform(0.3, 2.8, size=n), [0j]])
        if quantum.segment_clearance(quantum.QuantumPoint(geo, tuple(t)).hurwitz()) > clearance:
            return t


def _random_z(rng: np.random.Generator, lo: float = 0.7, hi: float = 3.0) -> complex:
    return complex(rng.uniform(lo, hi) * np.exp(1j * rng.uniform(-np.pi, np.pi)))


# --- sections -----------------------------------------------------------------


def _geometry(c: _Collector, rng):
    for smp in range(c.cfg.samples):
        geo = sample_geometry(rng, c.n)
        N = geo.N
        p = f"sample={smp}"
        worst = 0.0
        for i in range(1, N + 1):
            for j in range(i, N + 1):
                for k in range(j, N + 1):
                    a = triple_intersection_Y(geo, i, j, k)
                    b = triple_intersection_localization(geo, i, j, k)
                    worst = max(worst, abs(a - b) / max(abs(a), 1e-300) if a != 0 else abs(b))
        c.lt("geometry.triple_intersection_localization", p, worst, alpha1=geo.alpha1, alpha2=geo.alpha2)
        ws = max(abs(geo.wminus(i) + geo.wplus(i) + geo.s) for i in range(1, N + 1))
        c.lt("geometry.fixed_weights_sum", p, ws / abs(geo.s), alpha1=geo.alpha1, alpha2=geo.alpha2)
        # the large-z limit of U carries eta_X onto the divisor pairing
        U0 = crc.u_limit(geo)
        lhs = U0.T @ quantum.divisor_pairing(geo) @ U0
        c.lt("geometry.pairing_large_z_limit", p, _rel(lhs, pairing_matrix(geo, "X")),
             alpha1=geo.alpha1, alpha2=geo.alpha2)


def _special_common(c: _Collector, rng):
    S = c.cfg.samples
    for smp in range(S):
        p = f"sample={smp}"
        xs = rng.uniform(-4, 6, size=8) + 1j * rng.uniform(-4, 4, size=8)
        err = max(abs(gamma(x) - sps.gamma(x)) / abs(sps.gamma(x)) for x in xs)
        c.lt("special.gamma_vs_scipy", p, err)

        a, b = (complex(*rng.uniform(-1.5, 1.5, size=2)) for _ in range(2))
        cc = complex(rng.uniform(0.3, 2.5), rng.uniform(-1, 1))
        worst = 0.0
        for r in (0.4, 0.97, 1.6, 6.0):
            zz = r * np.exp(1j * rng.uniform(0.2, 2 * np.pi - 0.2))
            ref = complex(mp.hyp2f1(a, b, cc, zz))
            worst = max(worst, abs(gauss_2f1(a, b, cc, zz) - ref) / max(abs(ref), 1e-300))
        c.lt("special.gauss_2f1_vs_mpmath", p, worst, a=a, b=b, c=cc)

        w = tuple(0.45 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi)) for _ in range(3))
        fa = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        fb = tuple(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3))
        fc = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        pr = FDParams(fa, fb, fc, w)
        c.lt("special.fd_series_vs_bruteforce", p, _rel(lauricella_fd(pr), lauricella_fd_bruteforce(pr, 40)))

        for N in (1, 2):
            fa = complex(rng.uniform(0.2, 0.4), rng.uniform(-0.1, 0.1))
            fc = fa + complex(rng.uniform(0.8, 1.2), rng.uniform(-0.1, 0.1))
            fb = tuple(complex(rng.uniform(0.1, 0.3), rng.uniform(-0.1, 0.1)) for _ in range(N))
            mags = 40.0 ** (np.arange(1, N + 1) / N)
            w = tuple(m * np.exp(1j * rng.uniform(0.5, 2.5) * rng.choice([-1, 1])) for m in mags)
            pr = FDParams(fa, fb, fc, w)
            c.lt("special.fd_leading_asymptotics", f"{p},N={N}",
                 _rel(fd_leading_asymptotics(pr), fd_euler_integral(pr)))

        worst = 0.0
        for d in range(0, 6):
            fb = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)]
            fc = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
            w = [complex(*rng.normal(size=2)) * 2 for _ in range(3)]
            lhs = lauricella_polynomial(-d, fb, fc, w)
            worst = max(worst, abs(lhs - toscano_rhs(d, fb, fc, w)) / max(abs(lhs), 1.0))
        c.lt("special.toscano", p, worst)


def _special_n(c: _Collector, rng):
    for smp in range(c.cfg.samples):
        p = f"sample={smp}"
        geo, z = sample_tame(rng, c.n)

        def beta():
            P0, D0 = crc.beta_point_periods(geo, z)
            P = quantum.periods(geo, mirror.orbifold_point(geo), z)
            D = quantum.period_x_gradient(geo, np.zeros(geo.N), z)
            c.lt("special.beta_point.periods", p, _rel(P, P0), z=z)
            c.lt("special.beta_point.derivatives", p, _rel(D, D0), z=z)

        c.guard("special.beta_point.periods", p, beta, z=z)

        hp = quantum.QuantumPoint(geo, tuple(_random_t(rng, geo))).hurwitz()

        def series_vs_quad():
            lk0, lk = hp.logs()
            pp = PeriodParams.from_geometry(geo, hp.kappa, z, log_kappa=lk, log_kappa0=lk0)
            worst = 0.0
            for i in range(1, geo.N + 1):
                try:
                    s = twisted_period(pp, i, method="series")
                except AncrcError:
                    continue
                worst = max(worst, _rel(s, twisted_period(pp, i, method="quadrature")))
            c.lt("special.period_series_vs_quadrature", p, worst, z=z)

        c.guard("special.period_series_vs_quadrature", p, series_vs_quad, z=z)


def _mirror(c: _Collector, rng):
    for smp in range(c.cfg.samples):
        geo = sample_geometry(rng, c.n)
        N = geo.N
        for pt in range(c.cfg.samples):
            p = f"sample={smp},point={pt}"
            qp = quantum.QuantumPoint(geo, tuple(_random_t(rng, geo)))
            hp = qp.hurwitz()
            worst = 0.0
            for pole in mirror._all_poles(hp):
                for i in range(0, N + 1):
                    for j in range(i, N + 1):
                        for k in range(j, N + 1):
                            a = mirror.residue_closed_form(hp, i, j, k, pole)
                            b = mirror.residue_contour(hp, i, j, k, pole)
                            worst = max(worst, abs(a - b) / max(abs(a), 1.0))
            c.lt("mirror.residues_closed_vs_contour", p, worst)
            worst = 0.0
            for i in range(1, N + 1):
                for j in range(i, N + 1):
                    for k in range(j, N + 1):
                        a = mirror.three_point_t(hp, i, j, k)
                        b = quantum.three_point_Y(qp, i, j, k)
                        worst = max(worst, abs(a - b) / max(abs(b), 1.0))
            c.lt("mirror.three_point_vs_quantum", p, worst)
            G = mirror.metric_matrix(hp)
            c.lt("mirror.residue_metric_flat", p, _rel(G, quantum.divisor_pairing(geo)))

            def delta():
                fr = mirror.canonical_frame(hp)
                ref = [mirror.delta_critical(hp, q) for q in fr.crit_q]
                c.lt("mirror.delta_vs_critical_residue", p, _rel(fr.delta, ref))

            c.guard("mirror.delta_vs_critical_residue", p, delta)

        p = f"sample={smp}"

        def orbifold_values():
            fr = mirror.canonical_frame(mirror.orbifold_point(geo))
            tgt = mirror.u_orbifold_closed(geo)
            # compare up to a common 2 pi i (Z alpha1 + Z alpha2) branch shift per entry
            worst = 0.0
            for u, v in zip(fr.u, tgt):
                d = u - v
                m = np.round(mirror.lattice_coords(d, geo.alpha1, geo.alpha2, 2j * np.pi))
                worst = max(worst, abs(d - 2j * np.pi * (m[0] * geo.alpha1 + m[1] * geo.alpha2)) / max(abs(v), 1.0))
            c.lt("mirror.orbifold_critical_values", p, worst)

        c.guard("mirror.orbifold_critical_values", p, orbifold_values)


def _qde(c: _Collector, rng):
    for smp in range(c.cfg.samples):
        p = f"sample={smp}"
        geo, z = sample_tame(rng, c.n)
        qp = quantum.QuantumPoint(geo, tuple(_random_t(rng, geo)))
        N = geo.N

        def flat():
            r = max(quantum.qde_flatness_residual(qp, z, i) for i in range(1, N + 1))
            c.lt("qde.flatness", p, r, z=z)

        c.guard("qde.flatness", p, flat, z=z)

        def string():
            J = quantum.j_function_Y(qp, z)
            G = quantum.j_gradient(qp, z)
            c.lt("qde.string_direction", p, _rel(z * G[N - 1], J), z=z)

        c.guard("qde.string_direction", p, string, z=z)

        Ms = [quantum.multiplication_matrix_Y(qp, i) for i in range(1, N + 1)]
        worst = max(_rel(Ms[i] @ Ms[j], Ms[j] @ Ms[i]) for i in range(N) for j in range(N))
        c.lt("qde.associativity", p, worst)
        c.lt("qde.unit", p, _rel(Ms[N - 1], np.eye(N)))

        def jx():
            J = quantum.j_function_X(geo, np.zeros(N), z)
            tgt = np.zeros(N, dtype=complex)
            tgt[N - 1] = z
            c.lt("qde.jx_orbifold_point", p, _rel(J, tgt), z=z)

        c.guard("qde.jx_orbifold_point", p, jx, z=z)


def _u(c: _Collector, rng):
    geo = sample_geometry(rng, c.n)
    for smp in range(max(5, c.cfg.samples)):
        z = _random_z(rng)
        p = f"z={smp}"
        c.lt("u.symplectic", p, crc.symplectic_residual(geo, z), z=z)
        c.lt("u.closed_vs_ktheory", p, _rel(crc.u_closed(geo, z), crc.u_ktheory(geo, z)), z=z)
        f = crc.factorization_check(geo, z)
        c.lt("u.factorization_scalar", p, f.spread, z=z, c=f.c)
        c.lt("u.factorization_shift", p, abs(f.ratio_to_prediction - 1), z=z, c=f.c)
    _, rich = crc.u_large_z_residual(geo, radius=1e4, phase=float(rng.uniform(-np.pi, np.pi)))
    c.lt("u.large_z_limit", "richardson", rich)


def _ocrc(c: _Collector, rng):
    geo = sample_geometry(rng, c.n)
    dc = DiskConfig.for_leg(geo, INEFFECTIVE)
    for smp in range(max(5, c.cfg.samples)):
        z = _random_z(rng)
        p = f"z={smp}"
        c.guard("ocrc.routes_agree", p,
                lambda: c.lt("ocrc.routes_agree", p, _rel(crc.o_map(geo, dc, z, "u"), crc.o_map(geo, dc, z, "k")), z=z),
                z=z)
    for r in crc.verify_ocrc(geo, c.cfg.d_max, c.cfg.tolerance("ocrc.ineffective_specialization"),
                             c.cfg.tolerance("ocrc.column_sums")):
        c.lt(r.identity, f"d={r.z_or_d}", r.residual)
    for leg in (INEFFECTIVE, EFFECTIVE):
        dcl = DiskConfig.for_leg(geo, leg)
        for d in range(1, c.cfg.d_max + 1):
            p = f"{leg},d={d}"
            c.guard("ocrc.disk_lemma", p, lambda: c.lt("ocrc.disk_lemma", p, crc.disk_lemma_residual(geo, dcl, d)))


def _monodromy(c: _Collector, rng):
    for smp in range(c.cfg.samples):
        while True:
            a1, a2 = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
            z = complex(*rng.normal(size=2)) * 3
            a, b = 2 * a1 / z, (a1 + a2) / z
            cc = 1 + a - b
            if abs(a) < 1.5 and abs(b) < 1.5 and abs(cc - round(cc.real)) > 0.1 and abs(a1 + a2) > 0.05:
                break
        geo = AnGeometry(1, a1, a2)
        p = f"sample={smp}"
        for which in ("LR1", "CP", "LR2"):
            ident = f"monodromy.oracle.{which}"

            def one(which=which, ident=ident):
                M = crc.monodromy_oracle_n1(geo, z, which)
                C = crc.monodromy_n1(a, b, which)
                res = float(np.abs(M - C).max() / max(1.0, np.abs(M).max()))
                c.lt(ident, p, res, expected_failure=which != "LR1", a=a, b=b)

            c.guard(ident, p, one, a=a, b=b)
        c.lt("monodromy.det.CP", p, abs(np.linalg.det(crc.monodromy_n1(a, b, "CP")) - 1), a=a, b=b)
        c.lt("monodromy.det.LR1", p, abs(np.linalg.det(crc.monodromy_n1(a, b, "LR1")) - np.exp(2j * np.pi * b)),
             a=a, b=b)


def _calib(c: _Collector, rng):
    K = c.cfg.K
    for smp in range(c.cfg.samples):
        p = f"sample={smp}"
        geo, zh = cal.sample_sector(rng, c.n)
        for r in cal.normalization_check(geo, zh, K):
            c.ge(r.identity, p, r.slope, r.threshold, zhat=zh)
        eps, slope = cal.lr_matching_check(geo, zh, K, rng=rng)
        c.lt(eps.identity, p, abs(eps.ratio / eps.scale_ratio - 1), ratio=eps.ratio, zhat=zh)
        c.ge(slope.identity, p, slope.slope, slope.threshold, zhat=zh)
        cs, ds = complex(*rng.uniform(0.5, 2, size=2)), complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        r = cal.stirling_check(cs, ds, K)
        c.ge(r.identity, p, r.slope, r.threshold, c=cs, d=ds)


_SECTION_FUNCS = {
    "geometry": _geometry,
    "special": _special_n,
    "mirror": _mirror,
    "qde": _qde,
    "u": _u,
    "ocrc": _ocrc,
    "monodromy": _monodromy,
    "calib": _calib,
}


_MPMATH_SECTIONS = ("special", "calib")


def _tasks(cfg: SuiteConfig):
    """(section, n, spawn key) in execution order; monodromy runs once at n = 1."""
    out = []
    for idx, sec in enumerate(SECTIONS):
        if cfg.only and sec not in cfg.only:
            continue
        if sec == "special":
            out.append((sec, 0, (idx, 0)))
        if sec == "monodromy":
            out.append((sec, 1, (idx, 1)))
            continue
        for n in cfg.n_values:
            out.append((sec, int(n), (idx, int(n))))
    return out


def _run_task(cfg: SuiteConfig, sec: str, n: int, key) -> list[VerificationReport]:
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=key))
    col = _Collector(cfg, n)
    if sec == "special" and n == 0:
        _special_common(col, rng)
    else:
        _SECTION_FUNCS[sec](col, rng)
    return col.out


def run_suite(cfg: SuiteConfig) -> tuple[list[VerificationReport], int]:
    """Run the selected sections in order; returns sorted reports and the exit status.

    Each (section, n) pair draws from its own stream spawned from the seed, so
    results do not depend on which other sections run or on thread scheduling.
    """
    cfg.validate()
    tasks = _tasks(cfg)
    if cfg.workers > 1:
        # mpmath keeps its working precision in global state, so sections that
        # use it run on the calling thread
        pooled = [t for t in tasks if t[0] not in _MPMATH_SECTIONS]
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(lambda t: _run_task(cfg, *t), pooled))
        parts += [_run_task(cfg, *t) for t in tasks if t[0] in _MPMATH_SECTIONS]
    else:
        parts = [_run_task(cfg, *t) for t in tasks]
    reports = sorted((r for part in parts for r in part), key=VerificationReport.sort_key)
    status = 0 if all(r.ok for r in reports) else 1
    return reports, status
