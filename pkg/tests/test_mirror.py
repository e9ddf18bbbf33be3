import numpy as np
import pytest
from _strategies import geometries, seeds
from hypothesis import given

from ancrc import mirror, quantum
from ancrc.errors import AtPuncture, IndexOutOfRange
from ancrc.geometry import AnGeometry
from ancrc.suite import _random_t


def point(geo, seed=0):
    rng = np.random.default_rng(seed)
    return quantum.QuantumPoint(geo, tuple(_random_t(rng, geo))).hurwitz()


@pytest.fixture
def hp2():
    return point(AnGeometry(2, 0.8 + 0.3j, -0.2 + 1.1j), 3)


def test_dlog_pole_at_origin(hp2):
    g = hp2.geo
    q = 1e-7 * np.exp(0.4j)
    assert abs(q * mirror.dlog_superpotential(hp2, q) - g.N * g.alpha1) < 1e-6


def test_dlog_residue_at_puncture_is_minus_s(hp2):
    f = lambda q: mirror.dlog_superpotential(hp2, q)
    for l in range(1, hp2.n + 1):
        assert abs(mirror.contour_residue(hp2, f, l) + hp2.geo.s) < 1e-12
    assert abs(mirror.contour_residue(hp2, f, "one") + hp2.geo.s) < 1e-12


def test_log_superpotential_vs_product_form(hp2):
    g = hp2.geo
    lk0, lk = hp2.logs()
    for q in (0.3 + 0.2j, -0.5 + 0.1j, 0.2 - 0.6j):
        lam = np.exp(g.alpha1 * (lk0 + lk.sum())) * q ** (g.N * g.alpha1) * (1 - q) ** (-g.s)
        for k in hp2.kappa:
            lam *= (1 - k * q) ** (-g.s)
        assert abs(np.exp(mirror.log_superpotential(hp2, q)) / lam - 1) < 1e-12


def test_dlog_is_derivative_of_log(hp2):
    q, h = 0.35 - 0.25j, 1e-6
    fd = (mirror.log_superpotential(hp2, q + h) - mirror.log_superpotential(hp2, q - h)) / (2 * h)
    assert abs(fd - mirror.dlog_superpotential(hp2, q)) < 1e-7 * abs(fd)


def test_superpotential_rejects_punctures(hp2):
    with pytest.raises(AtPuncture):
        mirror.log_superpotential(hp2, 1.0)
    with pytest.raises(AtPuncture):
        mirror.dlog_superpotential(hp2, 1 / hp2.kappa[0])


def test_residue_at_puncture_with_unit_insertion(hp2):
    for i in range(1, hp2.n + 1):
        assert mirror.residue_correlator(hp2, 0, i, i, i) == pytest.approx(-1 / hp2.geo.s)


def test_residue_at_zero_of_three_units(hp2):
    g = hp2.geo
    N = g.N
    want = 1 / (g.alpha1 * N * g.s ** 2)
    assert mirror.residue_correlator(hp2, N, N, N, "zero") == pytest.approx(want, rel=1e-14)


def test_residue_pole_index_checked(hp2):
    with pytest.raises(IndexOutOfRange):
        mirror.residue_closed_form(hp2, 1, 1, 1, 7)


@given(geometries(n_max=4), seeds())
def test_closed_form_residues_match_contours(geo, seed):
    hp = point(geo, seed)
    N = geo.N
    for pole in mirror._all_poles(hp):
        for i in range(0, N + 1):
            for j in range(i, N + 1):
                for k in range(j, N + 1):
                    a = mirror.residue_closed_form(hp, i, j, k, pole)
                    b = mirror.residue_contour(hp, i, j, k, pole)
                    assert abs(a - b) < 1e-9 * max(abs(a), 1.0)


@given(geometries(n_max=4), seeds())
def test_mirror_correlators_equal_quantum_correlators(geo, seed):
    qp = quantum.QuantumPoint(geo, tuple(_random_t(np.random.default_rng(seed), geo)))
    hp = qp.hurwitz()
    N = geo.N
    for i in range(1, N + 1):
        for j in range(i, N + 1):
            for k in range(j, N + 1):
                b = quantum.three_point_Y(qp, i, j, k)
                assert abs(mirror.three_point_t(hp, i, j, k) - b) < 1e-9 * max(abs(b), 1.0)


@given(geometries(n_max=3), seeds())
def test_residue_metric_is_flat_and_equals_poincare_pairing(geo, seed):
    eta = quantum.divisor_pairing(geo)
    G1 = mirror.metric_matrix(point(geo, seed))
    G2 = mirror.metric_matrix(point(geo, seed + 1))
    scale = np.abs(eta).max()
    assert np.abs(G1 - G2).max() < 1e-9 * scale
    assert np.abs(G1 - eta).max() < 1e-9 * scale
    assert np.allclose(G1, G1.T, rtol=0, atol=1e-12 * scale)


def test_metric_symmetric_exactly(hp2):
    assert mirror.metric_g(hp2, 1, 2) == mirror.metric_g(hp2, 2, 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_critical_points_at_orbifold_point(n):
    geo = AnGeometry(n, 0.8 + 0.3j, -0.2 + 1.1j)
    hp = mirror.orbifold_point(geo)
    fr = mirror.canonical_frame(hp)
    N = geo.N
    # a/(a - N b) = -alpha1/alpha2; the critical points are its N-th roots
    root = (-geo.alpha1 / geo.alpha2) ** (1 / N)
    want = np.array([geo.om(i) * root for i in range(1, N + 1)])
    got = np.array(fr.crit_q)
    assert max(np.abs(got - w).min() for w in want) < 1e-10
    assert np.abs(got ** N * (-geo.alpha2 / geo.alpha1) - 1).max() < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_critical_values_at_orbifold_point(n):
    geo = AnGeometry(n, 0.9 - 0.2j, 0.1 + 1.3j)
    fr = mirror.canonical_frame(mirror.orbifold_point(geo))
    for u, v in zip(fr.u, mirror.u_orbifold_closed(geo)):
        m = mirror.lattice_coords(u - v, geo.alpha1, geo.alpha2, 2j * np.pi)
        # equal up to a 2 pi i (Z alpha1 + Z alpha2) branch shift
        assert np.allclose(m, np.round(m), atol=1e-8)


def test_critical_points_tend_to_punctures_as_s_vanishes():
    kap = (0.3 + 0.2j, -0.6 + 0.5j)
    for eps in (1e-4, 1e-6):
        geo = AnGeometry(2, 1.0 + 0.2j, -1.0 - 0.2j + eps)
        hp = mirror.HurwitzPoint(geo, 1.0, kap)
        q = np.array(mirror.canonical_frame(hp).crit_q)
        target = np.array([1 / kap[0], 1 / kap[1], 1.0])
        assert np.abs(q - target).max() < 1e3 * eps


@given(geometries(n_max=4), seeds())
def test_critical_equation_residual(geo, seed):
    hp = point(geo, seed)
    q = mirror.critical_points(hp)
    assert mirror.qcr_residual(hp, q).max() < 1e-9


@given(geometries(n_max=3), seeds())
def test_norms_match_inverse_critical_residues(geo, seed):
    hp = point(geo, seed)
    fr = mirror.canonical_frame(hp)
    ref = np.array([mirror.delta_critical(hp, q) for q in fr.crit_q])
    assert np.abs(np.array(fr.delta) - ref).max() < 1e-6 * np.abs(ref).max()


def test_hurwitz_point_validation():
    geo = AnGeometry(2, 1.0, 0.5j)
    with pytest.raises(ValueError):
        mirror.HurwitzPoint(geo, 1.0, (0.5,))
    with pytest.raises(ValueError):
        mirror.HurwitzPoint(geo, 1.0, (0.5, 0.5))
    with pytest.raises(ValueError):
        mirror.HurwitzPoint(geo, 1.0, (0.5, 1.0))
