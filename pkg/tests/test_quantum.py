import numpy as np
import pytest
from _strategies import geometries, seeds
from hypothesis import given

from ancrc import crc, quantum
from ancrc.errors import PoleInQuantumSum
from ancrc.geometry import DIVISOR, TWISTED, AnGeometry, CohVector, triple_intersection_Y
from ancrc.suite import _random_t, sample_tame


def rel(a, b):
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def tame_point(n, seed):
    rng = np.random.default_rng(seed)
    geo, z = sample_tame(rng, n)
    return quantum.QuantumPoint(geo, tuple(_random_t(rng, geo))), z


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_flat_sections_solve_quantum_differential_equation(n, seed):
    qp, z = tame_point(n, seed)
    r = max(quantum.qde_flatness_residual(qp, z, i) for i in range(1, qp.geo.N + 1))
    assert r < 1e-4


@pytest.mark.parametrize("n", [1, 2, 3])
def test_string_direction_scales_by_z(n):
    qp, z = tame_point(n, 10 + n)
    J = quantum.j_function_Y(qp, z)
    G = quantum.j_gradient(qp, z)
    assert rel(z * G[-1], J) < 1e-6


@given(geometries(n_max=4), seeds())
def test_quantum_product_commutative_associative_with_unit(geo, seed):
    qp = quantum.QuantumPoint(geo, tuple(_random_t(np.random.default_rng(seed), geo)))
    N = geo.N
    Ms = [quantum.multiplication_matrix_Y(qp, i) for i in range(1, N + 1)]
    scale = max(np.abs(M).max() for M in Ms) ** 2
    for i in range(N):
        for j in range(N):
            assert np.abs(Ms[i] @ Ms[j] - Ms[j] @ Ms[i]).max() < 1e-9 * scale
    assert np.allclose(Ms[-1], np.eye(N), atol=1e-12)


def test_three_point_unit_insertion_is_classical():
    qp = quantum.QuantumPoint(AnGeometry(2, 1.0 + 0.2j, -0.3 + 0.9j), (0.1 + 1j, -0.4 + 0.7j))
    for i in (1, 2, 3):
        assert quantum.three_point_Y(qp, i, 2, 3) == triple_intersection_Y(qp.geo, i, 2, 3)


def test_three_point_n1_degree_sum():
    geo = AnGeometry(1, 0.7 + 0.1j, 0.4 - 0.9j)
    t1 = 0.3 + 1.2j
    qp = quantum.QuantumPoint(geo, (t1,))
    e = np.exp(t1)
    want = triple_intersection_Y(geo, 1, 1, 1) - e / (1 - e)
    assert quantum.three_point_Y(qp, 1, 1, 1) == pytest.approx(want, rel=1e-14)


def test_pole_in_quantum_sum():
    qp = quantum.QuantumPoint(AnGeometry(1, 1.0, 0.5j), (0.0,))
    with pytest.raises(PoleInQuantumSum):
        quantum.three_point_Y(qp, 1, 1, 1)


def test_quantum_point_length_checked():
    with pytest.raises(ValueError):
        quantum.QuantumPoint(AnGeometry(2, 1.0, 0.5j), (1j,))
    assert quantum.QuantumPoint(AnGeometry(2, 1.0, 0.5j), (1j, 2j)).t[-1] == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orbifold_j_function_at_origin(n):
    rng = np.random.default_rng(40 + n)
    geo, z = sample_tame(rng, n)
    J = quantum.j_function_X(geo, np.zeros(geo.N), z)
    want = np.zeros(geo.N, dtype=complex)
    want[-1] = z
    assert rel(J, want) < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orbifold_j_function_linear_term_at_origin(n):
    rng = np.random.default_rng(50 + n)
    geo, z = sample_tame(rng, n)
    D = quantum.period_x_gradient(geo, np.zeros(geo.N), z)
    assert rel(crc.matrix_B_inverse(geo, z) @ D, np.eye(geo.N)) < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_periods_at_origin_match_beta_values(n):
    rng = np.random.default_rng(60 + n)
    geo, z = sample_tame(rng, n)
    P, D = crc.beta_point_periods(geo, z)
    x0 = np.zeros(geo.N)
    assert rel(quantum.periods(geo, quantum.hurwitz_from_x(geo, x0), z), P) < 1e-10
    assert rel(quantum.period_x_gradient(geo, x0, z), D) < 1e-10


def test_period_gradient_vs_finite_differences():
    qp, z = tame_point(2, 7)
    geo, N = qp.geo, qp.geo.N
    G = quantum.period_gradient(geo, qp.hurwitz(), z)
    h = 1e-5
    for b in range(1, N + 1):
        fd = (quantum.periods(geo, qp.shifted(b, h).hurwitz(), z)
              - quantum.periods(geo, qp.shifted(b, -h).hurwitz(), z)) / (2 * h)
        assert rel(G[b - 1], fd) < 1e-6


def test_x_to_t_at_origin():
    geo = AnGeometry(3, 0.8 + 0.1j, 0.2 - 1.0j)
    t = quantum.x_to_t(geo, np.zeros(4))
    assert np.allclose(t[:3], 2j * np.pi / 4)
    assert t[3] == pytest.approx(2j * np.pi * geo.alpha1)
    assert quantum.x_to_t(geo, np.zeros(4), string_shift=False)[3] == 0
    with pytest.raises(ValueError):
        quantum.x_to_t(geo, np.zeros(3))


def test_x_to_t_jacobian_is_linear_part():
    geo = AnGeometry(2, 0.8 + 0.1j, 0.2 - 1.0j)
    x = np.array([0.3 - 0.1j, -0.2 + 0.4j, 0.5j])
    lin = np.array(quantum.x_to_t(geo, x)) - np.array(quantum.x_to_t(geo, np.zeros(3)))
    assert np.allclose(lin, quantum.dt_dx(geo) @ x, atol=1e-14)


def test_large_z_limit_sends_orbifold_unit_to_resolution_unit():
    geo = AnGeometry(3, 0.8 + 0.1j, 0.2 - 1.0j)
    e = np.zeros(4)
    e[-1] = 1
    assert np.allclose(crc.u_limit(geo) @ e, e)


def test_orbifold_product_unit_and_commutativity():
    geo = AnGeometry(2, 0.9 + 0.2j, -0.1 + 1.2j)
    x = np.array([0.2 + 0.1j, -0.3j, 0.0])
    one = CohVector.unit(TWISTED, 3, 3)
    u = CohVector(TWISTED, (0.3, -0.5j, 0.7))
    v = CohVector(TWISTED, (1.0, 0.2 + 0.2j, -0.4))
    assert np.allclose(quantum.quantum_product(geo, x, one, u, "X").array(), u.array(), atol=1e-12)
    uv = quantum.quantum_product(geo, x, u, v, "X").array()
    vu = quantum.quantum_product(geo, x, v, u, "X").array()
    assert np.allclose(uv, vu, atol=1e-12)


def test_resolution_product_unit():
    geo = AnGeometry(2, 0.9 + 0.2j, -0.1 + 1.2j)
    one = CohVector.unit(DIVISOR, 3, 3)
    u = CohVector(DIVISOR, (0.3, -0.5j, 0.7))
    w = quantum.quantum_product(geo, (0.4 + 1j, 0.1 + 0.8j), one, u)
    assert np.allclose(w.array(), u.array(), atol=1e-12)
    with pytest.raises(ValueError):
        quantum.quantum_product(geo, (0.4 + 1j, 0.1 + 0.8j), one, u, "Z")


def test_segment_clearance_measures_nearest_puncture():
    geo = AnGeometry(1, 1.0, 0.5j)
    hp = quantum.QuantumPoint(geo, (np.log(0.5 + 0.1j),)).hurwitz()
    # punctures after rescaling: kappa_1 and 1/kappa_1; 0.5 + 0.1i is 0.1 away from [0, 1]
    assert quantum.segment_clearance(hp) == pytest.approx(0.1)
