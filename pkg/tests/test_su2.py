import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from sta_pictures.errors import DegenerateHamiltonian
from sta_pictures.su2 import (SIGMA_X, SIGMA_Y, SIGMA_Z, SphereCoords, Su2Coords, cart_to_sphere, dagger,
                              eigensystem, expm_hermitian, is_unitary, pauli_components, rotation, sphere_to_cart,
                              to_matrix)

component = st.floats(-50, 50, allow_nan=False)
coords3 = st.tuples(component, component, component)


def test_to_matrix_examples():
    np.testing.assert_array_equal(to_matrix(Su2Coords(1, 0, 0)), SIGMA_X)
    np.testing.assert_array_equal(to_matrix(Su2Coords(0, 0, 0)), np.zeros((2, 2)))
    m = to_matrix(Su2Coords(1, 0, 10))
    np.testing.assert_array_equal(m, [[10, 1], [1, -10]])
    np.testing.assert_allclose(np.linalg.eigvalsh(m), [-np.sqrt(101), np.sqrt(101)], rtol=1e-14)


def test_to_matrix_is_pauli_combination():
    c = Su2Coords(0.3, -1.2, 2.5)
    np.testing.assert_allclose(to_matrix(c), 0.3 * SIGMA_X - 1.2 * SIGMA_Y + 2.5 * SIGMA_Z, atol=0)


@given(coords3)
def test_matrix_hermitian_traceless_and_invertible_by_components(c):
    m = to_matrix(Su2Coords(*c))
    assert np.allclose(m, dagger(m), atol=0)
    assert np.trace(m) == 0
    back = pauli_components(m)
    assert (back.x, back.y, back.z) == pytest.approx(c, abs=0)


@pytest.mark.parametrize("c, expected", [
    ((0, 0, 1), (1, 0, 0)),
    ((1, 0, 0), (1, np.pi / 2, 0)),
    ((1, 0, 10), (np.sqrt(101), 0.099669, 0)),
    ((0, 0, 0), (0, 0, 0)),
    ((0, 0, -2), (2, np.pi, 0)),
    ((0, -1, 0), (1, np.pi / 2, 1.5 * np.pi)),
])
def test_cart_to_sphere_examples(c, expected):
    s = cart_to_sphere(Su2Coords(*c))
    assert (s.r, s.theta, s.phi) == pytest.approx(expected, abs=1e-6)


def test_theta_of_1_0_10():
    assert cart_to_sphere(Su2Coords(1, 0, 10)).theta == pytest.approx(np.arctan2(1, 10), abs=1e-15)


@given(coords3)
def test_sphere_round_trip(c):
    s = cart_to_sphere(Su2Coords(*c))
    assert 0 <= s.theta <= np.pi
    assert 0 <= s.phi < 2 * np.pi
    back = sphere_to_cart(s)
    r = max(s.r, 1e-300)
    assert np.allclose([back.x, back.y, back.z], c, atol=1e-12 * r, rtol=0)


@given(st.floats(0.1, 10), st.floats(1e-3, np.pi - 1e-3), st.floats(0, 2 * np.pi - 1e-9))
def test_cart_from_sphere_round_trip(r, theta, phi):
    s = cart_to_sphere(sphere_to_cart(SphereCoords(r, theta, phi)))
    assert s.r == pytest.approx(r, rel=1e-12)
    assert s.theta == pytest.approx(theta, abs=1e-12)
    d = abs(s.phi - phi)
    assert min(d, 2 * np.pi - d) < 1e-11


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_theta_zero_iff_on_positive_z_axis(x, y, z):
    s = cart_to_sphere(Su2Coords(x, y, z))
    assert (s.theta == 0) == (x == 0 and y == 0 and z >= 0)


def test_eigensystem_sigma_z():
    vals, vecs = eigensystem(Su2Coords(0, 0, 1))
    np.testing.assert_allclose(vals, [1, -1])
    np.testing.assert_allclose(np.abs(vecs), np.eye(2), atol=1e-15)


def test_eigensystem_sigma_x():
    vals, vecs = eigensystem(Su2Coords(1, 0, 0))
    assert sorted(vals) == pytest.approx([-1, 1])
    for j in range(2):
        v = vecs[:, j]
        np.testing.assert_allclose(np.abs(v), [2**-0.5, 2**-0.5], atol=1e-15)
        np.testing.assert_allclose(SIGMA_X @ v, vals[j] * v, atol=1e-15)


def test_eigensystem_1_0_10_ground_vector():
    vals, vecs = eigensystem(Su2Coords(1, 0, 10))
    g = vecs[:, np.argmin(vals)]
    g = g * np.conj(g[1]) / abs(g[1])  # remove the gauge
    w, v = np.linalg.eigh([[10.0, 1.0], [1.0, -10.0]])
    ref = v[:, 0] * np.sign(v[1, 0])
    np.testing.assert_allclose(g, ref, atol=1e-14)
    # (H - lambda) v = 0 gives v1/v2 = -1/(10 + sqrt(101)) = -0.0498756
    np.testing.assert_allclose(g, [-0.0498137, 0.9987586], atol=1e-7)


def test_bare_ordering_connects_to_bare_basis():
    # |1_0> is the column with the largest overlap with |1>, regardless of energy order
    for c in (Su2Coords(1, 0, 10), Su2Coords(1, 0, -10), Su2Coords(0.2, 0.1, -3)):
        _, vecs = eigensystem(c, ordering="bare")
        assert abs(vecs[0, 0]) >= abs(vecs[0, 1])
        assert vecs[0, 0].imag == 0 and vecs[0, 0].real > 0
        assert vecs[1, 1].imag == 0 and vecs[1, 1].real > 0


@settings(max_examples=200)
@given(coords3)
def test_eigensystem_properties(c):
    coords = Su2Coords(*c)
    r = float(coords.radius)
    if r < 1e-6:
        return
    for ordering in ("bare", "descending"):
        vals, vecs = eigensystem(coords, ordering=ordering)
        assert sorted(np.abs(vals)) == pytest.approx([r, r], rel=1e-12)
        assert vals[0] == pytest.approx(-vals[1], rel=1e-12)
        np.testing.assert_allclose(dagger(vecs) @ vecs, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(to_matrix(coords) @ vecs, vecs * vals, atol=1e-12 * r)


def test_eigensystem_vectorized_matches_scalar():
    c = Su2Coords(np.array([1.0, -2.0, 0.5]), np.array([0.0, 1.0, -0.3]), np.array([10.0, 0.1, -4.0]))
    vals, vecs = eigensystem(c)
    for i in range(3):
        v1, w1 = eigensystem(Su2Coords(c.x[i], c.y[i], c.z[i]))
        np.testing.assert_allclose(vals[i], v1)
        np.testing.assert_allclose(vecs[i], w1, atol=1e-15)


def test_degenerate_raises():
    with pytest.raises(DegenerateHamiltonian):
        eigensystem(Su2Coords(0, 0, 0))
    with pytest.raises(DegenerateHamiltonian):
        eigensystem(Su2Coords(1e-14, 0, 0), scale=10.0)


@given(coords3, st.floats(-3, 3), st.floats(-2, 2))
def test_expm_matches_scipy_and_is_unitary(c, dt, trace):
    h = to_matrix(Su2Coords(*c)) + trace * np.eye(2)
    u = expm_hermitian(h, dt)
    np.testing.assert_allclose(u, scipy.linalg.expm(-1j * dt * h), atol=1e-11 * (1 + abs(dt) * np.abs(h).max()))
    assert is_unitary(u)


def test_expm_zero_hamiltonian_is_identity():
    np.testing.assert_array_equal(expm_hermitian(np.zeros((2, 2)), 0.7), np.eye(2))


def test_rotation_pi_about_x_flips():
    u = rotation([1, 0, 0], np.pi)
    np.testing.assert_allclose(u @ [1, 0], [0, -1j], atol=1e-15)
