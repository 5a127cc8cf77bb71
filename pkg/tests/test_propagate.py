import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from sta_pictures import (ConstantSchedule, FourierSchedule, build_frame, cd_term_0, eigen_populations,
                          fidelity, propagate, superadiabatic_product_frame)
from sta_pictures.errors import StepUnderflow
from sta_pictures.su2 import SIGMA_X, dagger


def dop853_oracle(schedule, psi0, times):
    def rhs(t, y):
        return -1j * (schedule.matrix(t) @ y)

    sol = solve_ivp(rhs, (times[0], times[-1]), np.asarray(psi0, complex), method="DOP853",
                    t_eval=times, rtol=1e-13, atol=1e-14)
    return sol.y.T


def test_zero_hamiltonian_keeps_state():
    psi0 = np.array([0.6, 0.8j])
    traj = propagate(ConstantSchedule(0, 0, 0, 3.0), psi0, 3.0, n_report=7)
    np.testing.assert_allclose(traj.states, np.broadcast_to(psi0, (7, 2)), atol=1e-15)


def test_pi_pulse():
    # H = (pi/2) sigma_x for unit time flips |1> to -i|2>
    traj = propagate(ConstantSchedule(np.pi / 2, 0, 0, 1.0), np.array([1, 0]), 1.0, n_report=3)
    np.testing.assert_allclose(traj.final_state, [0, -1j], atol=1e-12)
    np.testing.assert_allclose(traj.populations[1], [0.5, 0.5], atol=1e-12)


def test_matrix_callable_equivalent_to_schedule(lz):
    a = propagate(lz, np.array([1, 0]), 2.0, n_report=21, order=4, tolerance=1e-11)
    b = propagate(lambda t: lz.matrix(t) + 0.3 * np.eye(2), np.array([1, 0]), 2.0, n_report=21, order=4,
                  tolerance=1e-11)
    # a trace shift only multiplies by a global phase
    phase = np.exp(-0.3j * a.times)[:, None]
    assert np.max(np.abs(b.states - phase * a.states)) < 1e-10


@pytest.mark.parametrize("order", [2, 4])
def test_bare_lz_against_dop853(lz, order):
    times = np.linspace(0, 2, 201)
    ref = dop853_oracle(lz, [1, 0], times)
    traj = propagate(lz, np.array([1, 0]), 2.0, tolerance=1e-10, n_report=201, order=order)
    assert np.max(np.abs(traj.states - ref)) < 1e-8
    assert abs(traj.populations[-1, 0] - abs(ref[-1, 0]) ** 2) < 1e-8


@pytest.mark.parametrize("order", [2, 4])
def test_observed_convergence_order(lz, order):
    ref = propagate(lz, np.array([1, 0]), 2.0, tolerance=1e-13, n_report=2, order=4).final_state

    def err(m):
        # infinite tolerance: one doubling from m, so exactly 2m steps
        s = propagate(lz, np.array([1, 0]), 2.0, tolerance=np.inf, n_report=2, order=order, initial_steps=m)
        assert s.steps_per_interval == 2 * m
        return np.linalg.norm(s.final_state - ref)

    rate = np.log2(err(512) / err(1024))
    assert order - 0.5 <= rate <= order + 0.5


def test_step_underflow(lz):
    with pytest.raises(StepUnderflow):
        propagate(lz, np.array([1, 0]), 2.0, n_report=2, initial_steps=2**47)


def test_bad_order(lz):
    with pytest.raises(ValueError):
        propagate(lz, np.array([1, 0]), 2.0, order=3)


def test_block_of_columns(lz):
    block = np.array([[1, 0.6], [0, 0.8j]])
    traj = propagate(lz, block, 2.0, n_report=11, order=4, tolerance=1e-11)
    a = propagate(lz, block[:, 0], 2.0, n_report=11, order=4, tolerance=1e-11)
    assert traj.states.shape == (11, 2, 2)
    assert np.max(np.abs(traj.states[:, :, 0] - a.states)) < 1e-10


def test_norm_and_population_sum(lz, rng):
    for _ in range(5):
        psi0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        traj = propagate(lz, psi0, 2.0, n_report=101)
        assert traj.norm_error < 1e-10
        np.testing.assert_allclose(traj.populations.sum(axis=1), 1, atol=1e-10)


def test_cd0_only_conserves_eigen_populations(lz_frames):
    f0, _ = lz_frames
    g = f0.basis(0.0) @ np.array([0.6, 0.8])
    traj = propagate(cd_term_0(f0), g, 2.0, tolerance=1e-11, n_report=201, order=4)
    p = eigen_populations(traj, f0)
    assert np.max(np.abs(p - [0.36, 0.64])) < 1e-9


def test_cd0_transitionless_for_random_schedules():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        s = FourierSchedule.random(rng, duration=1.0, n_modes=3)
        f0 = build_frame(s, n_grid=2001)
        traj = propagate(s + cd_term_0(f0), f0.basis(0.0)[:, 0], 1.0, tolerance=1e-11, n_report=101, order=4)
        worst = max(worst, float(np.max(np.abs(eigen_populations(traj, f0)[:, 0] - 1))))
    assert worst < 1e-8


def test_cd1_transitionless_in_product_basis(lz_protocols):
    pset = lz_protocols
    u01 = superadiabatic_product_frame(pset.frame0, pset.frame1)
    psi0 = u01.unitary(0.0) @ np.array([0.6, 0.8])
    traj = propagate(pset.hamiltonian("cd1"), psi0, 2.0, tolerance=1e-11, n_report=201, order=4)
    amps = np.einsum("tij,tj->ti", dagger(u01.unitary(traj.times)), traj.states)
    assert np.max(np.abs(np.abs(amps) ** 2 - [0.36, 0.64])) < 1e-8


unit = st.tuples(*[st.floats(-1, 1)] * 4).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=50, deadline=None)
@given(unit, unit, st.floats(0, 2 * np.pi))
def test_fidelity_properties(a, b, phase):
    psi = np.array([a[0] + 1j * a[1], a[2] + 1j * a[3]])
    phi = np.array([b[0] + 1j * b[1], b[2] + 1j * b[3]])
    psi, phi = psi / np.linalg.norm(psi), phi / np.linalg.norm(phi)
    f = fidelity(psi, phi)
    assert -1e-15 <= f <= 1 + 1e-12
    assert fidelity(psi, psi) == pytest.approx(1)
    assert f == pytest.approx(fidelity(phi, psi), abs=1e-14)
    assert f == pytest.approx(fidelity(np.exp(1j * phase) * psi, phi), abs=1e-14)


def test_threaded_runs_match_sequential(lz_protocols):
    names = ["bare", "cd0", "zrot"]
    threaded = lz_protocols.run_all(names, n_report=101)
    for n in names:
        np.testing.assert_array_equal(threaded[n].trajectory.states, lz_protocols.run(n, n_report=101).trajectory.states)


def test_sigma_x_generator_matrix_path():
    # a matrix callable goes through the Pauli decomposition
    traj = propagate(lambda t: np.broadcast_to(0.5 * np.pi * SIGMA_X, np.shape(t) + (2, 2)), np.array([1, 0]), 1.0,
                     n_report=2)
    np.testing.assert_allclose(np.abs(traj.final_state), [0, 1], atol=1e-12)
