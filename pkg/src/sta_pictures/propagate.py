"""
Norm-preserving propagation of two-level states.

Each step multiplies by the exact exponential of the Hamiltonian sampled
at the step midpoint (closed form for 2x2, hence exactly unitary up to
rounding), which is second-order accurate. ``order=4`` switches to the
two-point Gauss-Legendre Magnus step, also a single closed-form exponential.

Step sizes are uniform inside each reporting interval. Starting from a
coarse subdivision, the step count is doubled until the largest deviation
between a run and the run with half the step falls below `tolerance`; the
finer run is returned. All steps of one pass are evaluated in a single
vectorized call to the Hamiltonian, so `hamiltonian(t)` must accept an
array of times and return an array of shape (..., 2, 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import StepUnderflow
from .su2 import dagger, pauli_components

# Steps are generated in chunks of at most this many to bound memory.
_CHUNK = 1 << 18
_GL = np.sqrt(3) / 6


@dataclass
class TwoLevelTrajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 2)
    steps_per_interval: int
    error_estimate: float

    @property
    def populations(self) -> np.ndarray:
        """Bare-basis populations, shape (n, 2)."""
        return np.abs(self.states) ** 2

    @property
    def norm_error(self) -> float:
        return float(np.max(np.abs(np.sum(self.populations, axis=1) - 1)))

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _as_components(hamiltonian) -> Callable:
    """t -> (trace/2, x, y, z) real arrays for a schedule or matrix-valued callable."""
    if hasattr(hamiltonian, "coords"):
        def comps(t):
            c = hamiltonian.coords(t)
            x, y, z = np.broadcast_arrays(c.x, c.y, c.z, np.asarray(t))[:3]
            return 0.0, x, y, z
        return comps

    def comps(t):
        m = np.asarray(hamiltonian(t))
        c = pauli_components(m)
        return 0.5 * (m[..., 0, 0] + m[..., 1, 1]).real, c.x, c.y, c.z
    return comps


# A step unitary is stored as exp(-i phi) (w I - i v.sigma), w^2 + |v|^2 = 1,
# i.e. a phase plus a unit quaternion, all real.

def _exp_components(a, x, y, z, dt):
    r = np.sqrt(x * x + y * y + z * z)
    s = dt * np.sinc(r * dt / np.pi)  # sin(r dt)/r
    return a * dt, np.cos(r * dt), s * x, s * y, s * z


def _step_unitaries(h: Callable, t0, dt, order):
    """Exponentials for steps starting at times t0 with width dt (broadcast)."""
    if order == 2:
        return _exp_components(*h(t0 + 0.5 * dt), dt)
    a1, x1, y1, z1 = h(t0 + (0.5 - _GL) * dt)
    a2, x2, y2, z2 = h(t0 + (0.5 + _GL) * dt)
    # [H2, H1] = 2i (h2 x h1).sigma enters the Magnus term as (sqrt3/6) dt (h2 x h1)
    k = (np.sqrt(3) / 6) * dt
    return _exp_components(
        0.5 * (np.asarray(a1) + a2),
        0.5 * (x1 + x2) + k * (y2 * z1 - z2 * y1),
        0.5 * (y1 + y2) + k * (z2 * x1 - x2 * z1),
        0.5 * (z1 + z2) + k * (x2 * y1 - y2 * x1),
        dt,
    )


def _compose(later, earlier):
    p2, w2, x2, y2, z2 = later
    p1, w1, x1, y1, z1 = earlier
    return (
        p2 + p1,
        w2 * w1 - (x2 * x1 + y2 * y1 + z2 * z1),
        w2 * x1 + w1 * x2 + (y2 * z1 - z2 * y1),
        w2 * y1 + w1 * y2 + (z2 * x1 - x2 * z1),
        w2 * z1 + w1 * z2 + (x2 * y1 - y2 * x1),
    )


def _product_tree(u):
    """Ordered product over the last axis, latest step leftmost (length a power of 2)."""
    while u[1].shape[-1] > 1:
        u = _compose([c[..., 1::2] for c in u], [c[..., 0::2] for c in u])
    return [c[..., 0] for c in u]


def _to_matrix(p, w, x, y, z):
    u = np.empty(np.shape(w) + (2, 2), dtype=complex)
    u[..., 0, 0] = w - 1j * z
    u[..., 1, 1] = w + 1j * z
    u[..., 0, 1] = -1j * x - y
    u[..., 1, 0] = -1j * x + y
    return u * np.exp(-1j * np.asarray(p))[..., None, None]


def _interval_propagators(h, times, m, order):
    n = len(times) - 1
    dt_int = np.diff(times)
    out = np.empty((n, 2, 2), dtype=complex)
    per = max(1, _CHUNK // m)
    for i in range(0, n, per):
        j = min(n, i + per)
        dt = (dt_int[i:j] / m)[:, None]
        t0 = times[i:j, None] + dt * np.arange(m)
        u = _step_unitaries(h, t0, np.broadcast_to(dt, t0.shape), order)
        u = [np.broadcast_to(c, t0.shape) for c in u]
        out[i:j] = _to_matrix(*_product_tree(u))
    return out


def _run(h, times, psi0, m, order):
    props = _interval_propagators(h, times, m, order)
    states = np.empty((len(times),) + np.shape(psi0), dtype=complex)
    states[0] = psi0
    psi = np.asarray(psi0, dtype=complex)
    for k, u in enumerate(props):
        psi = u @ psi
        states[k + 1] = psi
    return states


def propagate(hamiltonian, psi0, t_final: float, tolerance: float = 1e-10, n_report: int = 2001,
              t_initial: float = 0.0, order: int = 2, initial_steps: int = 1) -> TwoLevelTrajectory:
    """
    Solve i d/dt psi = H(t) psi from t_initial to t_final (hbar = 1).

    `hamiltonian` is a DriveSchedule or a vectorized callable t -> (..., 2, 2).
    `psi0` may also be a (2, k) block of columns propagated together.
    States are reported on `n_report` equally spaced times.
    Raises StepUnderflow if the step would drop below 1e-14 * (t_final - t_initial).
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    h = _as_components(hamiltonian)
    psi0 = np.asarray(psi0, dtype=complex)
    psi0 = psi0 / np.linalg.norm(psi0, axis=0)
    times = np.linspace(t_initial, t_final, n_report)
    span = abs(t_final - t_initial)
    interval = span / max(n_report - 1, 1)
    m = 1 << max(0, int(np.ceil(np.log2(max(initial_steps, 1)))))

    def check(m):
        if interval / m < 1e-14 * span:
            raise StepUnderflow(f"step {interval / m:.3g} below 1e-14 of the time span")

    check(2 * m)
    coarse = _run(h, times, psi0, m, order)
    while True:
        check(2 * m)
        fine = _run(h, times, psi0, 2 * m, order)
        err = float(np.max(np.linalg.norm(fine - coarse, axis=1)))
        m *= 2
        if err < tolerance:
            return TwoLevelTrajectory(times, fine, m, err)
        coarse = fine


def populations(traj_or_states) -> np.ndarray:
    states = traj_or_states.states if hasattr(traj_or_states, "states") else np.asarray(traj_or_states)
    return np.abs(states) ** 2


def eigen_populations(traj: TwoLevelTrajectory, frame) -> np.ndarray:
    """Populations in the frame's tracked eigenbasis, |<n_j(t)|psi(t)>|^2."""
    a = frame.basis(traj.times)
    amps = np.einsum("tij,tj->ti", dagger(a), traj.states)
    return np.abs(amps) ** 2


def fidelity(psi, phi) -> float:
    """|<phi|psi>|^2 for normalized states."""
    return float(np.abs(np.vdot(phi, psi)) ** 2)
