"""
Adiabatic and superadiabatic frames for two-level Hamiltonians.

For a level-j Hamiltonian H_j(t) with unit Bloch vector n(t), the basis
transformation A_j(t) has the instantaneous eigenvectors as columns, with
phases chosen so that <n_j|d/dt n_j> = 0. Its generator is

    K_j = i dA_j/dt A_j^dagger = (1/2) (n x dn/dt) . sigma,

which does not depend on any phase convention. A_j is obtained by
integrating dA/dt = -i K_j A from the eigenbasis at t = 0; columns that
start as eigenvectors stay eigenvectors and the phase accumulated along
the way is exactly the geometric phase. The next iterate is

    H_{j+1} = A_j^dagger (H_j - K_j) A_j.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DegenerateHamiltonian, GridTooCoarse
from .schedules import DriveSchedule, theta_derivatives
from .su2 import DEGENERACY_RTOL, Su2Coords, dagger, eigensystem, pauli_components, to_matrix

DEFAULT_GRID_POINTS = 4001
MIN_ADJACENT_OVERLAP = 0.99


def _unit_vector_derivatives(c: Su2Coords, d: Su2Coords, dd: Su2Coords | None = None):
    r = c.as_array()
    rd = d.as_array()
    r2 = np.sum(r * r, axis=-1, keepdims=True)
    u = 1 / np.sqrt(r2)
    rrd = np.sum(r * rd, axis=-1, keepdims=True)
    u_d = -rrd * u**3
    n = r * u
    n_d = rd * u + r * u_d
    if dd is None:
        return n, n_d, None
    rdd = dd.as_array()
    u_dd = -(np.sum(rd * rd, axis=-1, keepdims=True) + np.sum(r * rdd, axis=-1, keepdims=True)) * u**3 + 3 * rrd**2 * u**5
    n_dd = rdd * u + 2 * rd * u_d + r * u_dd
    return n, n_d, n_dd


def _half_cross(a, b) -> Su2Coords:
    return Su2Coords(0.5 * (a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]),
                     0.5 * (a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]),
                     0.5 * (a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]))


def coupling_coords(c: Su2Coords, d: Su2Coords) -> Su2Coords:
    """Counterdiabatic generator (1/2) n x dn/dt in Pauli components."""
    n, n_d, _ = _unit_vector_derivatives(c, d)
    return _half_cross(n, n_d)


def coupling_dot_coords(c: Su2Coords, d: Su2Coords, dd: Su2Coords) -> Su2Coords:
    n, _, n_dd = _unit_vector_derivatives(c, d, dd)
    return _half_cross(n, n_dd)


def _polar_unitary(a):
    u, _, vh = np.linalg.svd(a)
    return u @ vh


class AdiabaticFrame:
    """
    Level-j basis A_j(t), its generator K_j(t) and the next iterate.

    The eigenbasis is checked on a uniform time grid (`n_grid` points by
    default). The transport equation is integrated with an adaptive
    high-order stepper, A_j is tabulated on the grid (extended slightly past
    both ends) and interpolated between nodes by cubic Hermite splines whose
    slopes are the exact derivative -i K_j A_j.
    """

    def __init__(self, hamiltonian: DriveSchedule, grid=None, level: int = 0,
                 n_grid: int = DEFAULT_GRID_POINTS, initial_phases=None, tolerance: float = 1e-13):
        self.hamiltonian = hamiltonian
        self.level = level
        self.duration = hamiltonian.duration
        self.grid = np.linspace(0, self.duration, n_grid) if grid is None else np.asarray(grid, dtype=float)
        coords = hamiltonian.coords(self.grid)
        self.scale = float(np.max(coords.radius))
        if self.scale == 0 or np.any(coords.radius < DEGENERACY_RTOL * self.scale):
            raise DegenerateHamiltonian(f"level-{level} Hamiltonian has a vanishing gap on the grid")
        _, upper = eigensystem(coords, ordering="descending", scale=self.scale)
        ov = np.abs(np.einsum("ti,ti->t", np.conj(upper[:-1, :, 0]), upper[1:, :, 0]))
        if ov.min() < MIN_ADJACENT_OVERLAP:
            raise GridTooCoarse(f"adjacent eigenvector overlap {ov.min():.4f} < {MIN_ADJACENT_OVERLAP}")

        c0 = hamiltonian.coords(0.0)
        _, a0 = eigensystem(c0, ordering="bare", scale=self.scale)
        if initial_phases is not None:
            a0 = a0 * np.exp(1j * np.asarray(initial_phases, dtype=float))
        self.initial_basis = a0
        # how far the t = 0 eigenbasis is from the reference (bare) basis
        self.initial_overlap_deficit = float(1 - min(abs(a0[0, 0]) ** 2, abs(a0[1, 1]) ** 2))
        self._solve_transport(a0, tolerance)

    def _solve_transport(self, a0, tolerance):
        # i dA/dt = K A is a Schrodinger equation for the two columns, so the
        # unitary propagator does the work; deeper levels differentiate
        # shallower ones near the endpoints, hence the shrinking padding
        from .propagate import propagate

        pad = 0.04 * self.duration / (self.level + 1)
        h = self.duration / max(len(self.grid) - 1, 1)
        n_pad = max(1, int(np.ceil(pad / h)))
        k = CouplingSchedule(self)
        kw = dict(tolerance=tolerance, order=4)
        fwd = propagate(k, a0, self.duration + n_pad * h, n_report=len(self.grid) + n_pad, **kw)
        bwd = propagate(k, a0, -n_pad * h, n_report=n_pad + 1, **kw)
        nodes = np.concatenate([bwd.times[:0:-1], fwd.times])
        a = _polar_unitary(np.concatenate([bwd.states[:0:-1], fwd.states]))
        da = -1j * to_matrix(self.coupling(nodes)) @ a
        self._spline = CubicHermiteSpline(nodes, a.reshape(-1, 4), da.reshape(-1, 4), axis=0, extrapolate=False)
        self._domain = (nodes[0], nodes[-1])
        self.transport_error = max(fwd.error_estimate, bwd.error_estimate)

    def basis(self, t) -> np.ndarray:
        """A_j(t), shape (..., 2, 2); columns are the tracked eigenvectors."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self._domain[0]) or np.any(t > self._domain[1]):
            raise ValueError("time outside the frame's domain")
        return self._spline(t).reshape(t.shape + (2, 2))

    def basis_dot(self, t) -> np.ndarray:
        return -1j * to_matrix(self.coupling(t)) @ self.basis(t)

    def basis_on_grid(self) -> np.ndarray:
        return self.basis(self.grid)

    def coupling(self, t) -> Su2Coords:
        """K_j(t) in Pauli components."""
        return coupling_coords(*self.hamiltonian.coords_and_dot(t))

    def coupling_dot(self, t) -> Su2Coords:
        h = self.hamiltonian
        return coupling_dot_coords(h.coords(t), h.coords_dot(t), h.coords_ddot(t))

    def next_hamiltonian(self, t) -> Su2Coords:
        """H_{j+1}(t) = A^dagger (H_j - K_j) A."""
        a = self.basis(t)
        m = to_matrix(self.hamiltonian.coords(t) - self.coupling(t))
        return pauli_components(dagger(a) @ m @ a)

    def next_hamiltonian_dot(self, t) -> Su2Coords:
        return self.next_hamiltonian_and_dot(t)[1]

    def next_hamiltonian_and_dot(self, t):
        """H_{j+1} and its time derivative, sharing one basis evaluation."""
        h = self.hamiltonian
        c, d = h.coords_and_dot(t)
        dd = h.coords_ddot(t)
        a = self.basis(t)
        ad = dagger(a)
        k = to_matrix(coupling_coords(c, d))
        m = to_matrix(c) - k
        m_dot = to_matrix(d - coupling_dot_coords(c, d, dd))
        return (pauli_components(ad @ m @ a),
                pauli_components(ad @ (m_dot + 1j * (k @ m - m @ k)) @ a))


class IterateSchedule(DriveSchedule):
    """The level-(j+1) Hamiltonian produced by a level-j frame."""

    def __init__(self, frame: AdiabaticFrame):
        self.frame = frame
        self.duration = frame.duration

    @property
    def fd_step(self):
        # balances truncation against the C1 joins of the basis spline
        return 1e-4 * self.duration

    def coords(self, t):
        return self.frame.next_hamiltonian(t)

    def coords_dot(self, t):
        return self.frame.next_hamiltonian_dot(t)

    def coords_and_dot(self, t):
        return self.frame.next_hamiltonian_and_dot(t)


class CouplingSchedule(DriveSchedule):
    """K_j(t) of a frame, viewed as a Hamiltonian schedule."""

    def __init__(self, frame: AdiabaticFrame):
        self.frame = frame
        self.duration = frame.duration

    def coords(self, t):
        return self.frame.coupling(t)

    def coords_dot(self, t):
        return self.frame.coupling_dot(t)


class TransformedCoupling(DriveSchedule):
    """A_0 K_1 A_0^dagger: a level-1 coupling carried back to the lab picture."""

    def __init__(self, frame0: AdiabaticFrame, frame1: AdiabaticFrame):
        self.frame0 = frame0
        self.frame1 = frame1
        self.duration = frame0.duration

    def _matrix(self, t):
        a = self.frame0.basis(t)
        return a @ to_matrix(self.frame1.coupling(t)) @ dagger(a)

    def coords(self, t):
        return pauli_components(self._matrix(t))

    def coords_dot(self, t):
        a = self.frame0.basis(t)
        c = self._matrix(t)
        k0 = to_matrix(self.frame0.coupling(t))
        kd = a @ to_matrix(self.frame1.coupling_dot(t)) @ dagger(a)
        return pauli_components(kd - 1j * (k0 @ c - c @ k0))


def build_frame(schedule: DriveSchedule, grid=None, level: int | None = None, **kw) -> AdiabaticFrame:
    """Adiabatic frame of `schedule` (an IterateSchedule gives a superadiabatic frame)."""
    if level is None:
        level = schedule.frame.level + 1 if isinstance(schedule, IterateSchedule) else 0
    return AdiabaticFrame(schedule, grid=grid, level=level, **kw)


def iterate(frame: AdiabaticFrame) -> IterateSchedule:
    return IterateSchedule(frame)


def superadiabatic_frames(schedule: DriveSchedule, depth: int, **kw) -> list[AdiabaticFrame]:
    """Frames A_0 ... A_depth built by repeated iteration."""
    frames = [build_frame(schedule, **kw)]
    for _ in range(depth):
        frames.append(build_frame(iterate(frames[-1]), **kw))
    return frames


def cd_term_0(frame0: AdiabaticFrame) -> CouplingSchedule:
    """Counterdiabatic term K_0."""
    return CouplingSchedule(frame0)


def cd_term_1(frame0: AdiabaticFrame, frame1: AdiabaticFrame) -> TransformedCoupling:
    """Superadiabatic counterdiabatic term A_0 K_1 A_0^dagger."""
    return TransformedCoupling(frame0, frame1)


def cd_term_01(frame0: AdiabaticFrame, frame1: AdiabaticFrame) -> DriveSchedule:
    return cd_term_0(frame0) + cd_term_1(frame0, frame1)


def cd_term_1_closed_form(schedule: DriveSchedule, t) -> Su2Coords:
    """
    Closed form of A_0 K_1 A_0^dagger for a schedule with Y = 0, X > 0 and
    Z(0) > 0 (so the first frame column is the upper eigenvector):

        s * (dTheta_1/dt / 2) (cos Theta_0 sx - sin Theta_0 sz),  s = sign(dTheta_0/dt),

    where Theta_1 = atan2(|dTheta_0/dt| / 2, R_0) is the polar angle of H_1.
    The sign factor absorbs the orientation of the azimuth of H_1.
    """
    c0 = schedule.coords(0.0)
    if not (c0.z > 0):
        raise ValueError("closed form assumes Z(0) > 0")
    c = schedule.coords(t)
    if np.any(c.y != 0) or np.any(c.x <= 0):
        raise ValueError("closed form assumes Y = 0 and X > 0")
    theta0, th0_d, th0_dd = theta_derivatives(schedule, t)
    r = c.radius
    r_d = (c.x * schedule.coords_dot(t).x + c.z * schedule.coords_dot(t).z) / r
    # signed version of Theta_1 keeps the expression smooth through dTheta_0/dt = 0
    u = 0.5 * th0_d / r
    u_d = 0.5 * (th0_dd * r - th0_d * r_d) / r**2
    signed_th1_d = u_d / (1 + u**2)
    amp = 0.5 * signed_th1_d
    return Su2Coords(amp * np.cos(theta0), np.zeros_like(amp), -amp * np.sin(theta0))
