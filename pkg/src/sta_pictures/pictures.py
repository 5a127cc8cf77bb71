"""
Interaction-picture transforms between two-level Hamiltonians.

A frame is a time-dependent unitary U(t) together with its generator
K = i dU/dt U^dagger. States relate by psi_S = U psi_I, and the picture
Hamiltonian is H_I = U^dagger (H_S - K) U. All callables here take an array
of times and return (..., 2, 2) matrices (hbar = 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .adiabatic import AdiabaticFrame, TransformedCoupling
from .errors import PhaseBranchError
from .schedules import DriveSchedule, theta_derivatives
from .su2 import IDENTITY, SIGMA_Z, Su2Coords, dagger, to_matrix


@dataclass(frozen=True)
class FrameGenerator:
    """U(t) and K(t) = i dU/dt U^dagger as vectorized callables."""

    unitary: Callable
    generator: Callable
    name: str = ""

    def to_picture(self, psi_s, t):
        return dagger(self.unitary(t)) @ psi_s

    def from_picture(self, psi_i, t):
        return self.unitary(t) @ psi_i

    def then(self, inner: "FrameGenerator") -> "FrameGenerator":
        """Composite frame U = U_self U_inner, K = K_self + U_self K_inner U_self^dagger."""

        def u(t):
            return self.unitary(t) @ inner.unitary(t)

        def k(t):
            a = self.unitary(t)
            return self.generator(t) + a @ inner.generator(t) @ dagger(a)

        return FrameGenerator(u, k, f"{self.name}*{inner.name}")


def _hcall(h) -> Callable:
    if isinstance(h, DriveSchedule):
        return h.matrix
    return h


def ip_transform(hamiltonian, frame: FrameGenerator) -> Callable:
    """H_I(t) = U^dagger (H_S - K) U."""
    h = _hcall(hamiltonian)

    def h_i(t):
        u = frame.unitary(t)
        return dagger(u) @ (h(t) - frame.generator(t)) @ u

    return h_i


def identity_frame() -> FrameGenerator:
    def u(t):
        return np.broadcast_to(IDENTITY, np.shape(t) + (2, 2)).copy()

    return FrameGenerator(u, lambda t: np.zeros(np.shape(t) + (2, 2), dtype=complex), "1")


def adiabatic_frame_generator(frame: AdiabaticFrame) -> FrameGenerator:
    """The basis change A_j as a frame; its generator is K_j."""
    return FrameGenerator(frame.basis, lambda t: to_matrix(frame.coupling(t)), f"A{frame.level}")


def superadiabatic_product_frame(frame0: AdiabaticFrame, frame1: AdiabaticFrame) -> FrameGenerator:
    """U_01 = A_0 A_1, generated by K_0 + A_0 K_1 A_0^dagger."""
    composite = adiabatic_frame_generator(frame0).then(adiabatic_frame_generator(frame1))
    cd1 = TransformedCoupling(frame0, frame1)
    return FrameGenerator(composite.unitary,
                          lambda t: to_matrix(frame0.coupling(t) + cd1.coords(t)), "U01")


def diagonal_phase_frame(angle: Callable, rate: Callable, name: str = "") -> FrameGenerator:
    """
    U = diag(e^{-i angle/2}, e^{i angle/2}) with K = (rate/2) sigma_z,
    where rate = d(angle)/dt.
    """

    def u(t):
        a = np.asarray(angle(t))
        out = np.zeros(a.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = np.exp(-0.5j * a)
        out[..., 1, 1] = np.exp(0.5j * a)
        return out

    def k(t):
        return 0.5 * np.asarray(rate(t))[..., None, None] * SIGMA_Z

    return FrameGenerator(u, k, name)


# -- rotation about Z -------------------------------------------------------

class ZRotationShortcut(DriveSchedule):
    """
    The Hamiltonian U_z^dagger (H_0 + K_0 - K_z) U_z for a Y = 0 schedule:
    X' = P = sqrt(X^2 + (dTheta/dt / 2)^2), Y' = 0, Z' = Z - dphi/dt / 2,
    with phi the argument of X + i dTheta/dt / 2, followed continuously.
    """

    def __init__(self, schedule: DriveSchedule):
        self.schedule = schedule
        self.duration = schedule.duration
        probe = schedule.coords(np.linspace(0, self.duration, 2001))
        if np.any(probe.y != 0):
            raise ValueError("z-rotation shortcut needs Y = 0")
        if np.any(probe.x == 0) or np.any(np.sign(probe.x) != np.sign(probe.x[0])):
            raise PhaseBranchError("X crosses zero; the phase phi cannot stay on one branch")
        self._x_sign = float(np.sign(probe.x[0]))

    def phase(self, t):
        """phi(t) and d(phi)/dt."""
        c, d = self.schedule.coords(t), self.schedule.coords_dot(t)
        _, th_d, th_dd = theta_derivatives(self.schedule, t)
        u = 0.5 * th_d / c.x
        u_d = 0.5 * (th_dd * c.x - th_d * d.x) / c.x**2
        phi = np.arctan(u) + (np.pi if self._x_sign < 0 else 0.0)
        return phi, u_d / (1 + u**2)

    def coords(self, t):
        c = self.schedule.coords(t)
        _, th_d, _ = theta_derivatives(self.schedule, t)
        _, phi_d = self.phase(t)
        p = np.sqrt(c.x**2 + 0.25 * th_d**2)
        return Su2Coords(p, np.zeros_like(p), c.z - 0.5 * phi_d)

    def frame(self) -> FrameGenerator:
        """U_z relating the shortcut (picture side) to H_0 + K_0 (Schrodinger side)."""
        return diagonal_phase_frame(lambda t: self.phase(t)[0], lambda t: self.phase(t)[1], "Uz")


def z_rotation_shortcut(schedule: DriveSchedule, frame0: AdiabaticFrame | None = None) -> ZRotationShortcut:
    """
    `frame0` is accepted for symmetry with the other shortcut builders; for
    Y = 0 its coupling is (dTheta/dt / 2) sigma_y, which is what is used here.
    """
    return ZRotationShortcut(schedule)


# -- two-level atom in an oscillating field ---------------------------------

def accumulated_phase(rate: Callable, t_final: float, n_intervals: int = 4000, n_gauss: int = 8) -> Callable:
    """
    theta(t) = int_0^t rate dt' by composite Gauss-Legendre quadrature on a
    uniform grid, interpolated by a cubic Hermite spline that uses the exact
    rate as the slope at each node.
    """
    from scipy.interpolate import CubicHermiteSpline

    nodes = np.linspace(0, t_final, n_intervals + 1)
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    h = np.diff(nodes)
    pts = nodes[:-1, None] + 0.5 * h[:, None] * (x + 1)
    pieces = 0.5 * h * np.sum(w * np.asarray(rate(pts)), axis=1)
    values = np.concatenate([[0.0], np.cumsum(pieces)])
    return CubicHermiteSpline(nodes, values, np.asarray(rate(nodes)), extrapolate=True)


class LabFrameHamiltonian:
    """
    (1/2) [[-w_diag(t), c(t) e^{i theta(t)}], [conj(c) e^{-i theta}, w_diag(t)]]

    for a two-level atom in an oscillating field, with `coupling` c(t) the
    complex envelope of the field, w_diag the (possibly time-dependent)
    transition frequency and theta the accumulated field phase. `frame` maps
    it to the rotating-frame Hamiltonian that generated it.
    """

    def __init__(self, coupling: Callable, theta: Callable, diagonal: Callable, frame: FrameGenerator,
                 omega0: float, name: str = ""):
        self.coupling = coupling
        self.theta = theta
        self.diagonal = diagonal
        self.frame = frame
        self.omega0 = omega0
        self.name = name

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        c = np.asarray(self.coupling(t), dtype=complex) * np.ones_like(t)
        phase = np.exp(1j * np.asarray(self.theta(t)))
        w = np.asarray(self.diagonal(t), dtype=float) * np.ones_like(t)
        h = np.empty(t.shape + (2, 2), dtype=complex)
        h[..., 0, 0] = -0.5 * w
        h[..., 1, 1] = 0.5 * w
        h[..., 0, 1] = 0.5 * c * phase
        h[..., 1, 0] = np.conj(h[..., 0, 1])
        return h


def rotating_frame_hamiltonian(rabi: Callable, detuning: Callable, duration: float) -> DriveSchedule:
    """Rotating-frame H_0 with X = Omega_R / 2, Y = 0, Z = -Delta / 2."""
    from .schedules import CallableSchedule

    return CallableSchedule(lambda t: (0.5 * np.asarray(rabi(t)), 0.0, -0.5 * np.asarray(detuning(t))), duration)


def lab_frame_generator(detuning: Callable, omega0: float, t_final: float) -> tuple[FrameGenerator, Callable]:
    """
    U_L = exp(-i int K_L), K_L = -(omega/2) sigma_z with omega = omega0 - Delta.
    Returns the frame and theta(t) = int_0^t omega.
    """

    def omega(t):
        return omega0 - np.asarray(detuning(t), dtype=float)

    theta = accumulated_phase(omega, t_final)
    # U_L = diag(e^{i theta/2}, e^{-i theta/2}) in the diagonal_phase_frame convention
    frame = diagonal_phase_frame(lambda t: -theta(t), lambda t: -omega(t), "UL")
    return frame, theta


def rwa_lab_frame(rabi: Callable, detuning: Callable, omega0: float, t_final: float) -> LabFrameHamiltonian:
    """K_L + U_L H_0 U_L^dagger for H_0 = (Omega_R/2) sx - (Delta/2) sz."""
    _check_positive_frequency(detuning, omega0, t_final)
    frame, theta = lab_frame_generator(detuning, omega0, t_final)
    return LabFrameHamiltonian(rabi, theta, lambda t: omega0, frame, omega0, "rwa")


def cd_lab_frame(rabi: Callable, detuning: Callable, omega0: float, frame0: AdiabaticFrame) -> LabFrameHamiltonian:
    """
    K_L + U_L (H_0 + K_0) U_L^dagger. For a Y = 0 rotating-frame H_0 the
    field envelope becomes Omega_R - i dTheta/dt: two quadratures pi/2 apart.
    """
    t_final = frame0.duration
    _check_positive_frequency(detuning, omega0, t_final)
    frame, theta = lab_frame_generator(detuning, omega0, t_final)

    def coupling(t):
        k = frame0.coupling(t)
        return np.asarray(rabi(t)) + 2 * (k.x - 1j * k.y)

    return LabFrameHamiltonian(coupling, theta, lambda t: omega0, frame, omega0, "cd0")


def cd_only_lab_frame(detuning: Callable, omega0: float, frame0: AdiabaticFrame) -> LabFrameHamiltonian:
    """K_L + U_L K_0 U_L^dagger: K_0 alone, carried by the chirped frame, time-dependent diagonal."""
    t_final = frame0.duration
    _check_positive_frequency(detuning, omega0, t_final)
    frame, theta = lab_frame_generator(detuning, omega0, t_final)

    def coupling(t):
        k = frame0.coupling(t)
        return 2 * (k.x - 1j * k.y)

    def diagonal(t):
        return omega0 - np.asarray(detuning(t), dtype=float)

    return LabFrameHamiltonian(coupling, theta, diagonal, frame, omega0, "cd0-only-chirped")


def resonant_cd_only(frame0: AdiabaticFrame, omega0: float) -> LabFrameHamiltonian:
    """
    K' + U' K_0 U'^dagger with K' = -(omega0/2) sigma_z: K_0 delivered by a
    single field at the fixed transition frequency omega0.
    """
    frame = diagonal_phase_frame(lambda t: -omega0 * np.asarray(t, dtype=float),
                                 lambda t: -omega0 * np.ones_like(np.asarray(t, dtype=float)), "U'")

    def coupling(t):
        k = frame0.coupling(t)
        return 2 * (k.x - 1j * k.y)

    return LabFrameHamiltonian(coupling, lambda t: omega0 * np.asarray(t, dtype=float), lambda t: omega0,
                               frame, omega0, "cd0-only-resonant")


def _check_positive_frequency(detuning, omega0, t_final):
    w = omega0 - np.asarray(detuning(np.linspace(0, t_final, 2001)), dtype=float)
    if np.any(w <= 0):
        raise ValueError("field frequency omega0 - Delta(t) must stay positive")
