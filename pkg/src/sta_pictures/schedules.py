"""
Time-dependent driving schedules H(t) = x(t) sx + y(t) sy + z(t) sz on [0, t_f].

A schedule exposes its coordinates and their first and second time
derivatives. Subclasses that know their derivatives analytically override
``coords_dot``/``coords_ddot``; otherwise central differences with one
Richardson refinement are used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateHamiltonian, InvalidSchedule
from .su2 import DEGENERACY_RTOL, Su2Coords, to_matrix


def richardson_derivative(f: Callable, t, h: float):
    """
    First derivative of an array-valued f by central differences at steps
    h and h/2, combined to cancel the O(h^2) term.
    """
    t = np.asarray(t, dtype=float)
    d1 = (f(t + h) - f(t - h)) / (2 * h)
    d2 = (f(t + h / 2) - f(t - h / 2)) / h
    return (4 * d2 - d1) / 3


class DriveSchedule:
    """Base class; subclasses set ``duration`` and implement ``coords``."""

    duration: float

    def coords(self, t) -> Su2Coords:
        raise NotImplementedError

    @property
    def fd_step(self) -> float:
        return 1e-5 * self.duration

    def coords_dot(self, t) -> Su2Coords:
        return Su2Coords.from_array(
            richardson_derivative(lambda s: self.coords(s).as_array(), t, self.fd_step)
        )

    def coords_ddot(self, t) -> Su2Coords:
        return Su2Coords.from_array(
            richardson_derivative(lambda s: self.coords_dot(s).as_array(), t, self.fd_step)
        )

    def coords_and_dot(self, t) -> tuple[Su2Coords, Su2Coords]:
        return self.coords(t), self.coords_dot(t)

    def matrix(self, t) -> np.ndarray:
        return to_matrix(self.coords(t))

    def __call__(self, t) -> np.ndarray:
        return self.matrix(t)

    def energy_scale(self, n: int = 201) -> float:
        """Largest radius R over a uniform sample of [0, t_f]."""
        return float(np.max(self.coords(np.linspace(0, self.duration, n)).radius))

    def __add__(self, other: "DriveSchedule") -> "SumSchedule":
        return SumSchedule((self, other))


@dataclass(frozen=True)
class SumSchedule(DriveSchedule):
    terms: tuple

    @property
    def duration(self):
        return self.terms[0].duration

    def coords(self, t):
        return _sum(s.coords(t) for s in self.terms)

    def coords_dot(self, t):
        return _sum(s.coords_dot(t) for s in self.terms)

    def coords_ddot(self, t):
        return _sum(s.coords_ddot(t) for s in self.terms)


def _sum(it):
    it = iter(it)
    acc = next(it)
    for c in it:
        acc = acc + c
    return acc


@dataclass(frozen=True)
class LzSchedule(DriveSchedule):
    """Landau-Zener sweep: X = x0, Y = 0, Z = alpha (t - T/2)."""

    alpha: float
    x0: float
    duration: float

    def coords(self, t):
        t = np.asarray(t, dtype=float)
        return Su2Coords(np.full_like(t, self.x0), np.zeros_like(t), self.alpha * (t - self.duration / 2))

    def coords_dot(self, t):
        t = np.asarray(t, dtype=float)
        return Su2Coords(np.zeros_like(t), np.zeros_like(t), np.full_like(t, self.alpha))

    def coords_ddot(self, t):
        t = np.asarray(t, dtype=float)
        z = np.zeros_like(t)
        return Su2Coords(z, z, z)


def lz_schedule(alpha: float, x0: float, T: float) -> LzSchedule:
    if x0 == 0:
        raise InvalidSchedule("x0 = 0 makes the level crossing an exact degeneracy")
    if not T > 0:
        raise InvalidSchedule("duration T must be positive")
    return LzSchedule(float(alpha), float(x0), float(T))


@dataclass(frozen=True)
class ConstantSchedule(DriveSchedule):
    x: float
    y: float
    z: float
    duration: float

    def coords(self, t):
        t = np.asarray(t, dtype=float)
        return Su2Coords(np.full_like(t, self.x), np.full_like(t, self.y), np.full_like(t, self.z))

    def coords_dot(self, t):
        t = np.asarray(t, dtype=float)
        z = np.zeros_like(t)
        return Su2Coords(z, z, z)

    coords_ddot = coords_dot


@dataclass(frozen=True)
class CallableSchedule(DriveSchedule):
    """
    User-supplied schedule. Each callable maps t (array) to a tuple
    (x, y, z); derivative callables are optional.
    """

    func: Callable
    duration: float
    dfunc: Callable | None = None
    ddfunc: Callable | None = None

    def coords(self, t):
        t = np.asarray(t, dtype=float)
        return Su2Coords(*(np.broadcast_to(c, t.shape) for c in self.func(t)))

    def coords_dot(self, t):
        if self.dfunc is None:
            return super().coords_dot(t)
        t = np.asarray(t, dtype=float)
        return Su2Coords(*(np.broadcast_to(c, t.shape) for c in self.dfunc(t)))

    def coords_ddot(self, t):
        if self.ddfunc is None:
            return super().coords_ddot(t)
        t = np.asarray(t, dtype=float)
        return Su2Coords(*(np.broadcast_to(c, t.shape) for c in self.ddfunc(t)))


@dataclass(frozen=True, eq=False)
class FourierSchedule(DriveSchedule):
    """
    Smooth schedule c(t) = offset + sum_k a_k sin(k pi t / T) + b_k cos(k pi t / T)
    per component, with analytic derivatives. Used for randomized checks.
    """

    offset: np.ndarray  # (3,)
    sin_coeffs: np.ndarray  # (3, K)
    cos_coeffs: np.ndarray  # (3, K)
    duration: float

    @classmethod
    def random(cls, rng: np.random.Generator, duration: float = 1.0, n_modes: int = 3,
               amplitude: float = 1.0, x_offset: float = 2.0, with_y: bool = True) -> "FourierSchedule":
        """
        Random schedule whose x component never crosses zero
        (|x_offset| exceeds the summed x amplitudes), so R > 0 throughout.
        """
        a = rng.uniform(-1, 1, (3, n_modes)) * amplitude / n_modes
        b = rng.uniform(-1, 1, (3, n_modes)) * amplitude / n_modes
        if not with_y:
            a[1] = b[1] = 0
        a[0] *= 0.45
        b[0] *= 0.45
        off = np.array([x_offset, 0.0, rng.uniform(-1, 1) * amplitude])
        return cls(off, a, b, float(duration))

    def _eval(self, t, order):
        t = np.asarray(t, dtype=float)
        k = np.arange(1, self.sin_coeffs.shape[1] + 1) * np.pi / self.duration
        arg = t[..., None] * k
        s, c = np.sin(arg), np.cos(arg)
        # derivative of order n: rotate (sin, cos) and scale by k^n
        if order == 0:
            fs, fc = s, c
        elif order == 1:
            fs, fc = k * c, -k * s
        else:
            fs, fc = -k**2 * s, -k**2 * c
        out = np.einsum("...k,ik->...i", fs, self.sin_coeffs) + np.einsum("...k,ik->...i", fc, self.cos_coeffs)
        if order == 0:
            out = out + self.offset
        return Su2Coords.from_array(out)

    def coords(self, t):
        return self._eval(t, 0)

    def coords_dot(self, t):
        return self._eval(t, 1)

    def coords_ddot(self, t):
        return self._eval(t, 2)


def theta_derivatives(s: DriveSchedule, t):
    """
    Polar angle Theta = atan2(sqrt(x^2 + y^2), z) of the schedule and its
    first two time derivatives, by the chain rule on the supplied
    coordinate derivatives.
    """
    c, d, dd = s.coords(t), s.coords_dot(t), s.coords_ddot(t)
    x, y, z = c.x, c.y, c.z
    r2 = x**2 + y**2 + z**2
    tol = DEGENERACY_RTOL * s.energy_scale()
    if np.any(np.sqrt(r2) <= tol):
        raise DegenerateHamiltonian("R vanishes on the requested times")
    rho = np.sqrt(x**2 + y**2)
    rho_d = (x * d.x + y * d.y) / rho
    rho_dd = (d.x**2 + d.y**2 + x * dd.x + y * dd.y) / rho - (x * d.x + y * d.y) ** 2 / rho**3
    num = rho_d * z - rho * d.z
    num_d = rho_dd * z - rho * dd.z
    rr_d = x * d.x + y * d.y + z * d.z
    theta = np.arctan2(rho, z)
    theta_d = num / r2
    theta_dd = num_d / r2 - 2 * num * rr_d / r2**2
    return theta, theta_d, theta_dd


class TabulatedSchedule(DriveSchedule):
    """
    Cubic Hermite interpolant of another schedule through its coordinates
    and first derivatives at `nodes`. Cheap to evaluate at many times; the
    error is O(h^4) in the node spacing.
    """

    def __init__(self, source: DriveSchedule, nodes):
        from scipy.interpolate import CubicHermiteSpline

        self.source = source
        self.duration = source.duration
        nodes = np.asarray(nodes, dtype=float)
        c, d = source.coords_and_dot(nodes)
        self._spline = CubicHermiteSpline(nodes, c.as_array(), d.as_array(), axis=0)
        self._dspline = self._spline.derivative()
        self._ddspline = self._spline.derivative(2)

    def coords(self, t):
        return Su2Coords.from_array(self._spline(np.asarray(t, dtype=float)))

    def coords_dot(self, t):
        return Su2Coords.from_array(self._dspline(np.asarray(t, dtype=float)))

    def coords_ddot(self, t):
        return Su2Coords.from_array(self._ddspline(np.asarray(t, dtype=float)))


def tabulate(schedule: DriveSchedule, n: int = 4001) -> TabulatedSchedule:
    return TabulatedSchedule(schedule, np.linspace(0, schedule.duration, n))
