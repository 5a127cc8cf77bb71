"""
Algebra of traceless 2x2 Hermitian Hamiltonians.

A Hamiltonian is stored by its Pauli components, H = x*sx + y*sy + z*sz,
i.e. the matrix [[z, x - iy], [x + iy, -z]] in the bare basis {|1>, |2>}.
Components may be scalars or numpy arrays over a time grid; every routine
broadcasts over leading axes. Units: hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHamiltonian

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# Relative tolerance below which R is treated as zero.
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class Su2Coords:
    """Pauli components (x, y, z) of a traceless Hermitian 2x2 matrix."""

    x: np.ndarray | float
    y: np.ndarray | float
    z: np.ndarray | float

    @property
    def radius(self):
        return np.sqrt(self.x**2 + self.y**2 + self.z**2)

    def matrix(self) -> np.ndarray:
        return to_matrix(self)

    def as_array(self) -> np.ndarray:
        """Stack the components along a trailing axis of length 3."""
        return np.stack(np.broadcast_arrays(self.x, self.y, self.z), axis=-1)

    @classmethod
    def from_array(cls, v) -> "Su2Coords":
        v = np.asarray(v, dtype=float)
        return cls(v[..., 0], v[..., 1], v[..., 2])

    def __add__(self, other: "Su2Coords") -> "Su2Coords":
        return Su2Coords(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Su2Coords") -> "Su2Coords":
        return Su2Coords(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Su2Coords":
        return Su2Coords(-self.x, -self.y, -self.z)

    def __mul__(self, c) -> "Su2Coords":
        return Su2Coords(c * self.x, c * self.y, c * self.z)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SphereCoords:
    """Radius, polar angle in [0, pi] and azimuth in [0, 2pi)."""

    r: np.ndarray | float
    theta: np.ndarray | float
    phi: np.ndarray | float


def to_matrix(coords: Su2Coords) -> np.ndarray:
    x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (coords.x, coords.y, coords.z)))
    m = np.empty(x.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = z
    m[..., 0, 1] = x - 1j * y
    m[..., 1, 0] = x + 1j * y
    m[..., 1, 1] = -z
    return m


def pauli_components(m) -> Su2Coords:
    """Traceless Pauli components of a Hermitian matrix (the trace is dropped)."""
    m = np.asarray(m)
    off = 0.5 * (m[..., 1, 0] + np.conj(m[..., 0, 1]))
    return Su2Coords(off.real, off.imag, 0.5 * (m[..., 0, 0] - m[..., 1, 1]).real)


def cart_to_sphere(coords: Su2Coords) -> SphereCoords:
    x, y, z = (np.asarray(c, dtype=float) for c in (coords.x, coords.y, coords.z))
    rho = np.hypot(x, y)
    r = np.hypot(rho, z)
    theta = np.arctan2(rho, z)
    phi = np.where(rho > 0, np.mod(np.arctan2(y, x), 2 * np.pi), 0.0)
    # arctan2 returns tiny negatives -> mod gives 2pi - eps
    phi = np.where(phi >= 2 * np.pi, 0.0, phi)
    if np.ndim(r) == 0:
        return SphereCoords(float(r), float(theta), float(phi))
    return SphereCoords(r, theta, phi)


def sphere_to_cart(s: SphereCoords) -> Su2Coords:
    st = np.sin(s.theta)
    return Su2Coords(s.r * st * np.cos(s.phi), s.r * st * np.sin(s.phi), s.r * np.cos(s.theta))


def dagger(u) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(u), -1, -2))


def is_unitary(u, atol: float = 1e-12) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u @ dagger(u) - IDENTITY)) < atol)


def _upper_eigenvector(x, y, z, r):
    """Normalized +R eigenvector, using whichever chart avoids the 0/0 pole."""
    north = z >= 0
    a = np.where(north, r + z, x - 1j * y)
    b = np.where(north, x + 1j * y, r - z)
    n = np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
    return a / n, b / n


def eigensystem(coords: Su2Coords, ordering: str = "bare", reference=None, scale=None):
    """
    Eigenvalues and orthonormal eigenvectors (as matrix columns).

    ordering="descending" puts +R first. ordering="bare" labels the columns
    so that column n has maximal overlap with bare state |n> and fixes the
    phases to make the diagonal real and non-negative. Passing a `reference`
    basis (same shape as the output) instead labels and phases each column
    by maximal overlap with the corresponding reference column, which is how
    eigenvectors are tracked continuously along a time grid.

    Raises DegenerateHamiltonian when R < 1e-12 * scale (scale defaults to 1).
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (coords.x, coords.y, coords.z)))
    r = np.sqrt(x**2 + y**2 + z**2)
    tol = DEGENERACY_RTOL * (1.0 if scale is None else scale)
    if np.any(r < tol):
        raise DegenerateHamiltonian(f"eigenvalue gap below {tol:g}")
    a, b = _upper_eigenvector(x, y, z, r)
    vecs = np.empty(x.shape + (2, 2), dtype=complex)
    vecs[..., 0, 0], vecs[..., 1, 0] = a, b
    vecs[..., 0, 1], vecs[..., 1, 1] = -np.conj(b), np.conj(a)
    vals = np.stack([r, -r], axis=-1)

    if ordering == "descending" and reference is None:
        return vals, vecs
    if reference is None:
        if ordering != "bare":
            raise ValueError(f"unknown ordering {ordering!r}")
        reference = np.broadcast_to(IDENTITY, vecs.shape)
    reference = np.asarray(reference)
    overlaps = np.einsum("...ki,...kj->...ij", np.conj(reference), vecs)
    swap = np.abs(overlaps[..., 0, 0]) < np.abs(overlaps[..., 0, 1])
    vecs = np.where(swap[..., None, None], vecs[..., ::-1], vecs)
    vals = np.where(swap[..., None], vals[..., ::-1], vals)
    diag = np.einsum("...ki,...ki->...i", np.conj(reference), vecs)
    phase = np.where(np.abs(diag) > 0, np.conj(diag) / np.where(np.abs(diag) > 0, np.abs(diag), 1), 1.0)
    return vals, vecs * phase[..., None, :]


def expm_hermitian(h, dt) -> np.ndarray:
    """
    exp(-i * dt * h) for Hermitian 2x2 `h` (any trace), closed form.

    Exactly unitary to rounding: e^{-i a dt} (cos(R dt) I - i sin(R dt) n.sigma).
    """
    h = np.asarray(h)
    dt = np.asarray(dt, dtype=float)
    tr = 0.5 * (h[..., 0, 0] + h[..., 1, 1]).real
    c = pauli_components(h)
    r = np.sqrt(c.x**2 + c.y**2 + c.z**2)
    ang = r * dt
    cos = np.cos(ang)
    # sin(R dt)/R, finite at R = 0
    sinc = dt * np.sinc(ang / np.pi)
    g = np.exp(-1j * tr * dt)
    u = np.empty(np.shape(ang) + (2, 2), dtype=complex)
    u[..., 0, 0] = cos - 1j * sinc * c.z
    u[..., 1, 1] = cos + 1j * sinc * c.z
    u[..., 0, 1] = -1j * sinc * (c.x - 1j * c.y)
    u[..., 1, 0] = -1j * sinc * (c.x + 1j * c.y)
    return u * g[..., None, None]


def rotation(axis, angle) -> np.ndarray:
    """exp(-i angle n.sigma / 2) for a unit axis n."""
    n = np.asarray(axis, dtype=float)
    h = to_matrix(Su2Coords(n[..., 0], n[..., 1], n[..., 2]))
    return expm_hermitian(h, 0.5 * np.asarray(angle))


def bare_state(n: int) -> np.ndarray:
    """Bare basis state |1> (n=1) or |2> (n=2)."""
    psi = np.zeros(2, dtype=complex)
    psi[n - 1] = 1.0
    return psi
