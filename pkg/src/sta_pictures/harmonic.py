"""
Fast expansions and compressions of a 1-D harmonic trap on a spatial grid.

Three dynamics are propagated from the same initial state:

- ``reference``: H = p^2/2m + m w(t)^2 q^2 / 2
- ``cd``: the same plus the dilation term -(pq + qp) w'(t) / (4 w(t))
- ``modified``: an ordinary oscillator with frequency squared
  w^2 - 3 w'^2 / (4 w^2) + w'' / (2 w), reached from ``cd`` by the
  position-dependent phase U_q = exp(i m w' q^2 / (4 hbar w)).

Propagation is Strang splitting (kinetic half step in momentum space,
potential full step, kinetic half step). The dilation substep for ``cd`` is
applied exactly, exp(-i lam (pq+qp) / 2hbar) psi(q) = e^{-lam/2} psi(e^{-lam} q),
through a product of four shears (see `dilate`).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.signal import czt

from .errors import BoxOverflow, IncompleteBasis, InvalidRamp, NormDrift

KINDS = ("reference", "cd", "modified")


class FrequencyRamp:
    """Trap angular frequency w(t) > 0 on [0, duration] with two derivatives."""

    duration: float

    def omega(self, t):
        raise NotImplementedError

    def omega_dot(self, t):
        raise NotImplementedError

    def omega_ddot(self, t):
        raise NotImplementedError

    def flat_ends(self, atol: float = 1e-12) -> bool:
        """True when w' and w'' vanish at both endpoints."""
        ends = np.array([0.0, self.duration])
        return bool(np.all(np.abs(self.omega_dot(ends)) < atol) and np.all(np.abs(self.omega_ddot(ends)) < atol))


@dataclass(frozen=True)
class QuinticRamp(FrequencyRamp):
    """w = w0 + (w1 - w0)(10 s^3 - 15 s^4 + 6 s^5), s = t / duration."""

    omega_start: float
    omega_end: float
    duration: float

    def _s(self, t):
        return np.asarray(t, dtype=float) / self.duration

    def omega(self, t):
        s = self._s(t)
        return self.omega_start + (self.omega_end - self.omega_start) * s**3 * (10 - 15 * s + 6 * s**2)

    def omega_dot(self, t):
        s = self._s(t)
        return (self.omega_end - self.omega_start) * 30 * s**2 * (1 - s) ** 2 / self.duration

    def omega_ddot(self, t):
        s = self._s(t)
        return (self.omega_end - self.omega_start) * 60 * s * (1 - s) * (1 - 2 * s) / self.duration**2


def make_ramp(omega_start: float, omega_end: float, t_f: float) -> QuinticRamp:
    if not (omega_start > 0 and omega_end > 0 and t_f > 0):
        raise InvalidRamp("frequencies and duration must be positive")
    return QuinticRamp(float(omega_start), float(omega_end), float(t_f))


def omega_prime_squared(ramp: FrequencyRamp, t):
    """Squared frequency of the modified trap; negative means an inverted parabola."""
    w, wd, wdd = ramp.omega(t), ramp.omega_dot(t), ramp.omega_ddot(t)
    return w**2 - 0.75 * wd**2 / w**2 + 0.5 * wdd / w


def omega_prime(ramp: FrequencyRamp, t):
    """Modified frequency; imaginary where the trap is inverted."""
    return np.sqrt(np.asarray(omega_prime_squared(ramp, t), dtype=complex))


# -- grid and wavefunctions -------------------------------------------------

@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid q_j = q_min + j dx, j < n."""

    q_min: float
    q_max: float
    n: int

    @property
    def dx(self) -> float:
        return (self.q_max - self.q_min) / self.n

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, self.dx)

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> "Grid1D":
        return cls(-half_width, half_width, n)


@dataclass
class GridWavefunction:
    grid: Grid1D
    psi: np.ndarray
    mass: float = 1.0
    hbar: float = 1.0
    time: float = 0.0

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        # periodic grid: the trapezoid rule reduces to a plain sum
        return float(np.sum(self.density) * self.grid.dx)

    def mean(self) -> float:
        return float(np.sum(self.grid.q * self.density) * self.grid.dx / self.norm())

    def width(self) -> float:
        """Standard deviation of the position density."""
        q, rho, dx = self.grid.q, self.density, self.grid.dx
        nrm = np.sum(rho) * dx
        mu = np.sum(q * rho) * dx / nrm
        return float(np.sqrt(np.sum((q - mu) ** 2 * rho) * dx / nrm))

    def overlap(self, other: "GridWavefunction") -> complex:
        """<self|other>."""
        return complex(np.sum(np.conj(self.psi) * other.psi) * self.grid.dx)

    def energy(self, omega: float) -> float:
        """<H> in a static trap of angular frequency `omega`."""
        g = self.grid
        phi = np.fft.fft(self.psi)
        kin = np.sum(self.hbar**2 * g.k**2 / (2 * self.mass) * np.abs(phi) ** 2) / np.sum(np.abs(phi) ** 2)
        pot = np.sum(0.5 * self.mass * omega**2 * g.q**2 * self.density) / np.sum(self.density)
        return float(kin + pot)

    def edge_ratio(self, fraction: float = 0.02) -> float:
        """Largest |psi| in the outer `fraction` of the box relative to the peak."""
        a = np.abs(self.psi)
        m = max(1, int(fraction * len(a)))
        return float(max(a[:m].max(), a[-m:].max()) / a.max())

    def to_csv(self, path) -> None:
        """Write columns q, Re psi, Im psi, |psi|^2."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "re_psi", "im_psi", "density"])
            for row in zip(self.grid.q, self.psi.real, self.psi.imag, self.density):
                w.writerow([f"{v:.17g}" for v in row])


def ground_state(grid: Grid1D, omega: float, mass: float = 1.0, hbar: float = 1.0, time: float = 0.0) -> GridWavefunction:
    q = grid.q
    psi = (mass * omega / (np.pi * hbar)) ** 0.25 * np.exp(-mass * omega * q**2 / (2 * hbar))
    return GridWavefunction(grid, psi.astype(complex), mass, hbar, time)


def oscillator_eigenstates(grid: Grid1D, omega: float, n_levels: int, mass: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """Real Hermite functions phi_0 .. phi_{n-1} on the grid, by the stable three-term recurrence."""
    xi = grid.q * np.sqrt(mass * omega / hbar)
    out = np.empty((n_levels, grid.n))
    out[0] = (mass * omega / (np.pi * hbar)) ** 0.25 * np.exp(-0.5 * xi**2)
    if n_levels > 1:
        out[1] = np.sqrt(2) * xi * out[0]
    for n in range(1, n_levels - 1):
        out[n + 1] = np.sqrt(2 / (n + 1)) * xi * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


# -- scaling-solution oracle ------------------------------------------------

@dataclass
class ErmakovSolution:
    """b(t) solving b'' + w(t)^2 b = w(0)^2 / b^3 with b(0) = 1, b'(0) = 0."""

    ramp: FrequencyRamp
    sol: object
    mass: float = 1.0
    hbar: float = 1.0

    def b(self, t):
        return self.sol(t)[0]

    def b_dot(self, t):
        return self.sol(t)[1]

    def width(self, t):
        """Density standard deviation of the scaled ground state."""
        return self.b(t) * np.sqrt(self.hbar / (2 * self.mass * self.ramp.omega(0.0)))

    def ground_population(self, omega_target: float | None = None) -> float:
        """
        |<phi_0(target)|psi(t_f)>|^2 for the scaled Gaussian, including the
        q^2 chirp m b'/(2 hbar b). With psi ~ exp(-A q^2/2), target exp(-B q^2/2):
        P0 = 2 sqrt(Re A * B) / |A + B|.
        """
        tf = self.ramp.duration
        w_t = self.ramp.omega(tf) if omega_target is None else omega_target
        b, bd = self.b(tf), self.b_dot(tf)
        w0 = self.ramp.omega(0.0)
        a = self.mass * w0 / (self.hbar * b**2) - 1j * self.mass * bd / (self.hbar * b)
        bb = self.mass * w_t / self.hbar
        return float(2 * np.sqrt(a.real * bb) / abs(a + bb))


def ermakov_oracle(ramp: FrequencyRamp, mass: float = 1.0, hbar: float = 1.0, rtol: float = 1e-12) -> ErmakovSolution:
    w0sq = ramp.omega(0.0) ** 2

    def rhs(t, y):
        b, bd = y
        return [bd, -ramp.omega(t) ** 2 * b + w0sq / b**3]

    sol = solve_ivp(rhs, (0.0, ramp.duration), [1.0, 0.0], method="DOP853", rtol=rtol, atol=rtol, dense_output=True)
    return ErmakovSolution(ramp, sol.sol, mass, hbar)


def default_grid(ramp: FrequencyRamp, n: int = 2048, mass: float = 1.0, hbar: float = 1.0,
                 widths: float = 12.0) -> Grid1D:
    """Box of +-`widths` sigma_max, where sigma_max covers the scaled reference
    width and the instantaneous ground-state widths."""
    t = np.linspace(0, ramp.duration, 401)
    sig_ref = ermakov_oracle(ramp, mass, hbar).width(t)
    sig_inst = np.sqrt(hbar / (2 * mass * ramp.omega(t)))
    return Grid1D.symmetric(widths * float(max(sig_ref.max(), sig_inst.max())), n)


# -- propagation ------------------------------------------------------------

def dilate(psi: np.ndarray, grid: Grid1D, lam: float, method: str = "shear", hbar: float = 1.0) -> np.ndarray:
    """
    e^{-lam/2} psi(e^{-lam} q) from grid samples.

    method="shear" factors the dilation into four exactly solvable shears,
    q-chirp / free flight / q-chirp / free flight, whose phase-space matrices
    multiply to diag(e^lam, e^-lam). No interpolation is involved and the
    result is unitary to rounding. "spectral" evaluates the band-limited
    interpolant with a chirp-z transform; "spline" uses cubic splines.
    """
    if lam == 0:
        return psi.copy()
    if method == "shear":
        q2, k2 = grid.q**2, grid.k**2
        b = np.sqrt(abs(lam))
        a = (np.exp(-lam) - 1) / b
        c = -a * np.exp(lam)
        d = -b * np.exp(lam)
        out = psi * np.exp(1j * c * q2 / (2 * hbar))
        out = np.fft.ifft(np.exp(-0.5j * b * hbar * k2) * np.fft.fft(out))
        out = out * np.exp(1j * a * q2 / (2 * hbar))
        return np.fft.ifft(np.exp(-0.5j * d * hbar * k2) * np.fft.fft(out))
    s = np.exp(-lam)
    if method == "spline":
        from scipy.interpolate import CubicSpline

        q = grid.q
        re = CubicSpline(q, psi.real, extrapolate=False)(s * q)
        im = CubicSpline(q, psi.imag, extrapolate=False)(s * q)
        return np.sqrt(s) * np.nan_to_num(re + 1j * im)
    if method != "spectral":
        raise ValueError(f"unknown dilation method {method!r}")
    n = grid.n
    # psi(x) = (1/n) sum_m Psi_m exp(2 pi i m (x - q_min) / (n dx)), m = -n/2 .. n/2-1
    c = grid.q_min / grid.dx * (s - 1)
    m = np.arange(n) - n // 2
    w = np.fft.fftshift(np.fft.fft(psi)) * np.exp(2j * np.pi * m * c / n)
    out = czt(w, m=n, w=np.exp(2j * np.pi * s / n), a=1.0)
    j = np.arange(n)
    return np.sqrt(s) * np.exp(-2j * np.pi * j * s * (n // 2) / n) * out / n


@dataclass
class GridRun:
    kind: str
    times: np.ndarray
    states: list = field(default_factory=list)
    max_norm_error: float = 0.0

    @property
    def final(self) -> GridWavefunction:
        return self.states[-1]

    def densities(self) -> np.ndarray:
        return np.array([s.density for s in self.states])

    def widths(self) -> np.ndarray:
        return np.array([s.width() for s in self.states])


def propagate_grid(kind: str, ramp: FrequencyRamp, psi0: GridWavefunction, t_f: float | None = None,
                   steps: int = 4000, n_samples: int = 41, resample: str = "shear",
                   norm_tol: float = 1e-6, edge_tol: float = 1e-6) -> GridRun:
    """
    Propagate psi0 under one of the three trap dynamics and return snapshots
    at `n_samples` equally spaced times (steps must be divisible by n_samples - 1).
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    t_f = ramp.duration if t_f is None else t_f
    if steps % (n_samples - 1):
        raise ValueError("steps must be a multiple of n_samples - 1")
    g = psi0.grid
    m, hbar = psi0.mass, psi0.hbar
    dt = t_f / steps
    q2 = g.q**2
    kin_half = np.exp(-1j * hbar * g.k**2 * dt / (4 * m))
    every = steps // (n_samples - 1)

    psi = psi0.psi.astype(complex).copy()
    norm0 = psi0.norm()
    run = GridRun(kind, np.linspace(0, t_f, n_samples))
    run.states.append(replace(psi0, psi=psi.copy(), time=0.0))
    for i in range(steps):
        tm = (i + 0.5) * dt
        if kind == "modified":
            wsq = omega_prime_squared(ramp, tm)
        else:
            wsq = ramp.omega(tm) ** 2
        if kind == "cd":
            lam_half = -ramp.omega_dot(tm) * dt / (4 * ramp.omega(tm))
            psi = dilate(psi, g, lam_half, resample, hbar)
        psi = np.fft.ifft(kin_half * np.fft.fft(psi))
        psi *= np.exp(-1j * m * wsq * q2 * dt / (2 * hbar))
        psi = np.fft.ifft(kin_half * np.fft.fft(psi))
        if kind == "cd":
            psi = dilate(psi, g, lam_half, resample, hbar)
        nerr = abs(np.sum(np.abs(psi) ** 2) * g.dx - norm0)
        run.max_norm_error = max(run.max_norm_error, nerr)
        if nerr > norm_tol:
            raise NormDrift(f"norm error {nerr:.3g} at t = {(i + 1) * dt:.4g}")
        if (i + 1) % every == 0:
            snap = replace(psi0, psi=psi.copy(), time=(i + 1) * dt)
            if snap.edge_ratio() > edge_tol:
                raise BoxOverflow(f"edge amplitude ratio {snap.edge_ratio():.3g} at t = {snap.time:.4g}")
            run.states.append(snap)
    return run


def u_q_map(psi: GridWavefunction, ramp: FrequencyRamp, t: float, direction: int = 1) -> GridWavefunction:
    """Multiply by exp(+-i m w' q^2 / (4 hbar w)); direction=+1 applies U_q, -1 its inverse."""
    phase = direction * psi.mass * ramp.omega_dot(t) / (4 * psi.hbar * ramp.omega(t))
    return replace(psi, psi=psi.psi * np.exp(1j * phase * psi.grid.q**2))


@dataclass
class Excitation:
    populations: np.ndarray
    energy: float

    @property
    def ground(self) -> float:
        return float(self.populations[0])


def final_excitation(psi: GridWavefunction, omega_target: float, n_levels: int = 32,
                     min_captured: float = 1 - 1e-6) -> Excitation:
    """Populations of the lowest `n_levels` target-trap eigenstates and <H>."""
    phi = oscillator_eigenstates(psi.grid, omega_target, n_levels, psi.mass, psi.hbar)
    amps = phi @ psi.psi * psi.grid.dx
    pops = np.abs(amps) ** 2 / psi.norm()
    if pops.sum() < min_captured:
        raise IncompleteBasis(f"{n_levels} levels capture only {pops.sum():.8f} of the norm")
    return Excitation(pops, psi.energy(omega_target))


# -- full comparison --------------------------------------------------------

@dataclass
class ExpansionRun:
    run: GridRun
    excitation: Excitation

    def summary(self) -> dict:
        return {
            "final_P0": self.excitation.ground,
            "final_energy": self.excitation.energy,
            "final_width": self.run.final.width(),
            "max_norm_error": self.run.max_norm_error,
        }


def expansion_suite(ramp: FrequencyRamp, kinds=KINDS, n: int = 2048, widths: float = 12.0, steps: int = 4000,
                    n_samples: int = 41, resample: str = "shear", n_levels: int = 128,
                    mass: float = 1.0, hbar: float = 1.0) -> tuple[dict[str, ExpansionRun], ErmakovSolution]:
    """Run the requested dynamics from the ground state of w(0) on a shared default grid."""
    from concurrent.futures import ThreadPoolExecutor

    for k in kinds:
        if k not in KINDS:
            raise ValueError(f"unknown trap dynamics {k!r}; expected one of {KINDS}")
    grid = default_grid(ramp, n, mass, hbar, widths)
    psi0 = ground_state(grid, ramp.omega(0.0), mass, hbar)
    w_end = float(ramp.omega(ramp.duration))

    def one(kind):
        run = propagate_grid(kind, ramp, psi0, steps=steps, n_samples=n_samples, resample=resample)
        return ExpansionRun(run, final_excitation(run.final, w_end, n_levels))

    with ThreadPoolExecutor(max_workers=len(kinds)) as ex:
        runs = dict(zip(kinds, ex.map(one, kinds)))
    return runs, ermakov_oracle(ramp, mass, hbar)
