"""
Control-atom dynamics conditioned on the mirror state.

The atom is a two-level system with states T (mirror transmissive) and
R (mirror reflective), driven with coupling g at detuning
delta = nu - omega_D.  In the rotating frame of the drive the cavity
Hamiltonian is H_T on the T branch and H_T + omega1 A^dagger A + delta on
the R branch, where A = sum_n (alpha_1n b_n - beta_1n b_n^dagger) is the
fundamental left sub-cavity mode written in global modes.

All frequencies and times are in the same natural units as omega1.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse

from .errors import (
    CutoffTooSmall,
    DimensionTooLarge,
    DomainError,
    NormDriftExceeded,
    PeakOutsideGrid,
    PerturbativityWarning,
)
from .modes import BogoliubovTable
from .results import SweepResult
from .specfun import sinc, sinpi

__all__ = [
    "QubitDrive",
    "ReducedVacuumState",
    "Method",
    "SweepResult",
    "reduced_vacuum_state",
    "pr_perturbative",
    "rabi_evolve",
    "fock_oracle_evolve",
    "detuning_sweep",
    "extract_peak",
    "cavity_intensity",
]

TAIL_TOLERANCE = 1e-6
MAX_ORACLE_DIMENSION = 10_000
NORM_DRIFT_TOLERANCE = 1e-8
PERTURBATIVE_LIMIT = 0.1


@dataclass(frozen=True)
class QubitDrive:
    """Drive parameters, all angular frequencies in natural units."""

    transition_frequency: float
    drive_frequency: float
    coupling: float
    linewidth: float = 0.0

    def __post_init__(self):
        for name in ("transition_frequency", "drive_frequency", "coupling", "linewidth"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.coupling < 0:
            raise DomainError(f"coupling must be >= 0, got {self.coupling}")
        if self.linewidth < 0:
            raise DomainError(f"linewidth must be >= 0, got {self.linewidth}")

    @property
    def detuning(self) -> float:
        return self.transition_frequency - self.drive_frequency

    @classmethod
    def from_detuning(cls, detuning: float, coupling: float, linewidth: float = 0.0):
        """Drive with the given detuning; the transition frequency is set to zero."""
        return cls(0.0, -float(detuning), float(coupling), float(linewidth))

    def with_detuning(self, detuning: float) -> "QubitDrive":
        """Same atom, drive frequency moved to give the requested detuning."""
        return QubitDrive(
            self.transition_frequency,
            self.transition_frequency - float(detuning),
            self.coupling,
            self.linewidth,
        )


@dataclass(frozen=True)
class ReducedVacuumState:
    """Single-mode Gaussian state of the sub-cavity mode in the global vacuum.

    ``mean_photon_number`` and ``anomalous_correlation`` are <A^dagger A> and
    <A A> for the truncated mode A, whose commutator is ``commutator``
    (1 at infinite truncation).  ``photon_distribution`` is the number
    distribution of the normalised mode A / sqrt(commutator).
    """

    mean_photon_number: float
    anomalous_correlation: complex
    photon_distribution: np.ndarray
    commutator: float = 1.0

    @property
    def tail(self) -> float:
        return max(0.0, 1.0 - float(np.sum(self.photon_distribution)))

    @property
    def _normalised(self) -> tuple[float, float]:
        c = self.commutator
        return self.mean_photon_number / c, abs(self.anomalous_correlation) / c

    @property
    def thermal_occupation(self) -> float:
        """n_th of the squeezed-thermal decomposition S(r) rho_th S(r)^dagger."""
        n, m = self._normalised
        return max(0.0, math.sqrt(max((n + 0.5) ** 2 - m * m, 0.25)) - 0.5)

    @property
    def squeeze_parameter(self) -> float:
        n, m = self._normalised
        return 0.5 * math.asinh(m / (self.thermal_occupation + 0.5))


def _photon_distribution(n: float, m: float, cutoff: int) -> np.ndarray:
    """Number distribution of a zero-mean Gaussian mode with <a^dag a> = n, |<aa>| = m.

    Its generating function sum_k p_k z^k is
    [(1 + n - n z)^2 - (1 - z)^2 m^2]^(-1/2); the coefficients follow from a
    three-term recurrence obtained by differentiating that expression.
    """
    u = 1.0 + n
    c0 = u * u - m * m
    c1 = -2.0 * (u * n - m * m)
    c2 = n * n - m * m
    p = np.zeros(cutoff + 1)
    p[0] = c0**-0.5
    for k in range(cutoff):
        prev = p[k - 1] if k >= 1 else 0.0
        p[k + 1] = (-(k + 0.5) * c1 * p[k] - k * c2 * prev) / ((k + 1) * c0)
    return np.clip(p, 0.0, None)


def reduced_vacuum_state(table: BogoliubovTable, fock_cutoff: int) -> ReducedVacuumState:
    """Reduced state of the fundamental left sub-cavity mode in the global vacuum."""
    if fock_cutoff < 1:
        raise DomainError("fock_cutoff must be >= 1")
    alpha = table.alpha_left[0]
    beta = table.beta_left[0]
    nbar = float(np.sum(beta**2))
    # A = sum(alpha b - beta b^dag)  =>  <A A> = -sum(alpha beta)
    m = -float(np.sum(alpha * beta))
    comm = float(np.sum(alpha**2 - beta**2))
    if comm <= 0:
        raise DomainError("truncated sub-cavity mode has a non-positive commutator")
    p = _photon_distribution(nbar / comm, abs(m) / comm, int(fock_cutoff))
    tail = 1.0 - float(np.sum(p))
    if tail > TAIL_TOLERANCE:
        raise CutoffTooSmall(
            f"photon distribution tail {tail:.3e} exceeds {TAIL_TOLERANCE:g} "
            f"at cutoff {fock_cutoff}; increase the cutoff"
        )
    return ReducedVacuumState(nbar, complex(m), p, comm)


class Method(str, enum.Enum):
    DELTA_R_APPROX = "delta_r_approx"
    GAUSSIAN_EXACT = "gaussian_exact"


def pr_perturbative(drive: QubitDrive, state: ReducedVacuumState, omega1: float, t, method=Method.GAUSSIAN_EXACT):
    """First-order transition probability to the reflective branch.

    DELTA_R_APPROX: (gt)^2 sinc^2((delta + delta_R) t / 2) with delta_R = omega1 nbar.
    GAUSSIAN_EXACT: (gt)^2 sum_k p_k sinc^2((delta + omega1 c k) t / 2), with c the
    commutator of the truncated mode (so the mean shift is again omega1 nbar).

    ``t`` may be a scalar or an array.  Values above 1 are clamped with a warning.
    """
    method = Method(method)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("times must be non-negative")
    gt2 = (drive.coupling * t) ** 2
    if np.any(4.0 * gt2 > PERTURBATIVE_LIMIT):
        warnings.warn(
            f"4(gt)^2 = {4.0 * float(np.max(gt2)):.3g} exceeds {PERTURBATIVE_LIMIT}; "
            "first-order result is unreliable",
            PerturbativityWarning,
            stacklevel=2,
        )
    delta = drive.detuning
    if method is Method.DELTA_R_APPROX:
        shift = omega1 * state.mean_photon_number
        prob = gt2 * sinc(0.5 * (delta + shift) * t) ** 2
    else:
        p = state.photon_distribution
        k = np.arange(p.size)
        arg = 0.5 * np.multiply.outer(t, delta + omega1 * state.commutator * k)
        prob = gt2 * (sinc(arg) ** 2 @ p)
    if np.any(prob > 1.0):
        warnings.warn("perturbative probability exceeded 1 and was clamped", PerturbativityWarning, stacklevel=2)
        prob = np.minimum(prob, 1.0)
    return float(prob) if prob.ndim == 0 else prob


def _rabi(g: float, detuning: float, t: np.ndarray) -> np.ndarray:
    freq = math.sqrt(g * g + 0.25 * detuning * detuning)
    if freq == 0.0:
        return np.zeros_like(t)
    return (g / freq) ** 2 * np.sin(freq * t) ** 2


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0:
        raise DomainError("time grid is empty")
    if np.any(t < 0) or np.any(np.diff(t) < 0) or not np.all(np.isfinite(t)):
        raise DomainError("time grid must be finite, sorted and non-negative")
    return t


def rabi_evolve(drive: QubitDrive, effective_shift: float, t_grid) -> SweepResult:
    """Two-level Rabi oscillation with detuning delta + effective_shift."""
    t = _check_grid(t_grid)
    detuning = drive.detuning + effective_shift
    return SweepResult(
        axis_name="t",
        axis_values=t,
        observables={"P_R": _rabi(drive.coupling, detuning, t)},
        metadata={
            "model": "rabi",
            "coupling": drive.coupling,
            "detuning": drive.detuning,
            "effective_shift": float(effective_shift),
        },
    )


def _ladder(cutoff: int) -> sparse.csr_matrix:
    return sparse.diags(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1, format="csr")


def _mode_operators(n_modes: int, cutoff: int) -> list[sparse.csr_matrix]:
    eye = sparse.identity(cutoff + 1, format="csr")
    ops = []
    for i in range(n_modes):
        factors = [eye] * n_modes
        factors[i] = _ladder(cutoff)
        op = factors[0]
        for f in factors[1:]:
            op = sparse.kron(op, f, format="csr")
        ops.append(op)
    return ops


def oracle_hamiltonian(
    table: BogoliubovTable,
    drive: QubitDrive,
    n_global_modes: int,
    cutoff: int,
    counter_rotating: bool = True,
    global_free: bool = True,
) -> np.ndarray:
    """Dense qubit (x) truncated-Fock Hamiltonian, qubit ordered [T, R].

    H_T = sum_n Omega_n b_n^dag b_n (dropped when ``global_free`` is False);
    the R branch adds omega1 A^dag A + delta.  Without counter-rotating terms
    omega1 A^dag A is replaced by omega1 (A_a^dag A_a + A_b A_b^dag) with
    A_a = sum alpha_n b_n and A_b = sum beta_n b_n.
    """
    if n_global_modes < 1 or cutoff < 1:
        raise DomainError("n_global_modes and cutoff must be >= 1")
    if n_global_modes > table.truncation:
        raise DomainError("table truncation is smaller than n_global_modes")
    dim_field = (cutoff + 1) ** n_global_modes
    if 2 * dim_field > MAX_ORACLE_DIMENSION:
        raise DimensionTooLarge(
            f"oracle dimension {2 * dim_field} exceeds {MAX_ORACLE_DIMENSION}"
        )
    geometry = table.geometry
    b = _mode_operators(n_global_modes, cutoff)
    alpha = table.alpha_left[0, :n_global_modes]
    beta = table.beta_left[0, :n_global_modes]
    A_a = sum(al * op for al, op in zip(alpha, b))
    A_b = sum(be * op for be, op in zip(beta, b))

    h_free = sparse.csr_matrix((dim_field, dim_field))
    if global_free:
        omegas = geometry.global_frequency(np.arange(1, n_global_modes + 1))
        h_free = sum(w * (op.T @ op) for w, op in zip(omegas, b))
    if counter_rotating:
        A = A_a - A_b.T
        q = A.T @ A
    else:
        q = A_a.T @ A_a + A_b @ A_b.T
    eye = sparse.identity(dim_field, format="csr")
    h_r = h_free + geometry.omega1 * q + drive.detuning * eye
    g = drive.coupling
    H = sparse.bmat([[h_free, g * eye], [g * eye, h_r]], format="csr")
    return H.toarray()


def fock_oracle_evolve(
    table: BogoliubovTable,
    drive: QubitDrive,
    n_global_modes: int,
    cutoff: int,
    t_grid,
    counter_rotating: bool = True,
    global_free: bool = True,
) -> SweepResult:
    """Non-perturbative P_R(t) for |T> (x) |0_T> in a truncated global Fock space.

    ``cutoff`` is the largest photon number kept per global mode.  The
    propagator is applied through the eigendecomposition of the (Hermitian)
    Hamiltonian; the norm of every propagated state is checked.
    """
    t = _check_grid(t_grid)
    H = oracle_hamiltonian(table, drive, n_global_modes, cutoff, counter_rotating, global_free)
    dim = H.shape[0]
    half = dim // 2
    energies, vecs = linalg.eigh(H)
    psi0 = np.zeros(dim)
    psi0[0] = 1.0
    coeffs = vecs.T @ psi0
    phases = np.exp(-1j * np.outer(t, energies))
    states = (phases * coeffs) @ vecs.T
    norms = np.sum(np.abs(states) ** 2, axis=1)
    drift = np.abs(norms - 1.0)
    allowed = NORM_DRIFT_TOLERANCE * np.maximum(1.0, t)
    if np.any(drift > allowed):
        raise NormDriftExceeded(f"norm drift {float(np.max(drift)):.3e} exceeds tolerance")
    p_r = np.sum(np.abs(states[:, half:]) ** 2, axis=1)
    return SweepResult(
        axis_name="t",
        axis_values=t,
        observables={"P_R": np.clip(p_r, 0.0, 1.0)},
        metadata={
            "model": "fock_oracle",
            "n_global_modes": int(n_global_modes),
            "cutoff": int(cutoff),
            "counter_rotating": bool(counter_rotating),
            "global_free": bool(global_free),
            "coupling": drive.coupling,
            "detuning": drive.detuning,
            "max_norm_drift": float(np.max(drift)),
        },
    )


def extract_peak(x, y) -> float:
    """Peak location from a quadratic through the grid maximum and its neighbours."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    if i == 0 or i == x.size - 1:
        raise PeakOutsideGrid(f"maximum at grid edge x = {x[i]:g}; widen the grid")
    xs, ys = x[i - 1:i + 2], y[i - 1:i + 2]
    c2, c1, _ = np.polyfit(xs - xs[1], ys, 2)
    if c2 >= 0:
        return float(x[i])
    return float(xs[1] - c1 / (2.0 * c2))


def detuning_sweep(
    drive_template: QubitDrive,
    state: ReducedVacuumState,
    omega1: float,
    t: float,
    delta_grid,
    methods=(Method.DELTA_R_APPROX, Method.GAUSSIAN_EXACT),
    mapper=map,
) -> SweepResult:
    """P_R versus detuning for each method; peak locations go in metadata['peak'].

    ``mapper`` evaluates grid points; any order-preserving map (for example
    ``ThreadPoolExecutor.map``) gives identical results.
    """
    deltas = np.asarray(delta_grid, dtype=float).ravel()
    if deltas.size < 3:
        raise DomainError("detuning grid needs at least 3 points")
    methods = [Method(m) for m in methods]

    def point(d):
        drive = drive_template.with_detuning(d)
        return [pr_perturbative(drive, state, omega1, t, m) for m in methods]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerturbativityWarning)
        values = np.array(list(mapper(point, deltas)), dtype=float).reshape(deltas.size, len(methods))
    if 4.0 * (drive_template.coupling * t) ** 2 > PERTURBATIVE_LIMIT:
        warnings.warn("4(gt)^2 exceeds the perturbative limit over the sweep", PerturbativityWarning, stacklevel=2)
    observables, peaks = {}, {}
    for col, method in enumerate(methods):
        observables[method.value] = values[:, col]
        peaks[method.value] = extract_peak(deltas, values[:, col])
    return SweepResult(
        axis_name="delta",
        axis_values=deltas,
        observables=observables,
        metadata={
            "t": float(t),
            "omega1": float(omega1),
            "coupling": drive_template.coupling,
            "mean_photon_number": state.mean_photon_number,
            "delta_R": omega1 * state.mean_photon_number,
            "peak": peaks,
        },
    )


def cavity_intensity(pump_frequency, omega1: float, finesse: float, r_att: float, c_R_sq: float, I0: float = 1.0):
    """I = I_max |c_R|^2 / (1 + (2F/pi)^2 sin^2(pi nu_p / omega1)), I_max = I0 / (1 - r_att)^2."""
    if not 0.0 <= r_att < 1.0:
        raise DomainError(f"attenuation must satisfy 0 <= r_att < 1, got {r_att}")
    if not 0.0 <= c_R_sq <= 1.0:
        raise DomainError(f"|c_R|^2 must lie in [0, 1], got {c_R_sq}")
    if not finesse > 0:
        raise DomainError(f"finesse must be positive, got {finesse}")
    if not omega1 > 0:
        raise DomainError(f"omega1 must be positive, got {omega1}")
    i_max = I0 / (1.0 - r_att) ** 2
    s = sinpi(np.asarray(pump_frequency, dtype=float) / omega1)
    out = i_max * c_R_sq / (1.0 + (2.0 * finesse / np.pi) ** 2 * s * s)
    return float(out) if out.ndim == 0 else out
