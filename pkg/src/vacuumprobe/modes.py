"""
Mode algebra of a 1-D cavity suddenly divided by a perfect mirror.

Global modes live on [0, L]; the mirror sits at x = r = aL, splitting the
cavity into a left sub-cavity of length r and a right one of length
r_bar = (1 - a)L.  Frequencies are expressed through the fundamental
left sub-cavity frequency omega1, so that Omega_n = omega1 * a * n,
omega_m = omega1 * m and omega_bar_m = omega1 * m * a / (1 - a).  With the
default omega1 = pi / r this is the usual c = 1 ladder.

The closed-form Bogoliubov coefficients are evaluated in a rearranged form
in which the would-be poles of the alpha coefficients appear as sinc
functions, so no special-casing of n = j/a is needed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .errors import DomainError
from .specfun import QuadratureSpec, integrate_complex, sinpi

__all__ = [
    "Side",
    "Kind",
    "CavityGeometry",
    "BogoliubovTable",
    "PhotonNumberReport",
    "QuadraticCoefficients",
    "mode_function",
    "bogoliubov_coefficient",
    "bogoliubov_matrix",
    "bogoliubov_table",
    "subcavity_photon_number",
    "delta_R",
    "tilde_commutator",
    "quadratic_coefficients",
    "overlap_oracle",
    "btilde_vacuum_shift",
]

DEFAULT_TRUNCATION = 10_000


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Kind(str, enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"


def _check_ratio(a: float) -> float:
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"length ratio must satisfy 0 < a < 1, got {a}")
    return a


@dataclass(frozen=True)
class CavityGeometry:
    """Cavity of length L split at r = ratio * L.

    ``omega1`` defaults to pi / r.  Passing it explicitly decouples the
    frequency scale from the lengths (only the ratio enters the mode algebra).
    ``reflect_bandwidth`` and ``linewidth`` are carried as metadata.
    """

    ratio: float
    length: float = 1.0
    omega1: float | None = None
    reflect_bandwidth: float = 0.0
    linewidth: float = 0.0

    def __post_init__(self):
        _check_ratio(self.ratio)
        if not self.length > 0 or not math.isfinite(self.length):
            raise DomainError(f"cavity length must be positive, got {self.length}")
        if self.omega1 is None:
            object.__setattr__(self, "omega1", math.pi / (self.ratio * self.length))
        if not self.omega1 > 0 or not math.isfinite(self.omega1):
            raise DomainError(f"omega1 must be positive, got {self.omega1}")
        if self.reflect_bandwidth < 0 or self.linewidth < 0:
            raise DomainError("bandwidth and linewidth must be non-negative")

    @property
    def r(self) -> float:
        return self.ratio * self.length

    @property
    def r_bar(self) -> float:
        return self.length - self.r

    @property
    def complement(self) -> float:
        return 1.0 - self.ratio

    def global_frequency(self, n):
        return self.omega1 * self.ratio * np.asarray(n, dtype=float)

    def left_frequency(self, m):
        return self.omega1 * np.asarray(m, dtype=float)

    def right_frequency(self, m):
        return self.omega1 * self.ratio / self.complement * np.asarray(m, dtype=float)


def mode_function(n: int, x: float, t: float, geometry: CavityGeometry) -> complex:
    """Global mode U_n(x, t) = (L Omega_n)^(-1/2) sin(pi n x / L) exp(-i Omega_n t).

    Here Omega_n = pi n / L (c = 1), independent of ``geometry.omega1``.
    """
    if n < 1:
        raise DomainError(f"mode index must be >= 1, got {n}")
    L = geometry.length
    if not 0.0 <= x <= L:
        raise DomainError(f"x = {x} lies outside the cavity [0, {L}]")
    omega = math.pi * n / L
    return (L * omega) ** -0.5 * math.sin(math.pi * n * x / L) * complex(
        math.cos(omega * t), -math.sin(omega * t)
    )


def _sincpi(y):
    """sin(pi y) / (pi y) with the removable point at y = 0."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-5
    safe = np.where(small, 1.0, y)
    z2 = (np.pi * y) ** 2
    return np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, sinpi(safe) / (np.pi * safe))


def bogoliubov_matrix(side, kind, j, n, a: float) -> np.ndarray:
    """Broadcasting evaluation of the sudden-insertion coefficients.

    ``j`` indexes sub-cavity modes and ``n`` global modes.  Left coefficients
    describe the sub-cavity [0, r], right ones the sub-cavity [r, L].
    """
    side, kind = Side(side), Kind(kind)
    a = _check_ratio(a)
    j = np.asarray(j, dtype=float)
    n = np.asarray(n, dtype=float)
    if np.any(j < 1) or np.any(n < 1):
        raise DomainError("mode indices must be >= 1")
    ab = 1.0 - a
    root = np.sqrt(j / n)
    parity_j = np.where(np.fmod(j, 2.0) == 0, 1.0, -1.0)
    if side is Side.LEFT:
        if kind is Kind.ALPHA:
            return root * _sincpi(n * a - j)
        return root * parity_j * sinpi(n * a) / (np.pi * (n * a + j))
    if kind is Kind.ALPHA:
        parity_n = np.where(np.fmod(n, 2.0) == 0, 1.0, -1.0)
        return parity_n * parity_j * root * _sincpi(n * ab - j)
    return -root * sinpi(n * a) / (np.pi * (n * ab + j))


def bogoliubov_coefficient(side, kind, j: int, n: int, a: float) -> float:
    """Single Bogoliubov coefficient alpha_jn, beta_jn (left) or their right analogues."""
    if int(j) != j or int(n) != n:
        raise DomainError("mode indices must be integers")
    return float(bogoliubov_matrix(side, kind, j, n, a))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BogoliubovTable:
    """Immutable alpha/beta matrices; row j-1 is sub-cavity mode j, column n-1 global mode n."""

    geometry: CavityGeometry
    truncation: int
    alpha_left: np.ndarray = field(repr=False)
    beta_left: np.ndarray = field(repr=False)
    alpha_right: np.ndarray = field(repr=False)
    beta_right: np.ndarray = field(repr=False)

    @property
    def n_sub(self) -> int:
        return self.alpha_left.shape[0]


def bogoliubov_table(geometry: CavityGeometry, N: int, n_sub: int = 4) -> BogoliubovTable:
    """Tabulate the four coefficient families for j <= n_sub and n <= N."""
    if N < 1 or n_sub < 1:
        raise DomainError("truncation and number of sub-cavity modes must be >= 1")
    j = np.arange(1, n_sub + 1)[:, None]
    n = np.arange(1, N + 1)[None, :]
    a = geometry.ratio
    mats = {
        (s, k): _readonly(bogoliubov_matrix(s, k, j, n, a)) for s in Side for k in Kind
    }
    return BogoliubovTable(
        geometry=geometry,
        truncation=int(N),
        alpha_left=mats[Side.LEFT, Kind.ALPHA],
        beta_left=mats[Side.LEFT, Kind.BETA],
        alpha_right=mats[Side.RIGHT, Kind.ALPHA],
        beta_right=mats[Side.RIGHT, Kind.BETA],
    )


@dataclass(frozen=True)
class PhotonNumberReport:
    """Partial sum of |beta_jn|^2 up to N, with a 1/n^3 tail estimate.

    ``value`` is the plain partial sum (monotone in N); ``total`` adds the tail.
    ``half_value`` is the partial sum at N // 2, so ``relative_change`` is the
    change of the partial sum on the last doubling of N.
    """

    j: int
    ratio: float
    truncation: int
    value: float
    tail: float
    half_value: float

    @property
    def total(self) -> float:
        return self.value + self.tail

    @property
    def relative_change(self) -> float:
        if self.value == 0:
            return 0.0
        return (self.value - self.half_value) / self.value


def _tail_estimate(terms: np.ndarray) -> float:
    """Fit terms[n-1] ~ C / n^3 over the upper half of the range and sum the rest."""
    N = terms.size
    if N < 4:
        return 0.0
    n = np.arange(N // 2 + 1, N + 1, dtype=float)
    C = float(np.mean(terms[N // 2:] * n**3))
    return C * float(zeta(3.0, N + 1))


def subcavity_photon_number(j: int, a: float, N: int = DEFAULT_TRUNCATION) -> PhotonNumberReport:
    """Vacuum occupation of left sub-cavity mode j, summed over N global modes."""
    if N < 1 or j < 1:
        raise DomainError("j and N must be >= 1")
    n = np.arange(1, N + 1)
    terms = bogoliubov_matrix(Side.LEFT, Kind.BETA, j, n, a) ** 2
    partial = np.cumsum(terms)
    return PhotonNumberReport(
        j=int(j),
        ratio=float(a),
        truncation=int(N),
        value=float(partial[-1]),
        tail=_tail_estimate(terms),
        half_value=float(partial[max(N // 2, 1) - 1]),
    )


def delta_R(geometry: CavityGeometry, N: int = DEFAULT_TRUNCATION) -> float:
    """Vacuum frequency shift omega1 * sum_n |beta_1n|^2 (tail included)."""
    return geometry.omega1 * subcavity_photon_number(1, geometry.ratio, N).total


def tilde_commutator(i: int, j: int, a: float, k: int, N: int = 1) -> float:
    """[b~_i, b~_j^dagger] for modified global modes.

    The right sub-cavity contribution runs over the reflected modes
    k, k+1, ..., k+N-1.  The signs follow the displayed expression
    delta_ij + a1i a1j - b1i b1j + sum(abar_ki abar_kj - bbar_ki bbar_kj).
    """
    if min(i, j, k, N) < 1:
        raise DomainError("i, j, k and N must be >= 1")
    idx = np.array([i, j])
    al = bogoliubov_matrix(Side.LEFT, Kind.ALPHA, 1, idx, a)
    bl = bogoliubov_matrix(Side.LEFT, Kind.BETA, 1, idx, a)
    ks = np.arange(k, k + N)[:, None]
    ar = bogoliubov_matrix(Side.RIGHT, Kind.ALPHA, ks, idx[None, :], a)
    br = bogoliubov_matrix(Side.RIGHT, Kind.BETA, ks, idx[None, :], a)
    right = float(np.sum(ar[:, 0] * ar[:, 1] - br[:, 0] * br[:, 1]))
    return float(i == j) + float(al[0] * al[1] - bl[0] * bl[1]) + right


@dataclass(frozen=True)
class QuadraticCoefficients:
    omega_n: np.ndarray
    f_nm: np.ndarray
    g_n: np.ndarray
    g_nm: np.ndarray


def quadratic_coefficients(geometry: CavityGeometry, N: int) -> QuadraticCoefficients:
    """Coefficients of omega1 a1^dagger a1 written in global modes, for n, m <= N.

        omega_n = omega1 (alpha_n^2 + beta_n^2)
        f_nm    = omega1 alpha_n alpha_m
        g_n     = omega1 alpha_n beta_n
        g_nm    = omega1 alpha_n beta_m

    with alpha_n = alpha_1n, beta_n = beta_1n (real for the sudden mirror).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    n = np.arange(1, N + 1)
    al = bogoliubov_matrix(Side.LEFT, Kind.ALPHA, 1, n, geometry.ratio)
    bl = bogoliubov_matrix(Side.LEFT, Kind.BETA, 1, n, geometry.ratio)
    w = geometry.omega1
    return QuadraticCoefficients(
        omega_n=_readonly(w * (al**2 + bl**2)),
        f_nm=_readonly(w * np.outer(al, al)),
        g_n=_readonly(w * al * bl),
        g_nm=_readonly(w * np.outer(al, bl)),
    )


_ORACLE_QUAD = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-13, max_subdivisions=2000)


def overlap_oracle(side, kind, j: int, n: int, a: float, quad: QuadratureSpec | None = None) -> float:
    """Klein-Gordon inner product of a sub-cavity mode with a global mode, by quadrature.

    alpha = (u_j, U_n) and beta = -(u_j, U_n^*), evaluated at t = 0 with L = 1.
    At t = 0 the time derivatives only bring down frequencies, so
    alpha = (omega_j + Omega_n) I and beta = (Omega_n - omega_j) I with
    I = int u_j U_n dx over the sub-cavity.
    """
    side, kind = Side(side), Kind(kind)
    a = _check_ratio(a)
    if j < 1 or n < 1:
        raise DomainError("mode indices must be >= 1")
    quad = quad or _ORACLE_QUAD
    big = math.pi * n
    if side is Side.LEFT:
        lo, hi, length = 0.0, a, a
    else:
        lo, hi, length = a, 1.0, 1.0 - a
    small = math.pi * j / length
    norm = (length * small) ** -0.5 * big**-0.5

    def integrand(x):
        return norm * math.sin(small * (x - lo)) * math.sin(big * x)

    # break points at nodes keep the oscillatory integrand well resolved
    nodes = np.unique(np.concatenate([lo + np.arange(1, j) * length / j,
                                      np.arange(1, n) / n]))
    nodes = nodes[(nodes > lo) & (nodes < hi)]
    res = integrate_complex(integrand, lo, hi, quad, points=nodes if nodes.size else None)
    overlap = res.value.real
    if kind is Kind.ALPHA:
        return (small + big) * overlap
    return (big - small) * overlap


def btilde_vacuum_shift(geometry: CavityGeometry, N: int, K: int) -> float:
    """<0_T| sum_n Omega_n b~_n^dagger b~_n |0_T> with n, m <= N and right modes k <= K.

    b~_n = b_n - alpha_1n a_1 + beta_1n a_1^dagger - sum_k (abar_kn abar_k - bbar_kn abar_k^dagger),
    with a_j = sum_m (alpha_jm b_m - beta_jm b_m^dagger).  The global vacuum
    expectation is sum_n Omega_n sum_m v_nm^2 where v_nm is the b_m^dagger
    coefficient of b~_n.
    """
    if min(N, K) < 1:
        raise DomainError("N and K must be >= 1")
    a = geometry.ratio
    n = np.arange(1, N + 1)
    al = bogoliubov_matrix(Side.LEFT, Kind.ALPHA, 1, n, a)
    bl = bogoliubov_matrix(Side.LEFT, Kind.BETA, 1, n, a)
    k = np.arange(1, K + 1)[:, None]
    ar = bogoliubov_matrix(Side.RIGHT, Kind.ALPHA, k, n[None, :], a)
    br = bogoliubov_matrix(Side.RIGHT, Kind.BETA, k, n[None, :], a)
    v = np.outer(al, bl) + np.outer(bl, al) + ar.T @ br + br.T @ ar
    return float(np.sum(geometry.global_frequency(n) * np.sum(v**2, axis=1)))
