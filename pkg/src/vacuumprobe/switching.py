"""
Smoothly switched, imperfectly reflecting mirror.

A cavity with walls at x = -a/2 and x = a/2 is divided at x = 0 by a
delta-potential mirror whose strength follows the profile
theta(t) = arctan((1 + exp(-lambda t)) / lambda).  Right-moving modes
during the switch are

    U_bar_k(u) = N_k exp(-i k u) [(1 + rho) sigma(u) - rho],

with rho = (lambda + i k) / (lambda - i k), sigma(u) = 1 / (1 + exp(lambda u))
and N_k = (8 pi k)^(-1/2) (free space) or (4 pi n)^(-1/2) with k = pi n / a
(cavity).  Overlaps with the unswitched sub-cavity modes
U_m(u) = (4 pi m)^(-1/2) exp(-i q u), q = pi m / a, over 0 <= u <= a/2
give the Bogoliubov coefficients beta_nm.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, zeta

from .errors import DomainError, SpecialFunctionDomain
from .specfun import QuadratureSpec, digamma, hyp2f1_negexp, integrate_complex

__all__ = [
    "SwitchProfile",
    "ImperfectBogoliubov",
    "theta_profile",
    "effective_reflectivity",
    "lambda_for_reflectivity",
    "reflection_factor",
    "switched_mode",
    "beta_imperfect_closed",
    "beta_imperfect_numeric",
    "beta_sudden_limit",
    "beta_transparent_limit",
    "imperfect_bogoliubov",
    "particle_number_imperfect",
]

DEFAULT_TRUNCATION = 512
_ORACLE_QUAD = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=2000)


def _check_rate(lam: float) -> float:
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise DomainError(f"switching rate must be positive and finite, got {lam}")
    return lam


def theta_profile(t, lam: float):
    """Mirror profile arctan((1 + exp(-lambda t)) / lambda), in (0, pi/2)."""
    lam = _check_rate(lam)
    with np.errstate(over="ignore"):
        out = np.arctan((1.0 + np.exp(-lam * np.asarray(t, dtype=float))) / lam)
    return float(out) if out.ndim == 0 else out


def effective_reflectivity(lam: float) -> float:
    """r_eff = 1 - (2/pi) theta(infinity) = 1 - (2/pi) arctan(1/lambda)."""
    return 1.0 - 2.0 / math.pi * math.atan(1.0 / _check_rate(lam))


def lambda_for_reflectivity(r_eff: float) -> float:
    """Inverse of effective_reflectivity: lambda = 1 / tan((1 - r_eff) pi / 2)."""
    r_eff = float(r_eff)
    if not 0.0 < r_eff < 1.0:
        raise DomainError(f"effective reflectivity must lie in (0, 1), got {r_eff}")
    lam = 1.0 / math.tan(0.5 * math.pi * (1.0 - r_eff))
    if not math.isfinite(lam):
        raise DomainError(f"r_eff = {r_eff} is too close to 1; lambda overflows")
    return lam


@dataclass(frozen=True)
class SwitchProfile:
    rate: float
    halfwidth: float = 1.0

    def __post_init__(self):
        _check_rate(self.rate)
        if not self.halfwidth > 0 or not math.isfinite(self.halfwidth):
            raise DomainError(f"cavity parameter a must be positive, got {self.halfwidth}")

    @property
    def effective_reflectivity(self) -> float:
        return effective_reflectivity(self.rate)

    @classmethod
    def from_reflectivity(cls, r_eff: float, halfwidth: float = 1.0) -> "SwitchProfile":
        return cls(lambda_for_reflectivity(r_eff), halfwidth)

    def theta(self, t):
        return theta_profile(t, self.rate)

    def vartheta(self, n: int, m: int) -> float:
        return (n + m) * math.pi / (self.halfwidth * self.rate)


def reflection_factor(k: float, lam: float) -> complex:
    """rho = (lambda + i k) / (lambda - i k); unit modulus."""
    z = complex(lam, k)
    return z / z.conjugate()


def switched_mode(u, k: float, lam: float, prefactor: float | None = None):
    """Switched right-moving mode U_bar_k(u).

    Written as N exp(-iku) [(1 + rho) sigma(u) - rho] with sigma evaluated by
    expit, which stays finite for any lambda u.  ``prefactor`` defaults to
    the free-space value (8 pi k)^(-1/2).
    """
    lam = _check_rate(lam)
    if not k > 0:
        raise DomainError(f"wavenumber must be positive, got {k}")
    norm = (8.0 * math.pi * k) ** -0.5 if prefactor is None else float(prefactor)
    u = np.asarray(u, dtype=float)
    rho = reflection_factor(k, lam)
    out = norm * np.exp(-1j * k * u) * ((1.0 + rho) * expit(-lam * u) - rho)
    return complex(out) if out.ndim == 0 else out


def _switched_mode_derivative(u: float, k: float, lam: float, norm: float) -> complex:
    rho = reflection_factor(k, lam)
    sig = float(expit(-lam * u))
    dsig = -lam * sig * (1.0 - sig)
    shape = (1.0 + rho) * sig - rho
    return norm * cmath.exp(-1j * k * u) * (-1j * k * shape + (1.0 + rho) * dsig)


def _wavenumbers(n: int, m: int, profile: SwitchProfile):
    if n < 1 or m < 1:
        raise DomainError("mode indices must be >= 1")
    a = profile.halfwidth
    k = math.pi * n / a
    q = math.pi * m / a
    return k, q, (4.0 * math.pi * n) ** -0.5, (4.0 * math.pi * m) ** -0.5, 0.5 * a


def beta_imperfect_numeric(n: int, m: int, profile: SwitchProfile, quad: QuadratureSpec | None = None) -> complex:
    """beta_nm = i int_0^{a/2} (U_m dU_bar_n/du - U_bar_n dU_m/du) du by adaptive quadrature."""
    k, q, cn, cm, X = _wavenumbers(n, m, profile)
    lam = profile.rate
    quad = quad or _ORACLE_QUAD

    def integrand(u):
        um = cm * cmath.exp(-1j * q * u)
        ubar = complex(switched_mode(u, k, lam, cn))
        return 1j * (um * _switched_mode_derivative(u, k, lam, cn) - ubar * (-1j * q) * um)

    # the switching transient is concentrated within a few 1/lambda of u = 0
    points = [p for p in (1.0 / lam, 5.0 / lam, 20.0 / lam) if p < X]
    return integrate_complex(integrand, 0.0, X, quad, points=points or None).value


def _sigma_integral(s: float, lam: float, X: float) -> complex:
    """int_0^X exp(-i s u) sigma(u) du.

    With y = exp(lambda u) and c = -i vartheta, vartheta = s / lambda, this is
    (F(e^{lambda X}) - F(1)) / lambda where F(y) = y^c / c 2F1(1, c; c+1; -y)
    and F(1) = (psi((c+1)/2) - psi(c/2)) / 2.
    """
    vt = s / lam
    c = complex(0.0, -vt)
    lx = lam * X
    try:
        f_top = cmath.exp(c * lx) / c * hyp2f1_negexp(1.0, c, c + 1.0, lx)
        f_one = 0.5 * (digamma(0.5 * c + 0.5) - digamma(0.5 * c))
    except ArithmeticError as exc:
        raise SpecialFunctionDomain(f"closed form failed at vartheta = {vt}: {exc}") from exc
    return (f_top - f_one) / lam


def beta_imperfect_closed(n: int, m: int, profile: SwitchProfile) -> complex:
    """Closed-form beta_nm built from 2F1 at -exp(a lambda / 2) and digamma.

    beta_nm = i c d [2 i q (1 + rho) I_sigma - i (q - k) rho I_1
                     + (1 + rho)(exp(-i s X) sigma(X) - 1/2)]

    with k = pi n / a, q = pi m / a, s = k + q, X = a / 2,
    I_1 = (1 - exp(-i s X)) / (i s) and I_sigma the sigma-weighted
    Fourier integral over [0, X].
    """
    k, q, cn, cm, X = _wavenumbers(n, m, profile)
    lam = profile.rate
    s = k + q
    rho = reflection_factor(k, lam)
    phase = cmath.exp(-1j * s * X)
    i_one = (1.0 - phase) / (1j * s)
    i_sig = _sigma_integral(s, lam, X)
    edge = phase * float(expit(-lam * X)) - 0.5
    bracket = 2j * q * (1.0 + rho) * i_sig - 1j * (q - k) * rho * i_one + (1.0 + rho) * edge
    return 1j * cn * cm * bracket


def beta_sudden_limit(n: int, m: int, halfwidth: float = 1.0) -> complex:
    """lambda -> infinity limit of beta_nm: c d (q - k) I_1 - i c d."""
    k, q, cn, cm, X = _wavenumbers(n, m, SwitchProfile(1.0, halfwidth))
    i_one = (1.0 - cmath.exp(-1j * (k + q) * X)) / (1j * (k + q))
    return cn * cm * ((q - k) * i_one - 1j)


def beta_transparent_limit(n: int, m: int, halfwidth: float = 1.0) -> complex:
    """lambda -> 0 limit of beta_nm, the overlap with no mirror at all: -c d (q - k) I_1."""
    k, q, cn, cm, X = _wavenumbers(n, m, SwitchProfile(1.0, halfwidth))
    i_one = (1.0 - cmath.exp(-1j * (k + q) * X)) / (1j * (k + q))
    return -cn * cm * (q - k) * i_one


@dataclass(frozen=True)
class ImperfectBogoliubov:
    """beta[n-1, m-1] for n <= N switched modes and m <= M sub-cavity modes."""

    profile: SwitchProfile
    truncation: int
    beta: np.ndarray = field(repr=False)
    vartheta: np.ndarray = field(repr=False)


def imperfect_bogoliubov(profile: SwitchProfile, N: int, M: int = 1) -> ImperfectBogoliubov:
    if N < 1 or M < 1:
        raise DomainError("N and M must be >= 1")
    beta = np.array(
        [[beta_imperfect_closed(n, m, profile) for m in range(1, M + 1)] for n in range(1, N + 1)]
    )
    vt = np.array(
        [[profile.vartheta(n, m) for m in range(1, M + 1)] for n in range(1, N + 1)]
    )
    beta.setflags(write=False)
    vt.setflags(write=False)
    return ImperfectBogoliubov(profile, int(N), beta, vt)


def _tail(terms: np.ndarray) -> float:
    N = terms.size
    if N < 4:
        return 0.0
    n = np.arange(N // 2 + 1, N + 1, dtype=float)
    C = float(np.mean(terms[N // 2:] * n**3))
    return C * float(zeta(3.0, N + 1))


def particle_number_imperfect(
    m: int,
    r_eff: float,
    N: int = DEFAULT_TRUNCATION,
    reference: str = "vacuum",
    halfwidth: float = 1.0,
    tail: bool = True,
) -> float:
    """Particle content sum_n |beta_nm|^2 of sub-cavity mode m at reflectivity r_eff.

    reference="vacuum" sums |beta_nm - beta_nm(lambda -> 0)|^2, i.e. the
    content relative to the unswitched cavity; this vanishes as r_eff -> 0
    and converges in N for any finite lambda.  reference="none" sums the
    bare |beta_nm|^2, whose partial sums grow like log N because of the
    half-interval overlap.  ``r_eff = 1`` selects the sudden limit.
    """
    if reference not in ("vacuum", "none"):
        raise DomainError(f"reference must be 'vacuum' or 'none', got {reference!r}")
    if N < 1 or m < 1:
        raise DomainError("N and m must be >= 1")
    r_eff = float(r_eff)
    if r_eff == 1.0:
        betas = np.array([beta_sudden_limit(n, m, halfwidth) for n in range(1, N + 1)])
    else:
        profile = SwitchProfile.from_reflectivity(r_eff, halfwidth)
        betas = np.array([beta_imperfect_closed(n, m, profile) for n in range(1, N + 1)])
    if reference == "vacuum":
        betas = betas - np.array([beta_transparent_limit(n, m, halfwidth) for n in range(1, N + 1)])
    terms = np.abs(betas) ** 2
    total = float(np.sum(terms))
    if tail and reference == "vacuum":
        total += _tail(terms)
    return total
