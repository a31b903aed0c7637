"""
Complex special functions and quadrature used by the mode-overlap formulas.

digamma and hyp2f1 are implemented here directly (recurrence + asymptotic
series, and series + linear transformations respectively).  Principal
branches are used throughout: ``log``, ``(-z)**(-a)`` and complex powers take
their principal values.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import loggamma

from .errors import (
    ConvergenceError,
    InvalidInterval,
    ParameterError,
    PoleError,
    ToleranceNotMet,
)

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "digamma",
    "hyp2f1",
    "hyp2f1_negexp",
    "sinc",
    "sinpi",
    "integrate_complex",
]

# B_{2k} / (2k) for k = 1..8
_ASYMPTOTIC_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)
_SHIFT_THRESHOLD = 8.0
_POLE_TOL = 1e-13

SERIES_CROSSOVER = 0.9
SERIES_MAX_TERMS = 20000
_SERIES_EPS = 2e-17
# symmetric perturbation for the degenerate (a - b integer) 1/z transform
_DEGENERATE_STEP = 1e-5
_INTEGER_SNAP = 8 * np.finfo(float).eps


def _is_nonpositive_integer(x: complex, tol: float = _POLE_TOL) -> bool:
    if abs(x.imag) > tol * max(1.0, abs(x.real)):
        return False
    r = round(x.real)
    return r <= 0 and abs(x.real - r) <= tol * max(1.0, abs(r))


def digamma(z) -> complex:
    """Digamma function psi(z) for complex z.

    Uses the reflection formula for Re z < 1/2, the recurrence
    psi(z) = psi(z + 1) - 1/z to push Re z above 8, and the asymptotic
    expansion there.  Raises PoleError at non-positive integers.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParameterError(f"digamma argument must be finite, got {z!r}")
    if _is_nonpositive_integer(z):
        raise PoleError(f"digamma has a pole at {z!r}")
    if z.real < 0.5:
        # psi(1 - z) - psi(z) = pi cot(pi z)
        return digamma(1.0 - z) - math.pi / cmath.tan(math.pi * z)

    acc = 0j
    while z.real < _SHIFT_THRESHOLD:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0j
    power = inv2
    for coeff in _ASYMPTOTIC_COEFFS:
        series += coeff * power
        power *= inv2
    return acc + cmath.log(z) - 0.5 / z - series


def sinc(x):
    """Unnormalised sinc, sin(x)/x, with sinc(0) = 1.

    Accepts scalars or arrays.  Even in x to the last bit: the small-argument
    branch is a polynomial in x**2 and the other branch uses sin(|x|)/|x|.
    """
    arr = np.abs(np.asarray(x, dtype=float))
    small = arr < 1e-4
    safe = np.where(small, 1.0, arr)
    x2 = np.where(small, arr, 0.0) ** 2
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    if np.ndim(out) == 0:
        return float(out)
    return out


def sinpi(x):
    """sin(pi x) with exact zeros at integers (after snapping rounding noise)."""
    x = np.asarray(x, dtype=float)
    k = np.rint(x)
    rem = x - k
    rem = np.where((k != 0) & (np.abs(rem) <= _INTEGER_SNAP * np.abs(x)), 0.0, rem)
    sign = np.where(np.fmod(k, 2.0) == 0, 1.0, -1.0)
    return sign * np.sin(np.pi * rem)


def _series(a: complex, b: complex, c: complex, z: complex) -> complex:
    total = 1.0 + 0j
    term = 1.0 + 0j
    small_run = 0
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) <= _SERIES_EPS * abs(total):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
    raise ConvergenceError(
        f"2F1 series did not converge in {SERIES_MAX_TERMS} terms "
        f"(a={a}, b={b}, c={c}, z={z})"
    )


def _rgamma_ratio(num: tuple[complex, ...], den: tuple[complex, ...]) -> complex:
    """prod Gamma(num) / prod Gamma(den); zero when a denominator sits on a pole."""
    for d in den:
        if _is_nonpositive_integer(d):
            return 0j
    logs = sum(complex(loggamma(v)) for v in num) - sum(complex(loggamma(v)) for v in den)
    return cmath.exp(logs)


def _inverse_transform(a: complex, b: complex, c: complex, log_mz: float) -> complex:
    """2F1(a, b; c; z) for z = -exp(log_mz) < -1 via the z -> 1/z connection formula.

    Powers of -z are taken as exp(-a * log_mz), so z itself is never formed.
    """
    inv_z = -math.exp(-log_mz)
    d = a - b
    if _is_nonpositive_integer(complex(-abs(d.real), d.imag)):
        # Connection coefficients are singular; average the two neighbours.
        h = _DEGENERATE_STEP
        return 0.5 * (
            _inverse_transform(a, b + h, c, log_mz) + _inverse_transform(a, b - h, c, log_mz)
        )
    t1 = _rgamma_ratio((c, b - a), (b, c - a))
    t2 = _rgamma_ratio((c, a - b), (a, c - b))
    out = 0j
    if t1 != 0:
        out += t1 * cmath.exp(-a * log_mz) * _series(a, a - c + 1, a - b + 1, inv_z)
    if t2 != 0:
        out += t2 * cmath.exp(-b * log_mz) * _series(b, b - c + 1, b - a + 1, inv_z)
    return out


def _check_params(a, b, c):
    a, b, c = complex(a), complex(b), complex(c)
    for name, v in (("alpha", a), ("beta", b), ("gamma", c)):
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ParameterError(f"2F1 parameter {name} must be finite, got {v!r}")
    if _is_nonpositive_integer(c):
        raise ParameterError(f"2F1 gamma parameter is at a pole: {c!r}")
    return a, b, c


def hyp2f1(alpha, beta, gamma, z: float) -> complex:
    """Gauss hypergeometric function 2F1(alpha, beta; gamma; z) for real z < 1.

    Region selection:
      |z| < 0.9          defining power series
      -9 <= z <= -0.9    Pfaff transformation to w = z/(z-1) in [0.47, 0.9]
      z < -9             z -> 1/z connection formula (|1/z| < 1/9)
      0.9 <= z < 1       defining power series, slow but convergent

    z >= 1 lies on the branch cut and raises ParameterError.
    """
    a, b, c = _check_params(alpha, beta, gamma)
    z = float(z)
    if not math.isfinite(z):
        raise ParameterError(f"2F1 argument must be finite, got {z!r}")
    if z == 0.0:
        return 1.0 + 0j
    if z >= 1.0:
        raise ParameterError(f"2F1 argument z={z} is on the branch cut [1, inf)")
    if abs(z) < SERIES_CROSSOVER or z > 0:
        return _series(a, b, c, z)
    if z >= -SERIES_CROSSOVER / (1.0 - SERIES_CROSSOVER):
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _series(a, c - b, c, w)
    return _inverse_transform(a, b, c, math.log(-z))


def hyp2f1_negexp(alpha, beta, gamma, x: float) -> complex:
    """2F1(alpha, beta; gamma; -exp(x)) without forming exp(x).

    Needed for arguments like -exp(a*lambda/2) with lambda in the thousands,
    where exp(x) overflows a double.
    """
    a, b, c = _check_params(alpha, beta, gamma)
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError(f"log-argument must be finite, got {x!r}")
    threshold = math.log(SERIES_CROSSOVER / (1.0 - SERIES_CROSSOVER))
    if x <= threshold:
        return hyp2f1(a, b, c, -math.exp(x))
    return _inverse_transform(a, b, c, x)


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    converged: bool

    def __complex__(self):
        return complex(self.value)


def integrate_complex(
    f: Callable[[float], complex],
    lo: float,
    hi: float,
    spec: QuadratureSpec | None = None,
    points=None,
) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of a complex integrand on [lo, hi].

    Backed by QUADPACK (scipy.integrate.quad) on the real and imaginary parts.
    If the requested tolerance is not reached, the best estimate is returned
    with ``converged=False`` and a ToleranceNotMet warning.
    """
    spec = spec or QuadratureSpec()
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise InvalidInterval(f"need finite lo < hi, got [{lo}, {hi}]")

    parts = []
    ok = True
    for part in (lambda u: complex(f(u)).real, lambda u: complex(f(u)).imag):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err, info, *rest = integrate.quad(
                part,
                lo,
                hi,
                epsabs=spec.abs_tol,
                epsrel=spec.rel_tol,
                limit=int(spec.max_subdivisions),
                points=points,
                full_output=1,
            )
        ier = rest[0] if len(rest) > 1 else 0
        ok = ok and ier == 0
        parts.append((val, err))

    value = complex(parts[0][0], parts[1][0])
    error = math.hypot(parts[0][1], parts[1][1])
    ok = ok and error <= max(spec.abs_tol, spec.rel_tol * abs(value))
    if not ok:
        warnings.warn(
            f"quadrature on [{lo}, {hi}] reached error {error:.3e}, "
            f"requested max({spec.abs_tol:.1e}, {spec.rel_tol:.1e}*|I|)",
            ToleranceNotMet,
            stacklevel=2,
        )
    return QuadResult(value=value, error=error, converged=ok)
