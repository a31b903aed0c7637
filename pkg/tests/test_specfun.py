import cmath
import math
import random
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vacuumprobe.errors import ConvergenceError, InvalidInterval, ParameterError, PoleError, ToleranceNotMet
from vacuumprobe.specfun import (
    QuadratureSpec,
    digamma,
    hyp2f1,
    hyp2f1_negexp,
    integrate_complex,
    sinc,
    sinpi,
)

EULER = 0.57721566490153286061


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# -- digamma -----------------------------------------------------------------

def test_digamma_at_one():
    assert rel(digamma(1), -EULER) < 1e-14


def test_digamma_at_half():
    assert rel(digamma(0.5), -EULER - 2 * math.log(2)) < 1e-14


def test_digamma_frozen_complex_value():
    # 30-digit reference from arbitrary-precision evaluation
    ref = complex(-0.44720792029956117395, -1.89181085521852666870)
    assert rel(digamma(0.3 - 0.7j), ref) < 1e-13


@pytest.mark.parametrize("theta", [1e-3, 0.1, 0.7, 3.0, 17.0, 250.0])
def test_digamma_on_closed_form_arguments(theta):
    for z in (complex(0, -theta / 2), complex(0.5, -theta / 2)):
        ref = complex(mpmath.digamma(z))
        assert rel(digamma(z), ref) < 1e-12


def test_digamma_matches_arbitrary_precision_on_random_grid():
    rng = random.Random(7)
    for _ in range(200):
        z = complex(rng.uniform(-30, 30), rng.uniform(-30, 30))
        assert rel(digamma(z), complex(mpmath.digamma(z))) < 1e-12


def test_digamma_reflection_formula():
    rng = random.Random(3)
    checked = 0
    while checked < 100:
        z = complex(rng.uniform(-6, 6), rng.uniform(-4, 4))
        if abs(z.imag) < 0.05 and abs(z.real - round(z.real)) < 0.05:
            continue
        lhs = digamma(1 - z) - digamma(z)
        rhs = math.pi / cmath.tan(math.pi * z)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))
        checked += 1


@pytest.mark.parametrize("z", [0, -1, -7, -1 + 1e-16j])
def test_digamma_poles(z):
    with pytest.raises(PoleError):
        digamma(z)


def test_digamma_recurrence_property():
    rng = random.Random(11)
    for _ in range(50):
        z = complex(rng.uniform(0.1, 10), rng.uniform(-10, 10))
        assert abs(digamma(z + 1) - digamma(z) - 1 / z) < 1e-12 * max(1, abs(digamma(z)))


# -- hyp2f1 ------------------------------------------------------------------

def test_hyp2f1_reduces_to_power():
    assert rel(hyp2f1(1, 2, 2, 0.5), 2.0) < 1e-15


def test_hyp2f1_at_zero():
    assert hyp2f1(1, -0.3j, 1 - 0.3j, 0.0) == 1


def test_hyp2f1_frozen_pfaff_region():
    ref = complex(0.62781171264525593702, 0.48099475001722156474)
    assert rel(hyp2f1(1, -0.5j, 1 - 0.5j, -3.2), ref) < 1e-12


def test_hyp2f1_log_space_argument():
    # 2F1(1, -2i; 1 - 2i; -e^500); the argument itself overflows a double
    ref = complex(0.013197383135432125618, 0.019404431216089535227)
    assert rel(hyp2f1_negexp(1, -2j, 1 - 2j, 500.0), ref) < 1e-12


@pytest.mark.parametrize("z", [-0.5, -0.89, -0.9, -3.2, -8.99, -9.01, -50.0, -1e4, -1e12])
@pytest.mark.parametrize("theta", [0.05, 1.0, 6.0, 40.0])
def test_hyp2f1_used_family_against_arbitrary_precision(z, theta):
    c0 = complex(0, -theta)
    ref = complex(mpmath.hyp2f1(1, c0, c0 + 1, z))
    assert rel(hyp2f1(1, c0, c0 + 1, z), ref) < 1e-10


def test_hyp2f1_random_parameters():
    rng = random.Random(5)
    for _ in range(200):
        a = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        b = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        c = complex(rng.uniform(0.2, 4), rng.uniform(-3, 3))
        z = rng.choice([rng.uniform(-0.89, 0.89), rng.uniform(-9, -0.9), -(10 ** rng.uniform(1, 6))])
        ref = complex(mpmath.hyp2f1(a, b, c, z))
        assert abs(hyp2f1(a, b, c, z) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_hyp2f1_degenerate_inverse_transform():
    # a - b integer makes the 1/z connection coefficients individually singular
    ref = complex(mpmath.hyp2f1(1, 2, 3, -50))
    assert rel(hyp2f1(1, 2, 3, -50), ref) < 1e-8


def test_hyp2f1_contiguous_relation():
    # (c - a) F(a-1) + (2a - c + (b - a) z) F(a) + a (z - 1) F(a+1) = 0
    rng = random.Random(13)
    for _ in range(100):
        theta = rng.uniform(0.01, 50)
        a = complex(1.0, rng.uniform(-1, 1))
        b = complex(0, -theta)
        c = b + 1
        z = -(10 ** rng.uniform(-2, 3))
        fm, f0, fp = (hyp2f1(a + d, b, c, z) for d in (-1, 0, 1))
        terms = ((c - a) * fm, (2 * a - c + (b - a) * z) * f0, a * (z - 1) * fp)
        scale = max(abs(t) for t in terms)
        assert abs(sum(terms)) <= 1e-8 * scale


def test_hyp2f1_negexp_agrees_with_direct_argument():
    for x in (-3.0, 0.0, 1.5, 2.2, 5.0, 30.0):
        direct = hyp2f1(1, -0.7j, 1 - 0.7j, -math.exp(x))
        assert rel(hyp2f1_negexp(1, -0.7j, 1 - 0.7j, x), direct) < 1e-12


def test_hyp2f1_gamma_pole():
    with pytest.raises(ParameterError):
        hyp2f1(1, 1, -2, 0.3)


def test_hyp2f1_branch_cut():
    with pytest.raises(ParameterError):
        hyp2f1(1, 1, 2, 1.5)


def test_hyp2f1_series_cap(monkeypatch):
    import vacuumprobe.specfun as sf

    monkeypatch.setattr(sf, "SERIES_MAX_TERMS", 5)
    with pytest.raises(ConvergenceError):
        hyp2f1(0.5, 0.5, 1.5, 0.95)


# -- sinc --------------------------------------------------------------------

def test_sinc_values():
    assert sinc(0.0) == 1.0
    assert abs(sinc(math.pi)) < 1e-16
    assert rel(sinc(1.5), 0.66499665773603628729) < 1e-15


def test_sinc_small_arguments():
    for x in (1e-12, 1e-8, 3e-5, 9.9e-5, 1.01e-4, 1e-3):
        assert rel(sinc(x), float(mpmath.sin(x) / x)) < 1e-15


@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_sinc_is_exactly_even(x):
    assert sinc(x) == sinc(-x)


def test_sinc_array():
    x = np.linspace(-10, 10, 101)
    np.testing.assert_allclose(sinc(x), np.sinc(x / np.pi), rtol=1e-14, atol=1e-16)


def test_sinpi_integer_zeros():
    assert np.all(sinpi(np.arange(-5, 6) * 1.0) == 0)
    assert sinpi(10 * 0.3) == 0.0
    assert rel(float(sinpi(0.5)), 1.0) < 1e-16


# -- quadrature --------------------------------------------------------------

def test_integrate_exponential():
    res = integrate_complex(lambda u: cmath.exp(1j * u), 0.0, math.pi)
    assert abs(res.value - 2j) < 1e-12
    assert res.converged


def test_integrate_constant():
    assert abs(integrate_complex(lambda u: 1.0, 0.0, 1.0).value - 1.0) < 1e-14


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=7, max_size=7),
    st.floats(-3, 3),
    st.floats(0.1, 4),
)
def test_integrate_polynomials_exactly(coeffs, lo, width):
    hi = lo + width
    spec = QuadratureSpec()
    f = lambda u: sum(c * u**k for k, c in enumerate(coeffs))  # noqa: E731
    exact = sum(c * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1) for k, c in enumerate(coeffs))
    res = integrate_complex(f, lo, hi, spec)
    assert abs(res.value - exact) <= max(spec.abs_tol, 1e-13 * abs(exact))


def test_integrate_reports_error_estimate():
    res = integrate_complex(lambda u: cmath.exp(3j * u) * u, 0.0, 2.0)
    assert res.error <= max(1e-10, 1e-8 * abs(res.value))


@pytest.mark.parametrize("lo,hi", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf), (math.nan, 1.0)])
def test_integrate_invalid_interval(lo, hi):
    with pytest.raises(InvalidInterval):
        integrate_complex(lambda u: 1.0, lo, hi)


def test_integrate_flags_unmet_tolerance():
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = integrate_complex(lambda u: cmath.exp(200j * u * u), 0.0, 3.0, spec)
    assert not res.converged
    assert any(issubclass(w.category, ToleranceNotMet) for w in caught)
    assert math.isfinite(res.value.real)


@pytest.mark.parametrize("kwargs", [{"abs_tol": 0}, {"rel_tol": -1}, {"max_subdivisions": 0}])
def test_quadrature_spec_validation(kwargs):
    with pytest.raises(ValueError):
        QuadratureSpec(**kwargs)
