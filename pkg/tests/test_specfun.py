import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from confinedheat import specfun
from confinedheat.constants import CONSTANTS

import oracles


def test_cyl_bessel_j_at_origin():
    assert specfun.cyl_bessel_j(0, 0.0) == 1.0
    assert specfun.cyl_bessel_j(1, 0.0) == 0.0
    assert specfun.cyl_bessel_j(2, 0.0) == 0.0


def test_cyl_bessel_j_first_j0_root():
    # root refined with mpmath.findroot on the series
    assert abs(specfun.cyl_bessel_j(0, 2.4048255576957728)) < 1e-12


def test_cyl_bessel_j_against_mpmath_grid():
    for order in (0, 1, 2):
        for x in (0.3, 1.0, 7.5, 42.0, 310.0, 5500.0, 9999.0):
            want = float(mp.besselj(order, mp.mpf(x)))
            assert abs(specfun.cyl_bessel_j(order, x) - want) < 1e-14


def test_cyl_bessel_j_rejects_bad_input():
    with pytest.raises(ValueError):
        specfun.cyl_bessel_j(3, 1.0)
    with pytest.raises(ValueError):
        specfun.cyl_bessel_j(0, float("nan"))
    with pytest.raises(ValueError):
        specfun.cyl_bessel_j(0, -1.0)


def test_sph_bessel_regular_closed_forms():
    assert abs(specfun.sph_bessel_regular(0, 1.0) - math.sin(1.0)) < 1e-14
    # leading order j_1(z) ~ z/3
    assert abs(specfun.sph_bessel_regular(1, 1e-4) / (1e-4 / 3) - 1) < 1e-8
    assert specfun.sph_bessel_regular(0, 0) == 1.0
    assert specfun.sph_bessel_regular(3, 0) == 0.0


def test_sph_bessel_regular_series_oracle_complex():
    z = 2 + 3j
    want = complex(oracles.sph_jl_series(5, z))
    got = specfun.sph_bessel_regular(5, z)
    assert abs(got - want) / abs(want) < 1e-12


@pytest.mark.parametrize("l,z", [
    (0, 0.7), (2, 5.0), (10, 2.0), (50, 30.0), (100, 50 + 5j),
    (400, 900.0), (400, 1.5), (250, 200 + 80j), (400, 1000 + 100j),
    (7, 0.001), (30, 1e-3 + 1e-4j),
])
def test_sph_bessel_regular_mpmath_grid(l, z):
    want = complex(oracles.sph_jl(l, z))
    got = specfun.sph_bessel_regular(l, z)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("l,z", [
    (0, 1.0), (1, 1.0), (5, 2 + 0.5j), (50, 30.0), (200, 150 + 40j),
    (400, 1000.0), (12, 0.05),
])
def test_sph_hankel1_mpmath_grid(l, z):
    want = complex(oracles.sph_hl1(l, z))
    got = specfun.sph_hankel1(l, z)
    assert got == pytest.approx(want, rel=1e-10)


def test_sph_hankel1_closed_forms():
    z = 1.0
    want0 = -1j * np.exp(1j * z) / z
    assert specfun.sph_hankel1(0, z) == pytest.approx(want0, rel=1e-14)
    want1 = -np.exp(1j * z) * (z + 1j) / z ** 2
    assert specfun.sph_hankel1(1, z) == pytest.approx(want1, rel=1e-14)


def test_sph_hankel1_scaled_large_imag():
    z = 2.0 + 500j
    got = specfun.sph_hankel1(3, z, scaled=True)
    want = complex(oracles.sph_hl1_exact(3, z, strip_exp=True))
    assert got == pytest.approx(want, rel=1e-10)
    with pytest.raises(specfun.SpecialFunctionOverflow):
        specfun.sph_hankel1(3, 2.0 + 800j)


def test_sph_hankel1_pole_at_zero():
    with pytest.raises(ZeroDivisionError):
        specfun.sph_hankel1(0, 0)


def test_riccati_bundle_l0():
    rb = specfun.riccati_bundle(0, 1.0)
    assert rb.psi == pytest.approx(math.sin(1.0), rel=1e-14)
    assert rb.psi_prime == pytest.approx(math.cos(1.0), rel=1e-14)


def test_riccati_bundle_wronskian_randomized_grid():
    # combinations where xi_l overflows double precision raise instead of
    # returning inf; the identity is checked wherever values are representable
    rng = np.random.default_rng(20260809)
    checked = 0
    while checked < 60:
        l = int(rng.integers(0, 401))
        mag = 10 ** rng.uniform(-3, 3)
        arg = rng.uniform(0, np.pi * 0.999)
        z = mag * np.exp(1j * arg)
        if abs(z.imag) > 90:
            z = complex(z.real, 90 * np.sign(z.imag))
        try:
            rb = specfun.riccati_bundle(l, z)
        except specfun.SpecialFunctionOverflow:
            continue
        if abs(rb.xi) > 1e280 or abs(rb.psi) < 1e-280:
            continue
        w = rb.psi * rb.xi_prime - rb.psi_prime * rb.xi
        assert abs(w - 1j) < 1e-10, (l, z)
        checked += 1


def test_riccati_bundle_matches_mpmath_high_order():
    rb = specfun.riccati_bundle(100, 50 + 5j)
    psi, psip, xi, xip = (complex(v) for v in oracles.riccati(100, 50 + 5j))
    assert rb.psi == pytest.approx(psi, rel=1e-9)
    assert rb.psi_prime == pytest.approx(psip, rel=1e-9)
    assert rb.xi == pytest.approx(xi, rel=1e-9)
    assert rb.xi_prime == pytest.approx(xip, rel=1e-9)


def test_real_argument_psi_is_real():
    rb = specfun.riccati_bundle(7, 3.2)
    assert rb.psi.imag == 0.0
    assert rb.psi_prime.imag == 0.0


def test_downward_recurrence_agrees_with_series():
    for l, z in [(3, 0.5), (12, 4.0), (40, 9.0 + 2j)]:
        want = complex(oracles.sph_jl_series(l, z))
        got = specfun.sph_bessel_regular(l, z)
        assert abs(got - want) / abs(want) < 1e-10


def test_planck_factor_limits():
    T = 300.0
    # small-argument limit -> k_B T
    omega = 1e-8 * CONSTANTS.k_B * T / CONSTANTS.hbar
    assert specfun.planck_factor(omega, T) == pytest.approx(CONSTANTS.k_B * T, rel=1e-7)
    # asymptotic tail at hbar*omega = 50 k_B T
    omega = 50 * CONSTANTS.k_B * T / CONSTANTS.hbar
    want = CONSTANTS.k_B * T * 50 * math.exp(-50) / (1 - math.exp(-50))
    assert specfun.planck_factor(omega, T) == pytest.approx(want, rel=1e-12)


def test_planck_factor_high_precision_point():
    omega, T = 2.47e14, 300.0
    want = float(oracles.planck(omega, T, CONSTANTS.hbar, CONSTANTS.k_B))
    assert specfun.planck_factor(omega, T) == pytest.approx(want, rel=1e-13)


def test_planck_factor_domain():
    with pytest.raises(ValueError):
        specfun.planck_factor(1e14, 0.0)
    with pytest.raises(ValueError):
        specfun.planck_factor(1e14, -4.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e11, max_value=1e16),
       st.floats(min_value=1.01, max_value=4.0))
def test_planck_factor_monotone_in_omega(omega, factor):
    assert specfun.planck_factor(omega * factor, 300.0) < specfun.planck_factor(omega, 300.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=5.0, max_value=2000.0),
       st.floats(min_value=1.01, max_value=4.0))
def test_planck_factor_monotone_in_T(T, factor):
    # T >= 5 K keeps exp(-hbar*omega/k_B T) above double-precision underflow
    omega = 2e14
    assert specfun.planck_factor(omega, T * factor) > specfun.planck_factor(omega, T)


def test_thermal_wavelength_values():
    assert specfun.thermal_wavelength(300.0) == pytest.approx(7.63e-6, abs=0.01e-6)
    assert specfun.thermal_wavelength(600.0) == specfun.thermal_wavelength(300.0) / 2
    assert specfun.thermal_wavelength(150.0) == pytest.approx(15.27e-6, abs=0.02e-6)
    with pytest.raises(ValueError):
        specfun.thermal_wavelength(0.0)
