"""Checks for the log-scaled batched Riccati machinery against mpmath."""

import mpmath as mp
import numpy as np
import pytest

from confinedheat import _radial

import oracles


def _psi_chi_mp(l, x, dps=60):
    with mp.workdps(dps):
        x = mp.mpf(x)
        psi = mp.re(x * oracles.sph_jl(l, x, dps))
        chi = mp.re(x * oracles.sph_yl(l, x, dps))
        return psi, chi


@pytest.mark.parametrize("x", [1e-3, 0.05, 0.8, 3.7, 25.0, 400.0, 6500.0])
def test_real_table_values_against_mpmath(x):
    L = 40
    table = _radial.riccati_real_table(np.array([x]), L)
    for l in (0, 1, 2, 7, 19, 40):
        psi, chi = _psi_chi_mp(l, x)
        got_psi = table.sign_psi[l, 0] * np.exp(table.log_psi[l, 0])
        got_chi = table.sign_chi[l, 0] * np.exp(table.log_chi[l, 0])
        if mp.mpf(abs(psi)) > mp.mpf(10) ** -280:
            assert got_psi == pytest.approx(float(psi), rel=1e-10), (l, x, "psi")
        assert got_chi == pytest.approx(float(chi), rel=1e-10), (l, x, "chi")


def test_real_table_logs_beyond_float_range():
    # l = 600 at x = 0.5: psi ~ 1e-1860, chi ~ 1e+1856; logs must stay accurate
    x = 0.5
    L = 600
    table = _radial.riccati_real_table(np.array([x]), L)
    with mp.workdps(80):
        psi, chi = _psi_chi_mp(600, x, dps=80)
        want_lpsi = float(mp.log(abs(psi)))
        want_lchi = float(mp.log(abs(chi)))
    assert table.log_psi[600, 0] == pytest.approx(want_lpsi, rel=1e-12)
    assert table.log_chi[600, 0] == pytest.approx(want_lchi, rel=1e-12)


def test_real_table_wronskian_via_logs():
    # psi_l chi_l' - psi_l' chi_l = 1 for every l, using scaled pieces
    rng = np.random.default_rng(7)
    x = 10 ** rng.uniform(-2, 3, size=24)
    L = 250
    t = _radial.riccati_real_table(x, L)
    for l in (1, 3, 40, 125, 250):
        # W = psi*chi*(chi_ld - psi_ld) with log-scaled product
        prod = t.sign_psi[l] * t.sign_chi[l] * np.exp(t.log_psi[l] + t.log_chi[l])
        w = prod * (t.chi_logderiv(l) - t.psi_logderiv(l))
        assert np.allclose(w, 1.0, rtol=1e-8), l


def test_ratios_match_value_quotients():
    x = np.array([2.3, 47.0])
    t = _radial.riccati_real_table(x, 30)
    for l in (1, 5, 30):
        psi_l = [_psi_chi_mp(l, xi)[0] for xi in x]
        psi_lm = [_psi_chi_mp(l - 1, xi)[0] for xi in x]
        want = np.array([float(a / b) for a, b in zip(psi_lm, psi_l)])
        assert np.allclose(t.ratio_psi[l], want, rtol=1e-9)


@pytest.mark.parametrize("z", [0.3 + 0.0j, 4.0 + 1.5j, 60.0 + 12.0j, 2.0 + 30.0j, 900.0 + 5.0j])
def test_log_derivative_psi_against_mpmath(z):
    L = 60
    D = _radial.log_derivative_psi(np.array([z]), L)
    for l in (1, 2, 17, 60):
        psi, psip, _, _ = oracles.riccati(l, z)
        want = complex(psip / psi)
        assert D[l, 0] == pytest.approx(want, rel=1e-10), l


@pytest.mark.parametrize("z", [1.0 + 0.0j, 3.0 + 2.0j, 0.05 + 0.01j, 200.0 + 150.0j])
def test_hankel_xi_logderiv_against_mpmath(z):
    # the e^{iz} factor cancels in the ratio, so use the exact Rayleigh sums
    L = 50
    X = _radial.hankel_xi_logderiv(np.array([z]), L)
    with mp.workdps(60):
        for l in (0, 1, 9, 50):
            zz = mp.mpc(z)
            hl = oracles.sph_hl1_exact(l, z, dps=60, strip_exp=True)
            hlm = (oracles.sph_hl1_exact(l - 1, z, dps=60, strip_exp=True)
                   if l > 0 else mp.mpc(1) / zz)  # e^{iz}-stripped h_{-1}
            want = complex((zz * hlm - l * hl) / (zz * hl))
            assert X[l, 0] == pytest.approx(want, rel=1e-9), l


def test_mixed_batch_regimes():
    # one tiny and one huge argument in the same batch must both be right
    x = np.array([1.3e-4, 5200.0])
    t = _radial.riccati_real_table(x, 25)
    for col, xv in enumerate(x):
        psi, chi = _psi_chi_mp(25, xv)
        got_log = t.log_psi[25, col]
        with mp.workdps(60):
            assert got_log == pytest.approx(float(mp.log(abs(psi))), rel=1e-10)
        got_chi = t.sign_chi[25, col] * np.exp(t.log_chi[25, col])
        assert got_chi == pytest.approx(float(chi), rel=1e-9)
