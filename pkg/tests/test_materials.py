import numpy as np
import pytest

from confinedheat import materials
from confinedheat.constants import CONSTANTS


def test_sic_high_frequency_limit():
    eps = materials.permittivity(materials.sic(), 1e20)
    assert eps.real == pytest.approx(6.7, rel=1e-6)
    assert abs(eps.imag) < 1e-4


def test_sic_static_limit():
    # eps_inf * omega_LO^2 / omega_TO^2 evaluated from the model parameters
    m = materials.sic()
    want = 6.7 * (1.82e14 / 1.48e14) ** 2
    eps = materials.permittivity(m, 1e8)
    assert eps.real == pytest.approx(want, rel=1e-4)
    assert want == pytest.approx(10.13, abs=0.01)


def test_gold_at_plasma_frequency():
    m = materials.gold()
    w = m.omega_p
    want = 1.0 - m.omega_p / (m.omega_p + 1j * m.omega_tau)
    assert materials.permittivity(m, w) == pytest.approx(want, rel=1e-12)


def test_scaled_damping_drude_bit_identical_to_gold():
    g = materials.gold()
    s = materials.ScaledDampingDrude(omega_p=g.omega_p, omega_tau=g.omega_tau)
    for w in (1e12, 3.7e13, 1.5e14, 2e15):
        assert materials.permittivity(s, w) == materials.permittivity(g, w)


def test_transparent_and_mirror():
    assert materials.permittivity(materials.transparent(), 1e14) == 1.0
    with pytest.raises(ValueError):
        materials.permittivity(materials.mirror(), 1e14)


def test_passivity_on_log_grid():
    grid = np.logspace(11, 16, 1000)
    for model in (materials.sic(), materials.gold()):
        eps = materials.permittivity(model, grid)
        assert np.all(eps.imag > 0)


def test_polarizability_limits():
    p = materials.ParticleSpec(materials.transparent(), 10e-9)
    assert materials.polarizability(p, 1.7e14) == 0
    # conducting-sphere limit alpha -> R^3
    p = materials.ParticleSpec(materials.mirror(), 10e-9)
    assert materials.polarizability(p, 1.7e14) == pytest.approx((10e-9) ** 3)


def test_polarizability_sic_direct():
    R = 10e-9
    w = 1.7e14
    eps = materials.permittivity(materials.sic(), w)
    want = R ** 3 * (eps - 1) / (eps + 2)
    p = materials.ParticleSpec(materials.sic(), R)
    assert materials.polarizability(p, w) == pytest.approx(want, rel=1e-12)


def test_polarizability_passivity_log_grid():
    grid = np.logspace(11, 16, 1000)
    for model in (materials.sic(), materials.gold()):
        p = materials.ParticleSpec(model, 10e-9)
        alpha = materials.polarizability(p, grid)
        assert np.all(alpha.imag > 0)


def test_fresnel_transparent_plate():
    for pol in "MN":
        assert materials.fresnel(1.0 + 0j, 3e5, 1.7e14, pol) == 0


def test_fresnel_normal_incidence_identity():
    w = 1.7e14
    eps = materials.permittivity(materials.sic(), w)
    n = np.sqrt(eps)
    if n.imag < 0:
        n = -n
    want = (n - 1) / (n + 1)
    FM = materials.fresnel(eps, 0.0, w, "M")
    FN = materials.fresnel(eps, 0.0, w, "N")
    assert FN == pytest.approx(want, rel=1e-12)
    assert FM == pytest.approx(-want, rel=1e-12)


def test_fresnel_large_eps_approaches_mirror():
    w = 1.7e14
    k = w / CONSTANTS.c
    for kp in (0.0, 0.4 * k, 0.95 * k, 3 * k):
        FM = materials.fresnel(1e8 + 1e6j, kp, w, "M")
        FN = materials.fresnel(1e8 + 1e6j, kp, w, "N")
        assert abs(FM - (-1)) < 1e-3
        assert abs(FN - 1) < 1e-3
    assert materials.fresnel(materials.mirror(), 0.3 * k, w, "M") == -1
    assert materials.fresnel(materials.mirror(), 0.3 * k, w, "N") == 1


def test_fresnel_propagating_bound_randomized():
    rng = np.random.default_rng(11)
    for _ in range(200):
        w = 10 ** rng.uniform(12, 15.5)
        k = w / CONSTANTS.c
        kp = rng.uniform(0, 0.999) * k
        model = materials.sic() if rng.random() < 0.5 else materials.gold()
        eps = materials.permittivity(model, w)
        for pol in "MN":
            F = materials.fresnel(eps, kp, w, pol)
            assert abs(F) <= 1 + 1e-12


def test_tabulated_roundtrip(tmp_path):
    path = tmp_path / "eps.txt"
    path.write_text("# omega  re  im\n1e13 2.0 0.1\n1e14 3.0 0.2\n1e15 4.0 0.3\n")
    t = materials.load_tabulated(str(path))
    assert materials.permittivity(t, 1e14) == pytest.approx(3.0 + 0.2j)
    # log-frequency midpoint between 1e13 and 1e14
    mid = 10 ** 13.5
    assert materials.permittivity(t, mid) == pytest.approx(2.5 + 0.15j)
    with pytest.raises(ValueError):
        materials.permittivity(t, 1e16)
    with pytest.raises(ValueError):
        materials.permittivity(t, 1e12)


def test_tabulated_two_column(tmp_path):
    path = tmp_path / "eps2.txt"
    path.write_text("1e13 2.0\n1e15 4.0\n")
    t = materials.load_tabulated(str(path))
    assert materials.permittivity(t, 1e13) == pytest.approx(2.0 + 0.0j)


def test_material_by_name():
    assert isinstance(materials.material_by_name("sic"), materials.LorentzOscillator)
    assert isinstance(materials.material_by_name("gold"), materials.Drude)
    d = materials.material_by_name("drude:1.37e16,4.06e13")
    assert d == materials.gold()
    with pytest.raises(ValueError):
        materials.material_by_name("unobtainium")


def test_resonances_include_frohlich_wavelength():
    # the SiC dipole resonance sits near 10.75 um
    freqs = materials.resonant_frequencies(materials.sic())
    lam = [2 * np.pi * CONSTANTS.c / f for f in freqs]
    assert any(abs(x - 10.75e-6) < 0.1e-6 for x in lam)


def test_particle_volume():
    p = materials.ParticleSpec(materials.sic(), 10e-9)
    assert materials.particle_volume(p) == pytest.approx(4 / 3 * np.pi * 1e-24)
