"""Heat-flux quantities: particle-particle transfer between plates,
sphere-in-cavity heat radiation with its limits, free-sphere radiation,
plate-plate transfer per area, and net-flux bookkeeping.

All frequency integrals run over hbar*omega/(k_B T) in [1e-2, 50] by
default (Bose tail below 1e-19 relative), with material resonances
inserted as mandatory panel boundaries and a refinement cluster around
each sharp dipole resonance.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import materials as _mat
from .constants import CONSTANTS
from .mie import CavitySpec, SphereSpec, _cavity_factors, _sphere_factors
from .quadrature import adaptive_panels
from .specfun import planck_factor

__all__ = [
    "SpectralResult", "TemperatureAssignment", "MultipoleConvergenceError",
    "pp_pp_transfer", "sphere_in_cavity_hr", "free_sphere_hr",
    "hr_trace_oracle", "dipole_limit_hr", "pp_in_cavity_hr",
    "net_sphere_hr", "plate_plate_ht_per_area",
]

L_HARD_CAP = 2048


@dataclass(frozen=True)
class SpectralResult:
    """A power in watts with quadrature diagnostics."""

    power: float
    quadrature_error: float
    omega_window: tuple
    l_max_used: int = 0
    evaluations: int = 0


@dataclass(frozen=True)
class TemperatureAssignment:
    T1: float
    TC: float

    def __post_init__(self):
        if self.T1 <= 0 or self.TC < 0:
            raise ValueError("T1 must be positive and TC non-negative")


class MultipoleConvergenceError(RuntimeError):
    """The multipole sum failed to settle below the hard order cap."""

    def __init__(self, message, last_two):
        super().__init__(message)
        self.last_two = last_two


def _omega_edges(T1, models, window=(1e-2, 50.0), base_points=33):
    """Panel edges for thermal integrals: a geometric base grid plus the
    materials' resonances with local refinement clusters."""
    kt = CONSTANTS.k_B * T1 / CONSTANTS.hbar
    lo, hi = window[0] * kt, window[1] * kt
    edges = set(np.geomspace(lo, hi, base_points))
    for model in models:
        if model is None:
            continue
        for w0 in _mat.resonant_frequencies(model):
            if lo < w0 < hi:
                edges.add(w0)
                for delta in (3e-2, 1e-2, 3e-3, 1e-3):
                    for s in (1.0 - delta, 1.0 + delta):
                        w = w0 * s
                        if lo < w < hi:
                            edges.add(w)
    return np.array(sorted(edges)), (lo, hi)


def _bose_weight(omega, T1):
    """(2/pi) * hbar*omega/(e^{hbar w/kT} - 1), the Eq.-for-spheres weight."""
    return (2.0 / math.pi) * planck_factor(omega, T1)


def _cavity_cumsum(omega, sphere, cavity, L):
    """Cumulative multipole sums of the cavity emission summand.

    Returns shape (n, L): partial sums over l' <= l of
    sum_P (2l'+1) (Re T~ + 1)(-(Re T + |T|^2)) / |1 - T~ T|^2,
    assembled from scaled factors so extreme orders neither overflow nor
    underflow before they are combined.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    sf = _sphere_factors(omega, sphere, L)
    cf = _cavity_factors(omega, cavity, L)
    l_col = np.arange(1, L + 1, dtype=float)[:, None]
    total = np.zeros((L, omega.size))
    for P in "MN":
        tau_hat, theta, p_hat = sf[P].tau_hat, sf[P].theta, sf[P].p_hat
        c_hat, delta = cf[P].c_hat, cf[P].delta
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            eta = np.minimum(delta - theta, 700.0)
            e_eta = np.exp(eta)
            t_val = tau_hat * np.exp(-theta)
            u = e_eta * tau_hat * c_hat
            denom = np.abs(1.0 + t_val + 1j * u) ** 2
            term = (2 * l_col + 1) * c_hat.imag * p_hat * e_eta / denom
        good = (c_hat.imag != 0) & (p_hat != 0) & np.isfinite(term)
        total += np.where(good, term, 0.0)
    return np.cumsum(total, axis=0).T


def _free_cumsum(omega, sphere, L):
    """Cumulative sums of the isolated-sphere summand sum_P (2l+1)(-(Re T+|T|^2))."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    sf = _sphere_factors(omega, sphere, L)
    l_col = np.arange(1, L + 1, dtype=float)[:, None]
    total = np.zeros((L, omega.size))
    for P in "MN":
        with np.errstate(under="ignore"):
            term = (2 * l_col + 1) * sf[P].p_hat * np.exp(-sf[P].theta)
        total += np.where(np.isfinite(term), term, 0.0)
    return np.cumsum(total, axis=0).T


def _auto_l_start(x_max):
    return max(10, int(math.ceil(x_max + 7.0 * x_max ** (1.0 / 3.0))))


def _integrate_spectral(f, edges, rel_tol, window, l_used=0):
    res = adaptive_panels(f, edges, rel_tol=rel_tol, abs_tol=0.0,
                          max_panels=40000, min_width_rel=1e-6)
    return SpectralResult(float(res.value), float(res.error), window,
                          l_used, res.n_evals)


def sphere_in_cavity_hr(sphere, cavity, T1, l_control="auto", rel_tol=1e-7,
                        window=(1e-2, 50.0), l_rel_change=1e-6):
    """Heat radiation of a sphere centered in a spherical cavity, in watts.

    ``l_control`` is "auto" (the truncation order doubles until the
    integral changes by less than ``l_rel_change``) or an explicit integer
    order.
    """
    if sphere.radius >= cavity.radius:
        raise ValueError("sphere must fit inside the cavity")
    edges, win = _omega_edges(
        T1, [sphere.permittivity, cavity.wall_permittivity], window)

    def run(L):
        def f(om):
            return _bose_weight(om, T1) * _cavity_cumsum(om, sphere, cavity, L)[:, -1]
        return _integrate_spectral(f, edges, rel_tol, win, L)

    if l_control != "auto":
        return run(int(l_control))

    x_max = win[1] * cavity.radius / CONSTANTS.c
    L = min(_auto_l_start(x_max), L_HARD_CAP)
    prev = run(L)
    while True:
        L_next = min(2 * L, L_HARD_CAP)
        if L_next == L:
            raise MultipoleConvergenceError(
                f"multipole sum not converged at the hard cap {L_HARD_CAP}",
                last_two=(prev, prev))
        cur = run(L_next)
        scale = max(abs(cur.power), abs(prev.power))
        if scale == 0.0 or abs(cur.power - prev.power) < l_rel_change * scale:
            return cur
        if L_next == L_HARD_CAP:
            raise MultipoleConvergenceError(
                f"multipole sum not converged at the hard cap {L_HARD_CAP}",
                last_two=(prev, cur))
        prev, L = cur, L_next


def free_sphere_hr(sphere, T1, l_max=None, rel_tol=1e-7, window=(1e-2, 50.0)):
    """Heat radiation of the sphere in isolation (independent of the cavity
    machinery; the multipole tail is cut by its super-exponential decay)."""
    edges, win = _omega_edges(T1, [sphere.permittivity], window)
    if l_max is None:
        x_max = win[1] * sphere.radius / CONSTANTS.c
        l_max = _auto_l_start(x_max) + 8

    def f(om):
        return _bose_weight(om, T1) * _free_cumsum(om, sphere, l_max)[:, -1]

    return _integrate_spectral(f, edges, rel_tol, win, l_max)


def dipole_limit_hr(sphere, cavity, T1, rel_tol=1e-7, window=(1e-2, 50.0)):
    """The l = 1 term with multiple reflections neglected (denominator 1)."""
    edges, win = _omega_edges(
        T1, [sphere.permittivity, cavity.wall_permittivity], window)

    def f(om):
        om = np.atleast_1d(om)
        sf = _sphere_factors(om, sphere, 1)
        cf = _cavity_factors(om, cavity, 1)
        total = np.zeros(om.size)
        for P in "MN":
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                term = 3.0 * cf[P].c_hat.imag[0] * sf[P].p_hat[0] * \
                    np.exp(np.minimum(cf[P].delta[0] - sf[P].theta[0], 700.0))
            total += np.where(np.isfinite(term), term, 0.0)
        return _bose_weight(om, T1) * total

    return _integrate_spectral(f, edges, rel_tol, win, 1)


def pp_in_cavity_hr(particle, cavity, T1, rel_tol=1e-7, window=(1e-2, 50.0)):
    """Point-particle emission inside the cavity via the polarizability:
    H = (4 hbar / pi c^3) int dw w^4 n(w) Im(alpha) [1 + Re T~_1^N]."""
    edges, win = _omega_edges(
        T1, [particle.permittivity, cavity.wall_permittivity], window)

    def f(om):
        om = np.atleast_1d(om)
        alpha = _mat.polarizability(particle, om)
        cf = _cavity_factors(om, cavity, 1)["N"]
        with np.errstate(over="ignore"):
            weight = cf.c_hat.imag[0] * np.exp(cf.delta[0])
        return (4.0 / (math.pi * CONSTANTS.c ** 3)) * om ** 3 * \
            planck_factor(om, T1) * alpha.imag * weight

    return _integrate_spectral(f, edges, rel_tol, win, 1)


def net_sphere_hr(sphere, cavity, temps, **kwargs):
    """Signed net power H = H(T1) - H(TC); positive means the sphere cools."""
    h1 = sphere_in_cavity_hr(sphere, cavity, temps.T1, **kwargs)
    if temps.TC == 0.0:
        return h1
    if temps.TC == temps.T1:
        return SpectralResult(0.0, 2 * h1.quadrature_error, h1.omega_window,
                              h1.l_max_used, 2 * h1.evaluations)
    hc = sphere_in_cavity_hr(sphere, cavity, temps.TC, **kwargs)
    return SpectralResult(h1.power - hc.power,
                          h1.quadrature_error + hc.quadrature_error,
                          h1.omega_window, max(h1.l_max_used, hc.l_max_used),
                          h1.evaluations + hc.evaluations)


def hr_trace_oracle(sphere, cavity, T1, l_max, rel_tol=1e-9, window=(1e-2, 50.0)):
    """Dense diagonal-matrix trace evaluation of the cavity emission.

    Builds the literal (P, l, m)-indexed diagonal scattering matrices up to
    l_max, evaluates Re Tr{(T~ + I)(I - T T~)^-1 [(T^+ + T)/2 + T T^+]
    (I - T^+ T~^+)^-1} with dense linear algebra, and integrates. Intended
    as a small brute-force check of the (2l+1)-degeneracy reduction.
    """
    if l_max > 64:
        raise ValueError("dense trace oracle is capped at l_max = 64")
    edges, win = _omega_edges(
        T1, [sphere.permittivity, cavity.wall_permittivity], window)

    # one diagonal slot per (P, l, m)
    degeneracy = [2 * l + 1 for l in range(1, l_max + 1)]
    size = 2 * sum(degeneracy)

    def f(om_batch):
        om_batch = np.atleast_1d(om_batch)
        sf = _sphere_factors(om_batch, sphere, l_max)
        cf = _cavity_factors(om_batch, cavity, l_max)
        out = np.empty(om_batch.size)
        for j, om in enumerate(om_batch):
            diag_t = np.empty(size, dtype=complex)
            diag_tt = np.empty(size, dtype=complex)
            pos = 0
            for P in "MN":
                for l in range(1, l_max + 1):
                    with np.errstate(over="ignore", under="ignore"):
                        t = sf[P].tau_hat[l - 1, j] * np.exp(-sf[P].theta[l - 1, j])
                        c = cf[P].c_hat[l - 1, j] * np.exp(cf[P].delta[l - 1, j])
                    tt = -1.0 - 1j * c
                    n_m = 2 * l + 1
                    diag_t[pos:pos + n_m] = t
                    diag_tt[pos:pos + n_m] = tt
                    pos += n_m
            T = np.diag(diag_t)
            TT = np.diag(diag_tt)
            eye = np.eye(size)
            mid = 0.5 * (T.conj().T + T) + T @ T.conj().T
            inv1 = np.linalg.inv(eye - T @ TT)
            inv2 = np.linalg.inv(eye - T.conj().T @ TT.conj().T)
            tr = np.trace((TT + eye) @ inv1 @ mid @ inv2)
            out[j] = -_bose_weight(om, T1) * tr.real
        return out

    return _integrate_spectral(f, edges, rel_tol, win, l_max)


def pp_pp_transfer(p1, p2, T1, gf, rel_tol=1e-4, window=(1e-2, 50.0),
                   extra_materials=()):
    """Heat transfer between two point particles, Green's function supplied
    as a closure over omega.

    H = (32 pi hbar / c^4) int dw w^5 n(w) Im(a1) Im(a2) sum_ij |G_ij|^2.
    ``extra_materials`` lets callers add plate materials so their
    resonances become panel boundaries.
    """
    models = [p1.permittivity, p2.permittivity] + list(extra_materials)
    edges, win = _omega_edges(T1, models, window)
    pref = 32.0 * math.pi / CONSTANTS.c ** 4

    def f(om_batch):
        om_batch = np.atleast_1d(om_batch)
        a1 = np.imag(_mat.polarizability(p1, om_batch))
        a2 = np.imag(_mat.polarizability(p2, om_batch))
        s = np.empty(om_batch.size)
        for j, om in enumerate(om_batch):
            g = gf(float(om))
            s[j] = float(np.sum(np.abs(g) ** 2))
        return pref * om_batch ** 4 * planck_factor(om_batch, T1) * a1 * a2 * s

    return _integrate_spectral(f, edges, rel_tol, win, 0)


def _pvh_transmission(eps1, eps2, k, kz, gap, pol, evanescent):
    F1 = _mat.fresnel_kz(eps1, kz, k, pol)
    F2 = _mat.fresnel_kz(eps2, kz, k, pol)
    if evanescent:
        decay = np.exp(2j * kz * gap).real  # kz = i kappa
        num = 4.0 * F1.imag * F2.imag * decay
        den = np.abs(1.0 - F1 * F2 * decay) ** 2
    else:
        phase = np.exp(2j * kz * gap)
        num = (1.0 - np.abs(F1) ** 2) * (1.0 - np.abs(F2) ** 2)
        den = np.abs(1.0 - F1 * F2 * phase) ** 2
    return num / den


def plate_plate_ht_per_area(plate1, plate2, gap, T1, T2, rel_tol=1e-6,
                            window=(1e-2, 50.0), evanescent=True,
                            kperp_rel_tol=1e-7):
    """Heat transfer per unit area between two parallel half-spaces, W/m^2.

    Propagating and evanescent transmissions in the standard two-slab
    form; ``evanescent=False`` keeps only propagating waves (then H/A obeys
    the blackbody bound)."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    models = [plate1, plate2]
    edges, win = _omega_edges(max(T1, T2) if max(T1, T2) > 0 else T1, models, window)
    if isinstance(plate1, _mat.Transparent) or isinstance(plate2, _mat.Transparent):
        # a strictly lossless half-space neither emits nor absorbs; the
        # two-slab transmission formula presumes absorbing media
        return SpectralResult(0.0, 0.0, win, 0, 0)

    def eps_of(model, om):
        if isinstance(model, _mat.PerfectMirror):
            return model
        return _mat.permittivity(model, om)

    def inner(om):
        k = om / CONSTANTS.c
        e1 = eps_of(plate1, om)
        e2 = eps_of(plate2, om)

        def f_prop(theta):
            kz = (k * np.cos(theta)).astype(complex)
            tau = sum(_pvh_transmission(e1, e2, k, kz, gap, pol, False)
                      for pol in "MN")
            return k * k * np.sin(theta) * np.cos(theta) * tau.real

        prop = adaptive_panels(f_prop, np.linspace(0, np.pi / 2, 24),
                               rel_tol=kperp_rel_tol, abs_tol=0.0,
                               max_panels=20000).value
        if not evanescent:
            return float(prop)

        kappa_max = 37.0 / (2.0 * gap)
        breaks = [0.0, kappa_max]
        for e in (e1, e2):
            if not isinstance(e, _mat.PerfectMirror) and e.real < -1.0:
                ks = k / math.sqrt(-(1.0 + e.real))
                breaks += [ks * fac for fac in (0.5, 0.9, 1.0, 1.1, 2.0)
                           if 0 < ks * fac < kappa_max]
        breaks += list(np.geomspace(max(k * 1e-3, kappa_max * 1e-8), kappa_max, 25))
        edges_e = np.unique(np.array(sorted(set(breaks))))

        def f_evan(kappa):
            kz = 1j * kappa
            tau = sum(_pvh_transmission(e1, e2, k, kz, gap, pol, True)
                      for pol in "MN")
            return kappa * tau.real

        evan = adaptive_panels(f_evan, edges_e, rel_tol=kperp_rel_tol,
                               abs_tol=0.0, max_panels=40000).value
        return float(prop + evan)

    def f(om_batch):
        om_batch = np.atleast_1d(om_batch)
        w1 = planck_factor(om_batch, T1) if T1 > 0 else np.zeros(om_batch.size)
        w2 = planck_factor(om_batch, T2) if T2 > 0 else np.zeros(om_batch.size)
        vals = np.array([inner(float(om)) for om in om_batch])
        return (w1 - w2) * vals / (4.0 * np.pi ** 2)

    return _integrate_spectral(f, edges, rel_tol, win, 0)
