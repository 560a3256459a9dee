"""Dyadic Green's functions: vacuum, single plate, and the two-plate midplane form.

Geometry convention: plates at z = 0 and z = -d, both particles on the
midplane at positions (0, 0, -d/2) and (r, 0, -d/2). In this frame every
Green's tensor here is diagonal.

The in-plane wavevector integral is split exactly into a propagating
sector (k_z = k cos(theta), which cancels the 1/k_z endpoint singularity)
and an evanescent sector (k_z = i kappa, measure d kappa), truncated where
exp(-kappa d) drops below exp(-cutoff).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .constants import CONSTANTS
from .materials import PermittivityModel, PerfectMirror, Transparent, permittivity, fresnel_kz
from .quadrature import adaptive_panels

__all__ = [
    "PlateCavityGeometry", "KPerpQuadratureSpec",
    "vacuum_gf", "angular_matrices", "two_plate_midplane_gf",
    "image_series_gf", "single_plate_gf",
    "vacuum_provider", "two_plate_provider", "single_plate_provider",
]


@dataclass(frozen=True)
class PlateCavityGeometry:
    """Two identical plates a distance d apart, particles at midplane
    separated by r in-plane."""

    d: float
    r: float
    plate: PermittivityModel

    def __post_init__(self):
        if self.d <= 0 or self.r <= 0:
            raise ValueError("plate separation and particle separation must be positive")


@dataclass(frozen=True)
class KPerpQuadratureSpec:
    rel_tol: float = 1e-7
    evanescent_cutoff_exponent: float = 37.0
    panel_rule: str = "gk15"

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-2):
            raise ValueError("rel_tol must be in (0, 1e-2]")
        if self.evanescent_cutoff_exponent < 30:
            raise ValueError("evanescent cutoff exponent must be >= 30")


def vacuum_gf(separation_vector, omega):
    """Free-space dyadic Green's function between two points.

    G0 = e^{ik rho}/(4 pi rho) [ (1 + i/(k rho) - 1/(k rho)^2) I
         + (-1 - 3i/(k rho) + 3/(k rho)^2) rho_hat rho_hat ]
    """
    v = np.asarray(separation_vector, dtype=float)
    rho = float(np.linalg.norm(v))
    if rho == 0:
        raise ZeroDivisionError("vacuum Green's function is singular at zero separation")
    k = omega / CONSTANTS.c
    x = k * rho
    unit = v / rho
    a = 1.0 + 1j / x - 1.0 / x ** 2
    b = -1.0 - 3j / x + 3.0 / x ** 2
    pref = np.exp(1j * x) / (4.0 * np.pi * rho)
    return pref * (a * np.eye(3) + b * np.outer(unit, unit))


def _bessel_trio(x):
    """J0, J1/x, (J1 - x J2)/x with analytic x -> 0 limits (both 1/2).

    The third combination reduces exactly to J0 - J1/x via the three-term
    recurrence, avoiding the general-order Bessel path entirely.
    """
    x = np.asarray(x, dtype=float)
    j0 = _sp.j0(x)
    j1 = _sp.j1(x)
    small = x < 1e-6
    safe = np.where(small, 1.0, x)
    j1_over = np.where(small, 0.5, j1 / safe)
    m22 = j0 - j1_over
    return j0, j1_over, m22


def _angular_batch(k_perp, kz2, r, k):
    """Angular-integrated matrices for a batch of k_perp; returns the three
    diagonals (each (n, 3)) of 2pi-normalized M, N', N."""
    x = k_perp * r
    j0, j1_over, m22 = _bessel_trio(x)
    two_pi = 2.0 * np.pi
    Mdiag = two_pi * np.stack([j1_over, m22, np.zeros_like(j1_over)], axis=-1)
    scale = two_pi / (k * k)
    Npdiag = scale * np.stack([-kz2 * m22, -kz2 * j1_over, k_perp ** 2 * j0], axis=-1)
    Ndiag = scale * np.stack([kz2 * m22, kz2 * j1_over, k_perp ** 2 * j0], axis=-1)
    return Mdiag, Npdiag, Ndiag


def angular_matrices(k_perp, r, omega):
    """The three real 3x3 angular-integration matrices at one k_perp.

    Entries follow the midplane decomposition: M couples to the magnetic
    polarization, N' to the mixed up/down electric terms, N to the
    doubly-reflected electric terms.
    """
    if k_perp < 0 or r <= 0:
        raise ValueError("k_perp must be >= 0 and r > 0")
    k = omega / CONSTANTS.c
    kz2 = k * k - k_perp * k_perp
    Md, Npd, Nd = _angular_batch(np.atleast_1d(float(k_perp)),
                                 np.atleast_1d(kz2), r, k)
    return np.diag(Md[0]), np.diag(Npd[0]), np.diag(Nd[0])


def _plate_eps(plate, omega):
    if isinstance(plate, PerfectMirror):
        return plate
    return permittivity(plate, omega)


def _series_weights(qM, qN, n_powers):
    """Partial geometric sums: sum_p qM^p, odd-p and even-p sums of qN^p,
    p = 1..n_powers."""
    sM = np.zeros_like(qM)
    sNodd = np.zeros_like(qN)
    sNeven = np.zeros_like(qN)
    pM = np.ones_like(qM)
    pN = np.ones_like(qN)
    for p in range(1, n_powers + 1):
        pM = pM * qM
        pN = pN * qN
        sM += pM
        if p % 2 == 1:
            sNodd += pN
        else:
            sNeven += pN
    return sM, sNodd, sNeven


def _two_plate_core(kz, kz2, k_perp, eps, k, d, r, n_reflections=None):
    """Scattered-part integrand diagonals (n, 3), excluding measure factors.

    The M polarization resums to q/(1-q) with q = F^M e^{i k_z d}; the N
    polarization carries N' on odd reflection counts and N on even ones.
    With ``n_reflections`` set, the geometric denominators are replaced by
    partial sums with max reflection power n_reflections + 1.
    """
    FM = fresnel_kz(eps, kz, k, "M")
    FN = fresnel_kz(eps, kz, k, "N")
    phase = np.exp(1j * kz * d)
    qM = FM * phase
    qN = FN * phase
    Md, Npd, Nd = _angular_batch(k_perp, kz2, r, k)
    if n_reflections is None:
        wM = qM / (1.0 - qM)
        wN = qN / (1.0 - qN * qN)
        wN2 = wN * qN
    else:
        wM, wN, wN2 = _series_weights(qM, qN, n_reflections + 1)
    return (wM[:, None] * Md + wN[:, None] * Npd + wN2[:, None] * Nd)


def _spp_breakpoints(eps, k):
    """Surface-polariton kappa locations to seed evanescent panels."""
    if isinstance(eps, PerfectMirror):
        return []
    if eps.real < -1.0:
        kappa = k / math.sqrt(-(1.0 + eps.real)) if (1.0 + eps.real) < 0 else None
        if kappa is not None and np.isfinite(kappa):
            return [kappa * f for f in (0.5, 0.8, 0.95, 1.05, 1.3, 2.0)]
    return []


def _scattered_integral(omega, plate, d, r, quad, core):
    """Run both wavevector sectors for a diagonal-core integrand.

    ``core(kz, kz2, k_perp)`` returns (n, 3) diagonals. Returns the 3x3
    scattered tensor.
    """
    k = omega / CONSTANTS.c
    eps = _plate_eps(plate, omega)
    if isinstance(eps, Transparent):
        eps = 1.0 + 0.0j

    def f_prop(theta):
        kz = k * np.cos(theta)
        k_perp = k * np.sin(theta)
        vals = core(kz.astype(complex), kz * kz, k_perp)
        w = (k * np.sin(theta)).reshape((-1,) + (1,) * (vals.ndim - 1))
        return (1j / (4 * np.pi ** 2)) * w * vals

    n_theta = int(min(4000, 8 + k * (r + 2 * d) / 2.0))
    edges_p = np.linspace(0.0, np.pi / 2, n_theta + 1)
    prop = adaptive_panels(f_prop, edges_p, rel_tol=quad.rel_tol,
                           abs_tol=0.0, max_panels=100000)

    kappa_max = quad.evanescent_cutoff_exponent / d

    def f_evan(kappa):
        k_perp = np.hypot(k, kappa)
        vals = core(1j * kappa, -kappa * kappa, k_perp)
        return (1.0 / (4 * np.pi ** 2)) * vals

    # octave blocks keep the initial panel count proportional to the
    # oscillation scale actually present in each kappa range
    dk = np.pi / (r + 0.25 * d)
    block_edges = [0.0]
    top = 2.0 / d
    while top < kappa_max:
        block_edges.append(top)
        top *= 2.0
    block_edges.append(kappa_max)
    extra = [b for b in _spp_breakpoints(eps, k) if 0 < b < kappa_max] if not isinstance(eps, PerfectMirror) else []

    total = prop.value.copy()
    err = prop.error
    n_evals = prop.n_evals
    running_scale = float(np.max(np.abs(total)))
    for lo, hi in zip(block_edges[:-1], block_edges[1:]):
        n_panels = int(min(30000, max(4, math.ceil((hi - lo) / dk))))
        edges = np.linspace(lo, hi, n_panels + 1)
        pts = sorted(set([e for e in extra if lo < e < hi]))
        if pts:
            edges = np.unique(np.concatenate([edges, pts]))
        blk = adaptive_panels(f_evan, edges, rel_tol=quad.rel_tol,
                              abs_tol=quad.rel_tol * running_scale * 1e-3,
                              max_panels=120000)
        total = total + blk.value
        err += blk.error
        n_evals += blk.n_evals
        running_scale = max(running_scale, float(np.max(np.abs(total))))
        # the integrand envelope decays like e^{-kappa d}; once a whole
        # block is negligible the remaining tail is too
        if lo >= 8.0 / d and float(np.max(np.abs(blk.value))) < quad.rel_tol * running_scale * 1e-2:
            break
    return total, err, n_evals


def _diag_to_tensor(diag3):
    out = np.zeros((3, 3), dtype=complex)
    out[0, 0], out[1, 1], out[2, 2] = diag3
    return out


def two_plate_midplane_gf(geom, omega, quad=None):
    """Green's function between the midplane particle positions.

    Vacuum part plus the plate-scattered part; exactly diagonal in the
    chosen frame.
    """
    quad = quad or KPerpQuadratureSpec()
    if isinstance(geom.plate, PerfectMirror):
        # with F^N = +1 the TEM waveguide mode sits exactly at k_z = 0 and
        # the wavevector integral exists only as a principal value
        raise ValueError("two-plate Green's function for perfect mirror plates "
                         "is not supported; use a low-damping Drude model instead")
    k = omega / CONSTANTS.c
    eps = _plate_eps(geom.plate, omega)
    if isinstance(eps, Transparent):
        eps = 1.0 + 0.0j
    g0 = vacuum_gf((geom.r, 0.0, 0.0), omega)
    if eps == 1.0:
        return g0

    def core(kz, kz2, k_perp):
        return _two_plate_core(kz, kz2, k_perp, eps, k, geom.d, geom.r)

    scat, _, _ = _scattered_integral(omega, geom.plate, geom.d, geom.r, quad, core)
    return g0 + _diag_to_tensor(scat)


def _expansion_ratio_max(eps, k, d, kappa_max):
    """Largest |F^P e^{i k_z d}|^2 round-trip factor over both sectors."""
    worst = 0.0
    theta = np.linspace(1e-4, np.pi / 2 * (1 - 1e-9), 2000)
    kz = (k * np.cos(theta)).astype(complex)
    for pol in ("M", "N"):
        q = np.abs(fresnel_kz(eps, kz, k, pol) * np.exp(1j * kz * d)) ** 2
        worst = max(worst, float(q.max()))
    kappa = np.geomspace(kappa_max * 1e-7, kappa_max, 4000)
    for pol in ("M", "N"):
        q = np.abs(fresnel_kz(eps, 1j * kappa, k, pol)) ** 2 * np.exp(-2 * kappa * d)
        worst = max(worst, float(q.max()))
    return worst


def image_series_gf(geom, omega, n_reflections, quad=None):
    """Finite-reflection partial sum of the two-plate Green's function.

    Expands the geometric round-trip denominators of the closed form;
    ``n_reflections`` counts round-trip orders on top of the always-included
    single reflections, so the highest Fresnel power kept is
    2*n_reflections + 1 and n_reflections = 0 has no round trips.

    Refuses configurations where the expansion cannot converge: perfect
    mirror plates (|F| = 1 at real k_z) and frequencies whose surface-mode
    band pushes the round-trip factor |F^2 e^{2 i k_z d}| above one.
    """
    if isinstance(geom.plate, PerfectMirror):
        raise ValueError("image series does not converge absolutely for perfect "
                         "mirror plates (|F| = 1 at real k_z)")
    if n_reflections < 0:
        raise ValueError("n_reflections must be >= 0")
    quad = quad or KPerpQuadratureSpec()
    k = omega / CONSTANTS.c
    eps = _plate_eps(geom.plate, omega)
    if isinstance(eps, Transparent):
        eps = 1.0 + 0.0j
    g0 = vacuum_gf((geom.r, 0.0, 0.0), omega)
    if eps == 1.0:
        return g0

    # per-mille excursions above one occur in a thin near-grazing strip
    # where the angular matrices vanish quadratically and are harmless;
    # surface-mode bands push the factor far above one and truly diverge
    kappa_max = quad.evanescent_cutoff_exponent / geom.d
    ratio = _expansion_ratio_max(eps, k, geom.d, kappa_max)
    if ratio >= 1.02:
        raise ValueError(
            f"image expansion ill-conditioned: round-trip factor reaches "
            f"{ratio:.3f} >= 1 (surface-mode band); the geometric series "
            f"does not converge here")

    max_power = 2 * n_reflections + 1

    def core(kz, kz2, k_perp):
        return _two_plate_core(kz, kz2, k_perp, eps, k, geom.d, geom.r,
                               n_reflections=max_power - 1)

    scat, _, _ = _scattered_integral(omega, geom.plate, geom.d, geom.r, quad, core)
    return g0 + _diag_to_tensor(scat)


def single_plate_gf(r, h, omega, plate, quad=None):
    """Green's function for two points at height h above a single plate,
    separated by r in-plane: the one-reflection term with phase e^{2 i k_z h}.

    The diagonal uses half the M/N' angular machinery (the two-plate
    matrices absorb both plates' single bounces); one reflecting surface
    also leaves antisymmetric xz/zx entries that the symmetric midplane
    configuration cancels.
    """
    if r <= 0 or h <= 0:
        raise ValueError("r and h must be positive")
    quad = quad or KPerpQuadratureSpec()
    k = omega / CONSTANTS.c
    eps = _plate_eps(plate, omega)
    if isinstance(eps, Transparent):
        eps = 1.0 + 0.0j
    g0 = vacuum_gf((r, 0.0, 0.0), omega)
    if not isinstance(eps, PerfectMirror) and eps == 1.0:
        return g0

    def core(kz, kz2, k_perp):
        FM = fresnel_kz(eps, kz, k, "M")
        FN = fresnel_kz(eps, kz, k, "N")
        phase = np.exp(2j * kz * h)
        Md, Npd, _ = _angular_batch(k_perp, kz2, r, k)
        out = np.zeros(k_perp.shape + (3, 3), dtype=complex)
        diag = 0.5 * ((FM * phase)[:, None] * Md + (FN * phase)[:, None] * Npd)
        out[:, 0, 0] = diag[:, 0]
        out[:, 1, 1] = diag[:, 1]
        out[:, 2, 2] = diag[:, 2]
        # angular integral of the odd-in-k_x electric cross terms
        xz = 0.5 * FN * phase * 2j * np.pi * _sp.j1(k_perp * r) * k_perp * kz / k ** 2
        out[:, 0, 2] = xz
        out[:, 2, 0] = -xz
        return out

    scat, _, _ = _scattered_integral(omega, plate, 2.0 * h, r, quad, core)
    return g0 + scat


def vacuum_provider(r):
    """omega -> G0 at in-plane separation r."""
    def provider(omega):
        return vacuum_gf((r, 0.0, 0.0), omega)
    return provider


def two_plate_provider(geom, quad=None):
    def provider(omega):
        return two_plate_midplane_gf(geom, omega, quad)
    return provider


def single_plate_provider(r, h, plate, quad=None):
    def provider(omega):
        return single_plate_gf(r, h, omega, plate, quad)
    return provider
