"""Scattering amplitudes of a homogeneous sphere and of a spherical cavity wall.

Conventions are pinned by limit identities rather than transcribed from
references: a transparent body scatters nothing; a perfectly reflecting
sphere satisfies Re T = -|T|^2; the l=1 electric sphere amplitude reduces
to i(2/3)x^3 (eps-1)/(eps+2) for small size parameter; a perfectly
reflecting cavity wall has Re T~ = -1.

Internally every amplitude is carried as mantissa * exp(scale) because the
heat-radiation sums need orders far beyond where psi_l / chi_l over- and
underflow double precision. The cavity amplitude is represented through

    T~ = -1 - i C,  C = c_hat * exp(delta),

so that the emission weight (Re T~ + 1) = Im(C) is formed without
cancellation even when |C| is astronomically large.
"""

from dataclasses import dataclass

import numpy as np

from ._radial import hankel_xi_logderiv, log_derivative_psi, riccati_real_table
from .constants import CONSTANTS
from .materials import PermittivityModel, PerfectMirror, Transparent, permittivity

__all__ = ["SphereSpec", "CavitySpec", "sphere_t", "cavity_t"]


@dataclass(frozen=True)
class SphereSpec:
    permittivity: PermittivityModel
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class CavitySpec:
    wall_permittivity: PermittivityModel
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("cavity radius must be positive")


def _sqrt_upper(w):
    s = np.sqrt(np.asarray(w, dtype=complex))
    return np.where(s.imag < 0, -s, s)


def _xi_scaled(table, L):
    """Common-scale mantissas of xi_l = psi_l + i chi_l.

    Returns (s, den_hat) with xi_l = den_hat * e^{s}; |den_hat| in [1, sqrt2].
    """
    s = np.maximum(table.log_psi, table.log_chi)
    den_hat = (table.sign_psi * np.exp(table.log_psi - s)
               + 1j * table.sign_chi * np.exp(table.log_chi - s))
    return s, den_hat


class SphereFactors:
    """Scaled sphere amplitudes on an omega batch, orders 1..L.

    tau_hat, theta : T_l^P = tau_hat * exp(-theta)  (arrays (L, n))
    p_hat          : -(Re T + |T|^2) = p_hat * exp(-theta), p_hat >= 0
    """

    def __init__(self, tau_hat, theta, p_hat):
        self.tau_hat = tau_hat
        self.theta = theta
        self.p_hat = p_hat


def _sphere_factors(omega, sphere, L):
    """Compute SphereFactors per polarization for omega (1-d array)."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n = omega.size
    x = omega * sphere.radius / CONSTANTS.c
    model = sphere.permittivity

    if isinstance(model, Transparent):
        zero = np.zeros((L, n))
        return {p: SphereFactors(zero.astype(complex), zero, zero) for p in "MN"}

    table = riccati_real_table(x, L)
    l_col = np.arange(1, L + 1, dtype=float)[:, None]
    s, xi_hat = _xi_scaled(table, L)
    theta = (s - table.log_psi)[1:]
    r_hat = table.sign_psi[1:] / xi_hat[1:]
    r_scale = np.exp(-theta)
    R_psi = table.ratio_psi[1:]
    R_xi = np.exp(s[:-1] - s[1:]) * xi_hat[:-1] / xi_hat[1:]

    out = {}
    if isinstance(model, PerfectMirror):
        X_psi = R_psi - l_col / x
        X_xi = R_xi - l_col / x
        tau_m = -r_hat
        tau_n = -r_hat * X_psi / X_xi
        zero = np.zeros((L, n))
        # Re T = -|T|^2 holds identically for a mirror sphere
        out["M"] = SphereFactors(tau_m, theta, zero)
        out["N"] = SphereFactors(tau_n, theta, zero.copy())
        return out

    eps = np.asarray(permittivity(model, omega), dtype=complex)
    m_idx = _sqrt_upper(eps)
    D = log_derivative_psi(m_idx * x, L)[1:]
    for pol in "MN":
        if pol == "N":
            B = D / m_idx + l_col / x
        else:
            B = m_idx * D + l_col / x
        tau_hat = -r_hat * (B - R_psi) / (B - R_xi)
        p_hat = -(tau_hat.real + r_scale * np.abs(tau_hat) ** 2)
        out[pol] = SphereFactors(tau_hat, theta, p_hat)
    return out


class CavityFactors:
    """Scaled interior cavity amplitudes on an omega batch, orders 1..L.

    T~_l^P = -1 - i C with C = c_hat * exp(delta); (Re T~ + 1) = Im(C).
    """

    def __init__(self, c_hat, delta):
        self.c_hat = c_hat
        self.delta = delta


def _cavity_factors(omega, cavity, L):
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n = omega.size
    xt = omega * cavity.radius / CONSTANTS.c
    model = cavity.wall_permittivity

    if isinstance(model, Transparent):
        c_hat = np.full((L, n), 1j)
        delta = np.zeros((L, n))
        return {p: CavityFactors(c_hat, delta) for p in "MN"}

    table = riccati_real_table(xt, L)
    l_col = np.arange(1, L + 1, dtype=float)[:, None]
    delta = (table.log_chi - table.log_psi)[1:]
    sign = (table.sign_chi * table.sign_psi)[1:]
    X_psi = table.ratio_psi[1:] - l_col / xt
    X_chi = table.ratio_chi[1:] - l_col / xt

    if isinstance(model, PerfectMirror):
        return {
            "M": CavityFactors(sign.astype(complex), delta),
            "N": CavityFactors(sign * X_chi / X_psi + 0j, delta),
        }

    eps = np.asarray(permittivity(model, omega), dtype=complex)
    n_idx = _sqrt_upper(eps)
    Xi = hankel_xi_logderiv(n_idx * xt, L)[1:]
    out = {
        "M": CavityFactors(sign * (n_idx * Xi - X_chi) / (n_idx * Xi - X_psi), delta),
        "N": CavityFactors(sign * (Xi - n_idx * X_chi) / (Xi - n_idx * X_psi), delta),
    }
    return out


def _check_lp(l, P):
    if l < 1:
        raise ValueError("multipole sums start at l = 1")
    if P not in ("M", "N"):
        raise ValueError(f"polarization must be 'M' or 'N', got {P!r}")


def sphere_t(l, P, sphere, omega):
    """Scattering amplitude T_l^P of a homogeneous sphere.

    The exterior field is (regular wave) + T * (outgoing wave). Underflows
    to 0 when the true magnitude is below double precision.
    """
    _check_lp(l, P)
    f = _sphere_factors(np.array([float(omega)]), sphere, l)[P]
    with np.errstate(under="ignore"):
        return complex(f.tau_hat[l - 1, 0] * np.exp(-f.theta[l - 1, 0]))


def cavity_t(l, P, cavity, omega):
    """Interior scattering amplitude T~_l^P of a spherical cavity wall.

    The interior field is (outgoing wave) + T~ * (regular wave). Overflows
    to inf at orders far beyond the sum's convergence point.
    """
    _check_lp(l, P)
    f = _cavity_factors(np.array([float(omega)]), cavity, l)[P]
    with np.errstate(over="ignore"):
        c = f.c_hat[l - 1, 0] * np.exp(f.delta[l - 1, 0])
    return complex(-1.0 - 1j * c)
