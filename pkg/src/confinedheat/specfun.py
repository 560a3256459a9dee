"""Numerically stable special functions and thermal weights.

Spherical Bessel functions of complex argument are computed by recurrence:
j_l downward (Miller, normalized against the l=0,1 closed forms) and
h_l^(1) upward from its closed forms, the standard stability pairing.
Cylindrical J_0, J_1, J_2 are delegated to scipy (cephes).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .constants import CONSTANTS

__all__ = [
    "RiccatiBundle", "SpecialFunctionOverflow",
    "cyl_bessel_j", "sph_bessel_regular", "sph_hankel1", "riccati_bundle",
    "planck_factor", "thermal_wavelength",
]

# e^{|Im z|} beyond this overflows double precision in the h_l closed forms
_IM_Z_OVERFLOW = 700.0


class SpecialFunctionOverflow(OverflowError):
    """Raised instead of returning a silent infinity; carries the base-e scale."""

    def __init__(self, message, scale_exponent):
        super().__init__(message)
        self.scale_exponent = scale_exponent


@dataclass(frozen=True)
class RiccatiBundle:
    """Riccati-Bessel values psi_l(z) = z j_l(z), xi_l(z) = z h_l^(1)(z)
    and their derivatives, satisfying psi*xi' - psi'*xi = i."""

    psi: complex
    psi_prime: complex
    xi: complex
    xi_prime: complex


def cyl_bessel_j(order, x):
    """Cylindrical Bessel function J_order(x) for order in {0, 1, 2}, x >= 0."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise ValueError(f"x must be finite and non-negative, got {x!r}")
    if order == 0:
        return float(_sp.j0(x))
    if order == 1:
        return float(_sp.j1(x))
    return float(_sp.jv(2, x))


def _miller_start(l, z):
    """Starting order for downward j_l recurrence; must sit in the decay region."""
    az = abs(z)
    base = max(l, int(math.ceil(az + 4.0 * az ** (1.0 / 3.0))))
    return base + max(20, int(math.ceil(8.0 * math.sqrt(l + 1))))


def sph_bessel_regular(l, z):
    """Spherical Bessel function j_l(z) for complex z.

    Downward recurrence from above the turning point, normalized against
    the closed forms j_0 = sin(z)/z, j_1 = sin(z)/z^2 - cos(z)/z (whichever
    is larger in magnitude). Relative error <= 1e-10 for l <= 400,
    |z| <= 1e3, |Im z| <= 1e2.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    z = complex(z)
    if z == 0:
        return 1.0 + 0.0j if l == 0 else 0.0j
    if abs(z.imag) > _IM_Z_OVERFLOW:
        raise SpecialFunctionOverflow(
            "sin/cos of z overflow double precision; magnitude scales as e^|Im z|",
            scale_exponent=abs(z.imag))

    nu = _miller_start(l, z)
    p_up = 0.0j        # placeholder for j_{nu+1}
    p = 1e-280 + 0.0j  # arbitrary seed for j_nu
    wanted = {l: None, 0: None, 1: None}
    for n in range(nu, -1, -1):
        if n in wanted:
            wanted[n] = p
        p_dn = (2 * n + 1) / z * p - p_up
        p_up, p = p, p_dn
        m = max(abs(p.real), abs(p.imag))
        if m > 1e250:
            p /= m
            p_up /= m
            wanted = {k: (v / m if v is not None else None) for k, v in wanted.items()}
    # after the loop p holds the (unnormalized) value at n = -1; discard
    j0 = np.sin(z) / z
    j1 = np.sin(z) / z ** 2 - np.cos(z) / z
    if abs(j0) >= abs(j1) and wanted[0] != 0:
        scale = j0 / wanted[0]
    else:
        scale = j1 / wanted[1]
    return complex(wanted[l] * scale)


def sph_hankel1(l, z, scaled=False):
    """Spherical Hankel function h_l^(1)(z) by upward recurrence.

    With ``scaled=True`` returns h_l^(1)(z) * exp(-i z), which stays
    representable for large Im z; required when |Im z| > 300.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("h_l^(1) has a pole at z = 0")
    if not scaled and abs(z.imag) > _IM_Z_OVERFLOW:
        raise SpecialFunctionOverflow(
            "h_l^(1)(z) scales as e^{-Im z}; request the scaled form",
            scale_exponent=-z.imag)

    phase = 1.0 + 0.0j if scaled else np.exp(1j * z)
    h0 = -1j * phase / z
    if l == 0:
        return complex(h0)
    h1 = -phase * (z + 1j) / z ** 2
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, l):
            h0, h1 = h1, (2 * n + 1) / z * h1 - h0
            if not (math.isfinite(h1.real) and math.isfinite(h1.imag)):
                # estimate ln|h_l| from the leading (2l-1)!!/|z|^{l+1} growth
                exponent = (math.lgamma(2 * l) - (l - 1) * math.log(2)
                            - math.lgamma(l) - (l + 1) * math.log(abs(z)))
                raise SpecialFunctionOverflow(
                    f"h_{l}^(1)({z}) overflows double precision at order {n + 1}",
                    scale_exponent=exponent)
    return complex(h1)


def riccati_bundle(l, z):
    """Riccati-Bessel bundle (psi, psi', xi, xi') at order l, argument z."""
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("xi_l has a pole at z = 0")
    jl = sph_bessel_regular(l, z)
    jlm = sph_bessel_regular(l - 1, z) if l > 0 else np.cos(z) / z  # j_{-1} = cos z / z
    hl = sph_hankel1(l, z)
    hlm = sph_hankel1(l - 1, z) if l > 0 else (np.cos(z) + 1j * np.sin(z)) / z  # h_{-1}
    psi = z * jl
    xi = z * hl
    # f_l' = z f_{l-1} - l f_l holds for any Riccati-Bessel solution
    psi_prime = z * jlm - l * jl
    xi_prime = z * hlm - l * hl
    return RiccatiBundle(complex(psi), complex(psi_prime), complex(xi), complex(xi_prime))


def planck_factor(omega, T):
    """Thermal weight hbar*omega / (exp(hbar*omega/(k_B T)) - 1) in joules.

    Stable over hbar*omega/(k_B T) in [1e-8, 1e3]; accepts scalars or arrays.
    """
    if np.any(np.asarray(T) <= 0):
        raise ValueError("temperature must be positive")
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    t = CONSTANTS.hbar * omega / (CONSTANTS.k_B * T)
    small = t < 0.5
    # expm1 below, exp(-t)-based form above: both avoid cancellation
    with np.errstate(over="ignore"):
        lo = CONSTANTS.hbar * omega / np.expm1(np.where(small, t, 1.0))
        et = np.exp(-np.where(small, 1.0, t))
        hi = CONSTANTS.hbar * omega * et / (-np.expm1(-np.where(small, 1.0, t)))
    out = np.where(small, lo, hi)
    return float(out) if out.ndim == 0 else out


def thermal_wavelength(T):
    """lambda_T = hbar c / (k_B T) in meters."""
    T = float(T)
    if T <= 0:
        raise ValueError("temperature must be positive")
    return CONSTANTS.hbar * CONSTANTS.c / (CONSTANTS.k_B * T)
