"""Batched, log-scaled Riccati-Bessel machinery for high multipole orders.

Everything here is vectorized over a batch of (real or complex) arguments,
with one Python loop over the order l. Magnitudes are carried as
(sign/mantissa, natural-log scale) pairs because psi_l underflows and
chi_l overflows double precision long before the multipole sums of the
heat-radiation formulas have converged (l up to ~2000 at nanometer gaps).

chi_l denotes x*y_l(x), so xi_l = psi_l + i*chi_l and the Wronskian is
psi_l*chi_l' - psi_l'*chi_l = 1.
"""

import math

import numpy as np

__all__ = ["RealRiccatiTable", "riccati_real_table", "log_derivative_psi", "hankel_xi_logderiv"]

_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)
_TINY = 1e-290


class RealRiccatiTable:
    """Scaled psi/chi families on a batch of real arguments x > 0.

    Arrays have shape (L+1, n) for orders 0..L:

    log_psi, sign_psi : psi_l(x) = sign_psi * exp(log_psi)
    log_chi, sign_chi : chi_l(x) = sign_chi * exp(log_chi)
    ratio_psi[l] = psi_{l-1}/psi_l (row 0 is zero-filled), same for ratio_chi.
    """

    def __init__(self, log_psi, sign_psi, ratio_psi, log_chi, sign_chi, ratio_chi, x):
        self.log_psi = log_psi
        self.sign_psi = sign_psi
        self.ratio_psi = ratio_psi
        self.log_chi = log_chi
        self.sign_chi = sign_chi
        self.ratio_chi = ratio_chi
        self.x = x

    def psi_logderiv(self, l):
        """psi_l'(x)/psi_l(x) = psi_{l-1}/psi_l - l/x."""
        return self.ratio_psi[l] - l / self.x

    def chi_logderiv(self, l):
        return self.ratio_chi[l] - l / self.x


def _clamp(v):
    """Keep mantissas away from exact zero so logs and ratios stay finite."""
    small = np.abs(v) < _TINY
    if np.any(small):
        v = np.where(small, _TINY, v)
    return v


def riccati_real_table(x, L):
    """Build a RealRiccatiTable for orders 0..L on the batch x (1-d array)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if np.any(x <= 0):
        raise ValueError("arguments must be positive")

    # chi family: upward recurrence (y_l is the dominant solution)
    log_chi = np.empty((L + 1, n))
    sign_chi = np.empty((L + 1, n))
    ratio_chi = np.zeros((L + 1, n))
    c_prev = _clamp(-np.cos(x))                 # chi_0
    c_cur = _clamp(-np.cos(x) / x - np.sin(x))  # chi_1
    offset = np.zeros(n)
    log_chi[0] = np.log(np.abs(c_prev))
    sign_chi[0] = np.sign(c_prev)
    if L >= 1:
        log_chi[1] = np.log(np.abs(c_cur))
        sign_chi[1] = np.sign(c_cur)
        ratio_chi[1] = c_prev / c_cur
    for l in range(1, L):
        c_next = _clamp((2 * l + 1) / x * c_cur - c_prev)
        big = np.abs(c_next) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            c_next = c_next * scale
            c_cur = c_cur * scale
            offset = offset + np.where(big, _LOG_RESCALE, 0.0)
        log_chi[l + 1] = np.log(np.abs(c_next)) + offset
        sign_chi[l + 1] = np.sign(c_next)
        ratio_chi[l + 1] = c_cur / c_next
        c_prev, c_cur = c_cur, c_next

    # psi family: downward Miller recurrence from above the turning point,
    # anchored to the l = 0, 1 closed forms
    xmax = float(x.max())
    nu = max(L, int(math.ceil(xmax + 4.0 * xmax ** (1.0 / 3.0)))) + \
        max(20, int(math.ceil(8.0 * math.sqrt(L + 1))))
    log_raw = np.empty((L + 2, n))
    sign_raw = np.empty((L + 2, n))
    p_up = np.zeros(n)
    p = np.full(n, 1e-250)
    offset = np.zeros(n)
    for m in range(nu, -1, -1):
        if m <= L + 1 and m >= 1:
            log_raw[m] = np.log(np.abs(p)) + offset
            sign_raw[m] = np.sign(p)
        p_dn = _clamp((2 * m + 1) / x * p - p_up)
        big = np.abs(p_dn) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            p_dn = p_dn * scale
            p = p * scale
            offset = offset + np.where(big, _LOG_RESCALE, 0.0)
        p_up, p = p, p_dn
    log_raw[0] = np.log(np.abs(p_up)) + offset   # m = 0 value was produced last
    sign_raw[0] = np.sign(p_up)

    psi0 = _clamp(np.sin(x))
    psi1 = _clamp(np.sin(x) / x - np.cos(x))
    use0 = np.abs(psi0) >= np.abs(psi1)
    anchor_log = np.where(use0, np.log(np.abs(psi0)) - log_raw[0],
                          np.log(np.abs(psi1)) - log_raw[1])
    anchor_sign = np.where(use0, np.sign(psi0) * sign_raw[0],
                           np.sign(psi1) * sign_raw[1])
    log_psi = log_raw[: L + 1] + anchor_log
    sign_psi = sign_raw[: L + 1] * anchor_sign
    ratio_psi = np.zeros((L + 1, n))
    if L >= 1:
        with np.errstate(over="ignore"):
            ratio_psi[1:] = sign_raw[: L] * sign_raw[1: L + 1] * \
                np.exp(np.minimum(log_raw[: L] - log_raw[1: L + 1], 709.0))
    return RealRiccatiTable(log_psi, sign_psi, ratio_psi, log_chi, sign_chi, ratio_chi, x)


def log_derivative_psi(z, L):
    """D_l(z) = psi_l'(z)/psi_l(z) for l = 1..L, complex batch z, shape (L+1, n).

    Downward recurrence seeded above the turning point (standard Mie
    practice); row 0 holds D_0 = cot(z) computed from the recurrence.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    amax = float(np.abs(z).max())
    nu = max(L, int(math.ceil(amax + 4.0 * amax ** (1.0 / 3.0)))) + \
        max(20, int(math.ceil(8.0 * math.sqrt(L + 1))))
    D = np.zeros((L + 1, n), dtype=complex)
    d = np.zeros(n, dtype=complex)
    for m in range(nu, 0, -1):
        d = m / z - 1.0 / (d + m / z)
        if m - 1 <= L:
            D[m - 1] = d
    # rows shifted: recurrence yields D_{m-1} from D_m; D[l] now holds D_l
    return D


def hankel_xi_logderiv(z, L):
    """Xi_l(z) = xi_l'(z)/xi_l(z) for complex z with Im z >= 0, shape (L+1, n).

    Uses the upward ratio recurrence for h_l (dominant solution):
    rho_l = h_l/h_{l-1}, Xi_l = 1/rho_l - l/z.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    out = np.empty((L + 1, n), dtype=complex)
    # xi_0 = -i e^{iz} so Xi_0 = i exactly
    out[0] = np.full(n, 1j)
    if L >= 1:
        rho = (1.0 - 1j * z) / z  # h_1/h_0, the common e^{iz}/z factor cancels
        out[1] = 1.0 / rho - 1.0 / z
        for l in range(1, L):
            rho = (2 * l + 1) / z - 1.0 / rho
            out[l + 1] = 1.0 / rho - (l + 1) / z
    return out
