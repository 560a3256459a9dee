"""Complex permittivity models, Fresnel reflection coefficients, polarizability.

Square roots of permittivity expressions always take the branch with
non-negative imaginary part so evanescent and lossy-medium waves decay
away from their sources.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS

__all__ = [
    "PermittivityModel", "LorentzOscillator", "Drude", "ScaledDampingDrude",
    "Transparent", "PerfectMirror", "Tabulated", "ParticleSpec",
    "permittivity", "fresnel", "polarizability", "refractive_index",
    "sic", "gold", "mirror", "transparent", "load_tabulated",
    "material_by_name", "resonant_frequencies", "particle_volume",
]


class PermittivityModel:
    """Base class; concrete models implement ``epsilon(omega)``."""

    def epsilon(self, omega):
        raise NotImplementedError


@dataclass(frozen=True)
class LorentzOscillator(PermittivityModel):
    """eps(w) = eps_inf * (w^2 - w_LO^2 + i w gamma) / (w^2 - w_TO^2 + i w gamma)."""

    eps_inf: float
    omega_LO: float
    omega_TO: float
    gamma: float

    def epsilon(self, omega):
        omega = np.asarray(omega, dtype=float)
        num = omega * omega - self.omega_LO ** 2 + 1j * omega * self.gamma
        den = omega * omega - self.omega_TO ** 2 + 1j * omega * self.gamma
        out = self.eps_inf * num / den
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Drude(PermittivityModel):
    """eps(w) = 1 - w_p^2 / (w (w + i w_tau))."""

    omega_p: float
    omega_tau: float

    def epsilon(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = 1.0 - self.omega_p ** 2 / (omega * (omega + 1j * self.omega_tau))
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScaledDampingDrude(Drude):
    """Drude model with the damping rate replaced by omega_tau_tilde.

    Evaluates through the identical Drude formula, so at
    omega_tau_tilde = omega_tau it is bit-identical to the plain model.
    """


@dataclass(frozen=True)
class Transparent(PermittivityModel):
    """eps = 1 exactly."""

    def epsilon(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.ones_like(omega, dtype=complex)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PerfectMirror(PermittivityModel):
    """Symbolic |eps| -> infinity; consumed analytically, never evaluated."""

    def epsilon(self, omega):
        raise ValueError("PerfectMirror has no finite permittivity; "
                         "handle it analytically")


@dataclass(frozen=True)
class Tabulated(PermittivityModel):
    """Tabulated eps on a frequency grid, log-frequency linear interpolation
    on Re and Im separately. Out-of-range queries are errors."""

    omegas: tuple = field(default=())
    values: tuple = field(default=())

    def epsilon(self, omega):
        omega = np.asarray(omega, dtype=float)
        w = np.asarray(self.omegas)
        if np.any(omega < w[0]) or np.any(omega > w[-1]):
            raise ValueError(
                f"frequency outside tabulated range [{w[0]:g}, {w[-1]:g}]")
        v = np.asarray(self.values)
        logw = np.log(w)
        re = np.interp(np.log(omega), logw, v.real)
        im = np.interp(np.log(omega), logw, v.imag)
        out = re + 1j * im
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ParticleSpec:
    permittivity: PermittivityModel
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("particle radius must be positive")


def particle_volume(particle):
    return 4.0 / 3.0 * np.pi * particle.radius ** 3


def sic():
    """SiC phonon-polariton dielectric (Spitzer parameters)."""
    return LorentzOscillator(eps_inf=6.7, omega_LO=1.82e14,
                             omega_TO=1.48e14, gamma=8.93e11)


def gold():
    """Gold Drude model."""
    return Drude(omega_p=1.37e16, omega_tau=4.06e13)


def mirror():
    return PerfectMirror()


def transparent():
    return Transparent()


def permittivity(model, omega):
    """Evaluate eps(omega); PerfectMirror is a contract violation here."""
    if isinstance(model, PerfectMirror):
        raise ValueError("PerfectMirror queried numerically")
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("omega must be positive")
    return model.epsilon(omega)


def refractive_index(model, omega):
    """n = sqrt(eps) with Im n >= 0."""
    return _sqrt_upper(permittivity(model, omega))


def _sqrt_upper(w):
    """Complex square root with non-negative imaginary part."""
    s = np.sqrt(np.asarray(w, dtype=complex))
    s = np.where(s.imag < 0, -s, s)
    return complex(s) if s.ndim == 0 else s


def fresnel_kz(eps_or_model, k_z, k, polarization):
    """Fresnel coefficient from the vacuum-side k_z (may be complex i*kappa).

    k is omega/c. ``eps_or_model`` is a complex permittivity value, an
    array of values, or PerfectMirror.
    """
    if isinstance(eps_or_model, PerfectMirror):
        shape = np.broadcast(np.asarray(k_z)).shape
        val = -1.0 if polarization == "M" else 1.0
        out = np.full(shape, val, dtype=complex)
        return complex(out) if out.ndim == 0 else out
    eps = np.asarray(eps_or_model, dtype=complex)
    k_z = np.asarray(k_z, dtype=complex)
    s = _sqrt_upper((eps - 1.0) * k * k + k_z * k_z)
    if polarization == "M":
        out = (k_z - s) / (k_z + s)
    elif polarization == "N":
        out = (eps * k_z - s) / (eps * k_z + s)
    else:
        raise ValueError(f"polarization must be 'M' or 'N', got {polarization!r}")
    return complex(out) if out.ndim == 0 else out


def fresnel(eps, k_perp, omega, polarization):
    """Fresnel reflection coefficient F^P at in-plane wavevector k_perp.

    ``eps`` is a complex permittivity (or array) or PerfectMirror. The
    vacuum k_z = sqrt(k^2 - k_perp^2) takes the Im >= 0 branch.
    """
    if np.any(np.asarray(k_perp) < 0):
        raise ValueError("k_perp must be non-negative")
    k = omega / CONSTANTS.c
    k_perp = np.asarray(k_perp, dtype=float)
    k_z = _sqrt_upper(k * k - k_perp.astype(complex) ** 2)
    return fresnel_kz(eps, k_z, k, polarization)


def polarizability(particle, omega):
    """Dipole polarizability alpha = R^3 (eps - 1)/(eps + 2) in m^3."""
    if isinstance(particle.permittivity, PerfectMirror):
        return particle.radius ** 3 * (1.0 + 0.0j) * np.ones_like(
            np.asarray(omega, dtype=float))
    eps = permittivity(particle.permittivity, omega)
    out = particle.radius ** 3 * (eps - 1.0) / (eps + 2.0)
    return out


def load_tabulated(path):
    """Read a two- or three-column text table: omega [rad/s], Re eps[, Im eps].

    Lines starting with '#' are comments.
    """
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) == 2:
                w, re = float(parts[0]), float(parts[1])
                rows.append((w, complex(re, 0.0)))
            elif len(parts) == 3:
                rows.append((float(parts[0]), complex(float(parts[1]), float(parts[2]))))
            else:
                raise ValueError(f"expected 2 or 3 columns, got {len(parts)}: {line!r}")
    if len(rows) < 2:
        raise ValueError("tabulated permittivity needs at least two rows")
    rows.sort(key=lambda r: r[0])
    omegas = tuple(r[0] for r in rows)
    if len(set(omegas)) != len(omegas):
        raise ValueError("duplicate frequencies in table")
    return Tabulated(omegas=omegas, values=tuple(r[1] for r in rows))


def material_by_name(name):
    """Resolve CLI material strings: sic, gold, mirror, transparent,
    drude:omega_p,omega_tau, table:path."""
    if name == "sic":
        return sic()
    if name == "gold":
        return gold()
    if name == "mirror":
        return mirror()
    if name == "transparent":
        return transparent()
    if name.startswith("drude:"):
        parts = name[len("drude:"):].split(",")
        if len(parts) != 2:
            raise ValueError(f"drude material needs omega_p,omega_tau: {name!r}")
        return Drude(omega_p=float(parts[0]), omega_tau=float(parts[1]))
    if name.startswith("table:"):
        return load_tabulated(name[len("table:"):])
    raise ValueError(f"unknown material {name!r}")


def resonant_frequencies(model):
    """Characteristic frequencies worth resolving in frequency quadratures.

    For Lorentz oscillators: omega_TO, omega_LO, the Re eps = -2 dipole
    resonance and the Re eps = -1 surface-mode frequency (loss ignored in
    the root solve; they only seed panel boundaries).
    """
    out = []
    if isinstance(model, LorentzOscillator):
        out += [model.omega_TO, model.omega_LO]
        for target in (-2.0, -1.0):
            # eps_inf (w^2 - w_LO^2) = target (w^2 - w_TO^2)
            denom = model.eps_inf - target
            w2 = (model.eps_inf * model.omega_LO ** 2 - target * model.omega_TO ** 2) / denom
            if w2 > 0:
                out.append(np.sqrt(w2))
    elif isinstance(model, Drude):
        out.append(model.omega_tau)
    return sorted(out)
