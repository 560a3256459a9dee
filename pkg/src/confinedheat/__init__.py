"""Near-field heat transfer of point particles between plates and heat
radiation of a sphere inside a spherical cavity."""

__version__ = "0.1.0"

from .constants import CONSTANTS, PhysicalConstants
from .specfun import (
    RiccatiBundle, cyl_bessel_j, sph_bessel_regular, sph_hankel1,
    riccati_bundle, planck_factor, thermal_wavelength,
)

__all__ = [
    "CONSTANTS", "PhysicalConstants", "RiccatiBundle",
    "cyl_bessel_j", "sph_bessel_regular", "sph_hankel1", "riccati_bundle",
    "planck_factor", "thermal_wavelength", "__version__",
]
