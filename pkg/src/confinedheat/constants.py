"""Physical constants (CODATA 2018, SI units)."""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants used throughout the package.

    hbar : reduced Planck constant [J s]
    k_B  : Boltzmann constant [J/K]
    c    : speed of light in vacuum [m/s]
    """

    hbar: float = 1.054571817e-34
    k_B: float = 1.380649e-23
    c: float = 299792458.0


CONSTANTS = PhysicalConstants()
