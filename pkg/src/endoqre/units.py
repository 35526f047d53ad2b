"""Physical constants (CODATA 2018) and energy-unit conversion.

Energies are carried in Hartree everywhere inside the package.
"""

HARTREE_EV = 27.211386245988
HARTREE_J = 4.3597447222071e-18
RYDBERG_HARTREE = 0.5
BOHR_ANGSTROM = 0.529177210903
EV_J = 1.602176634e-19

KB_J = 1.380649e-23  # J/K
KB_EV = KB_J / EV_J  # eV/K
KB_HARTREE = KB_J / HARTREE_J  # Ha/K
PLANCK_J = 6.62607015e-34  # J s
SPEED_OF_LIGHT_CM = 2.99792458e10  # cm/s
AMU_KG = 1.66053906660e-27

# h*c in Hartree*cm, converts a wavenumber (cm^-1) to Hartree
WAVENUMBER_HARTREE = PLANCK_J * SPEED_OF_LIGHT_CM / HARTREE_J

_TO_HARTREE = {
    "ha": 1.0,
    "hartree": 1.0,
    "mha": 1e-3,
    "ev": 1.0 / HARTREE_EV,
    "ry": RYDBERG_HARTREE,
    "rydberg": RYDBERG_HARTREE,
}


def to_hartree(value, unit):
    """Convert ``value`` expressed in ``unit`` (Ha, mHa, eV, Ry) to Hartree."""
    try:
        factor = _TO_HARTREE[unit.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown energy unit {unit!r}") from None
    return value * factor


def from_hartree(value, unit):
    """Inverse of :func:`to_hartree`."""
    return value / to_hartree(1.0, unit)


def angstrom_to_bohr(x):
    return x / BOHR_ANGSTROM


def bohr_to_angstrom(x):
    return x * BOHR_ANGSTROM
