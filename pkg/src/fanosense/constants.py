"""Physical constants and unit conversions.

Unit policy
-----------
Energies and rates are expressed in meV and lengths in nm at all module
boundaries.  Operations that mix vacuum permittivity, hbar and the speed of
light (dipole moments, Rabi energies, field amplitudes) evaluate internally
in SI and convert once at the boundary.

Two distinct energy-to-frequency conversions coexist in this model and must
not be mixed up:

* ``angular_rate_per_ps`` (E / hbar) drives the coherent open-system
  dynamics: Liouvillian propagation and the delay axis of the correlation
  functions.
* ``cycle_rate_per_ps`` (E / h) converts linewidths to photon-counting
  rates: the scattered-photon flux entering the photocount statistics, and
  the reported decay lifetimes (1/e times quoted in ps/fs/ns).

The wavenumber inside the radiative-rate formula follows the cycle
convention as well (k = nu n / c); this is what keeps the radiative
lifetime, the total plasmon linewidth and the absolute photocount scale
mutually consistent.
"""

from __future__ import annotations

import math

# CODATA values, pinned for bit-reproducibility
HBAR = 1.054571817e-34          # J s
EPS0 = 8.8541878128e-12         # F / m
C_LIGHT = 2.99792458e8          # m / s
E_CHARGE = 1.602176634e-19      # C
DEBYE = 3.33564e-30             # C m
MEV_J = 1.602176634e-22         # J per meV
PLANCK = 2.0 * math.pi * HBAR   # J s

HC_EV_NM = 1239.841984          # eV nm; lambda[nm] = HC_EV_NM / E[eV]

HBAR_MEV_PS = HBAR / MEV_J * 1e12          # 0.6582... meV ps
CYCLES_PER_PS_PER_MEV = MEV_J / PLANCK * 1e-12   # 0.24180... 1/ps per meV

#: Exported for documentation (``fanosense params`` embeds this table).
CONSTANTS_TABLE = {
    "hbar_J_s": HBAR,
    "planck_J_s": PLANCK,
    "eps0_F_m": EPS0,
    "c_m_s": C_LIGHT,
    "e_C": E_CHARGE,
    "debye_C_m": DEBYE,
    "meV_J": MEV_J,
    "hc_eV_nm": HC_EV_NM,
    "hbar_meV_ps": HBAR_MEV_PS,
}


def wavelength_to_energy(wavelength_nm: float) -> float:
    """Vacuum wavelength [nm] to photon energy [meV]."""
    if wavelength_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
    return HC_EV_NM / wavelength_nm * 1e3


def energy_to_wavelength(energy_mev: float) -> float:
    """Photon energy [meV] to vacuum wavelength [nm]."""
    if energy_mev <= 0:
        raise ValueError(f"energy must be positive, got {energy_mev}")
    return HC_EV_NM * 1e3 / energy_mev


def angular_rate_per_ps(energy_mev: float) -> float:
    """Energy [meV] to angular rate [rad/ps]; coherent-dynamics convention."""
    return energy_mev / HBAR_MEV_PS


def cycle_rate_per_ps(energy_mev: float) -> float:
    """Energy [meV] to cycle rate [1/ps]; photon-counting convention."""
    return energy_mev * CYCLES_PER_PS_PER_MEV


def lifetime_ps(energy_mev: float) -> float:
    """Decay-time 1/rate [ps] of a linewidth [meV], cycle convention."""
    if energy_mev <= 0:
        raise ValueError(f"linewidth must be positive, got {energy_mev}")
    return 1.0 / cycle_rate_per_ps(energy_mev)
