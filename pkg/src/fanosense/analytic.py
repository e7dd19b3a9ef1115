"""Semiclassical steady state of the driven particle-emitter pair.

Closed-form solutions of the factorized equations of motion in the rotating
frame: plasmon-dressed emitter parameters, saturation, coherences, field
moments up to fourth order and the zero-delay correlation functions
g2(0), g3(0), g4(0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateFluxError
from .materials import DerivedPlasmon, DriveParams

#: Flux numerators below this threshold are flagged as dark points instead of
#: propagating NaNs through the correlation ratios.
DARK_POINT_FLUX = 1e-300


@dataclass(frozen=True)
class ModifiedEmitter:
    """Plasmon-dressed two-level emitter parameters.

    F is the dimensionless plasmon-induced term, Gamma the Purcell-enhanced
    decay [meV], Delta the dressed detuning [meV], Omega the complex
    effective Rabi energy [meV] and p_sat the saturation parameter.
    """

    F: float
    Gamma: float
    Delta: float
    Omega: complex
    p_sat: float


@dataclass(frozen=True)
class SteadyState:
    """Rotating-frame steady-state expectation values and correlations."""

    sigma: complex          # <sigma>
    population: float       # <sigma^dag sigma>, in [0, 1/2]
    a: complex              # <a>
    a2: complex
    a3: complex
    a4: complex
    n_photon: float         # <a^dag a>
    nn2: float              # <a^dag^2 a^2>
    nn3: float
    nn4: float
    g2_0: float
    g3_0: float
    g4_0: float
    dark_point: bool = False


def modified_emitter(plasmon: DerivedPlasmon, drive: DriveParams) -> ModifiedEmitter:
    """Dress the emitter with the adiabatically eliminated plasmon response."""
    gamma_pl = plasmon.gamma_pl
    if gamma_pl <= 0.0:
        raise ValueError("gamma_pl must be positive")
    g = plasmon.g
    d_pl = drive.delta_pl(plasmon.omega_pl)
    lorentz = d_pl**2 + gamma_pl**2 / 4.0
    F = g**2 / lorentz
    Gamma = drive.gamma_ex + F * gamma_pl
    Delta = drive.delta_ex - F * d_pl
    Omega = drive.Omega_ex * (
        1.0 + 1j * g * (plasmon.chi / drive.mu) / complex(gamma_pl / 2.0, d_pl)
    )
    p_sat = _saturation(Omega, Gamma, Delta)
    return ModifiedEmitter(F=F, Gamma=Gamma, Delta=Delta, Omega=Omega, p_sat=p_sat)


def _saturation(Omega: complex, Gamma: float, Delta: float) -> float:
    return 2.0 * abs(Omega / Gamma) ** 2 / (1.0 + 2.0 * (Delta / Gamma) ** 2)


def qd_steady_state(em: ModifiedEmitter) -> tuple[complex, float]:
    """Steady emitter coherence <sigma> and excited population.

    population = P/(1+2P) saturates at 1/2; the coherence carries the
    population backaction through the (1 - 2 population) factor.
    """
    if em.Gamma <= 0.0:
        raise ValueError("Gamma must be positive")
    population = em.p_sat / (1.0 + 2.0 * em.p_sat)
    sigma = 1j * em.Omega * (1.0 - 2.0 * population) / complex(em.Gamma / 2.0, em.Delta)
    return sigma, population


def plasmon_steady_state(
    drive: DriveParams,
    g: float,
    sigma: complex,
    population: float,
    plasmon: DerivedPlasmon,
) -> dict:
    """Field amplitude, photon number and normally ordered moments.

    The factorization <sigma a> = <sigma><a> closes the hierarchy; field
    amplitude moments obey <a^k> = <a>^k.
    """
    gamma_pl = plasmon.gamma_pl
    if gamma_pl <= 0.0:
        raise ValueError("gamma_pl must be positive")
    d_pl = drive.delta_pl(plasmon.omega_pl)
    lorentz = d_pl**2 + gamma_pl**2 / 4.0
    om = drive.Omega_pl
    re_s = sigma.real

    a = 1j * (om + g * sigma) / complex(gamma_pl / 2.0, d_pl)
    n_photon = (om**2 + g**2 * population + 2.0 * om * g * re_s) / lorentz
    nn2 = (om**4 + 4.0 * om**3 * g * re_s + 4.0 * om**2 * g**2 * population) / lorentz**2
    nn3 = (om**6 + 6.0 * om**5 * g * re_s + 9.0 * om**4 * g**2 * population) / lorentz**3
    nn4 = (om**8 + 8.0 * om**7 * g * re_s + 16.0 * om**6 * g**2 * population) / lorentz**4
    return {
        "a": a,
        "a2": a**2,
        "a3": a**3,
        "a4": a**4,
        "n_photon": n_photon,
        "nn2": nn2,
        "nn3": nn3,
        "nn4": nn4,
    }


def correlations_zero_delay(
    drive: DriveParams, g: float, sigma: complex, population: float
) -> tuple[float, float, float]:
    """Zero-delay correlation functions (g2, g3, g4) of the scattered mode.

    The common radiative prefactor cancels; only the interference structure
    of the numerators survives.
    """
    om = drive.Omega_pl
    re_s = sigma.real
    om2 = om * om
    base = om2 + g * (2.0 * om * re_s + g * population)
    if base <= DARK_POINT_FLUX:
        raise DegenerateFluxError(
            f"flux numerator {base:.3e} at omega={drive.omega} meV is degenerate"
        )
    # split off the coherent part so the decoupled limit gives exactly 1
    u = om2 / base
    g2 = u * u + g * (4.0 * om2 * om * re_s + 4.0 * om2 * g * population) / base**2
    g3 = u * u * u + g * (6.0 * om2**2 * om * re_s + 9.0 * om2**2 * g * population) / base**3
    g4 = u**4 + g * (8.0 * om2**3 * om * re_s + 16.0 * om2**3 * g * population) / base**4
    return g2, g3, g4


def steady_state(plasmon: DerivedPlasmon, drive: DriveParams) -> SteadyState:
    """Full semiclassical steady state at one driving energy.

    Dark points (vanishing flux numerator) are flagged rather than raised;
    the correlation entries are NaN there.
    """
    em = modified_emitter(plasmon, drive)
    sigma, population = qd_steady_state(em)
    fields = plasmon_steady_state(drive, plasmon.g, sigma, population, plasmon)
    try:
        g2, g3, g4 = correlations_zero_delay(drive, plasmon.g, sigma, population)
        dark = False
    except DegenerateFluxError:
        g2 = g3 = g4 = math.nan
        dark = True
    return SteadyState(
        sigma=sigma,
        population=population,
        g2_0=g2,
        g3_0=g3,
        g4_0=g4,
        dark_point=dark,
        **fields,
    )
