"""Photocount statistics of the scattered mode.

Converts steady-state photon numbers and correlation functions into detected
counts, their standard deviations and the time-averaged noises used by the
sensing figures of merit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import cycle_rate_per_ps


@dataclass(frozen=True)
class Detector:
    """Photodetector model.

    xi is the combined collection/detection efficiency, t_int the
    integration time [ps]. Detector recovery is idealized: the number of
    measurements per second is duty_cycle / t_int.
    """

    xi: float = 0.70
    t_int: float = 3.0
    duty_cycle: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.xi <= 1.0:
            raise ValueError(f"xi must be in (0, 1], got {self.xi}")
        if self.t_int <= 0.0:
            raise ValueError(f"t_int must be > 0, got {self.t_int}")
        if not 0.0 < self.duty_cycle <= 1.0:
            raise ValueError(f"duty_cycle must be in (0, 1], got {self.duty_cycle}")

    @property
    def n_measurements(self) -> float:
        """Measurements per second of wall time."""
        return self.duty_cycle / (self.t_int * 1e-12)


@dataclass(frozen=True)
class CountStats:
    """Detected counting statistics within one integration window."""

    m_mean: float
    m2: float             # second factorial moment <m(m-1)>
    delta_m: float        # single-shot std of m
    delta_m2: float       # single-shot std of <m(m-1)>
    delta_g2: float       # single-shot std of g2(0)
    sigma_m: float        # time-averaged std of m (one second)
    sigma_g2: float       # time-averaged std of g2(0) (one second)


def scattered_flux(n_photon: float, gamma_r: float) -> float:
    """Far-field photon flux [1/ps] of the radiating mode.

    flux = gamma_r <a^dag a> with the linewidth converted in the cycle
    convention.
    """
    return cycle_rate_per_ps(gamma_r) * n_photon


def mean_photocount(flux: float, det: Detector) -> float:
    """Mean photocount in one integration window: xi T flux."""
    if flux < 0.0:
        raise ValueError(f"flux must be >= 0, got {flux}")
    return det.xi * det.t_int * flux


def second_factorial_moment(nn2_rate: float, det: Detector) -> float:
    """<m(m-1)> = (xi T)^2 <b^dag^2 b^2> for a two-photon rate density [1/ps^2]."""
    if nn2_rate < 0.0:
        raise ValueError(f"two-photon rate must be >= 0, got {nn2_rate}")
    return (det.xi * det.t_int) ** 2 * nn2_rate


def noise_m(m_mean: float, g2_0: float) -> float:
    """Single-shot photocount noise sqrt(m) sqrt(1 + (g2-1) m)."""
    radicand = 1.0 + (g2_0 - 1.0) * m_mean
    if m_mean < 0.0 or radicand < 0.0:
        raise ValueError(
            f"inconsistent inputs: m={m_mean}, g2={g2_0} give negative variance"
        )
    return math.sqrt(m_mean) * math.sqrt(radicand)


def noise_m2(m_mean: float, g2_0: float, g3_0: float, g4_0: float, xi: float) -> float:
    """Single-shot noise of the second factorial moment."""
    ratio = xi / m_mean
    radicand = g4_0 - g2_0**2 + 4.0 * g3_0 * ratio + 2.0 * g2_0 * ratio**2
    if radicand < 0.0:
        raise ValueError(
            f"negative variance of m2: g2={g2_0}, g3={g3_0}, g4={g4_0}, xi/m={ratio}"
        )
    return m_mean**2 * math.sqrt(radicand)


def noise_g2(g2_0: float, m_mean: float, delta_m: float, delta_m2: float) -> float:
    """Propagated std of g2(0) from the count-moment noises."""
    if m_mean <= 0.0 or delta_m <= 0.0:
        raise ValueError("noise_g2 needs m_mean > 0 and delta_m > 0")
    lead = 2.0 * g2_0 * delta_m / m_mean
    return lead * math.sqrt(1.0 + (delta_m2 / (2.0 * g2_0 * m_mean * delta_m)) ** 2)


def time_average(delta: float, det: Detector, duration_s: float = 1.0) -> float:
    """Noise after averaging all measurements within duration_s seconds."""
    if duration_s <= 0.0:
        raise ValueError(f"duration must be > 0, got {duration_s}")
    return delta / math.sqrt(det.n_measurements * duration_s)


def count_stats(
    n_photon: float,
    g2_0: float,
    g3_0: float,
    g4_0: float,
    gamma_r: float,
    det: Detector,
) -> CountStats:
    """Full counting statistics of a steady state with linewidth gamma_r [meV]."""
    flux = scattered_flux(n_photon, gamma_r)
    m = mean_photocount(flux, det)
    m2 = g2_0 * m**2
    dm = noise_m(m, g2_0)
    dm2 = noise_m2(m, g2_0, g3_0, g4_0, det.xi)
    dg2 = noise_g2(g2_0, m, dm, dm2)
    return CountStats(
        m_mean=m,
        m2=m2,
        delta_m=dm,
        delta_m2=dm2,
        delta_g2=dg2,
        sigma_m=time_average(dm, det),
        sigma_g2=time_average(dg2, det),
    )
