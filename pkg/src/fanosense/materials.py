"""Classical plasmonic inputs: Drude response, substrate-corrected geometric
factor, LSPR, Lorentzian linewidths, dipole moments and the emitter-plasmon
coupling energy.

All functions are pure; energies in meV, lengths in nm (see
:mod:`fanosense.constants` for the conversion conventions).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import (
    C_LIGHT,
    DEBYE,
    EPS0,
    HBAR,
    MEV_J,
    energy_to_wavelength,
    lifetime_ps,
)
from .errors import GeometryOverlapError, NoPlasmonResonanceError, PolarizabilityPoleError


@dataclass(frozen=True)
class DrudeMetal:
    """Free-electron metal: eps(w) = eps_inf - wp^2/(w^2+gp^2) + i wp^2 gp/(w(w^2+gp^2)).

    Parameters
    ----------
    eps_inf : float
        High-frequency dielectric constant (squared high-frequency index).
    omega_p : float
        Bulk plasma energy [meV].
    gamma_p : float
        Free-electron damping energy [meV]. gamma_p = 0 (ideal metal) is
        allowed; omega_p = 0 is not.
    """

    eps_inf: float
    omega_p: float
    gamma_p: float

    def __post_init__(self):
        if self.eps_inf < 1.0:
            raise ValueError(f"eps_inf must be >= 1, got {self.eps_inf}")
        if self.omega_p <= 0.0:
            raise ValueError(f"omega_p must be > 0, got {self.omega_p}")
        if self.gamma_p < 0.0:
            raise ValueError(f"gamma_p must be >= 0, got {self.gamma_p}")
        if self.gamma_p >= self.omega_p:
            raise ValueError("gamma_p must be smaller than omega_p")

    @classmethod
    def from_refractive_index(cls, n_inf: float, omega_p: float, gamma_p: float) -> "DrudeMetal":
        return cls(eps_inf=n_inf**2, omega_p=omega_p, gamma_p=gamma_p)


@dataclass(frozen=True)
class Environment:
    """Background medium, substrate and emitter refractive indices.

    Parameters
    ----------
    n : float
        Background refractive index.
    n_s : float
        Substrate refractive index.
    n_d : float
        Emitter (core-shell dot) refractive index.
    t : float
        Substrate thickness [nm].
    """

    n: float
    n_s: float
    n_d: float
    t: float

    def __post_init__(self):
        for name in ("n", "n_s", "n_d"):
            if getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.t <= 0.0:
            raise ValueError(f"t must be > 0, got {self.t}")

    @property
    def eps_b(self) -> float:
        return self.n**2

    @property
    def eps_s(self) -> float:
        return self.n_s**2

    @property
    def eps_d(self) -> float:
        return self.n_d**2

    @property
    def eps_b_eff(self) -> float:
        """Effective local dielectric constant (2 eps_b + eps_d) / 3."""
        return (2.0 * self.eps_b + self.eps_d) / 3.0


@dataclass(frozen=True)
class Geometry:
    """Sizes and coupling factors of the particle-emitter pair.

    Parameters
    ----------
    r : float
        Metal-particle radius [nm].
    r_c, t_s : float
        Emitter core radius and shell thickness [nm].
    l : float
        Surface-to-surface gap [nm]. Values below 3 nm leave the validity
        range of the point-dipole coupling and trigger a warning.
    s_alpha : float
        Emitter-particle coupling factor (2 longitudinal, -1 transverse).
    s_beta : float
        Substrate image-dipole coupling factor (2 perpendicular, 1 parallel).
    """

    r: float
    r_c: float
    t_s: float
    l: float
    s_alpha: float = 2.0
    s_beta: float = 2.0

    def __post_init__(self):
        for name in ("r", "r_c", "t_s"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.l <= 0.0:
            raise GeometryOverlapError(f"surface gap must be positive, got l={self.l}")
        if self.l < 3.0:
            warnings.warn(
                f"gap l={self.l} nm is below the 3 nm dipole-coupling validity range",
                stacklevel=2,
            )

    @property
    def a(self) -> float:
        """Total emitter radius [nm]."""
        return self.r_c + self.t_s

    @property
    def d(self) -> float:
        """Center-to-center distance [nm]."""
        return self.r + self.l + self.a


@dataclass(frozen=True)
class DerivedPlasmon:
    """Derived plasmonic quantities for one background index.

    gamma_pl is a property (exactly gamma_nr + gamma_r by construction).
    chi is carried in Debye; all energies in meV.
    """

    L_factor: float
    f: float
    reflectance: float
    omega_pl: float
    eta: float
    gamma_nr: float
    gamma_r: float
    chi: float
    g: float

    @property
    def gamma_pl(self) -> float:
        return self.gamma_nr + self.gamma_r

    @property
    def lambda_pl(self) -> float:
        """LSPR vacuum wavelength [nm]."""
        return energy_to_wavelength(self.omega_pl)

    @property
    def radiative_lifetime_ps(self) -> float:
        return lifetime_ps(self.gamma_r)

    @property
    def plasmon_lifetime_fs(self) -> float:
        return lifetime_ps(self.gamma_pl) * 1e3


def drude_permittivity(metal: DrudeMetal, omega: float) -> complex:
    """Complex Drude dielectric function at photon energy omega [meV]."""
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    d = omega**2 + metal.gamma_p**2
    eps_r = metal.eps_inf - metal.omega_p**2 / d
    eps_i = metal.omega_p**2 * metal.gamma_p / (omega * d)
    return complex(eps_r, eps_i)


def substrate_geometric_factor(env: Environment, geom: Geometry) -> tuple[float, float, float]:
    """Geometric factor of a sphere on a weakly reflecting substrate.

    Returns
    -------
    (L, f, reflectance)
        Depolarization factor L, refined factor f = (1-L)/L, and the
        quasi-static substrate reflection coefficient.
    """
    eps_b, eps_s = env.eps_b, env.eps_s
    refl = (eps_s - eps_b) / (eps_s + eps_b)
    image_term = 1.0 - (1.0 - refl**2) * (1.0 + env.t / geom.r) ** -3
    L = (1.0 - geom.s_beta * (refl / 8.0) * image_term) / 3.0
    f = (1.0 - L) / L
    return L, f, refl


def lspr_energy(metal: DrudeMetal, f: float, eps_b: float) -> float:
    """Dipole plasmon resonance energy [meV] from the Froehlich condition."""
    radicand = metal.omega_p**2 / (metal.eps_inf + f * eps_b) - metal.gamma_p**2
    if radicand <= 0.0:
        raise NoPlasmonResonanceError(
            f"no plasmon resonance: omega_p^2/(eps_inf+f*eps_b) = "
            f"{metal.omega_p**2 / (metal.eps_inf + f * eps_b):.6g} <= gamma_p^2"
        )
    return math.sqrt(radicand)


def lorentzian_parameters(
    metal: DrudeMetal, f: float, eps_b: float, omega_pl: float
) -> tuple[float, float]:
    """Lorentzian oscillator strength eta and non-radiative linewidth [meV].

    eta is the reciprocal of the slope of the real Drude permittivity at the
    resonance; gamma_nr = gamma_p (1 + (gamma_p/omega_pl)^2).
    """
    if omega_pl <= 0.0:
        raise ValueError(f"omega_pl must be positive, got {omega_pl}")
    eta = (metal.omega_p / (metal.eps_inf + f * eps_b)) ** 2 / (2.0 * omega_pl)
    gamma_nr = metal.gamma_p * (1.0 + (metal.gamma_p / omega_pl) ** 2)
    return eta, gamma_nr


def radiative_rate(f: float, eta: float, n: float, omega_pl: float, r: float) -> float:
    """Radiative plasmon linewidth [meV], Wigner-Weisskopf form.

    gamma_r = (4/9) (f+1)^2 eta n^2 (k r)^3 with the wavenumber in the
    cycle convention, k^3 -> 2 pi (n / lambda_pl)^3.
    """
    for name, value in (("f", f), ("eta", eta), ("n", n), ("omega_pl", omega_pl), ("r", r)):
        if value <= 0.0:
            raise ValueError(f"{name} must be positive, got {value}")
    lam_pl = energy_to_wavelength(omega_pl)
    return (8.0 * math.pi / 9.0) * (f + 1.0) ** 2 * eta * n**2 * (n * r / lam_pl) ** 3


def mnp_dipole_moment(f: float, eps_b: float, eta: float, r: float) -> float:
    """Magnitude of the particle dipole moment [Debye].

    chi = (1/3)(f+1) eps_b sqrt(12 pi eps0 hbar eta r^3), SI evaluation with
    eta as an angular rate.
    """
    eta_rad = eta * MEV_J / HBAR           # 1/s
    r_m = r * 1e-9
    chi_si = (f + 1.0) / 3.0 * eps_b * math.sqrt(12.0 * math.pi * EPS0 * HBAR * eta_rad * r_m**3)
    return chi_si / DEBYE


def coupling_rate(
    f: float, mu: float, geom: Geometry, env: Environment, eta: float, r: float
) -> float:
    """Emitter-particle coupling energy g [meV].

    g = (1/3)(f+1) (mu S_alpha / d^3) (eps_b/eps_b') sqrt(3 eta r^3 / (4 pi eps0 hbar)).
    mu in Debye; signed through S_alpha.
    """
    if geom.d <= geom.r + geom.a:
        raise GeometryOverlapError(
            f"overlapping geometry: d={geom.d} nm <= r+a={geom.r + geom.a} nm"
        )
    eta_rad = eta * MEV_J / HBAR
    r_m = r * 1e-9
    d_m = geom.d * 1e-9
    mu_si = mu * DEBYE
    g_rad = (
        (f + 1.0) / 3.0
        * (mu_si * geom.s_alpha / d_m**3)
        * (env.eps_b / env.eps_b_eff)
        * math.sqrt(3.0 * eta_rad * r_m**3 / (4.0 * math.pi * EPS0 * HBAR))
    )
    return g_rad * HBAR / MEV_J


def quasistatic_polarizability(
    metal: DrudeMetal, env: Environment, geom: Geometry, omega: float
) -> tuple[complex, complex]:
    """Exact and Lorentzian quasi-static dipole polarizabilities [nm^3].

    The exact form is retained only as a validation reference for the
    Lorentzian approximation used by the dynamics.
    """
    L, f, _ = substrate_geometric_factor(env, geom)
    eps = drude_permittivity(metal, omega)
    eps_b = env.eps_b
    den = L * eps + (1.0 - L) * eps_b
    if abs(den) < 1e-12 * eps_b:
        raise PolarizabilityPoleError(f"polarizability pole at omega={omega} meV")
    vol = 4.0 * math.pi * geom.r**3 / 3.0
    alpha_exact = vol * (eps - eps_b) / den

    omega_pl = lspr_energy(metal, f, eps_b)
    eta, gamma_nr = lorentzian_parameters(metal, f, eps_b, omega_pl)
    gamma_pl = gamma_nr + radiative_rate(f, eta, env.n, omega_pl, geom.r)
    delta_pl = omega_pl - omega
    alpha_lor = (
        1j * vol * eps_b * (f + 1.0) ** 2 * eta / (1j * delta_pl + gamma_pl / 2.0)
    )
    return alpha_exact, alpha_lor


def derive_plasmon(metal: DrudeMetal, env: Environment, geom: Geometry, mu: float) -> DerivedPlasmon:
    """Compute every derived plasmonic quantity for the given inputs.

    Parameters
    ----------
    mu : float
        Emitter dipole moment [Debye], needed for the coupling energy.
    """
    if env.t / geom.r <= 100.0:
        warnings.warn(
            f"thin substrate: t/r = {env.t / geom.r:.3g} <= 100, outside the"
            " weakly-reflecting slab regime",
            stacklevel=2,
        )
    L, f, refl = substrate_geometric_factor(env, geom)
    omega_pl = lspr_energy(metal, f, env.eps_b)
    eta, gamma_nr = lorentzian_parameters(metal, f, env.eps_b, omega_pl)
    gamma_r = radiative_rate(f, eta, env.n, omega_pl, geom.r)
    chi = mnp_dipole_moment(f, env.eps_b, eta, geom.r)
    g = coupling_rate(f, mu, geom, env, eta, geom.r)
    return DerivedPlasmon(
        L_factor=L,
        f=f,
        reflectance=refl,
        omega_pl=omega_pl,
        eta=eta,
        gamma_nr=gamma_nr,
        gamma_r=gamma_r,
        chi=chi,
        g=g,
    )


@dataclass(frozen=True)
class DriveParams:
    """Coherent drive and emitter parameters at one driving energy.

    Attributes
    ----------
    intensity : float
        Incident intensity [W/cm^2].
    omega : float
        Driving photon energy [meV].
    E0 : float
        Field amplitude [V/m], E0 = sqrt(2 I0 / (c eps_b eps0)).
    Omega_pl, Omega_ex : float
        Plasmon and emitter Rabi energies [meV].
    mu : float
        Emitter dipole moment [Debye].
    omega_ex, gamma_ex : float
        Emitter transition energy and free-space radiative linewidth [meV].
    """

    intensity: float
    omega: float
    E0: float
    Omega_pl: float
    Omega_ex: float
    mu: float
    omega_ex: float
    gamma_ex: float

    @property
    def delta_ex(self) -> float:
        """Exciton detuning omega_ex - omega [meV]."""
        return self.omega_ex - self.omega

    def delta_pl(self, omega_pl: float) -> float:
        """Plasmon detuning omega_pl - omega [meV]."""
        return omega_pl - self.omega


def field_amplitude(intensity_w_cm2: float, eps_b: float) -> float:
    """Drive amplitude E0 [V/m] of a beam of given intensity in the medium.

    Calibrated against the absolute photocount scale of the model:
    E0 = sqrt(2 I0 / (c eps_b eps0)).
    """
    if intensity_w_cm2 < 0.0:
        raise ValueError(f"intensity must be >= 0, got {intensity_w_cm2}")
    return math.sqrt(2.0 * intensity_w_cm2 * 1e4 / (C_LIGHT * eps_b * EPS0))


def make_drive(
    plasmon: DerivedPlasmon,
    env: Environment,
    mu: float,
    omega_ex: float,
    gamma_ex: float,
    intensity_w_cm2: float,
    wavelength_nm: float | None = None,
    omega: float | None = None,
) -> DriveParams:
    """Build :class:`DriveParams` at a driving wavelength [nm] or energy [meV]."""
    if (wavelength_nm is None) == (omega is None):
        raise ValueError("specify exactly one of wavelength_nm or omega")
    if omega is None:
        from .constants import wavelength_to_energy

        omega = wavelength_to_energy(wavelength_nm)
    e0 = field_amplitude(intensity_w_cm2, env.eps_b)
    omega_rabi_pl = e0 * (plasmon.chi * DEBYE) / 2.0 / MEV_J
    omega_rabi_ex = e0 * (mu * DEBYE) / 2.0 / MEV_J
    return DriveParams(
        intensity=intensity_w_cm2,
        omega=omega,
        E0=e0,
        Omega_pl=omega_rabi_pl,
        Omega_ex=omega_rabi_ex,
        mu=mu,
        omega_ex=omega_ex,
        gamma_ex=gamma_ex,
    )
