"""Classical derivation layer: Drude response, geometric factor, LSPR,
linewidths, dipole moments and coupling."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanosense.constants import DEBYE, energy_to_wavelength, wavelength_to_energy
from fanosense.errors import GeometryOverlapError, NoPlasmonResonanceError
from fanosense.materials import (
    DrudeMetal,
    Environment,
    Geometry,
    coupling_rate,
    derive_plasmon,
    drude_permittivity,
    field_amplitude,
    lorentzian_parameters,
    lspr_energy,
    make_drive,
    mnp_dipole_moment,
    quasistatic_polarizability,
    radiative_rate,
    substrate_geometric_factor,
)
from tests.conftest import ORACLE

TABLE_METAL = DrudeMetal.from_refractive_index(3.16, 8579.0, 71.0)
TABLE_ENV = Environment(n=1.3330, n_s=1.5, n_d=2.45, t=1.7e5)
TABLE_GEOM = Geometry(r=25.0, r_c=0.8, t_s=0.7, l=3.5)


class TestDrudePermittivity:
    def test_damping_free_identity(self):
        metal = DrudeMetal(eps_inf=5.0, omega_p=8000.0, gamma_p=0.0)
        assert drude_permittivity(metal, 8000.0) == complex(4.0, 0.0)

    def test_table_value_against_oracle(self):
        eps = drude_permittivity(TABLE_METAL, 2149.0)
        assert eps == pytest.approx(ORACLE["drude_2149"], rel=1e-14)

    def test_high_frequency_limit(self):
        eps = drude_permittivity(TABLE_METAL, 1e6)
        assert abs(eps - TABLE_METAL.eps_inf) < 1e-4
        assert abs(drude_permittivity(TABLE_METAL, 1e8) - TABLE_METAL.eps_inf) < 1e-8

    def test_rejects_nonpositive_omega(self):
        with pytest.raises(ValueError):
            drude_permittivity(TABLE_METAL, 0.0)

    def test_rejects_zero_plasma_energy(self):
        with pytest.raises(ValueError):
            DrudeMetal(eps_inf=2.0, omega_p=0.0, gamma_p=0.0)


class TestGeometricFactor:
    def test_index_matched_substrate(self):
        env = Environment(n=1.3330, n_s=1.3330, n_d=2.45, t=1.7e5)
        L, f, refl = substrate_geometric_factor(env, TABLE_GEOM)
        assert refl == 0.0
        assert L == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert f == pytest.approx(2.0, rel=1e-15)

    def test_table_values_against_oracle(self):
        L, f, refl = substrate_geometric_factor(TABLE_ENV, TABLE_GEOM)
        assert refl == pytest.approx(ORACLE["reflectance"], rel=1e-14)
        assert L == pytest.approx(ORACLE["L_factor"], rel=1e-14)
        assert f == pytest.approx(ORACLE["f"], rel=1e-14)
        assert f > 2.0  # substrate redshift

    def test_zero_image_coupling(self):
        geom = dataclasses.replace(TABLE_GEOM, s_beta=0.0)
        L, f, _ = substrate_geometric_factor(TABLE_ENV, geom)
        assert L == pytest.approx(1.0 / 3.0, rel=1e-15)


class TestLsprEnergy:
    def test_undamped_no_substrate_limit(self):
        metal = DrudeMetal(eps_inf=9.0, omega_p=9000.0, gamma_p=0.0)
        eps_b = 1.77
        expected = 9000.0 / math.sqrt(9.0 + 2.0 * eps_b)
        assert lspr_energy(metal, 2.0, eps_b) == pytest.approx(expected, rel=1e-15)

    def test_table_wavelength(self):
        omega_pl = lspr_energy(TABLE_METAL, ORACLE["f"], TABLE_ENV.eps_b)
        assert omega_pl == pytest.approx(ORACLE["omega_pl_mev"], rel=1e-13)
        lam = energy_to_wavelength(omega_pl)
        assert lam == pytest.approx(ORACLE["lambda_pl_nm"], rel=1e-13)
        assert abs(lam - 535.5) < 1.0

    def test_no_substrate_blueshift(self):
        lam_f2 = energy_to_wavelength(lspr_energy(TABLE_METAL, 2.0, TABLE_ENV.eps_b))
        assert lam_f2 == pytest.approx(ORACLE["lambda_pl_f2_nm"], rel=1e-13)
        assert lam_f2 < ORACLE["lambda_pl_nm"]

    def test_imaginary_root_raises(self):
        metal = DrudeMetal(eps_inf=9.0, omega_p=100.0, gamma_p=99.0)
        with pytest.raises(NoPlasmonResonanceError):
            lspr_energy(metal, 2.0, 100.0)


class TestLorentzianParameters:
    def test_weak_damping_limit(self):
        metal = DrudeMetal(eps_inf=9.0, omega_p=9000.0, gamma_p=1e-4)
        _, gamma_nr = lorentzian_parameters(metal, 2.0, 1.77, 2500.0)
        assert gamma_nr == pytest.approx(metal.gamma_p, rel=1e-12)

    def test_table_gamma_nr(self):
        eta, gamma_nr = lorentzian_parameters(
            TABLE_METAL, ORACLE["f"], TABLE_ENV.eps_b, ORACLE["omega_pl_mev"]
        )
        assert gamma_nr == pytest.approx(ORACLE["gamma_nr_mev"], rel=1e-13)
        assert abs(gamma_nr - 71.07) < 0.01
        assert eta == pytest.approx(ORACLE["eta_mev"], rel=1e-13)

    def test_derivative_reciprocal_identity(self):
        # eta must invert the slope of the real permittivity at resonance
        omega_pl = ORACLE["omega_pl_mev"]
        eta, _ = lorentzian_parameters(TABLE_METAL, ORACLE["f"], TABLE_ENV.eps_b, omega_pl)
        slope = (
            2.0 * omega_pl * TABLE_METAL.omega_p**2
            / (omega_pl**2 + TABLE_METAL.gamma_p**2) ** 2
        )
        assert eta * slope == pytest.approx(1.0, rel=1e-10)


class TestRadiativeRate:
    def test_cubic_scaling(self):
        base = radiative_rate(2.1, 84.6, 1.333, 2316.0, 25.0)
        doubled = radiative_rate(2.1, 84.6, 1.333, 2316.0, 50.0)
        assert doubled / base == pytest.approx(8.0, rel=1e-12)

    def test_table_lifetimes(self, plasmon):
        assert plasmon.gamma_r == pytest.approx(ORACLE["gamma_r_mev"], rel=1e-13)
        assert plasmon.radiative_lifetime_ps == pytest.approx(4.29, abs=0.2)
        assert plasmon.gamma_pl == pytest.approx(72.0, abs=2.0)
        assert plasmon.plasmon_lifetime_fs == pytest.approx(
            ORACLE["gamma_pl_lifetime_fs"], rel=1e-12
        )


class TestDipoleMoments:
    def test_chi_against_oracle(self, plasmon):
        assert plasmon.chi == pytest.approx(ORACLE["chi_debye"], rel=1e-13)
        assert plasmon.chi / 72.0 == pytest.approx(64.0, abs=3.0)

    def test_three_halves_scaling(self):
        base = mnp_dipole_moment(2.1, 1.78, 84.6, 25.0)
        quadrupled = mnp_dipole_moment(2.1, 1.78, 84.6, 100.0)
        assert quadrupled / base == pytest.approx(8.0, rel=1e-12)

    def test_si_debye_round_trip(self):
        chi = mnp_dipole_moment(2.1, 1.78, 84.6, 25.0)
        assert (chi * DEBYE) / DEBYE == pytest.approx(chi, rel=1e-12)


class TestCouplingRate:
    def test_table_value(self, plasmon):
        assert plasmon.g == pytest.approx(ORACLE["g_mev"], rel=1e-12)
        assert plasmon.g == pytest.approx(4.8, abs=0.3)

    def test_inverse_cube_scaling(self):
        eta = 84.6
        g1 = coupling_rate(2.1, 72.0, TABLE_GEOM, TABLE_ENV, eta, TABLE_GEOM.r)
        d2 = 2.0 * TABLE_GEOM.d
        geom2 = dataclasses.replace(TABLE_GEOM, l=d2 - TABLE_GEOM.r - TABLE_GEOM.a)
        g2 = coupling_rate(2.1, 72.0, geom2, TABLE_ENV, eta, TABLE_GEOM.r)
        assert g2 / g1 == pytest.approx(1.0 / 8.0, rel=1e-12)

    def test_transverse_factor(self):
        g_long = coupling_rate(2.1, 72.0, TABLE_GEOM, TABLE_ENV, 84.6, TABLE_GEOM.r)
        geom_t = dataclasses.replace(TABLE_GEOM, s_alpha=-1.0)
        g_trans = coupling_rate(2.1, 72.0, geom_t, TABLE_ENV, 84.6, TABLE_GEOM.r)
        assert g_trans < 0.0
        assert abs(g_trans) == pytest.approx(g_long / 2.0, rel=1e-12)

    def test_overlap_rejected(self):
        with pytest.raises(GeometryOverlapError):
            Geometry(r=25.0, r_c=0.8, t_s=0.7, l=-1.0)


class TestPolarizability:
    def test_index_matched_sphere_vanishes(self):
        metal = DrudeMetal(eps_inf=TABLE_ENV.eps_b, omega_p=1e-3, gamma_p=0.0)
        exact, _ = quasistatic_polarizability(metal, TABLE_ENV, TABLE_GEOM, 2000.0)
        volume = 4.0 * math.pi * TABLE_GEOM.r**3 / 3.0
        assert abs(exact) < 1e-8 * volume

    def test_lorentzian_matches_exact_at_resonance(self, plasmon):
        exact, lor = quasistatic_polarizability(
            TABLE_METAL, TABLE_ENV, TABLE_GEOM, plasmon.omega_pl
        )
        ratio = abs(exact) / abs(lor)
        assert ratio == pytest.approx(ORACLE["alpha_ratio_at_resonance"], rel=1e-10)
        assert abs(ratio - 1.0) < 0.10

    def test_lorentzian_peaks_on_resonance(self, plasmon):
        omegas = np.linspace(plasmon.omega_pl - 200.0, plasmon.omega_pl + 200.0, 81)
        mags = [
            abs(quasistatic_polarizability(TABLE_METAL, TABLE_ENV, TABLE_GEOM, w)[1])
            for w in omegas
        ]
        assert np.argmax(mags) == np.argmin(np.abs(omegas - plasmon.omega_pl))


class TestDerivedInvariants:
    def test_linewidth_sum_exact(self, plasmon):
        assert plasmon.gamma_pl == plasmon.gamma_nr + plasmon.gamma_r

    def test_froehlich_residual(self, plasmon):
        eps_r = drude_permittivity(TABLE_METAL, plasmon.omega_pl).real
        target = plasmon.f * TABLE_ENV.eps_b
        assert abs(eps_r + target) / target < 1e-9

    def test_substrate_free_reduction(self):
        env = Environment(n=1.3330, n_s=1.3330, n_d=2.45, t=1.7e5)
        plasmon = derive_plasmon(TABLE_METAL, env, TABLE_GEOM, mu=72.0)
        assert plasmon.f == pytest.approx(2.0, rel=1e-15)
        assert plasmon.lambda_pl == pytest.approx(ORACLE["lambda_pl_f2_nm"], rel=1e-12)

    def test_monotonic_redshift_in_index(self):
        omegas = []
        for n in np.linspace(1.30, 1.40, 50):
            env = Environment(n=float(n), n_s=1.5, n_d=2.45, t=1.7e5)
            omegas.append(derive_plasmon(TABLE_METAL, env, TABLE_GEOM, mu=72.0).omega_pl)
        assert all(b < a for a, b in zip(omegas, omegas[1:]))

    @settings(max_examples=30, deadline=None)
    @given(r=st.floats(5.0, 60.0), scale=st.floats(1.1, 4.0))
    def test_radiative_scaling_law_property(self, r, scale):
        g1 = radiative_rate(2.1, 84.6, 1.333, 2316.0, r)
        g2 = radiative_rate(2.1, 84.6, 1.333, 2316.0, scale * r)
        assert g2 / g1 == pytest.approx(scale**3, rel=1e-12)

    def test_thin_substrate_warns(self):
        env = Environment(n=1.3330, n_s=1.5, n_d=2.45, t=100.0)
        with pytest.warns(UserWarning, match="thin substrate"):
            derive_plasmon(TABLE_METAL, env, TABLE_GEOM, mu=72.0)

    def test_small_gap_warns(self):
        with pytest.warns(UserWarning, match="dipole-coupling"):
            Geometry(r=25.0, r_c=0.8, t_s=0.7, l=1.0)


class TestDriveParams:
    def test_field_and_rabi_against_oracle(self, lspr_drive):
        assert lspr_drive.E0 == pytest.approx(ORACLE["E0_v_m"], rel=1e-13)
        assert lspr_drive.Omega_pl == pytest.approx(ORACLE["omega_rabi_pl_mev"], rel=1e-13)
        assert lspr_drive.Omega_ex == pytest.approx(ORACLE["omega_rabi_ex_mev"], rel=1e-13)

    def test_detunings(self, plasmon, lspr_drive):
        assert lspr_drive.delta_pl(plasmon.omega_pl) == pytest.approx(0.0, abs=1e-9)
        assert lspr_drive.delta_ex == pytest.approx(
            2149.0 - wavelength_to_energy(plasmon.lambda_pl), abs=1e-9
        )

    def test_rabi_ratio_is_chi_over_mu(self, plasmon, lspr_drive):
        assert lspr_drive.Omega_pl / lspr_drive.Omega_ex == pytest.approx(
            plasmon.chi / 72.0, rel=1e-12
        )

    def test_intensity_square_root_law(self, plasmon):
        env = TABLE_ENV
        d1 = make_drive(plasmon, env, 72.0, 2149.0, 1.18e-4, 33.6, wavelength_nm=535.5)
        d4 = make_drive(plasmon, env, 72.0, 2149.0, 1.18e-4, 134.4, wavelength_nm=535.5)
        assert d4.E0 / d1.E0 == pytest.approx(2.0, rel=1e-12)

    def test_zero_intensity(self, plasmon):
        assert field_amplitude(0.0, 1.777) == 0.0
