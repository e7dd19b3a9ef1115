"""Numerical open-system solver: operators, generator, steady state,
propagation and delayed correlations."""

import dataclasses
import math

import numpy as np
import pytest

from fanosense.constants import HBAR_MEV_PS
from fanosense.errors import SteadyStateError
from fanosense.lindblad import (
    HilbertSpace,
    build_hamiltonian,
    build_liouvillian,
    build_system,
    convergence_check,
    correlation_tau,
    density_matrix_checks,
    destroy,
    expectation,
    fock_projector,
    liouvillian_spectrum_stats,
    propagate,
    qd_lower,
    solve_steady_state,
    steady_state,
    top_fock_population,
    zero_delay_correlation,
)

SPACE = HilbertSpace(fock_dim=6)


def coherent_rho(alpha: complex, fock_dim: int) -> np.ndarray:
    ket = np.array(
        [alpha**k / math.sqrt(math.factorial(k)) for k in range(fock_dim)], dtype=complex
    )
    ket *= math.exp(-abs(alpha) ** 2 / 2.0)
    full = np.kron(ket, np.array([1.0, 0.0], dtype=complex))
    return np.outer(full, full.conj())


class TestOperators:
    def test_commutator_below_truncation(self):
        a = destroy(SPACE)
        comm = a @ a.conj().T - a.conj().T @ a
        keep = np.eye(SPACE.dim) - fock_projector(SPACE, SPACE.fock_dim - 1)
        assert np.allclose(keep @ (comm - np.eye(SPACE.dim)) @ keep, 0.0, atol=1e-14)

    def test_emitter_algebra(self):
        s = qd_lower(SPACE)
        assert np.allclose(s @ s, 0.0)
        assert np.allclose(s @ s.conj().T @ s, s, atol=1e-14)

    def test_minimum_fock_dim(self):
        with pytest.raises(ValueError):
            HilbertSpace(fock_dim=1)


class TestHamiltonian:
    def test_free_evolution_is_diagonal(self):
        H = build_hamiltonian(SPACE, delta_pl=2.0, delta_ex=3.0, g=0.0,
                              omega_rabi_ex=0.0, omega_rabi_pl=0.0)
        assert np.allclose(H, np.diag(np.diag(H)))
        # ordering: plasmon number major, emitter state minor
        assert H[0, 0] == 0.0
        assert H[1, 1] == 3.0
        assert H[2, 2] == 2.0
        assert H[3, 3] == 5.0

    def test_hermitian_at_reference_point(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=10)
        H = system.hamiltonian
        assert np.abs(H - H.conj().T).max() < 1e-12

    def test_single_excitation_block_eigenvalues(self):
        # 2x2 block in {|1, g>, |0, e>} diagonalizes to the exact dressed pair
        d_pl, d_ex, g = 5.0, 3.0, 1.7
        space = HilbertSpace(fock_dim=2)
        H = build_hamiltonian(space, d_pl, d_ex, g, 0.0, 0.0)
        block = np.array([[H[2, 2], H[2, 1]], [H[1, 2], H[1, 1]]])
        evs = np.sort(np.linalg.eigvalsh(block))
        mean = (d_pl + d_ex) / 2.0
        split = math.hypot((d_pl - d_ex) / 2.0, g)
        assert evs == pytest.approx([mean - split, mean + split], rel=1e-12)


class TestLiouvillian:
    def test_pure_decay_law(self):
        space = HilbertSpace(fock_dim=2)
        gamma = 0.8
        L = build_liouvillian(np.zeros((4, 4), dtype=complex), [(gamma, qd_lower(space))])
        excited = np.kron(
            np.array([[1, 0], [0, 0]], dtype=complex), np.array([[0, 0], [0, 1]], dtype=complex)
        )
        pop_op = excited
        tau = 2.5
        rho_t = propagate(L, excited, tau)
        expected = math.exp(-gamma * tau / HBAR_MEV_PS)
        assert expectation(pop_op, rho_t).real == pytest.approx(expected, rel=1e-9)

    def test_closed_system_spectrum_imaginary(self):
        H = build_hamiltonian(SPACE, 2.0, 3.0, 0.7, 0.1, 0.2)
        L = build_liouvillian(H, [])
        ev = np.linalg.eigvals(L)
        assert np.abs(ev.real).max() < 1e-10

    def test_steady_state_annihilated(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=10)
        rho = solve_steady_state(system)
        assert np.linalg.norm(system.liouvillian @ rho.reshape(-1, order="F")) < 1e-10

    def test_trace_functional_is_left_null_vector(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=8)
        d = system.space.dim
        trace_row = np.zeros(d * d, dtype=complex)
        trace_row[np.arange(d) * d + np.arange(d)] = 1.0
        assert np.linalg.norm(trace_row @ system.liouvillian) < 1e-10


class TestSteadyState:
    def test_dark_steady_state_without_drive(self, cfg, plasmon):
        drive = cfg.drive(plasmon, 545.0, intensity_w_cm2=0.0)
        system = build_system(plasmon, drive, fock_dim=6)
        rho = solve_steady_state(system)
        vacuum = np.zeros_like(rho)
        vacuum[0, 0] = 1.0
        assert np.abs(rho - vacuum).max() < 1e-12

    def test_coherent_state_oracle(self, cfg, plasmon):
        bare = dataclasses.replace(plasmon, g=0.0)
        drive = dataclasses.replace(cfg.drive(bare, 545.0), Omega_ex=0.0)
        system = build_system(bare, drive, fock_dim=10)
        rho = solve_steady_state(system)
        alpha = 1j * drive.Omega_pl / complex(bare.gamma_pl / 2.0, drive.delta_pl(bare.omega_pl))
        target = coherent_rho(alpha, 10)
        fidelity = np.trace(target @ rho).real
        assert fidelity > 1.0 - 1e-6

    def test_matches_analytic_away_from_feature(self, cfg, plasmon, lspr_drive):
        from fanosense.analytic import steady_state as analytic_ss

        system = build_system(plasmon, lspr_drive, fock_dim=10)
        rho = solve_steady_state(system)
        n_num = expectation(system.a.conj().T @ system.a, rho).real
        n_ana = analytic_ss(plasmon, lspr_drive).n_photon
        assert abs(n_ana - n_num) / n_num < 1e-3

    def test_cptp_checks(self, cfg, plasmon, lspr_drive):
        rho = solve_steady_state(build_system(plasmon, lspr_drive, fock_dim=10))
        checks = density_matrix_checks(rho)
        assert checks["trace_dev"] < 1e-10
        assert checks["herm_dev"] < 1e-10
        assert checks["min_eigenvalue"] > -1e-8

    def test_degenerate_kernel_raises(self):
        # no dissipation at all: the kernel is high-dimensional
        H = np.zeros((4, 4), dtype=complex)
        with pytest.raises(SteadyStateError):
            steady_state(build_liouvillian(H, []))


class TestExpectation:
    def test_identity(self, cfg, plasmon, lspr_drive):
        rho = solve_steady_state(build_system(plasmon, lspr_drive, fock_dim=6))
        assert expectation(np.eye(12, dtype=complex), rho) == pytest.approx(1.0, abs=1e-12)

    def test_hermitian_operator_real(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=6)
        rho = solve_steady_state(system)
        n_op = system.a.conj().T @ system.a
        assert abs(expectation(n_op, rho).imag) < 1e-12

    def test_number_on_fock_state(self):
        rho = np.zeros((SPACE.dim, SPACE.dim), dtype=complex)
        rho[4, 4] = 1.0  # |n=2> x |ground>
        a = destroy(SPACE)
        assert expectation(a.conj().T @ a, rho).real == pytest.approx(2.0, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            expectation(np.eye(4, dtype=complex), np.eye(6, dtype=complex))


class TestPropagation:
    def test_zero_delay_identity(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=6)
        x = np.outer(np.arange(12.0), np.arange(12.0)).astype(complex)
        assert np.array_equal(propagate(system.liouvillian, x, 0.0), x)

    def test_stationarity(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=8)
        rho = solve_steady_state(system)
        drift = propagate(system.liouvillian, rho, 7.0) - rho
        assert np.abs(drift).max() < 1e-9

    def test_semigroup(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=6)
        x = system.a @ solve_steady_state(system) @ system.a.conj().T
        once = propagate(system.liouvillian, x, 0.9)
        twice = propagate(system.liouvillian, propagate(system.liouvillian, x, 0.4), 0.5)
        assert np.abs(once - twice).max() < 1e-8


class TestCorrelations:
    def test_zero_delay_matches_static_moments(self, cfg, plasmon, fano_feature):
        drive = cfg.drive(plasmon, fano_feature["peak"])
        system = build_system(plasmon, drive, fock_dim=10)
        rho = solve_steady_state(system)
        for order in (2, 3, 4):
            static = zero_delay_correlation(rho, system.emission_op, order)
            from_tau = correlation_tau(system, rho, order, np.array([0.0]))[0]
            assert abs(static - from_tau) < 1e-10

    def test_bare_cavity_flat_unity(self, cfg, plasmon):
        bare = dataclasses.replace(plasmon, g=0.0)
        drive = dataclasses.replace(cfg.drive(bare, 545.0), Omega_ex=0.0)
        system = build_system(bare, drive, fock_dim=8)
        rho = solve_steady_state(system)
        taus = np.linspace(0.0, 2.0, 9)
        for order in (2, 3, 4):
            vals = correlation_tau(system, rho, order, taus)
            assert np.abs(vals - 1.0).max() < 1e-6

    def test_lspr_poissonian_at_all_delays(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=10)
        rho = solve_steady_state(system)
        vals = correlation_tau(system, rho, 2, np.linspace(0.0, 50.0, 101))
        assert np.abs(vals - 1.0).max() < 0.02

    def test_fano_peak_antibunched_plateau(self, cfg, plasmon, fano_feature):
        drive = cfg.drive(plasmon, fano_feature["peak"])
        system = build_system(plasmon, drive, fock_dim=10)
        rho = solve_steady_state(system)
        taus = np.linspace(0.0, 3.0, 31)
        vals = correlation_tau(system, rho, 2, taus)
        assert vals[0] == pytest.approx(0.17, abs=0.03)
        assert vals.max() < 0.20 and vals.min() > 0.14

    def test_long_delay_recovery(self, cfg, plasmon, fano_feature):
        # 20 radiative lifetimes at the interference peak; the dip carries
        # three orders of magnitude of bunching and needs a longer horizon
        horizon = 20.0 * plasmon.radiative_lifetime_ps
        for lam, tol, t_end in (
            (plasmon.lambda_pl, 0.02, horizon),
            (fano_feature["peak"], 0.02, horizon),
            (fano_feature["dip"], 0.02, 200.0),
        ):
            drive = cfg.drive(plasmon, lam)
            system = build_system(plasmon, drive, fock_dim=10)
            rho = solve_steady_state(system)
            val = correlation_tau(system, rho, 2, np.array([0.0, t_end]))[-1]
            assert abs(val - 1.0) < tol, f"lambda={lam}: g2({t_end})={val}"

    def test_higher_order_asymptotes_factorize(self, cfg, plasmon, fano_feature):
        # single-delay convention: G^(n)(inf) = <b^dag b> <(b^dag)^{n-1} b^{n-1}>,
        # so g3 tends to g2(0) and g4 to g3(0); only g2 tends to one
        drive = cfg.drive(plasmon, fano_feature["peak"])
        system = build_system(plasmon, drive, fock_dim=10)
        rho = solve_steady_state(system)
        horizon = 40.0 * plasmon.radiative_lifetime_ps
        for order in (3, 4):
            val = correlation_tau(system, rho, order, np.array([0.0, horizon]))[-1]
            target = zero_delay_correlation(rho, system.emission_op, order - 1)
            assert val == pytest.approx(target, rel=0.02)


class TestEmissionOperatorVariant:
    def test_full_operator_adds_emitter_channel(self, cfg, plasmon, fano_feature):
        drive = cfg.drive(plasmon, fano_feature["peak"])
        approx = build_system(plasmon, drive, fock_dim=10)
        full = build_system(plasmon, drive, fock_dim=10, include_qd_emission=True)
        extra = full.emission_op - approx.emission_op
        assert np.allclose(extra, math.sqrt(drive.gamma_ex) * full.sigma)
        # at the interference feature the emitter channel is not negligible:
        # it deepens the antibunching relative to the plasmon-only operator
        rho = solve_steady_state(full)
        g2_full = zero_delay_correlation(rho, full.emission_op, 2)
        g2_base = zero_delay_correlation(rho, approx.emission_op, 2)
        assert 0.0 < g2_full < g2_base < 1.0

    def test_negligible_at_plasmon_resonance(self, cfg, plasmon, lspr_drive):
        full = build_system(plasmon, lspr_drive, fock_dim=10, include_qd_emission=True)
        approx = build_system(plasmon, lspr_drive, fock_dim=10)
        rho = solve_steady_state(full)
        g2_full = zero_delay_correlation(rho, full.emission_op, 2)
        g2_base = zero_delay_correlation(rho, approx.emission_op, 2)
        assert g2_full == pytest.approx(g2_base, rel=1e-4)


class TestSpectrumStats:
    def test_dissipative_with_unique_kernel(self, cfg, plasmon, fano_feature):
        drive = cfg.drive(plasmon, fano_feature["peak"])
        system = build_system(plasmon, drive, fock_dim=10)
        stats = liouvillian_spectrum_stats(system.liouvillian)
        assert stats["max_real"] <= 1e-10
        assert stats["n_zero_modes"] == 1


class TestConvergence:
    def test_reference_drive_converged(self, cfg, plasmon, fano_feature):
        drive = cfg.drive(plasmon, fano_feature["peak"])
        report = convergence_check(plasmon, drive, [8, 10, 12])
        assert report.converged
        for row in report.rows[1:]:
            assert row.rel_delta_n < 1e-4
            assert row.rel_delta_g2 < 1e-4

    def test_weak_drive_small_truncation_adequate(self, cfg, plasmon, lspr_drive):
        report = convergence_check(plasmon, lspr_drive, [2, 10])
        assert report.rows[-1].rel_delta_n < 1e-2

    def test_strong_drive_flags_small_truncation(self, cfg, plasmon):
        drive = cfg.drive(plasmon, plasmon.lambda_pl, intensity_w_cm2=3360.0)
        report = convergence_check(plasmon, drive, [3, 5, 7])
        assert not report.converged

    def test_truncation_population_small(self, cfg, plasmon, lspr_drive):
        system = build_system(plasmon, lspr_drive, fock_dim=10)
        rho = solve_steady_state(system)
        assert top_fock_population(rho, system.space) < 1e-8


class TestCptpFuzz:
    def test_twenty_randomized_configurations(self, cfg):
        from fanosense.config import RunConfig

        rng = np.random.default_rng(20230817)
        for _ in range(20):
            doc = {
                "metal": {"omega_p_mev": float(8579 * rng.uniform(0.8, 1.2)),
                          "gamma_p_mev": float(71 * rng.uniform(0.5, 2.0))},
                "environment": {"n": float(rng.uniform(1.30, 1.40))},
                "geometry": {"r_nm": float(25 * rng.uniform(0.8, 1.2)),
                             "l_nm": float(rng.uniform(3.0, 8.0))},
                "drive": {"intensity_w_cm2": float(33.6 * rng.uniform(0.2, 5.0))},
            }
            q = RunConfig(doc)
            p = q.derived()
            rho = solve_steady_state(build_system(p, q.drive(p, p.lambda_pl + 1.0), fock_dim=8))
            checks = density_matrix_checks(rho)
            assert checks["trace_dev"] < 1e-10
            assert checks["herm_dev"] < 1e-10
            assert checks["min_eigenvalue"] > -1e-8

    def test_no_emitter_decay_edge(self, cfg, plasmon):
        drive = dataclasses.replace(cfg.drive(plasmon, 545.0), gamma_ex=0.0)
        system = build_system(plasmon, drive, fock_dim=8)
        rho = solve_steady_state(system)
        assert density_matrix_checks(rho)["trace_dev"] < 1e-10
        assert liouvillian_spectrum_stats(system.liouvillian)["n_zero_modes"] == 1
