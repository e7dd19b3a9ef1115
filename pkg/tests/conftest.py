"""Shared fixtures and frozen oracle values.

The ORACLE entries were computed with an independent 40-digit evaluation of
the same closed forms (mpmath script, kept outside the package); tests
compare the double-precision implementation against them.
"""

from __future__ import annotations

import pytest

from fanosense import RunConfig

# Independently computed reference values for the default configuration.
ORACLE = {
    "drude_2149": complex(-5.9338004986111478, 0.5259550653333604),
    "reflectance": 0.11748796651708056,
    "L_factor": 0.32354266945694065,
    "f": 2.0907824358328943,
    "omega_pl_mev": 2316.6563139275563,
    "lambda_pl_nm": 535.18598185935787,
    "lambda_pl_f2_nm": 532.02310256884901,
    "eta_mev": 84.624664182278743,
    "gamma_nr_mev": 71.066688634957493,
    "gamma_r_mev": 0.9684735507390863,
    "gamma_pl_mev": 72.035162185696579,
    "gamma_r_lifetime_ps": 4.2702949308566447,
    "gamma_pl_lifetime_fs": 57.411791254508214,
    "chi_debye": 4615.1085453516723,
    "chi_over_mu": 64.098729796551005,
    "g_mev": 4.8228359098412206,
    "E0_v_m": 11936.301240544487,
    "omega_rabi_pl_mev": 0.57344328869859572,
    "omega_rabi_ex_mev": 0.0089462504252221749,
    "m_lspr": 1.2454231955646294e-4,
    "alpha_ratio_at_resonance": 1.0165859298413470,
}


@pytest.fixture(scope="session")
def cfg() -> RunConfig:
    return RunConfig()


@pytest.fixture(scope="session")
def plasmon(cfg):
    return cfg.derived()


@pytest.fixture(scope="session")
def lspr_drive(cfg, plasmon):
    return cfg.drive(plasmon, plasmon.lambda_pl)


@pytest.fixture(scope="session")
def fano_feature(cfg):
    from fanosense.sensing import locate_fano_feature

    return locate_fano_feature(cfg, float(cfg["environment.n"]))
