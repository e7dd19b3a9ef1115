"""Command-line interface.

Subcommands: params, spectrum, correlations, sense, validate.
Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 validation failure. Output files are byte-identical across reruns of the
same configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analytic import steady_state as analytic_steady_state
from .config import RunConfig
from .constants import CONSTANTS_TABLE, energy_to_wavelength
from .errors import ConfigError, FanosenseError
from .lindblad import (
    build_system,
    correlation_tau,
    solve_steady_state,
    top_fock_population,
    zero_delay_correlation,
)
from .materials import DerivedPlasmon
from .photodetection import count_stats
from .sensing import (
    SweepGrid,
    build_sensing_report,
    grid_points,
    locate_fano_feature,
    sweep,
)
from .validate import checks_to_dict, run_validation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3


def _fmt(x) -> str:
    """Shortest round-trip decimal for floats; plain str otherwise."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _out_dir(args, command: str) -> Path:
    if args.out:
        base = Path(args.out)
    elif os.environ.get("FANOSENSE_OUT"):
        base = Path(os.environ["FANOSENSE_OUT"])
    else:
        base = Path("out") / command
    base.mkdir(parents=True, exist_ok=True)
    return base


def _write_csv(path: Path, meta: dict, header: list[str], rows) -> None:
    lines = [f"# fanosense {meta.pop('command')}"]
    for key in sorted(meta):
        lines.append(f"# {key}: {meta[key]}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.set:
        cfg = cfg.with_overrides(args.set)
    if getattr(args, "fock", None):
        cfg = cfg.with_overrides([f"solver.fock_dim={int(args.fock)}"])
    if getattr(args, "n_range", None):
        lo, hi, step = _parse_window(args.n_range, "--n-range")
        cfg = cfg.with_overrides([f"grids.n_range=[{lo},{hi},{step}]"])
    return cfg


def _parse_window(text: str, flag: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{flag} expects MIN:MAX:STEP, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"{flag} expects numbers, got {text!r}") from exc
    if not (lo < hi and step > 0):
        raise ConfigError(f"{flag} needs MIN < MAX and STEP > 0, got {text!r}")
    return lo, hi, step


def _meta(cfg: RunConfig, command: str) -> dict:
    return {
        "command": command,
        "config_hash": cfg.hash(),
        "fock_dim": int(cfg["solver.fock_dim"]),
        "include_qd_emission": bool(cfg["solver.include_qd_emission"]),
    }


# -- params ------------------------------------------------------------------


def cmd_params(args) -> int:
    cfg = _load_config(args)
    plasmon = cfg.derived()
    payload = {
        "config_hash": cfg.hash(),
        "L_factor": plasmon.L_factor,
        "f": plasmon.f,
        "reflectance": plasmon.reflectance,
        "omega_pl_mev": plasmon.omega_pl,
        "lambda_pl_nm": plasmon.lambda_pl,
        "eta_mev": plasmon.eta,
        "gamma_nr_mev": plasmon.gamma_nr,
        "gamma_r_mev": plasmon.gamma_r,
        "gamma_pl_mev": plasmon.gamma_pl,
        "gamma_r_lifetime_ps": plasmon.radiative_lifetime_ps,
        "gamma_pl_lifetime_fs": plasmon.plasmon_lifetime_fs,
        "chi_debye": plasmon.chi,
        "chi_over_mu": plasmon.chi / cfg["emitter.mu_debye"],
        "g_mev": plasmon.g,
        "constants": CONSTANTS_TABLE,
    }
    out = _out_dir(args, "params")
    _write_json(out / "params.json", payload)
    for key, val in payload.items():
        if key != "constants":
            print(f"{key} = {_fmt(val)}")
    print(f"wrote {out / 'params.json'}")
    return EXIT_OK


# -- spectrum ------------------------------------------------------------------


def _resolve_wavelength(cfg: RunConfig, token: str, plasmon: DerivedPlasmon) -> float:
    if token == "lspr":
        return plasmon.lambda_pl
    if token in ("fano-dip", "fano-peak"):
        feature = locate_fano_feature(cfg, float(cfg["environment.n"]))
        return feature["dip"] if token == "fano-dip" else feature["peak"]
    try:
        return float(token)
    except ValueError:
        raise ConfigError(
            f"wavelength must be a number or one of lspr/fano-dip/fano-peak, got {token!r}"
        ) from None


def cmd_spectrum(args) -> int:
    cfg = _load_config(args)
    window = _parse_window(args.window, "--window") if args.window else tuple(
        cfg["grids.plasmon_window_nm"]
    )
    engines = ["analytic", "lindblad"] if args.engine == "both" else [args.engine]
    lambdas = grid_points(*window)
    n0 = float(cfg["environment.n"])
    grid = SweepGrid(lambdas=lambdas, n_values=np.array([n0]), region="plasmon")

    tables = {}
    for engine in engines:
        tables[engine] = sweep(cfg, grid, engine=engine, jobs=args.jobs)
        for lam, n, msg in tables[engine].errors:
            print(f"warning: {engine} solver failed at lambda={lam} n={n}: {msg}", file=sys.stderr)

    header = ["lambda_nm"]
    cols: list[np.ndarray] = [lambdas]
    for engine in engines:
        suffix = f"_{engine}" if len(engines) > 1 else ""
        flux = tables[engine].columns["flux_per_ps"][0, :]
        peak = np.nanmax(flux)
        for name, arr in (
            ("flux_per_ps", flux),
            ("flux_norm", flux / peak if peak > 0 else flux),
            ("m_mean", tables[engine].columns["m_mean"][0, :]),
            ("g2_0", tables[engine].columns["g2_0"][0, :]),
            ("g3_0", tables[engine].columns["g3_0"][0, :]),
            ("g4_0", tables[engine].columns["g4_0"][0, :]),
        ):
            header.append(name + suffix)
            cols.append(arr)

    out = _out_dir(args, "spectrum")
    meta = _meta(cfg, "spectrum")
    meta["window_nm"] = f"{window[0]}:{window[1]}:{window[2]}"
    meta["engine"] = args.engine
    if "lindblad" in engines:
        # truncation probe at the brightest point of the window
        flux = tables["lindblad"].columns["flux_per_ps"][0, :]
        lam_max = float(lambdas[int(np.nanargmax(flux))])
        plasmon = cfg.derived()
        system = build_system(plasmon, cfg.drive(plasmon, lam_max),
                              fock_dim=int(cfg["solver.fock_dim"]),
                              include_qd_emission=bool(cfg["solver.include_qd_emission"]))
        meta["top_fock_population"] = _fmt(
            top_fock_population(solve_steady_state(system), system.space)
        )
    n_err = sum(len(t.errors) for t in tables.values())
    if n_err:
        meta["solver_errors"] = n_err
    _write_csv(out / "spectrum.csv", meta, header, zip(*cols))
    _write_json(
        out / "spectrum.json",
        {
            "meta": _meta(cfg, "spectrum") | {"window_nm": list(window), "engine": args.engine},
            "columns": {h: [None if np.isnan(v) else float(v) for v in c]
                        for h, c in zip(header, cols)},
        },
    )
    if args.plot:
        from .plots import plot_spectrum

        series = {}
        for engine in engines:
            flux = tables[engine].columns["flux_per_ps"][0, :]
            peak = np.nanmax(flux)
            series[engine] = (flux, flux / peak if peak > 0 else flux)
        plot_spectrum(lambdas, series, out / "spectrum.svg")
    print(f"wrote {out / 'spectrum.csv'}")
    return EXIT_OK


# -- correlations --------------------------------------------------------------


def cmd_correlations(args) -> int:
    cfg = _load_config(args)
    plasmon = cfg.derived()
    lam = _resolve_wavelength(cfg, args.wavelength, plasmon)
    orders = sorted({int(t) for t in args.orders.split(",")})
    if any(o not in (2, 3, 4) for o in orders):
        raise ConfigError(f"--orders entries must be 2, 3 or 4, got {args.orders!r}")
    drive = cfg.drive(plasmon, lam)
    system = build_system(
        plasmon,
        drive,
        fock_dim=int(cfg["solver.fock_dim"]),
        include_qd_emission=bool(cfg["solver.include_qd_emission"]),
    )
    rho = solve_steady_state(system, float(cfg["solver.steady_state_residual_tol"]))
    if args.tau_max < 0:
        raise ConfigError(f"--tau-max must be >= 0, got {args.tau_max}")
    if args.tau_max == 0:
        taus = np.array([0.0])
        curves = {o: np.array([zero_delay_correlation(rho, system.emission_op, o)]) for o in orders}
    else:
        taus = np.linspace(0.0, args.tau_max, 201)
        curves = {o: correlation_tau(system, rho, o, taus) for o in orders}

    out = _out_dir(args, "correlations")
    meta = _meta(cfg, "correlations")
    meta["lambda_nm"] = _fmt(lam)
    meta["tau_max_ps"] = _fmt(float(args.tau_max))
    meta["top_fock_population"] = _fmt(top_fock_population(rho, system.space))
    header = ["tau_ps"] + [f"g{o}" for o in orders]
    rows = zip(taus, *[curves[o] for o in orders])
    _write_csv(out / "correlations.csv", meta, header, rows)
    _write_json(
        out / "correlations.json",
        {
            "meta": _meta(cfg, "correlations") | {"lambda_nm": float(lam)},
            "tau_ps": [float(t) for t in taus],
            "curves": {f"g{o}": [float(v) for v in curves[o]] for o in orders},
        },
    )
    if args.plot:
        from .plots import plot_correlations

        plot_correlations(
            taus, {f"g{o}": curves[o] for o in orders}, out / "correlations.svg"
        )
    print(f"wrote {out / 'correlations.csv'}")
    return EXIT_OK


# -- sense ---------------------------------------------------------------------


def cmd_sense(args) -> int:
    cfg = _load_config(args)
    report = build_sensing_report(cfg, jobs=args.jobs)
    out = _out_dir(args, "sense")
    meta = _meta(cfg, "sense")
    meta["n_anchor"] = _fmt(report.n_anchor)
    meta["scheme"] = report.scheme
    meta["fano_window_recentred"] = report.fano_window_recentred
    if report.partial:
        meta["partial"] = True
        print("warning: no interference feature found; emitting a partial report",
              file=sys.stderr)
    header = [
        "region", "lambda_nm", "m_mean", "g2_0", "s_i", "s_ii",
        "sigma_m", "sigma_g2", "dn_i", "dn_ii",
    ]
    rows = []
    regions = [report.plasmon] + ([report.fano] if report.fano is not None else [])
    for region in regions:
        for j in range(region.lambdas.size):
            rows.append(
                (
                    region.region, region.lambdas[j], region.m_mean[j], region.g2_0[j],
                    region.s_i[j], region.s_ii[j], region.sigma_m[j], region.sigma_g2[j],
                    region.dn_i[j], region.dn_ii[j],
                )
            )
    _write_csv(out / "sense.csv", meta, header, rows)

    points = {
        "PL": report.plasmon.points.left,
        "PM": report.plasmon.points.middle,
        "PR": report.plasmon.points.right,
    }
    if report.fano is not None:
        points |= {
            "FL": report.fano.points.left,
            "FM": report.fano.points.middle,
            "FR": report.fano.points.right,
        }
    payload = {
        "meta": _meta(cfg, "sense") | {
            "n_values": [float(v) for v in report.n_values],
            "scheme": report.scheme,
            "fano_window_recentred": report.fano_window_recentred,
            "partial": report.partial,
        },
        "special_points_nm": points,
        "plasmon_points": report.plasmon.point_values,
        "fano_points": report.fano.point_values if report.fano is not None else None,
        "enhancements": report.enhancements,
        "dn_ii_argmin_nm": (
            None if math.isnan(report.dn_ii_argmin_nm) else report.dn_ii_argmin_nm
        ),
        "argmin_at_left_inflection": report.argmin_at_left_inflection,
    }
    _write_json(out / "sense.json", payload)
    if args.plot:
        from .plots import plot_sensing

        plot_sensing(report, out)
    print(f"wrote {out / 'sense.csv'}")
    for key, val in payload["special_points_nm"].items():
        print(f"{key} = {_fmt(val)} nm")
    return EXIT_OK


# -- validate ------------------------------------------------------------------


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    checks = run_validation(cfg)
    out = _out_dir(args, "validate")
    payload = checks_to_dict(checks) | {"config_hash": cfg.hash()}
    _write_json(out / "validate.json", payload)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: measured={_fmt(c.measured)} tolerance={_fmt(c.tolerance)}")
    if not payload["passed"]:
        return EXIT_VALIDATION
    return EXIT_OK


# -- entry ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanosense",
        description="Hybrid nanoparticle-emitter refractive-index sensing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, jobs_default=os.cpu_count() or 1):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                       help="override a dotted config path (repeatable)")
        p.add_argument("--out", help="output directory (default ./out/<command>, or $FANOSENSE_OUT)")
        p.add_argument("--fock", type=int, help="override solver.fock_dim")
        p.add_argument("--jobs", type=int, default=jobs_default, help="sweep parallelism")
        p.add_argument("--plot", action="store_true", help="render figures next to the data")

    p = sub.add_parser("params", help="derived plasmonic parameters")
    common(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("spectrum", help="scattered-flux spectrum over a wavelength window")
    common(p)
    p.add_argument("--engine", choices=["analytic", "lindblad", "both"], default="analytic")
    p.add_argument("--window", metavar="MIN:MAX:STEP", help="wavelength window [nm]")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("correlations", help="delayed correlation functions at one wavelength")
    common(p)
    p.add_argument("--wavelength", default="fano-peak",
                   help="wavelength [nm] or lspr/fano-dip/fano-peak")
    p.add_argument("--tau-max", type=float, default=50.0, help="delay horizon [ps]")
    p.add_argument("--orders", default="2,3,4", help="correlation orders, e.g. 2,3,4")
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("sense", help="sensitivity/resolution report over both regions")
    common(p)
    p.add_argument("--n-range", metavar="MIN:MAX:STEP", help="refractive-index range")
    p.set_defaults(func=cmd_sense)

    p = sub.add_parser("validate", help="run the invariant suite")
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FanosenseError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
