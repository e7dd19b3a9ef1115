"""Wavelength and refractive-index sweeps, numerical sensitivities,
special operating points and the sensing report.

Sensitivities are finite differences on the configured index grid (default
step 1e-4): a one-sided second-order stencil at the grid anchor for the
tabulated values and central differences at the midpoint as the alternate
convention, with a Richardson-extrapolated value attached as a
discretization diagnostic. Special points are located from the second
derivative of the spectrum: inflections at linearly interpolated zero
crossings, the middle point at its minimum.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import steady_state as analytic_steady_state
from .config import RunConfig
from .constants import energy_to_wavelength
from .errors import GridError
from .lindblad import lindblad_observables
from .photodetection import count_stats

SWEEP_COLUMNS = (
    "flux_per_ps",
    "m_mean",
    "g2_0",
    "g3_0",
    "g4_0",
    "delta_m",
    "sigma_m",
    "delta_g2",
    "sigma_g2",
    "n_photon",
)


@dataclass(frozen=True)
class SweepGrid:
    """Ordered wavelength and index grids for one spectral region."""

    lambdas: np.ndarray
    n_values: np.ndarray
    region: str = "plasmon"

    def __post_init__(self):
        for name, arr in (("lambda", self.lambdas), ("n", self.n_values)):
            a = np.asarray(arr, dtype=float)
            if a.ndim != 1 or a.size == 0:
                raise GridError(f"{name} grid must be a non-empty 1-D array")
            if a.size > 1 and not np.all(np.diff(a) > 0):
                raise GridError(f"{name} grid must be strictly increasing")
        if self.region not in ("plasmon", "fano"):
            raise GridError(f"region must be 'plasmon' or 'fano', got {self.region!r}")

    @classmethod
    def from_window(
        cls, window: tuple[float, float, float], n_range: tuple[float, float, float], region: str
    ) -> "SweepGrid":
        return cls(
            lambdas=grid_points(*window), n_values=grid_points(*n_range), region=region
        )


def grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive, reproducible grid: linspace with a rounded point count."""
    if not (lo < hi and step > 0):
        raise GridError(f"invalid window [{lo}, {hi}] step {step}")
    count = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, count)


@dataclass
class SweepTable:
    """Per-(n, lambda) observables; arrays are shaped (len(n), len(lambda))."""

    grid: SweepGrid
    columns: dict[str, np.ndarray]
    errors: list[tuple[float, float, str]] = field(default_factory=list)


def _point_observables(cfg: RunConfig, plasmon, lam: float, n: float, engine: str) -> dict:
    drive = cfg.drive(plasmon, lam, n=n)
    det = cfg.detector()
    if engine == "analytic":
        ss = analytic_steady_state(plasmon, drive)
        obs = {"n_photon": ss.n_photon, "g2_0": ss.g2_0, "g3_0": ss.g3_0, "g4_0": ss.g4_0}
    elif engine == "lindblad":
        obs = lindblad_observables(
            plasmon,
            drive,
            fock_dim=int(cfg["solver.fock_dim"]),
            include_qd_emission=bool(cfg["solver.include_qd_emission"]),
        )
    else:
        raise ValueError(f"unknown engine {engine!r}")
    stats = count_stats(
        obs["n_photon"], obs["g2_0"], obs["g3_0"], obs["g4_0"], plasmon.gamma_r, det
    )
    return {
        "flux_per_ps": stats.m_mean / (det.xi * det.t_int),
        "m_mean": stats.m_mean,
        "g2_0": obs["g2_0"],
        "g3_0": obs["g3_0"],
        "g4_0": obs["g4_0"],
        "delta_m": stats.delta_m,
        "sigma_m": stats.sigma_m,
        "delta_g2": stats.delta_g2,
        "sigma_g2": stats.sigma_g2,
        "n_photon": obs["n_photon"],
    }


def sweep(cfg: RunConfig, grid: SweepGrid, engine: str = "analytic", jobs: int = 1) -> SweepTable:
    """Evaluate the observable table over the grid.

    Each index value re-derives every plasmonic quantity; solver failures
    are recorded with their (lambda, n) coordinates and leave NaN rows.
    """
    shape = (grid.n_values.size, grid.lambdas.size)
    columns = {name: np.full(shape, np.nan) for name in SWEEP_COLUMNS}
    errors: list[tuple[float, float, str]] = []

    def run_row(i: int) -> None:
        n = float(grid.n_values[i])
        plasmon = cfg.derived(n)
        for j, lam in enumerate(grid.lambdas):
            try:
                obs = _point_observables(cfg, plasmon, float(lam), n, engine)
            except Exception as exc:  # recorded per point, sweep continues
                errors.append((float(lam), n, str(exc)))
                continue
            for name in SWEEP_COLUMNS:
                columns[name][i, j] = obs[name]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run_row, range(shape[0])))
    else:
        for i in range(shape[0]):
            run_row(i)
    errors.sort()
    return SweepTable(grid=grid, columns=columns, errors=errors)


@dataclass(frozen=True)
class SensitivityResult:
    """|d(signal)/dn| with scheme diagnostics."""

    value: float
    scheme: str
    richardson: float | None
    linearity_dev: float


def sensitivity(n_values: np.ndarray, series: np.ndarray, anchor: str = "edge") -> SensitivityResult:
    """Finite-difference sensitivity of a signal series over the index grid.

    anchor='edge' uses the second-order one-sided stencil at the first grid
    point; anchor='midpoint' uses central differences at the middle point
    with a Richardson-extrapolated diagnostic when five points are present.
    """
    n_values = np.asarray(n_values, dtype=float)
    series = np.asarray(series, dtype=float)
    if n_values.size < 3:
        raise GridError("sensitivity needs at least 3 index points")
    h = n_values[1] - n_values[0]
    if not np.allclose(np.diff(n_values), h, rtol=1e-9):
        raise GridError("index grid must be uniform")
    richardson = None
    if anchor == "edge":
        deriv = (-3.0 * series[0] + 4.0 * series[1] - series[2]) / (2.0 * h)
        if n_values.size >= 5:
            d2h = (-3.0 * series[0] + 4.0 * series[2] - series[4]) / (4.0 * h)
            richardson = abs((4.0 * deriv - d2h) / 3.0)
    elif anchor == "midpoint":
        mid = n_values.size // 2
        deriv = (series[mid + 1] - series[mid - 1]) / (2.0 * h)
        if mid >= 2 and mid + 2 < n_values.size:
            d2h = (series[mid + 2] - series[mid - 2]) / (4.0 * h)
            richardson = abs((4.0 * deriv - d2h) / 3.0)
    else:
        raise ValueError(f"unknown anchor {anchor!r}")
    return SensitivityResult(
        value=abs(deriv),
        scheme=f"{anchor}-3pt" if anchor == "edge" else "central",
        richardson=richardson,
        linearity_dev=(
            linearity_report(n_values, series) if n_values.size >= 4 else math.nan
        ),
    )


def linearity_report(n_values: np.ndarray, series: np.ndarray) -> float:
    """Max |residual| of the least-squares line, relative to the data range."""
    n_values = np.asarray(n_values, dtype=float)
    series = np.asarray(series, dtype=float)
    if n_values.size < 4:
        raise GridError("linearity report needs at least 4 points")
    design = np.vstack([np.ones_like(n_values), n_values]).T
    coef, *_ = np.linalg.lstsq(design, series, rcond=None)
    resid = series - design @ coef
    rng = series.max() - series.min()
    if rng == 0.0:
        return 0.0
    return float(np.abs(resid).max() / rng)


@dataclass(frozen=True)
class SpecialPoints:
    """Left inflection, middle (extremum) and right inflection wavelengths [nm]."""

    left: float
    middle: float
    right: float


def special_points(lambdas: np.ndarray, values: np.ndarray) -> SpecialPoints:
    """Locate the special points of a single-peaked spectrum.

    The middle point sits at the minimum of the discrete second derivative;
    inflections are the nearest sign changes of the second derivative on
    each side, refined by linear interpolation of the zero crossing.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    values = np.asarray(values, dtype=float)
    if lambdas.size < 5:
        raise GridError("special points need at least 5 grid points")
    d2 = values[2:] - 2.0 * values[1:-1] + values[:-2]
    mid_idx = int(np.argmin(d2))
    middle = lambdas[mid_idx + 1]

    crossings: list[float] = []
    sign = np.sign(d2)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        x0, x1 = lambdas[i + 1], lambdas[i + 2]
        y0, y1 = d2[i], d2[i + 1]
        crossings.append(float(x0 + (x1 - x0) * y0 / (y0 - y1)))
    left = [x for x in crossings if x < middle]
    right = [x for x in crossings if x > middle]
    if not left or not right:
        raise GridError(
            f"no inflection in window on the {'left' if not left else 'right'} side"
        )
    return SpecialPoints(left=max(left), middle=float(middle), right=min(right))


def resolution(sensitivity_value: float, sigma: float) -> float:
    """Limit of detection sigma/S [RIU]; infinite when the sensitivity vanishes."""
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sensitivity_value == 0.0:
        return math.inf
    return sigma / sensitivity_value


def enhancement(fano_value: float, plasmon_value: float) -> float:
    if plasmon_value == 0.0:
        return math.inf
    return fano_value / plasmon_value


def locate_fano_feature(cfg: RunConfig, n: float, half_window: float = 0.5) -> dict:
    """Scan around the emitter line for the transparency dip and the peak.

    Returns dip and peak wavelengths [nm] from a 1e-3 nm coarse scan refined
    to 1e-5 nm around each extremum.
    """
    plasmon = cfg.derived(n)
    lam_ex = energy_to_wavelength(cfg.omega_ex())

    def m_of(lams: np.ndarray) -> np.ndarray:
        out = np.empty_like(lams)
        for k, lam in enumerate(lams):
            out[k] = _point_observables(cfg, plasmon, float(lam), n, "analytic")["m_mean"]
        return out

    coarse = grid_points(lam_ex - half_window, lam_ex + half_window, 1e-3)
    vals = m_of(coarse)
    i_dip, i_pk = int(np.argmin(vals)), int(np.argmax(vals))

    def refine(i: int, mode) -> float:
        lo = coarse[max(i - 2, 0)]
        hi = coarse[min(i + 2, coarse.size - 1)]
        fine = grid_points(lo, hi, 1e-5)
        fv = m_of(fine)
        return float(fine[int(mode(fv))])

    return {
        "lambda_ex": lam_ex,
        "dip": refine(i_dip, np.argmin),
        "peak": refine(i_pk, np.argmax),
    }


@dataclass
class RegionReport:
    """Sensing figures of merit for one spectral region."""

    region: str
    lambdas: np.ndarray
    m_mean: np.ndarray
    g2_0: np.ndarray
    s_i: np.ndarray
    s_ii: np.ndarray
    sigma_m: np.ndarray
    sigma_g2: np.ndarray
    dn_i: np.ndarray
    dn_ii: np.ndarray
    points: SpecialPoints
    point_values: dict[str, dict]


@dataclass
class SensingReport:
    plasmon: RegionReport
    fano: RegionReport | None
    enhancements: dict[str, float]
    dn_ii_argmin_nm: float
    argmin_at_left_inflection: bool
    fano_window_recentred: bool
    n_anchor: float
    n_values: np.ndarray
    scheme: str

    @property
    def partial(self) -> bool:
        """True when the interference region produced no special points."""
        return self.fano is None


def _region_report(
    cfg: RunConfig, window: tuple[float, float, float], region: str, anchor_scheme: str, jobs: int
) -> RegionReport:
    n_range = tuple(cfg["grids.n_range"])
    grid = SweepGrid.from_window(window, n_range, region)
    table = sweep(cfg, grid, engine="analytic", jobs=jobs)
    m = table.columns["m_mean"]
    g2 = table.columns["g2_0"]
    h_count = grid.n_values.size

    def dseries(mat: np.ndarray) -> np.ndarray:
        out = np.empty(grid.lambdas.size)
        for j in range(grid.lambdas.size):
            out[j] = sensitivity(grid.n_values, mat[:, j], anchor=anchor_scheme).value
        return out

    s_i = dseries(m)
    s_ii = dseries(g2)
    sigma_m = table.columns["sigma_m"][0, :]
    sigma_g2 = table.columns["sigma_g2"][0, :]
    dn_i = np.array([resolution(s, sg) for s, sg in zip(s_i, sigma_m)])
    dn_ii = np.array([resolution(s, sg) for s, sg in zip(s_ii, sigma_g2)])
    points = special_points(grid.lambdas, m[0, :])

    point_values: dict[str, dict] = {}
    plas = {n: cfg.derived(float(n)) for n in grid.n_values}
    for label, lam in zip(("L", "M", "R"), (points.left, points.middle, points.right)):
        m_series = np.empty(h_count)
        g2_series = np.empty(h_count)
        for i, n in enumerate(grid.n_values):
            obs = _point_observables(cfg, plas[n], lam, float(n), "analytic")
            m_series[i] = obs["m_mean"]
            g2_series[i] = obs["g2_0"]
        obs0 = _point_observables(cfg, plas[grid.n_values[0]], lam, float(grid.n_values[0]), "analytic")
        res_i = sensitivity(grid.n_values, m_series, anchor=anchor_scheme)
        res_ii = sensitivity(grid.n_values, g2_series, anchor=anchor_scheme)
        # both anchor conventions are reported; the primary scheme is the
        # one recorded in the report metadata
        alt = "midpoint" if anchor_scheme == "edge" else "edge"
        point_values[label] = {
            "lambda_nm": lam,
            "m_mean": obs0["m_mean"],
            "g2_0": obs0["g2_0"],
            "s_i": res_i.value,
            "s_i_richardson": res_i.richardson,
            f"s_i_{alt}": sensitivity(grid.n_values, m_series, anchor=alt).value,
            "s_ii": res_ii.value,
            "s_ii_richardson": res_ii.richardson,
            f"s_ii_{alt}": sensitivity(grid.n_values, g2_series, anchor=alt).value,
            "sigma_m": obs0["sigma_m"],
            "sigma_g2": obs0["sigma_g2"],
            "dn_i": resolution(res_i.value, obs0["sigma_m"]),
            "dn_ii": resolution(res_ii.value, obs0["sigma_g2"]),
            "linearity_m": res_i.linearity_dev,
            "linearity_g2": res_ii.linearity_dev,
        }
    return RegionReport(
        region=region,
        lambdas=grid.lambdas,
        m_mean=m[0, :],
        g2_0=g2[0, :],
        s_i=s_i,
        s_ii=s_ii,
        sigma_m=sigma_m,
        sigma_g2=sigma_g2,
        dn_i=dn_i,
        dn_ii=dn_ii,
        points=points,
        point_values=point_values,
    )


def build_sensing_report(cfg: RunConfig, jobs: int = 1, anchor_scheme: str = "edge") -> SensingReport:
    """Full sensing report over the plasmon and Fano regions.

    When the configured Fano window does not bracket the located Fano peak,
    the window is recentred on it (same width and step) and flagged.
    """
    n_range = tuple(cfg["grids.n_range"])
    n_anchor = n_range[0]
    plasmon_window = tuple(cfg["grids.plasmon_window_nm"])
    fano_window = tuple(cfg["grids.fano_window_nm"])

    feature = locate_fano_feature(cfg, n_anchor)
    recentred = False
    lo, hi, step = fano_window
    if not (lo + 2 * step < feature["peak"] < hi - 2 * step):
        center = feature["peak"]
        half = (hi - lo) / 2.0
        fano_window = (center - half, center + half, step)
        recentred = True

    plasmon_report = _region_report(cfg, plasmon_window, "plasmon", anchor_scheme, jobs)
    try:
        fano_report = _region_report(cfg, fano_window, "fano", anchor_scheme, jobs)
    except GridError:
        # no interference feature in the window: partial report
        fano_report = None

    enhancements: dict[str, float] = {}
    argmin_lam = math.nan
    coincides = False
    if fano_report is not None:
        for label in ("L", "M", "R"):
            pv, fv = plasmon_report.point_values[label], fano_report.point_values[label]
            enhancements[f"E_S{label}"] = enhancement(fv["s_i"], pv["s_i"])
            enhancements[f"E_dn{label}"] = enhancement(pv["dn_i"], fv["dn_i"])
        # g2-based sensing is restricted to the antibunched side of the feature
        anti = (fano_report.g2_0 < 1.0) & np.isfinite(fano_report.dn_ii)
        if np.any(anti):
            idx = int(np.flatnonzero(anti)[np.argmin(fano_report.dn_ii[anti])])
            argmin_lam = float(fano_report.lambdas[idx])
        fl = fano_report.points.left
        coincides = bool(abs(argmin_lam - fl) <= 2e-3) if math.isfinite(argmin_lam) else False

    return SensingReport(
        plasmon=plasmon_report,
        fano=fano_report,
        enhancements=enhancements,
        dn_ii_argmin_nm=argmin_lam,
        argmin_at_left_inflection=coincides,
        fano_window_recentred=recentred,
        n_anchor=n_anchor,
        n_values=grid_points(*n_range),
        scheme=anchor_scheme,
    )
