"""Matplotlib figure rendering for the CLI report paths."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fanosense"  # byte-identical reruns
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_spectrum(lambdas, series: dict[str, tuple], out: Path) -> Path:
    """Scattered-flux spectrum; series maps engine label to (flux, norm)."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True)
    for label, (flux, norm) in series.items():
        ax1.plot(lambdas, flux, label=label)
        ax2.plot(lambdas, norm, label=label)
    ax1.set_ylabel("flux [1/ps]")
    ax2.set_ylabel("flux / max")
    ax2.set_xlabel("wavelength [nm]")
    ax1.legend()
    return _save(fig, out)


def plot_correlations(taus, curves: dict[str, list[float]], out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, vals in curves.items():
        ax.plot(taus, vals, label=label)
    ax.axhline(1.0, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("delay [ps]")
    ax.set_ylabel("g$^{(n)}$($\\tau$)")
    ax.legend()
    return _save(fig, out)


def plot_sensing(report, out_dir: Path) -> list[Path]:
    """Sensitivity, noise and resolution panels for both regions."""
    paths = []
    regions = [report.plasmon] + ([report.fano] if report.fano is not None else [])
    for region in regions:
        fig, axes = plt.subplots(4, 1, figsize=(6.4, 9.0), sharex=True)
        lam = region.lambdas
        axes[0].plot(lam, region.m_mean)
        axes[0].set_ylabel("$\\langle m \\rangle$")
        axes[1].plot(lam, region.s_i)
        axes[1].set_ylabel("S$_I$ [1/RIU]")
        axes[2].plot(lam, region.sigma_m)
        axes[2].set_ylabel("$\\sigma_m$")
        axes[3].plot(lam, region.dn_i)
        axes[3].set_ylabel("$\\Delta n_I$ [RIU]")
        axes[3].set_xlabel("wavelength [nm]")
        for ax in axes:
            for x in (region.points.left, region.points.middle, region.points.right):
                ax.axvline(x, color="0.8", lw=0.7)
        path = out_dir / f"sense_{region.region}.svg"
        paths.append(_save(fig, path))
        if region.region == "fano":
            fig, axes = plt.subplots(3, 1, figsize=(6.4, 7.0), sharex=True)
            axes[0].plot(lam, region.s_ii)
            axes[0].set_ylabel("S$_{I-I}$ [1/RIU]")
            axes[1].plot(lam, region.sigma_g2)
            axes[1].set_ylabel("$\\sigma_{g^{(2)}}$")
            axes[2].plot(lam, region.dn_ii)
            axes[2].set_ylabel("$\\Delta n_{I-I}$ [RIU]")
            axes[2].set_xlabel("wavelength [nm]")
            path = out_dir / "sense_fano_g2.svg"
            paths.append(_save(fig, path))
    return paths
