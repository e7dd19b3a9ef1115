"""Hybrid metal-nanoparticle / quantum-emitter refractive-index sensing model.

Classical plasmonic derivations, semiclassical and Lindblad steady states,
photon-counting statistics and sensitivity/resolution reports.
"""

from .analytic import ModifiedEmitter, SteadyState
from .analytic import steady_state as analytic_steady_state
from .config import DEFAULT_CONFIG, RunConfig
from .lindblad import (
    HilbertSpace,
    QuantumSystem,
    build_system,
    correlation_tau,
    solve_steady_state,
)
from .materials import (
    DerivedPlasmon,
    DriveParams,
    DrudeMetal,
    Environment,
    Geometry,
    derive_plasmon,
    make_drive,
)
from .photodetection import CountStats, Detector, count_stats
from .sensing import SensingReport, SweepGrid, build_sensing_report, sweep

__version__ = "0.1.0"

__all__ = [
    "CountStats",
    "DEFAULT_CONFIG",
    "DerivedPlasmon",
    "Detector",
    "DriveParams",
    "DrudeMetal",
    "Environment",
    "Geometry",
    "HilbertSpace",
    "ModifiedEmitter",
    "QuantumSystem",
    "RunConfig",
    "SensingReport",
    "SteadyState",
    "SweepGrid",
    "analytic_steady_state",
    "build_sensing_report",
    "build_system",
    "correlation_tau",
    "count_stats",
    "derive_plasmon",
    "make_drive",
    "solve_steady_state",
    "sweep",
]
