"""Numerical open-system solver on a truncated Fock x two-level space.

Builds the rotating-frame Hamiltonian and the Lindblad generator as dense
complex matrices, solves for the steady state by a bordered linear solve,
propagates operator-dressed density matrices with the matrix exponential and
evaluates delayed correlation functions through the regression formula.

Internally the generator is kept in energy units (meV); propagation over a
delay tau [ps] applies expm(L tau / hbar).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, expm, solve

from .constants import HBAR_MEV_PS
from .errors import DegenerateFluxError, SteadyStateError
from .materials import DerivedPlasmon, DriveParams


@dataclass(frozen=True)
class HilbertSpace:
    """Truncated plasmon Fock space tensored with the two-level emitter."""

    fock_dim: int
    qd_dim: int = 2

    def __post_init__(self):
        if self.fock_dim < 2:
            raise ValueError(f"fock_dim must be >= 2, got {self.fock_dim}")
        if self.qd_dim != 2:
            raise ValueError("the emitter is a two-level system")

    @property
    def dim(self) -> int:
        return self.fock_dim * self.qd_dim


def identity(space: HilbertSpace) -> np.ndarray:
    return np.eye(space.dim, dtype=complex)


def destroy(space: HilbertSpace) -> np.ndarray:
    """Plasmon annihilation operator a on the composite space."""
    af = np.diag(np.sqrt(np.arange(1, space.fock_dim, dtype=float)), 1).astype(complex)
    return np.kron(af, np.eye(space.qd_dim, dtype=complex))


def qd_lower(space: HilbertSpace) -> np.ndarray:
    """Emitter lowering operator sigma = |0><1| on the composite space."""
    s = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    return np.kron(np.eye(space.fock_dim, dtype=complex), s)


def qd_z(space: HilbertSpace) -> np.ndarray:
    sz = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
    return np.kron(np.eye(space.fock_dim, dtype=complex), sz)


def fock_projector(space: HilbertSpace, level: int) -> np.ndarray:
    """Projector onto plasmon number state |level>."""
    p = np.zeros((space.fock_dim, space.fock_dim), dtype=complex)
    p[level, level] = 1.0
    return np.kron(p, np.eye(space.qd_dim, dtype=complex))


def build_hamiltonian(
    space: HilbertSpace,
    delta_pl: float,
    delta_ex: float,
    g: float,
    omega_rabi_ex: float,
    omega_rabi_pl: float,
) -> np.ndarray:
    """Rotating-frame Hamiltonian [meV].

    H = d_pl a^dag a + d_ex s^dag s - g (s a^dag + s^dag a)
        - Omega_ex (s + s^dag) - Omega_pl (a + a^dag)
    """
    a = destroy(space)
    s = qd_lower(space)
    ad, sd = a.conj().T, s.conj().T
    return (
        delta_pl * (ad @ a)
        + delta_ex * (sd @ s)
        - g * (s @ ad + sd @ a)
        - omega_rabi_ex * (s + sd)
        - omega_rabi_pl * (a + ad)
    )


def build_liouvillian(
    hamiltonian: np.ndarray, collapse: list[tuple[float, np.ndarray]]
) -> np.ndarray:
    """Vectorized Lindblad generator [meV] acting on column-stacked rho.

    d(vec rho)/dt * hbar = L vec(rho) with
    L = -i (I. H - H^T . I) + sum_j gamma_j/2 (2 cbar.c - I.c^dag c - (c^dag c)^T . I).
    """
    d = hamiltonian.shape[0]
    eye = np.eye(d, dtype=complex)
    L = -1j * (np.kron(eye, hamiltonian) - np.kron(hamiltonian.T, eye))
    for rate, c in collapse:
        if rate < 0.0:
            raise ValueError(f"collapse rate must be >= 0, got {rate}")
        cdc = c.conj().T @ c
        L += rate / 2.0 * (
            2.0 * np.kron(c.conj(), c) - np.kron(eye, cdc) - np.kron(cdc.T, eye)
        )
    return L


@dataclass(frozen=True, eq=False)
class QuantumSystem:
    """Immutable bundle of operators and generator for one driving point.

    The emission operator defaults to sqrt(gamma_r) a; with
    include_qd_emission the sqrt(gamma_ex) sigma channel is added.
    """

    space: HilbertSpace
    hamiltonian: np.ndarray
    liouvillian: np.ndarray
    a: np.ndarray
    sigma: np.ndarray
    emission_op: np.ndarray
    gamma_pl: float
    gamma_ex: float
    gamma_r: float
    include_qd_emission: bool = False
    _cache: dict = field(default_factory=dict, repr=False)


def build_system(
    plasmon: DerivedPlasmon,
    drive: DriveParams,
    fock_dim: int = 10,
    include_qd_emission: bool = False,
) -> QuantumSystem:
    """Assemble the truncated open system for one driving energy."""
    space = HilbertSpace(fock_dim)
    a = destroy(space)
    s = qd_lower(space)
    H = build_hamiltonian(
        space,
        delta_pl=drive.delta_pl(plasmon.omega_pl),
        delta_ex=drive.delta_ex,
        g=plasmon.g,
        omega_rabi_ex=drive.Omega_ex,
        omega_rabi_pl=drive.Omega_pl,
    )
    L = build_liouvillian(H, [(plasmon.gamma_pl, a), (drive.gamma_ex, s)])
    b = np.sqrt(plasmon.gamma_r) * a
    if include_qd_emission:
        b = b + np.sqrt(drive.gamma_ex) * s
    return QuantumSystem(
        space=space,
        hamiltonian=H,
        liouvillian=L,
        a=a,
        sigma=s,
        emission_op=b,
        gamma_pl=plasmon.gamma_pl,
        gamma_ex=drive.gamma_ex,
        gamma_r=plasmon.gamma_r,
        include_qd_emission=include_qd_emission,
    )


def vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return v.reshape((d, d), order="F")


def steady_state(liouvillian: np.ndarray, residual_tol: float = 1e-10) -> np.ndarray:
    """Steady density matrix of the generator by a bordered solve.

    The first row of L is replaced by the vectorized trace functional and
    the system solved against a unit right-hand side; the result is
    Hermitized and renormalized. Requires a one-dimensional kernel.
    """
    n2 = liouvillian.shape[0]
    d = int(round(np.sqrt(n2)))
    bordered = liouvillian.copy()
    # trace row scaled to the generator magnitude for row equilibration
    scale = max(1.0, float(np.abs(liouvillian).max()))
    trace_row = np.zeros(n2, dtype=complex)
    trace_row[np.arange(d) * d + np.arange(d)] = scale
    bordered[0, :] = trace_row
    rhs = np.zeros(n2, dtype=complex)
    rhs[0] = scale
    try:
        # stiff rate ratios trip scipy's conditioning heuristic; accuracy is
        # enforced below by the explicit residual bound instead
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            x = solve(bordered, rhs)
    except LinAlgError as exc:
        raise SteadyStateError(f"degenerate steady state: {exc}") from exc
    rho = unvec(x)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise SteadyStateError("steady-state solve returned a traceless matrix")
    rho /= tr
    residual = np.linalg.norm(liouvillian @ vec(rho))
    if residual > residual_tol:
        raise SteadyStateError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.1e}"
        )
    return rho


def solve_steady_state(system: QuantumSystem, residual_tol: float = 1e-10) -> np.ndarray:
    rho = system._cache.get("rho_ss")
    if rho is None:
        rho = steady_state(system.liouvillian, residual_tol)
        system._cache["rho_ss"] = rho
    return rho


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    """Tr(op rho)."""
    if op.shape != rho.shape:
        raise ValueError(f"dimension mismatch: {op.shape} vs {rho.shape}")
    return complex(np.trace(op @ rho))


def propagate(liouvillian: np.ndarray, x: np.ndarray, tau_ps: float) -> np.ndarray:
    """Evolve an operator-dressed matrix for tau_ps picoseconds."""
    if tau_ps < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau_ps}")
    if tau_ps == 0.0:
        return x.copy()
    prop = expm(liouvillian * (tau_ps / HBAR_MEV_PS))
    return unvec(prop @ vec(x))


def density_matrix_checks(rho: np.ndarray) -> dict:
    """Trace, Hermiticity and positivity diagnostics of a density matrix."""
    herm_dev = float(np.abs(rho - rho.conj().T).max())
    trace_dev = float(abs(np.trace(rho) - 1.0))
    eigmin = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    return {"trace_dev": trace_dev, "herm_dev": herm_dev, "min_eigenvalue": eigmin}


def top_fock_population(rho: np.ndarray, space: HilbertSpace) -> float:
    """Population of the highest retained number state (truncation probe)."""
    return float(expectation(fock_projector(space, space.fock_dim - 1), rho).real)


def liouvillian_spectrum_stats(liouvillian: np.ndarray, zero_tol: float = 1e-9) -> dict:
    """Largest eigenvalue real part [meV] and kernel multiplicity."""
    ev = np.linalg.eigvals(liouvillian)
    return {
        "max_real": float(ev.real.max()),
        "n_zero_modes": int(np.sum(np.abs(ev) < zero_tol)),
    }


def zero_delay_correlation(rho: np.ndarray, b: np.ndarray, order: int) -> float:
    """Static normally ordered correlation g^(n)(0) from a density matrix."""
    bd = b.conj().T
    flux = expectation(bd @ b, rho).real
    if flux <= 0.0:
        raise DegenerateFluxError("zero flux: correlation normalization undefined")
    num_op = np.linalg.matrix_power(bd, order) @ np.linalg.matrix_power(b, order)
    return expectation(num_op, rho).real / flux**order


def correlation_tau(
    system: QuantumSystem,
    rho_ss: np.ndarray,
    order: int,
    tau_grid_ps: np.ndarray,
) -> np.ndarray:
    """Delayed correlation g^(n)(tau) on a tau grid [ps] via regression.

    G^(n)(tau) = Tr[(b^dag b)^{(n-1) normally ordered} V(tau)(b rho b^dag)]
    normalized by <b^dag b>^n. A uniform grid reuses a single exponential
    step; a non-uniform grid pays one expm per interval.
    """
    if order not in (2, 3, 4):
        raise ValueError(f"order must be 2, 3 or 4, got {order}")
    taus = np.asarray(tau_grid_ps, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("tau grid must be a non-empty 1-D array")
    if np.any(np.diff(taus) < 0.0) or taus[0] < 0.0:
        raise ValueError("tau grid must be non-negative and non-decreasing")

    b = system.emission_op
    bd = b.conj().T
    flux = expectation(bd @ b, rho_ss).real
    if flux <= 0.0:
        raise DegenerateFluxError("zero flux: correlation normalization undefined")
    probe = np.linalg.matrix_power(bd, order - 1) @ np.linalg.matrix_power(b, order - 1)

    x = vec(b @ rho_ss @ bd)
    L = system.liouvillian
    out = np.empty_like(taus)
    steps = np.diff(taus, prepend=taus[0])
    uniform = taus.size > 2 and np.allclose(np.diff(taus), steps[1], rtol=1e-12, atol=1e-15)
    prop_step = expm(L * (steps[1] / HBAR_MEV_PS)) if uniform and steps[1] > 0 else None
    if taus[0] > 0.0:
        x = vec(propagate(L, unvec(x), taus[0]))
    for i, dt in enumerate(steps):
        if i > 0 and dt > 0.0:
            if prop_step is not None:
                x = prop_step @ x
            else:
                x = vec(propagate(L, unvec(x), dt))
        out[i] = expectation(probe, unvec(x)).real / flux**order
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    fock_dim: int
    n_photon: float
    g2_0: float
    top_fock_population: float
    rel_delta_n: float | None
    rel_delta_g2: float | None


@dataclass(frozen=True)
class ConvergenceReport:
    rows: list[ConvergenceRow]
    tol: float

    @property
    def converged(self) -> bool:
        tail = [r for r in self.rows[1:]]
        return all(
            r.rel_delta_n is not None
            and r.rel_delta_n < self.tol
            and r.rel_delta_g2 < self.tol
            for r in tail
        )


def convergence_check(
    plasmon: DerivedPlasmon,
    drive: DriveParams,
    fock_dims: list[int],
    tol: float = 1e-4,
    include_qd_emission: bool = False,
) -> ConvergenceReport:
    """Track <a^dag a> and g2(0) across truncation sizes.

    Flags non-convergence when successive relative changes exceed tol.
    """
    if len(fock_dims) < 2:
        raise ValueError("need at least two truncation sizes")
    rows: list[ConvergenceRow] = []
    prev_n = prev_g2 = None
    for nd in fock_dims:
        system = build_system(plasmon, drive, fock_dim=nd, include_qd_emission=include_qd_emission)
        rho = solve_steady_state(system)
        a, ad = system.a, system.a.conj().T
        n_phot = expectation(ad @ a, rho).real
        g2 = zero_delay_correlation(rho, system.emission_op, 2)
        rows.append(
            ConvergenceRow(
                fock_dim=nd,
                n_photon=n_phot,
                g2_0=g2,
                top_fock_population=top_fock_population(rho, system.space),
                rel_delta_n=None if prev_n is None else abs(n_phot - prev_n) / abs(n_phot),
                rel_delta_g2=None if prev_g2 is None else abs(g2 - prev_g2) / abs(g2),
            )
        )
        prev_n, prev_g2 = n_phot, g2
    return ConvergenceReport(rows=rows, tol=tol)


def lindblad_observables(
    plasmon: DerivedPlasmon,
    drive: DriveParams,
    fock_dim: int = 10,
    include_qd_emission: bool = False,
) -> dict:
    """Steady-state observables needed by sweeps: n_photon and g^(n)(0)."""
    system = build_system(plasmon, drive, fock_dim, include_qd_emission)
    rho = solve_steady_state(system)
    ad_a = system.a.conj().T @ system.a
    n_phot = expectation(ad_a, rho).real
    b = system.emission_op
    out = {"n_photon": n_phot, "top_fock_population": top_fock_population(rho, system.space)}
    for order in (2, 3, 4):
        try:
            out[f"g{order}_0"] = zero_delay_correlation(rho, b, order)
        except DegenerateFluxError:
            out[f"g{order}_0"] = float("nan")
    return out
