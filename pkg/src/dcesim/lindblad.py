"""Master-equation integration for a squeezed cavity mode with damping.

The density matrix of the resonant mode evolves under

    drho/dt = xi [(a†)² - a², rho]
            + (Gamma/2) (2 n rho n - {n², rho})      (phase damping)
            + (gamma/2) (2 a rho a† - {n, rho})      (amplitude damping, T=0)

on a truncated number basis.  The free Hamiltonian Omega*a†a is absent
(interaction picture); the decay channel is zero temperature (no a† channel).
Truncation is monitored, not prevented: the population of the top Fock levels
is reported as ``leakage`` and a warning flag is set when it exceeds
``leak_max``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import fock
from ._kernels import apply_rhs
from .integrator import IntegrationError, integrate_adaptive

__all__ = [
    "ModelParams",
    "Trajectory",
    "IntegrationError",
    "lindblad_rhs",
    "evolve",
    "initial_state",
    "suggest_dim",
]

DIM_CAP = 256


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Squeezing rate, damping rates, initial occupation and output grid.

    Attributes
    ----------
    xi : float
        Squeezing rate (inverse time).
    gamma : float
        Amplitude damping rate, >= 0.
    Gamma : float
        Phase damping rate, >= 0.
    n0 : float
        Initial mean photon number, >= 0.
    t_grid : ndarray
        Strictly increasing output times starting at 0.
    dim : int or None
        Truncation dimension (>= 2); None defers to :func:`suggest_dim`.
    """

    xi: float
    gamma: float = 0.0
    Gamma: float = 0.0
    n0: float = 0.0
    t_grid: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))
    dim: int | None = None

    def __post_init__(self):
        if not np.isfinite(self.xi):
            raise ValueError("xi must be finite")
        if self.gamma < 0 or self.Gamma < 0:
            raise ValueError("damping rates must be >= 0")
        if self.n0 < 0:
            raise ValueError("n0 must be >= 0")
        grid = np.asarray(self.t_grid, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 1:
            raise ValueError("t_grid must be a 1-D array")
        if grid[0] != 0.0:
            raise ValueError("t_grid must start at 0")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("t_grid must be strictly increasing")
        object.__setattr__(self, "t_grid", grid)
        if self.dim is not None:
            if int(self.dim) < 2:
                raise ValueError("dim must be >= 2")
            object.__setattr__(self, "dim", int(self.dim))

    @property
    def resolved_dim(self) -> int:
        if self.dim is not None:
            return self.dim
        return suggest_dim(self.xi, self.n0, float(self.t_grid[-1]))


@dataclass
class Trajectory:
    """Observables and integrator diagnostics sampled on the output grid."""

    times: np.ndarray
    mean_n: np.ndarray
    s_moment: np.ndarray
    trace_err: np.ndarray
    herm_err: np.ndarray
    leakage: np.ndarray
    truncation_warning: bool
    rho_final: np.ndarray
    min_eig: float = math.nan
    n_steps: int = 0
    n_rhs: int = 0


def suggest_dim(xi: float, n0: float, t_max: float) -> int:
    """Default truncation: 16x headroom over the expected occupation
    max(32, ceil(16*(n0 + sinh²(2 xi t_max)))), capped at ``DIM_CAP``.

    The photon-number tail of a squeezed state decays geometrically, so a
    fixed multiple of the mean keeps the top-level population negligible;
    leakage remains the ground-truth check.
    """
    growth = math.sinh(2.0 * abs(xi) * t_max) ** 2
    return min(DIM_CAP, max(32, math.ceil(16.0 * (n0 + growth))))


def initial_state(p: ModelParams) -> np.ndarray:
    """Default initial density matrix: thermal (geometric) diagonal state with
    mean ``p.n0``; the vacuum for n0 = 0.  Diagonal states have s(0) = 0."""
    return fock.number_diagonal_density(fock.thermal_probs(p.n0, p.resolved_dim))


def lindblad_rhs(rho: np.ndarray, p: ModelParams) -> np.ndarray:
    """Time derivative of ``rho`` under the master equation.

    The result is Hermitian and traceless up to roundoff for Hermitian input;
    with gamma = Gamma = 0 it reduces to -i[H, rho] with the squeezing
    Hamiltonian H = i*xi*((a†)² - a²).
    """
    rho = np.asarray(rho, dtype=np.complex128)
    d = p.resolved_dim
    if rho.shape != (d, d):
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs dim {d}")
    return apply_rhs(np.ascontiguousarray(rho), p.xi, p.gamma, p.Gamma)


def _leak_levels(dim: int) -> int:
    return max(2, dim // 16)


def evolve(
    rho0: np.ndarray,
    p: ModelParams,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    leak_max: float = 1e-6,
    pos_check_interval: int = 0,
) -> Trajectory:
    """Integrate the master equation, sampling observables at ``p.t_grid``.

    The trace is never silently renormalized; its drift is reported in
    ``trace_err``.  After every accepted step the Hermitian part is kept and
    the norm of the discarded anti-Hermitian part is logged (``herm_err``
    holds the per-output-interval maximum).  ``leakage`` is the population of
    the top max(2, D/16) levels; exceeding ``leak_max`` anywhere sets
    ``truncation_warning`` instead of raising.

    Parameters
    ----------
    pos_check_interval : int
        If > 0, diagonalize every ``pos_check_interval``-th output state and
        record the smallest eigenvalue seen in ``Trajectory.min_eig``.

    Raises
    ------
    IntegrationError
        On step-size underflow, carrying the last good time.
    """
    d = p.resolved_dim
    rho0 = np.asarray(rho0, dtype=np.complex128)
    fock.validate_density_matrix(rho0)
    if rho0.shape != (d, d):
        raise ValueError(f"dimension mismatch: rho0 {rho0.shape} vs dim {d}")

    xi, gamma, big_gamma = p.xi, p.gamma, p.Gamma

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        return apply_rhs(y.reshape(d, d), xi, gamma, big_gamma).reshape(-1)

    def hermitize(y: np.ndarray) -> tuple[np.ndarray, float]:
        r = y.reshape(d, d)
        anti = 0.5 * (r - r.conj().T)
        discard = float(np.max(np.abs(anti)))
        return (r - anti).reshape(-1), discard

    result = integrate_adaptive(
        rhs,
        p.t_grid,
        rho0.reshape(-1),
        rtol=rel_tol,
        atol=abs_tol,
        postprocess=hermitize,
    )

    n_out = result.times.size
    levels = np.arange(d, dtype=np.float64)
    k = np.arange(d - 2)
    c2 = np.sqrt((k + 1.0) * (k + 2.0))
    n_leak = _leak_levels(d)

    mean_n = np.empty(n_out)
    s_mom = np.empty(n_out)
    trace_err = np.empty(n_out)
    leakage = np.empty(n_out)
    min_eig = math.inf if pos_check_interval > 0 else math.nan

    for i in range(n_out):
        r = result.states[i].reshape(d, d)
        diag = np.real(np.diagonal(r))
        mean_n[i] = float(levels @ diag)
        s_mom[i] = float(2.0 * np.real(c2 @ np.diagonal(r, offset=-2)))
        trace_err[i] = abs(diag.sum() - 1.0)
        leakage[i] = float(diag[d - n_leak :].sum())
        if pos_check_interval > 0 and i % pos_check_interval == 0:
            min_eig = min(min_eig, float(np.linalg.eigvalsh(r).min()))

    truncated = bool(np.any(leakage > leak_max))
    if truncated:
        warnings.warn(
            f"truncation leakage exceeded {leak_max:g} "
            f"(max {leakage.max():g}); increase dim",
            RuntimeWarning,
            stacklevel=2,
        )

    return Trajectory(
        times=result.times,
        mean_n=mean_n,
        s_moment=s_mom,
        trace_err=trace_err,
        herm_err=result.post_discard,
        leakage=leakage,
        truncation_warning=truncated,
        rho_final=result.states[-1].reshape(d, d).copy(),
        min_eig=min_eig if pos_check_interval > 0 else math.nan,
        n_steps=result.n_steps,
        n_rhs=result.n_rhs,
    )
