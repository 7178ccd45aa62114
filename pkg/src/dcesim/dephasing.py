"""Pure phase damping and the measurement-interrupted squeezing model.

Without squeezing or decay, phase damping acts elementwise in the number
basis, rho[m, n](t) = rho[m, n](0) * exp(-(Gamma/2)(m-n)² t): a Gaussian
suppression of coherences that leaves populations untouched.  Its strong-
measurement limit is the projection onto the diagonal.

The measurement-interrupted model alternates unitary squeezing intervals
(Bogoliubov transformation a -> alpha a + beta a† with alpha = cosh(2 xi dt),
beta = sinh(2 xi dt)) with number projections.  For a number-diagonal state a
squeezing interval raises the occupation by |beta|²(1 + 2n), so each round
multiplies n + 1/2 by exactly 1 + 2|beta|² = cosh(4 xi dt).  With the interval
identified as dt = c/Gamma this reproduces the reduced growth exponent
8 xi²/Gamma of the fast-dephasing limit (for xi dt << 1); the proportionality
constant c is left to the caller rather than baked in.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import fock
from .lindblad import ModelParams, evolve

__all__ = [
    "BogoliubovCoeffs",
    "dephase_map",
    "project_diagonal",
    "squeeze_bogoliubov",
    "measured_step",
    "gedanken_evolution",
    "gedanken_density_evolution",
    "vacuum_vs_resonance_split",
]


class BogoliubovCoeffs(NamedTuple):
    alpha: complex
    beta: complex

    @property
    def beta_sq(self) -> float:
        return abs(self.beta) ** 2


def dephase_map(rho0: np.ndarray, Gamma: float, t: float) -> np.ndarray:
    """Apply the pure-dephasing channel for time t.

    Diagonal entries are returned bitwise unchanged; coherences are damped by
    exp(-(Gamma/2)(m-n)² t).
    """
    if Gamma < 0 or t < 0:
        raise ValueError("Gamma and t must be >= 0")
    rho0 = np.asarray(rho0, dtype=np.complex128)
    d = rho0.shape[0]
    m = np.arange(d, dtype=np.float64)
    decay = np.exp(-0.5 * Gamma * t * (m[:, None] - m[None, :]) ** 2)
    return rho0 * decay


def project_diagonal(rho: np.ndarray) -> np.ndarray:
    """Zero all coherences (decisive number measurement); trace is preserved
    exactly and the result commutes with the number operator."""
    rho = np.asarray(rho, dtype=np.complex128)
    out = np.zeros_like(rho)
    np.fill_diagonal(out, np.diagonal(rho))
    return out


def squeeze_bogoliubov(xi: float, dt: float) -> BogoliubovCoeffs:
    """Bogoliubov coefficients of a squeezing interval of length dt.

    Real positive convention (cosh, sinh); only |beta|² enters any observable
    here, so the phase choice is free and fixed for determinism.  The bosonic
    unitarity |alpha|² - |beta|² = 1 holds identically.
    """
    arg = 2.0 * xi * dt
    return BogoliubovCoeffs(complex(math.cosh(arg)), complex(math.sinh(arg)))


def measured_step(n: float, xi: float, dt: float) -> float:
    """One squeeze-then-measure round on a number-diagonal state:
    n -> n + |beta|²(1 + 2n)."""
    beta_sq = math.sinh(2.0 * xi * dt) ** 2
    return n + beta_sq * (1.0 + 2.0 * n)


def gedanken_evolution(n0: float, xi: float, dt: float, steps: int) -> np.ndarray:
    """Iterate :func:`measured_step`; returns n at steps 0..steps.

    The late-time log-slope of n + 1/2 per unit time is
    ln(cosh(4 xi dt))/dt ~ 8 xi² dt for xi dt << 1.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    out = np.empty(steps + 1)
    out[0] = n0
    growth = math.cosh(4.0 * xi * dt)
    for i in range(steps):
        out[i + 1] = (out[i] + 0.5) * growth - 0.5
    return out


def gedanken_density_evolution(
    dim: int,
    xi: float,
    dt: float,
    steps: int,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-13,
) -> np.ndarray:
    """Full density-matrix version of the measurement-interrupted model.

    Starting from the vacuum, alternate master-equation squeezing intervals
    (gamma = Gamma = 0) with diagonal projections; returns the <n> sequence,
    which tracks :func:`gedanken_evolution` up to truncation error.
    """
    rho = fock.number_diagonal_density(fock.thermal_probs(0.0, dim))
    p = ModelParams(xi=xi, t_grid=np.array([0.0, dt]), dim=dim)
    out = np.empty(steps + 1)
    out[0] = fock.mean_n(rho)
    for i in range(steps):
        traj = evolve(rho, p, rel_tol=rel_tol, abs_tol=abs_tol)
        rho = project_diagonal(traj.rho_final)
        out[i + 1] = fock.mean_n(rho)
    return out


def vacuum_vs_resonance_split(n: float, beta_sq: float) -> tuple[float, float]:
    """Split one round's occupation gain into the vacuum part |beta|² and the
    resonance part 2|beta|² n; the two sum to the :func:`measured_step`
    increment."""
    if n < 0 or beta_sq < 0:
        raise ValueError("n and beta_sq must be >= 0")
    return beta_sq, 2.0 * beta_sq * n
