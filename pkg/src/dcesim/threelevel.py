"""Three-level medium model: exact amplitude dynamics and its slow-field limits.

A localized electron occupies levels a (ground), b (laser-coupled excited) and
c (gap delta_omega above b); a strong drive couples a<->b with Rabi frequency
rabi(t) and a weak slow test field E(t) couples b<->c with dipole strength
kappa.  The amplitudes obey the equations of motion obtained by varying the
conjugate amplitudes in the time-dependent Lagrangian

    L = i(psi_a* dpsi_a + psi_b* dpsi_b + psi_c* dpsi_c) - delta_omega |psi_c|²
        + (kappa E(t) psi_b* psi_c + rabi(t) psi_a* psi_b + h.c.),

namely (kappa and E taken real; rabi may be complex)

    i dpsi_a/dt = -rabi(t) psi_b
    i dpsi_b/dt = -conj(rabi(t)) psi_a - kappa E(t) psi_c
    i dpsi_c/dt = delta_omega psi_c - kappa E(t) psi_b.

The evolution is unitary, so the norm is conserved.  For E slowly varying the
c-amplitude follows adiabatically, psi_c ~ kappa E psi_b / delta_omega, which
gives the test field an effective permittivity 1 + 2|psi_b|² kappa²/delta_omega.

Order-of-magnitude estimators (noise energy per cycle, decoherence photon
threshold) are implemented with unit prefactor and must be labelled as such in
any report.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .integrator import integrate_adaptive

__all__ = [
    "ThreeLevelParams",
    "three_level_rhs",
    "integrate_three_level",
    "ThreeLevelTrajectory",
    "adiabatic_psi_c",
    "effective_permittivity",
    "rabi_amplitude",
    "stark_shift",
    "xi_from_geometry",
    "noise_energy_estimate",
    "decoherence_photon_threshold",
]

TimeFunc = Callable[[float], complex]


def _as_callable(value: Union[float, complex, TimeFunc]) -> TimeFunc:
    if callable(value):
        return value
    const = complex(value)
    return lambda _t: const


@dataclass(frozen=True)
class ThreeLevelParams:
    """Couplings of the three-level system.

    Attributes
    ----------
    delta_omega : float
        Energy gap between levels b and c (angular frequency), > 0.
    kappa : float
        Dipole coupling of the test field to the b<->c transition.
    rabi : float or callable
        Drive Rabi frequency Omega_R(t); a constant is promoted to a constant
        function.
    field : float or callable
        Test field E(t); likewise promoted.
    """

    delta_omega: float
    kappa: float = 0.0
    rabi: Union[float, complex, TimeFunc] = 0.0
    field: Union[float, TimeFunc] = 0.0

    def __post_init__(self):
        if self.delta_omega <= 0:
            raise ValueError("delta_omega must be > 0")
        object.__setattr__(self, "rabi", _as_callable(self.rabi))
        object.__setattr__(self, "field", _as_callable(self.field))


def three_level_rhs(psi: np.ndarray, t: float, p: ThreeLevelParams) -> np.ndarray:
    """Time derivative of the amplitude triple (psi_a, psi_b, psi_c)."""
    rab = p.rabi(t)
    ke = p.kappa * np.real(p.field(t))
    return np.array(
        [
            1j * rab * psi[1],
            1j * (np.conj(rab) * psi[0] + ke * psi[2]),
            1j * (ke * psi[1] - p.delta_omega * psi[2]),
        ],
        dtype=np.complex128,
    )


@dataclass
class ThreeLevelTrajectory:
    times: np.ndarray
    psi: np.ndarray  # (len(times), 3) complex amplitudes
    norm_err: np.ndarray  # | |psi|² - |psi(0)|² | per sample


def integrate_three_level(
    psi0: np.ndarray,
    p: ThreeLevelParams,
    t_grid: np.ndarray,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-13,
    linear_response_guard: float = 0.1,
) -> ThreeLevelTrajectory:
    """Integrate the amplitude equations, sampling at ``t_grid``.

    Warns when max|psi_c| exceeds ``linear_response_guard`` times max|psi_b|
    over the run, since the effective-permittivity picture assumes the
    c-amplitude stays perturbative.
    """
    psi0 = np.asarray(psi0, dtype=np.complex128).reshape(3)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return three_level_rhs(y, t, p)

    result = integrate_adaptive(rhs, t_grid, psi0, rtol=rel_tol, atol=abs_tol)
    psi = result.states
    norm0 = float(np.sum(np.abs(psi0) ** 2))
    norm_err = np.abs(np.sum(np.abs(psi) ** 2, axis=1) - norm0)

    max_b = float(np.max(np.abs(psi[:, 1])))
    max_c = float(np.max(np.abs(psi[:, 2])))
    if max_c > linear_response_guard * max_b:
        warnings.warn(
            f"linear-response regime violated: max|psi_c| = {max_c:.3g} exceeds "
            f"{linear_response_guard:g} * max|psi_b| = {linear_response_guard * max_b:.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return ThreeLevelTrajectory(result.times, psi, norm_err)


def adiabatic_psi_c(psi_b: complex, field: float, p: ThreeLevelParams) -> complex:
    """Adiabatic c-amplitude kappa E psi_b / delta_omega (valid when the field
    varies slowly compared to 1/delta_omega)."""
    return p.kappa * field * psi_b / p.delta_omega


def effective_permittivity(psi_b: complex, p: ThreeLevelParams) -> float:
    """Effective permittivity seen by the test field:
    1 + 2 |psi_b|² kappa² / delta_omega."""
    return 1.0 + 2.0 * abs(psi_b) ** 2 * p.kappa**2 / p.delta_omega


def rabi_amplitude(t, rabi_freq: float):
    """Driven b-amplitude under a constant-intensity beam: cos(rabi_freq * t)."""
    return np.cos(rabi_freq * np.asarray(t, dtype=np.float64))


def stark_shift(field: float, dipole_bc: float, gap: float) -> float:
    """Second-order level shift |dipole_bc * E|² / gap of the b level due to
    mixing with c (first order vanishes in the dipole approximation).

    ``gap`` is the unperturbed energy difference E_b - E_c, i.e. -delta_omega
    for the level ordering used here; its sign carries the sign of the shift.
    """
    if gap == 0.0:
        raise ValueError("degenerate levels: gap must be nonzero")
    return abs(dipole_bc * field) ** 2 / gap


def xi_from_geometry(
    k_par: float, omega: float, slab: float, cavity_len: float, chi: float
) -> float:
    """Squeezing rate of a cavity driven by an oscillating thin dielectric
    slab: (1/2) (k_par²/omega) (slab/cavity_len) chi."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if cavity_len <= 0:
        raise ValueError("cavity_len must be > 0")
    return 0.5 * (k_par**2 / omega) * (slab / cavity_len) * chi


def noise_energy_estimate(n_photons: int, xi: float) -> float:
    """Order-of-magnitude noise energy per drive cycle from spontaneous decays,
    N * xi with unit prefactor.  Label as order-of-magnitude in any output."""
    if n_photons < 0:
        raise ValueError("photon number must be >= 0")
    return float(n_photons) * xi


def decoherence_photon_threshold(m_laser: int, omega: float, xi: float) -> float:
    """Order-of-magnitude photon number above which decay-induced measurement
    back-action matters: sqrt(M) * omega / xi with unit prefactor."""
    if m_laser < 0:
        raise ValueError("laser photon number must be >= 0")
    if xi <= 0:
        raise ValueError("xi must be > 0")
    return np.sqrt(float(m_laser)) * omega / xi
