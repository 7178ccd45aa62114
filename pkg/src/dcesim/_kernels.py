"""Elementwise master-equation kernels on the truncated number basis.

For the generator

    drho/dt = xi [(a†)² - a², rho]
            + (Gamma/2) (2 n rho n - {n², rho})
            + (gamma/2) (2 a rho a† - {n, rho})

every term is banded in the number basis, so the action on rho reduces to an
O(D²) stencil instead of O(D³) matrix products:

    out[m, n] = xi * ( c[m-2] rho[m-2, n] - c[m] rho[m+2, n]
                     - c[n] rho[m, n+2] + c[n-2] rho[m, n-2] )
              - ( Gamma/2 (m-n)² + gamma/2 (m+n) ) rho[m, n]
              + gamma g[m] g[n] rho[m+1, n+1]

with c[k] = sqrt((k+1)(k+2)) and g[k] = sqrt(k+1).  Out-of-range shifts are
zero, which reproduces the truncated operators exactly, so the stencil is the
Lindblad generator built from the truncated a and n (completely positive and
trace preserving on the truncated space).

Two implementations are provided: a numba ``@njit`` loop and a sliced numpy
version.  ``apply_rhs`` dispatches to the backend chosen in :mod:`._accel`.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._accel import HAVE_NUMBA, njit


@lru_cache(maxsize=32)
def coupling_tables(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Two-photon couplings c[k] = sqrt((k+1)(k+2)) (zero padded at the top
    two levels) and one-photon couplings g[k] = sqrt(k+1), both length dim."""
    k = np.arange(dim, dtype=np.float64)
    c = np.sqrt((k + 1.0) * (k + 2.0))
    c[dim - 2 :] = 0.0
    g = np.sqrt(k + 1.0)
    return c, g


@lru_cache(maxsize=32)
def _decay_tables(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(m-n)², (m+n) and g[m]g[n] coefficient grids for the numpy path."""
    m = np.arange(dim, dtype=np.float64)
    diff2 = (m[:, None] - m[None, :]) ** 2
    summ = m[:, None] + m[None, :]
    _, g = coupling_tables(dim)
    gain = np.outer(g, g)
    return diff2, summ, gain


def rhs_numpy(
    rho: np.ndarray, xi: float, gamma: float, big_gamma: float
) -> np.ndarray:
    """Vectorized stencil evaluation (pure-numpy backend)."""
    d = rho.shape[0]
    diff2, summ, gain = _decay_tables(d)
    c, _ = coupling_tables(d)
    out = (-0.5 * big_gamma) * diff2 * rho
    if gamma != 0.0:
        out -= (0.5 * gamma) * summ * rho
        out[:-1, :-1] += gamma * gain[:-1, :-1] * rho[1:, 1:]
    if xi != 0.0:
        cc = c[: d - 2]
        out[2:, :] += xi * cc[:, None] * rho[:-2, :]
        out[:-2, :] -= xi * cc[:, None] * rho[2:, :]
        out[:, :-2] -= xi * cc[None, :] * rho[:, 2:]
        out[:, 2:] += xi * cc[None, :] * rho[:, :-2]
    return out


@njit(cache=True)
def _rhs_loops(rho, xi, gamma, big_gamma, c, g):  # pragma: no cover - jitted
    d = rho.shape[0]
    out = np.empty_like(rho)
    for m in range(d):
        for n in range(d):
            dmn = m - n
            acc = -(0.5 * big_gamma * dmn * dmn + 0.5 * gamma * (m + n)) * rho[m, n]
            if gamma != 0.0 and m + 1 < d and n + 1 < d:
                acc += gamma * g[m] * g[n] * rho[m + 1, n + 1]
            if xi != 0.0:
                if m >= 2:
                    acc += xi * c[m - 2] * rho[m - 2, n]
                if m + 2 < d:
                    acc -= xi * c[m] * rho[m + 2, n]
                if n + 2 < d:
                    acc -= xi * c[n] * rho[m, n + 2]
                if n >= 2:
                    acc += xi * c[n - 2] * rho[m, n - 2]
            out[m, n] = acc
    return out


def rhs_numba(
    rho: np.ndarray, xi: float, gamma: float, big_gamma: float
) -> np.ndarray:
    """Numba loop-kernel evaluation; only callable when numba is active."""
    if not HAVE_NUMBA:
        raise RuntimeError("numba backend not available (see DCESIM_NUMBA)")
    c, g = coupling_tables(rho.shape[0])
    return _rhs_loops(rho, float(xi), float(gamma), float(big_gamma), c, g)


if HAVE_NUMBA:

    def apply_rhs(rho, xi, gamma, big_gamma):
        c, g = coupling_tables(rho.shape[0])
        return _rhs_loops(rho, float(xi), float(gamma), float(big_gamma), c, g)

else:
    apply_rhs = rhs_numpy
