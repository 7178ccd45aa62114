"""Operators and states on a truncated number-state (Fock) basis.

All operators are dense complex matrices acting on the lowest ``dim`` Fock
states; the top level has no outgoing creation amplitude, so truncation shows
up only in the last row/column (e.g. the commutator [a, a†] deviates from the
identity in its bottom-right entry alone).  Dimensions up to a few hundred are
intended; everything is plain ``numpy.ndarray`` with dtype complex128.
"""

from __future__ import annotations

import numpy as np

# Default validation tolerances: double-precision roundoff floor with headroom.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_POS = 1e-8


def _check_dim(dim: int) -> int:
    dim = int(dim)
    if dim < 2:
        raise ValueError(f"Fock-space dimension must be >= 2, got {dim}")
    return dim


def annihilation(dim: int) -> np.ndarray:
    """Annihilation operator a with entries a[n-1, n] = sqrt(n).

    Parameters
    ----------
    dim : int
        Truncation dimension D >= 2.

    Returns
    -------
    ndarray
        (dim, dim) complex matrix.
    """
    dim = _check_dim(dim)
    a = np.zeros((dim, dim), dtype=np.complex128)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def creation(dim: int) -> np.ndarray:
    """Creation operator a† (conjugate transpose of :func:`annihilation`)."""
    return annihilation(dim).conj().T


def number_operator(dim: int) -> np.ndarray:
    """Number operator n = a†a, real diagonal with entries 0..dim-1."""
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=np.float64)).astype(np.complex128)


def squeeze_hamiltonian(xi: float, dim: int) -> np.ndarray:
    """Squeezing generator H = i*xi*((a†)² - a²).

    The operator (a†)² - a² is anti-Hermitian, so H is Hermitian; the matrix is
    built entry-symmetric so H equals its conjugate transpose bitwise.

    Parameters
    ----------
    xi : float
        Squeezing rate (inverse time).
    dim : int
        Truncation dimension D >= 2.
    """
    dim = _check_dim(dim)
    if not np.isfinite(xi):
        raise ValueError("squeezing rate must be finite")
    h = np.zeros((dim, dim), dtype=np.complex128)
    k = np.arange(dim - 2)
    c = np.sqrt((k + 1.0) * (k + 2.0))
    h[k + 2, k] = 1j * xi * c
    h[k, k + 2] = -1j * xi * c
    return h


def number_diagonal_density(probs: np.ndarray) -> np.ndarray:
    """Density matrix diagonal in the number basis.

    Parameters
    ----------
    probs : array_like
        Nonnegative occupation probabilities summing to one (within
        ``TOL_TRACE``).  Renormalized exactly before embedding so the trace is
        one to roundoff.

    Returns
    -------
    ndarray
        Diagonal (D, D) complex density matrix; <a†² + a²> vanishes exactly.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("probs must be a 1-D vector of length >= 2")
    if np.any(p < -TOL_TRACE):
        raise ValueError("occupation probabilities must be nonnegative")
    total = p.sum()
    if abs(total - 1.0) > TOL_TRACE:
        raise ValueError(f"probabilities must sum to 1, got {total!r}")
    p = np.clip(p, 0.0, None) / np.clip(p, 0.0, None).sum()
    return np.diag(p).astype(np.complex128)


def thermal_probs(nbar: float, dim: int) -> np.ndarray:
    """Geometric (thermal) occupation weights with mean ``nbar``, renormalized
    over the truncated support.  ``nbar = 0`` gives the vacuum."""
    dim = _check_dim(dim)
    if nbar < 0:
        raise ValueError("mean occupation must be >= 0")
    if nbar == 0.0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    q = nbar / (1.0 + nbar)
    w = q ** np.arange(dim)
    return w / w.sum()


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """Tr(rho @ op), evaluated without forming the product matrix."""
    rho = np.asarray(rho)
    op = np.asarray(op)
    if rho.shape != op.shape or rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs op {op.shape}")
    return complex(np.einsum("ij,ji->", rho, op))


def mean_n(rho: np.ndarray) -> float:
    """<n> = sum_m m * rho[m, m] (real part)."""
    d = rho.shape[0]
    return float(np.real(np.arange(d) @ np.diagonal(rho)))


def s_moment(rho: np.ndarray) -> float:
    """<a†² + a²> = 2 Re sum_k sqrt((k+1)(k+2)) rho[k+2, k] for Hermitian rho."""
    d = rho.shape[0]
    k = np.arange(d - 2)
    c = np.sqrt((k + 1.0) * (k + 2.0))
    return float(2.0 * np.real(c @ np.diagonal(rho, offset=-2)))


def validate_density_matrix(
    rho: np.ndarray,
    tol_herm: float = TOL_HERM,
    tol_trace: float = TOL_TRACE,
    tol_pos: float = TOL_POS,
    check_positivity: bool = False,
) -> None:
    """Raise ValueError unless ``rho`` is Hermitian and trace-one.

    Positivity (smallest eigenvalue >= -tol_pos) costs an eigendecomposition
    and is only checked on request.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
        raise ValueError(f"density matrix must be square with dim >= 2, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol_herm:
        raise ValueError(f"density matrix not Hermitian: max |rho - rho†| = {herm:g}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol_trace:
        raise ValueError(f"density matrix trace must be 1, got {tr!r}")
    if check_positivity:
        lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
        if lo < -tol_pos:
            raise ValueError(f"density matrix not positive: min eigenvalue = {lo:g}")
