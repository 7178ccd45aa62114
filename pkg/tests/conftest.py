import numpy as np
import pytest

from dcesim import annihilation, creation, number_operator


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix (Hermitian, trace one, positive)."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def dense_lindblad_rhs(
    rho: np.ndarray, xi: float, gamma: float, big_gamma: float
) -> np.ndarray:
    """Literal master-equation right-hand side from dense operator products.

    Independent of the production stencil kernel; used as its oracle.
    """
    d = rho.shape[0]
    a = annihilation(d)
    ad = creation(d)
    n = number_operator(d)
    gen = ad @ ad - a @ a
    out = xi * (gen @ rho - rho @ gen)
    out += 0.5 * big_gamma * (2.0 * n @ rho @ n - n @ n @ rho - rho @ n @ n)
    out += 0.5 * gamma * (2.0 * a @ rho @ ad - n @ rho - rho @ n)
    return out


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
