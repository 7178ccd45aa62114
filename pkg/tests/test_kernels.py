"""The stencil kernel against the literal operator-product master equation."""

import numpy as np
import pytest
from conftest import dense_lindblad_rhs, random_density_matrix
from numpy.testing import assert_allclose

from dcesim import ModelParams, lindblad_rhs, squeeze_hamiltonian
from dcesim._accel import HAVE_NUMBA
from dcesim._kernels import apply_rhs, rhs_numpy

PARAM_SETS = [
    (0.0, 0.0, 0.0),
    (0.5, 0.0, 0.0),
    (0.0, 1.3, 0.0),
    (0.0, 0.0, 2.1),
    (0.3, 0.7, 1.1),
    (-0.4, 0.2, 5.0),
]


@pytest.mark.parametrize("dim", [2, 3, 8, 33])
@pytest.mark.parametrize("xi,gamma,big_gamma", PARAM_SETS)
def test_stencil_matches_dense_products(dim, xi, gamma, big_gamma, rng):
    rho = random_density_matrix(dim, rng)
    expected = dense_lindblad_rhs(rho, xi, gamma, big_gamma)
    assert_allclose(rhs_numpy(rho, xi, gamma, big_gamma), expected, atol=1e-12)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend disabled")
@pytest.mark.parametrize("dim", [2, 5, 24])
def test_numba_and_numpy_backends_agree(dim, rng):
    from dcesim._kernels import rhs_numba

    rho = random_density_matrix(dim, rng)
    a = rhs_numba(rho, 0.3, 0.7, 1.1)
    b = rhs_numpy(rho, 0.3, 0.7, 1.1)
    assert_allclose(a, b, atol=1e-13)


def test_rhs_traceless_and_hermitian(rng):
    rho = random_density_matrix(16, rng)
    out = apply_rhs(rho, 0.4, 0.9, 2.5)
    assert abs(np.trace(out)) < 1e-12
    assert np.max(np.abs(out - out.conj().T)) < 1e-12


def test_rhs_on_nonhermitian_input_matches_dense(rng):
    # linearity: the generator acts on arbitrary matrices, not just states
    g = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    assert_allclose(
        rhs_numpy(g, 0.2, 0.5, 0.8), dense_lindblad_rhs(g, 0.2, 0.5, 0.8), atol=1e-12
    )


def test_lindblad_rhs_unitary_limit_is_commutator(rng):
    d = 12
    rho = random_density_matrix(d, rng)
    p = ModelParams(xi=0.6, dim=d, t_grid=np.array([0.0, 1.0]))
    h = squeeze_hamiltonian(0.6, d)
    assert_allclose(lindblad_rhs(rho, p), -1j * (h @ rho - rho @ h), atol=1e-12)


def test_lindblad_rhs_vacuum_fixed_point():
    d = 8
    vac = np.zeros((d, d), dtype=complex)
    vac[0, 0] = 1.0
    p = ModelParams(xi=0.0, gamma=1.3, Gamma=2.7, dim=d, t_grid=np.array([0.0, 1.0]))
    assert np.max(np.abs(lindblad_rhs(vac, p))) == 0.0


def test_lindblad_rhs_fock_decay_rate():
    # single excited Fock state under pure decay: d<n>/dt = -gamma <n>
    d = 6
    rho = np.zeros((d, d), dtype=complex)
    rho[1, 1] = 1.0
    p = ModelParams(xi=0.0, gamma=1.0, Gamma=0.0, dim=d, t_grid=np.array([0.0, 1.0]))
    out = lindblad_rhs(rho, p)
    dn_dt = np.real(np.arange(d) @ np.diagonal(out))
    assert dn_dt == pytest.approx(-1.0, abs=1e-14)


def test_lindblad_rhs_coherence_dephasing_rate():
    # |0><2| + |2><0| coherence decays at (Gamma/2)(m-n)^2 = 2*Gamma
    d = 6
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 2] = rho[2, 0] = 0.5
    p = ModelParams(xi=0.0, gamma=0.0, Gamma=1.0, dim=d, t_grid=np.array([0.0, 1.0]))
    out = lindblad_rhs(rho, p)
    assert out[0, 2] == pytest.approx(-2.0 * rho[0, 2], abs=1e-14)


def test_lindblad_rhs_dimension_mismatch():
    p = ModelParams(xi=0.1, dim=8, t_grid=np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        lindblad_rhs(np.eye(4, dtype=complex) / 4, p)
