import numpy as np
import pytest
from conftest import random_density_matrix
from numpy.testing import assert_allclose

from dcesim import (
    ModelParams,
    MomentState,
    evolve,
    ideal_n,
    initial_state,
    integrate_moments,
    mean_n,
    number_diagonal_density,
    suggest_dim,
    thermal_probs,
)


def grid(t_max, n=21):
    return np.linspace(0.0, t_max, n)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(xi=np.nan)
    with pytest.raises(ValueError):
        ModelParams(xi=0.1, gamma=-1.0)
    with pytest.raises(ValueError):
        ModelParams(xi=0.1, n0=-0.5)
    with pytest.raises(ValueError):
        ModelParams(xi=0.1, t_grid=np.array([1.0, 2.0]))  # must start at 0
    with pytest.raises(ValueError):
        ModelParams(xi=0.1, t_grid=np.array([0.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        ModelParams(xi=0.1, dim=1)


def test_suggest_dim():
    assert suggest_dim(0.0, 0.0, 10.0) == 32
    assert suggest_dim(0.1, 0.0, 10.0) == max(32, int(np.ceil(16 * np.sinh(2.0) ** 2)))
    assert suggest_dim(1.0, 0.0, 100.0) == 256  # capped


def test_initial_state_thermal_mean():
    p = ModelParams(xi=0.1, n0=0.7, dim=48, t_grid=grid(1.0))
    rho = initial_state(p)
    assert mean_n(rho) == pytest.approx(0.7, abs=1e-9)
    p0 = ModelParams(xi=0.1, n0=0.0, dim=16, t_grid=grid(1.0))
    assert initial_state(p0)[0, 0] == 1.0


def test_vacuum_is_fixed_point_of_damping():
    p = ModelParams(xi=0.0, gamma=1.0, Gamma=3.0, n0=0.0, dim=16, t_grid=grid(4.0))
    traj = evolve(initial_state(p), p)
    assert np.max(np.abs(traj.mean_n)) < 1e-12
    assert np.max(traj.trace_err) < 1e-12


def test_fock_state_amplitude_decay():
    # <n>(t) = 3 exp(-gamma t) for a |3><3| start under pure decay
    d = 16
    probs = np.zeros(d)
    probs[3] = 1.0
    rho0 = number_diagonal_density(probs)
    p = ModelParams(xi=0.0, gamma=0.5, Gamma=0.0, dim=d, t_grid=grid(4.0))
    traj = evolve(rho0, p, rel_tol=1e-10, abs_tol=1e-14)
    expected = 3.0 * np.exp(-0.5 * traj.times)
    assert_allclose(traj.mean_n, expected, rtol=1e-6)


def test_phase_damping_dissipates_no_energy(rng):
    d = 16
    probs = rng.random(d)
    probs /= probs.sum()
    rho0 = number_diagonal_density(probs)
    n0 = mean_n(rho0)
    p = ModelParams(xi=0.0, gamma=0.0, Gamma=2.5, dim=d, t_grid=grid(3.0))
    traj = evolve(rho0, p, rel_tol=1e-10, abs_tol=1e-14)
    assert_allclose(traj.mean_n, n0, rtol=1e-9)


def test_diagonal_state_stays_diagonal_without_squeezing(rng):
    d = 12
    probs = rng.random(d)
    probs /= probs.sum()
    rho0 = number_diagonal_density(probs)
    p = ModelParams(xi=0.0, gamma=0.8, Gamma=1.5, dim=d, t_grid=grid(2.0, 5))
    traj = evolve(rho0, p, rel_tol=1e-10, abs_tol=1e-14)
    off = traj.rho_final - np.diag(np.diagonal(traj.rho_final))
    assert np.max(np.abs(off)) < 1e-12


def test_ideal_growth_matches_sinh():
    p = ModelParams(xi=0.1, dim=64, t_grid=grid(5.0, 11))
    traj = evolve(initial_state(p), p, rel_tol=1e-10, abs_tol=1e-13)
    expected = ideal_n(traj.times, 0.1)
    assert np.max(traj.leakage) < 1e-8
    assert_allclose(traj.mean_n, expected, rtol=1e-6, atol=1e-10)


def test_oracle_equivalence_with_moments():
    p = ModelParams(xi=1.0, gamma=1.0, Gamma=2.0, n0=0.5, dim=64, t_grid=grid(0.55, 12))
    traj = evolve(initial_state(p), p, rel_tol=1e-10, abs_tol=1e-13)
    nm, sm = integrate_moments(MomentState(p.n0, 0.0), p)
    assert np.max(traj.leakage) < 1e-6
    assert_allclose(traj.mean_n, nm, rtol=1e-3, atol=1e-6)
    assert_allclose(traj.s_moment, sm, rtol=1e-3, atol=1e-6)


def test_trace_and_hermiticity_diagnostics():
    p = ModelParams(xi=0.5, gamma=0.3, Gamma=1.0, n0=0.0, dim=48, t_grid=grid(2.0))
    traj = evolve(initial_state(p), p)
    assert np.max(traj.trace_err) < 1e-9
    assert np.max(traj.herm_err) < 1e-12
    r = traj.rho_final
    assert np.max(np.abs(r - r.conj().T)) == 0.0  # Hermitized on output


def test_positivity_spot_check():
    p = ModelParams(xi=0.6, gamma=0.2, Gamma=0.5, n0=0.3, dim=48, t_grid=grid(2.0, 9))
    traj = evolve(initial_state(p), p, pos_check_interval=2)
    assert traj.min_eig > -1e-7


def test_truncation_warning_flag():
    # deliberately tiny space: squeezing pushes population into the top levels
    p = ModelParams(xi=0.5, dim=8, t_grid=grid(2.0, 9))
    with pytest.warns(RuntimeWarning, match="leakage"):
        traj = evolve(initial_state(p), p)
    assert traj.truncation_warning
    assert np.max(traj.leakage) > 1e-6


def test_evolve_validates_inputs(rng):
    p = ModelParams(xi=0.1, dim=8, t_grid=grid(1.0))
    with pytest.raises(ValueError):
        evolve(np.eye(8, dtype=complex), p)  # trace 8
    with pytest.raises(ValueError):
        evolve(random_density_matrix(4, rng), p)  # dimension mismatch
    with pytest.raises(ValueError):
        evolve(random_density_matrix(8, rng), p, rel_tol=2.0)


def test_evolve_does_not_mutate_input(rng):
    rho0 = random_density_matrix(8, rng)
    saved = rho0.copy()
    p = ModelParams(xi=0.2, gamma=0.1, dim=8, t_grid=grid(1.0, 5))
    evolve(rho0, p)
    assert np.array_equal(rho0, saved)
