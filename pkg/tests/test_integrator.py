import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from dcesim.integrator import IntegrationError, integrate_adaptive


def test_scalar_linear_ode():
    lam = -0.7 + 1.9j
    grid = np.linspace(0.0, 4.0, 17)
    res = integrate_adaptive(
        lambda t, y: lam * y, grid, np.array([1.0 + 0j]), rtol=1e-11, atol=1e-13
    )
    assert_allclose(res.states[:, 0], np.exp(lam * grid), rtol=1e-9, atol=1e-12)


def test_dense_output_between_steps():
    # the adaptive stepper takes strides much longer than the grid spacing here,
    # so most samples exercise the quartic interpolant
    grid = np.linspace(0.0, 10.0, 501)
    res = integrate_adaptive(
        lambda t, y: 1j * y, grid, np.array([1.0 + 0j]), rtol=1e-10, atol=1e-13
    )
    assert res.n_steps < len(grid) - 1
    assert_allclose(res.states[:, 0], np.exp(1j * grid), rtol=1e-8, atol=1e-10)


def test_accuracy_improves_with_rtol():
    grid = np.array([0.0, 3.0])
    errs = []
    for rtol in (1e-5, 1e-8, 1e-11):
        res = integrate_adaptive(
            lambda t, y: np.array([np.cos(t) + 0j]),
            grid,
            np.array([0.0 + 0j]),
            rtol=rtol,
            atol=1e-14,
        )
        errs.append(abs(res.states[-1, 0] - np.sin(3.0)))
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-12


def test_matches_scipy_on_random_linear_system(rng):
    n = 6
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = m - m.conj().T  # anti-Hermitian keeps the norm bounded
    y0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    grid = np.linspace(0.0, 2.0, 9)

    res = integrate_adaptive(lambda t, y: m @ y, grid, y0, rtol=1e-10, atol=1e-12)
    ref = solve_ivp(
        lambda t, y: m @ y,
        (0.0, 2.0),
        y0.astype(complex),
        t_eval=grid,
        rtol=1e-10,
        atol=1e-12,
    )
    assert_allclose(res.states.T, ref.y, rtol=1e-7, atol=1e-9)


def test_postprocess_hook_applied_and_logged():
    # keep the state real by discarding the imaginary part after each step
    def clean(y):
        discard = float(np.max(np.abs(y.imag)))
        return y.real.astype(complex), discard

    grid = np.linspace(0.0, 1.0, 5)
    res = integrate_adaptive(
        lambda t, y: y * (1.0 + 1e-14j),
        grid,
        np.array([1.0 + 0j]),
        rtol=1e-9,
        atol=1e-12,
        postprocess=clean,
    )
    assert np.all(res.states.imag == 0.0)
    assert np.all(res.post_discard >= 0.0)
    assert res.post_discard.max() < 1e-12


def test_sample_equals_grid_start():
    grid = np.array([0.0, 0.5])
    y0 = np.array([2.0 + 1j])
    res = integrate_adaptive(lambda t, y: 0 * y, grid, y0, rtol=1e-9, atol=1e-12)
    assert res.states[0, 0] == y0[0]
    assert res.states[-1, 0] == pytest.approx(y0[0])


def test_single_point_grid():
    res = integrate_adaptive(
        lambda t, y: y, np.array([0.0]), np.array([1.0 + 0j])
    )
    assert res.n_steps == 0
    assert res.states.shape == (1, 1)


def test_step_underflow_raises_with_last_time():
    # y' = y^2 blows up at t = 1; the stepper must fail before then and report
    # how far it got
    with pytest.raises(IntegrationError) as excinfo:
        integrate_adaptive(
            lambda t, y: y**2,
            np.array([0.0, 2.0]),
            np.array([1.0 + 0j]),
            rtol=1e-10,
            atol=1e-12,
        )
    assert 0.9 < excinfo.value.t_last <= 1.0


def test_rejects_bad_grid_and_tolerances():
    y0 = np.array([1.0 + 0j])
    with pytest.raises(ValueError):
        integrate_adaptive(lambda t, y: y, np.array([0.0, 0.0, 1.0]), y0)
    with pytest.raises(ValueError):
        integrate_adaptive(lambda t, y: y, np.array([0.0, 1.0]), y0, rtol=2.0)
    with pytest.raises(ValueError):
        integrate_adaptive(lambda t, y: y, np.array([0.0, 1.0]), y0, atol=0.0)
