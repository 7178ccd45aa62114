"""Adaptive Dormand-Prince 4(5) integrator for complex state vectors.

Written for the master-equation and amplitude ODEs in this package: the state
is a flat complex vector, output is sampled on a caller-supplied time grid via
the standard quartic dense-output interpolant, and an optional ``postprocess``
hook runs after every accepted step (used to re-Hermitize density matrices,
with the discarded norm reported per output point).

No first-same-as-last reuse: the first stage is recomputed after the hook so
the hook may modify the state without leaving a stale stage behind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

# Dormand-Prince 4(5) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = (
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# Fifth-minus-fourth order error weights (seven stages).
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# Quartic dense-output coefficients: y(t+theta*h) = y + h * (K^T P) @ [theta..theta^4].
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


class IntegrationError(RuntimeError):
    """Raised when the step size underflows; carries the last good time."""

    def __init__(self, message: str, t_last: float):
        super().__init__(message)
        self.t_last = t_last


@dataclass
class IntegrationResult:
    times: np.ndarray
    states: np.ndarray  # (len(times), n) complex
    post_discard: np.ndarray  # max postprocess discard per output interval
    n_steps: int
    n_rhs: int


def _rms_norm(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(v) ** 2)))


def _initial_step(f, t0, y0, f0, rtol, atol):
    """Hairer-style starting step size from the magnitude of y and f."""
    scale = atol + rtol * np.abs(y0)
    d0 = _rms_norm(y0 / scale)
    d1 = _rms_norm(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = _rms_norm((f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def integrate_adaptive(
    f: Callable[[float, np.ndarray], np.ndarray],
    t_grid: np.ndarray,
    y0: np.ndarray,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    postprocess: Optional[Callable[[np.ndarray], tuple[np.ndarray, float]]] = None,
    max_step: float = np.inf,
) -> IntegrationResult:
    """Integrate y' = f(t, y) from t_grid[0], sampling exactly at t_grid.

    Parameters
    ----------
    f : callable
        Right-hand side; takes (t, y) with y a flat complex vector and returns
        the derivative with the same shape.
    t_grid : array_like
        Strictly increasing output times; integration starts at t_grid[0].
    rtol, atol : float
        Local error control: the RMS of |err| / (atol + rtol*max(|y|, |y_new|))
        is kept at or below one.
    postprocess : callable, optional
        Maps an accepted state to (cleaned state, discarded norm).  Applied to
        step endpoints and to interpolated samples; the maximum discard since
        the previous output point is reported per output point.

    Raises
    ------
    IntegrationError
        On step-size underflow; ``t_last`` holds the last completed time.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if t_grid.size > 1 and not np.all(np.diff(t_grid) > 0):
        raise ValueError("t_grid must be strictly increasing")
    if not (0 < rtol < 1) or not (0 < atol < 1):
        raise ValueError("tolerances must lie in (0, 1)")

    y = np.asarray(y0, dtype=np.complex128).ravel().copy()
    n = y.size
    n_out = t_grid.size
    states = np.empty((n_out, n), dtype=np.complex128)
    discards = np.zeros(n_out)

    d_init = 0.0
    if postprocess is not None:
        y, d_init = postprocess(y)
    states[0] = y
    discards[0] = d_init

    if n_out == 1:
        return IntegrationResult(t_grid, states, discards, 0, 0)

    t = float(t_grid[0])
    t_end = float(t_grid[-1])
    f0 = f(t, y)
    n_rhs = 1
    h = min(_initial_step(f, t, y, f0, rtol, atol), max_step, t_end - t)
    n_rhs += 1

    k = np.empty((7, n), dtype=np.complex128)
    next_out = 1
    n_steps = 0
    pending = 0.0  # max postprocess discard since the previous output point

    while t < t_end:
        min_step = 10.0 * abs(np.nextafter(t, np.inf) - t)
        h = min(h, max_step, t_end - t)
        if h < min_step:
            h = min_step

        while True:  # attempt steps until the error test passes
            last = t + h >= t_end
            if last:
                h = t_end - t
            k[0] = f0
            for i, a_row in enumerate(_A, start=1):
                k[i] = f(t + _C[i] * h, y + h * (a_row @ k[:i]))
            y_new = y + h * (_B @ k[:6])
            k[6] = f(t + h, y_new)
            n_rhs += 6
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms_norm(h * (_E @ k) / scale)
            if err <= 1.0:
                break
            factor = (
                _MIN_FACTOR
                if not np.isfinite(err)
                else max(_MIN_FACTOR, _SAFETY * err**-0.2)
            )
            h *= factor
            if h < min_step:
                raise IntegrationError(f"step size underflow at t = {t:.17g}", t_last=t)

        n_steps += 1
        t_new = t_end if last else t + h

        d_step = 0.0
        if postprocess is not None:
            y_new, d_step = postprocess(y_new)
        pending = max(pending, d_step)

        if next_out < n_out and t_grid[next_out] <= t_new:
            q = k.T @ _P  # (n, 4) interpolation weights
            while next_out < n_out and t_grid[next_out] <= t_new:
                t_j = float(t_grid[next_out])
                if t_j == t_new:
                    states[next_out] = y_new
                    discards[next_out] = pending
                else:
                    theta = (t_j - t) / h
                    powers = np.array([theta, theta**2, theta**3, theta**4])
                    y_j = y + h * (q @ powers)
                    d_j = 0.0
                    if postprocess is not None:
                        y_j, d_j = postprocess(y_j)
                    states[next_out] = y_j
                    discards[next_out] = max(pending, d_j)
                next_out += 1
            # This step extends past the emitted points, so its own discard
            # still counts toward the next output interval.
            pending = d_step

        t = t_new
        y = y_new
        if t < t_end:
            f0 = f(t, y)
            n_rhs += 1
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err**-0.2))
            h = h * factor

    return IntegrationResult(t_grid, states, discards, n_steps, n_rhs)
