"""Command-line scenario runner binding the simulation and oracle modules.

Scenarios: ideal (closed-form undamped growth), lindblad (master-equation
trajectory with diagnostics), moments (moment system plus closed form),
compare (master equation vs moment oracle, exit status encodes agreement),
dephasing (channel map vs master equation), gedanken (measurement-interrupted
recurrence), threelevel (medium amplitudes and effective permittivity), and
sweep (cartesian parameter sweep run as independent jobs).

Config files are INI with case-sensitive keys.  Rates and times in the
``[model]`` section are interpreted in units of the squeezing rate (``units =
xi``, the default, fixes xi = 1) unless ``units = absolute``.  The
``[threelevel]`` section always takes raw angular-frequency units.

Trajectory CSV files share one schema: ``t, n_numeric, n_analytic, s_numeric,
s_analytic, trace_err, herm_err, leakage`` with empty fields where a source
does not apply; the threelevel scenario emits its own documented columns.
All files are written atomically (temp file then rename) with full-precision
decimal floats, so identical configs give byte-identical CSV output.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import __version__, fock
from .dephasing import dephase_map, gedanken_density_evolution, gedanken_evolution
from .integrator import IntegrationError
from .lindblad import ModelParams, evolve, initial_state
from .moments import (
    MomentState,
    above_threshold,
    analytic_n,
    characteristic_exponent,
    ideal_n,
    integrate_moments,
    steady_state_n,
)
from .threelevel import (
    ThreeLevelParams,
    adiabatic_psi_c,
    decoherence_photon_threshold,
    effective_permittivity,
    integrate_three_level,
    noise_energy_estimate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTEGRATION = 2
EXIT_DISAGREE = 3

SCENARIOS = (
    "ideal",
    "lindblad",
    "moments",
    "compare",
    "gedanken",
    "dephasing",
    "threelevel",
    "sweep",
)

CSV_COLUMNS = (
    "t",
    "n_numeric",
    "n_analytic",
    "s_numeric",
    "s_analytic",
    "trace_err",
    "herm_err",
    "leakage",
)
THREELEVEL_COLUMNS = (
    "t",
    "pop_a",
    "pop_b",
    "pop_c",
    "norm_err",
    "eps_eff",
    "adiabatic_err",
)

SWEEP_AXES = ("xi", "gamma", "Gamma", "n0")


class UsageError(Exception):
    """Bad flags or config; maps to exit status 1 with the field named."""


class FitResult(NamedTuple):
    slope: float
    growing: bool


def fit_exponent(times, values, window: float = 0.3) -> FitResult:
    """Least-squares slope of ln(n + 1/2) over the trailing ``window`` fraction
    of the samples.

    The +1/2 offset makes the fast-dephasing growth exactly log-linear and the
    general damped-squeezing solution asymptotically so.  A non-growing series
    is not an error: the (negative or zero) slope is returned with
    ``growing = False``.
    """
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if t.ndim != 1 or t.shape != v.shape or t.size < 2:
        raise ValueError("need matching 1-D series with at least two samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    if not 0.0 < window <= 1.0:
        raise ValueError("window must lie in (0, 1]")
    start = t.size - max(2, math.ceil(window * t.size))
    start = max(0, start)
    shifted = v[start:] + 0.5
    if np.any(shifted <= 0):
        raise ValueError("n + 1/2 must stay positive inside the fit window")
    slope = float(np.polyfit(t[start:], np.log(shifted), 1)[0])
    return FitResult(slope, slope > 0.0)


def _tag(value, source: str):
    """Attach the provenance tag every reported number carries."""
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    return {"value": value, "source": source}


# ----------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------


@dataclass
class RunConfig:
    scenario: str
    units: str
    model: dict
    tolerances: dict
    gedanken: dict
    threelevel: dict
    dephasing: dict
    sweep_axes: list
    out: str
    formats: tuple
    seed: int
    jobs: int
    echo: dict = field(default_factory=dict)


_MODEL_DEFAULTS = dict(xi=1.0, gamma=0.0, Gamma=0.0, n0=0.0, t_max=5.0, samples=101)
_TOL_DEFAULTS = dict(
    rel_tol=1e-9,
    abs_tol=1e-12,
    leak_max=1e-6,
    compare_tol=1e-3,
    abs_floor=1e-9,
)
_GEDANKEN_DEFAULTS = dict(dt_scale=1.0, steps=200, density_check=False, dim=64)
_THREELEVEL_DEFAULTS = dict(
    delta_omega=1.0,
    kappa=0.0,
    rabi=0.0,
    e0=0.0,
    nu=0.0,
    t_max=20.0,
    samples=401,
    psi0="ground",
)
_DEPHASING_DEFAULTS = dict(dim=16)


def _parse_scalar(section: str, key: str, raw: str, kind):
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise UsageError(f"{section}.{key}: cannot parse {raw!r}") from None


def _section_dict(parser, section: str, defaults: dict, kinds: dict) -> dict:
    out = dict(defaults)
    if parser is not None and parser.has_section(section):
        for key, raw in parser.items(section):
            if key not in defaults:
                raise UsageError(f"{section}.{key}: unknown key")
            out[key] = _parse_scalar(section, key, raw, kinds[key])
    return out


def build_config(args) -> RunConfig:
    parser = None
    if args.config is not None:
        if not os.path.exists(args.config):
            raise UsageError(f"config file not found: {args.config}")
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keep gamma and Gamma distinct
        try:
            parser.read(args.config, encoding="utf-8")
        except configparser.Error as exc:
            raise UsageError(f"config parse failure: {exc}") from None

    run = {}
    if parser is not None and parser.has_section("run"):
        run = dict(parser.items("run"))
        for key in run:
            if key not in ("scenario", "units", "out", "formats"):
                raise UsageError(f"run.{key}: unknown key")

    scenario = args.scenario or run.get("scenario")
    if scenario is None:
        raise UsageError("run.scenario: missing (set it in the config or pass --scenario)")
    if scenario not in SCENARIOS:
        raise UsageError(f"run.scenario: unknown scenario {scenario!r}")

    units = run.get("units", "xi")
    if units not in ("xi", "absolute"):
        raise UsageError(f"run.units: must be 'xi' or 'absolute', got {units!r}")

    kinds = dict(xi=float, gamma=float, Gamma=float, n0=float, t_max=float, samples=int)
    model_defaults = dict(_MODEL_DEFAULTS)
    model_defaults["dim"] = None
    kinds["dim"] = int
    model = _section_dict(parser, "model", model_defaults, kinds)
    if units == "xi":
        if abs(model["xi"] - 1.0) > 0:
            raise UsageError(
                "model.xi: with units = xi the squeezing rate is fixed to 1; "
                "use units = absolute to set it"
            )
        model["xi"] = 1.0
    if model["gamma"] < 0:
        raise UsageError("model.gamma: must be >= 0")
    if model["Gamma"] < 0:
        raise UsageError("model.Gamma: must be >= 0")
    if model["n0"] < 0:
        raise UsageError("model.n0: must be >= 0")
    if model["t_max"] <= 0:
        raise UsageError("model.t_max: must be > 0")
    if model["samples"] < 2:
        raise UsageError("model.samples: must be >= 2")
    if model["dim"] is not None and model["dim"] < 2:
        raise UsageError("model.dim: must be >= 2")

    tol = _section_dict(
        parser,
        "tolerances",
        _TOL_DEFAULTS,
        {k: float for k in _TOL_DEFAULTS},
    )
    for key in ("rel_tol", "abs_tol"):
        if not 0 < tol[key] < 1:
            raise UsageError(f"tolerances.{key}: must lie in (0, 1)")
    for key in ("leak_max", "compare_tol", "abs_floor"):
        if tol[key] <= 0:
            raise UsageError(f"tolerances.{key}: must be > 0")

    ged = _section_dict(
        parser,
        "gedanken",
        _GEDANKEN_DEFAULTS,
        dict(dt_scale=float, steps=int, density_check=bool, dim=int),
    )
    if ged["dt_scale"] <= 0:
        raise UsageError("gedanken.dt_scale: must be > 0")
    if ged["steps"] < 1:
        raise UsageError("gedanken.steps: must be >= 1")
    if ged["dim"] < 2:
        raise UsageError("gedanken.dim: must be >= 2")

    tlv = _section_dict(
        parser,
        "threelevel",
        _THREELEVEL_DEFAULTS,
        dict(
            delta_omega=float,
            kappa=float,
            rabi=float,
            e0=float,
            nu=float,
            t_max=float,
            samples=int,
            psi0=str,
        ),
    )
    if tlv["delta_omega"] <= 0:
        raise UsageError("threelevel.delta_omega: must be > 0")
    if tlv["samples"] < 2:
        raise UsageError("threelevel.samples: must be >= 2")
    if tlv["psi0"] not in ("ground", "excited_b", "adiabatic"):
        raise UsageError("threelevel.psi0: must be ground, excited_b or adiabatic")

    dep = _section_dict(parser, "dephasing", _DEPHASING_DEFAULTS, dict(dim=int))
    if dep["dim"] < 2:
        raise UsageError("dephasing.dim: must be >= 2")

    sweep_axes = []
    if parser is not None and parser.has_section("sweep"):
        for key, raw in parser.items("sweep"):
            if key not in SWEEP_AXES:
                raise UsageError(
                    f"sweep.{key}: unknown axis (choose from {', '.join(SWEEP_AXES)})"
                )
            try:
                values = [float(v) for v in raw.split(",") if v.strip()]
            except ValueError:
                raise UsageError(f"sweep.{key}: cannot parse {raw!r}") from None
            if not values:
                raise UsageError(f"sweep.{key}: empty value list")
            sweep_axes.append((key, values))
    if scenario == "sweep" and not sweep_axes:
        raise UsageError("sweep: scenario requires a [sweep] section with at least one axis")

    formats_raw = args.format or run.get("formats", "csv,json")
    formats = tuple(f.strip() for f in formats_raw.split(",") if f.strip())
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise UsageError(f"format: unknown format {fmt!r}")
    if not formats:
        raise UsageError("format: at least one of csv,json required")

    out = args.out or run.get("out", "dcesim_run")

    echo = {
        "scenario": scenario,
        "units": units,
        "model": dict(model),
        "tolerances": dict(tol),
        "seed": args.seed,
        "jobs": args.jobs,
    }
    if scenario == "gedanken":
        echo["gedanken"] = dict(ged)
    if scenario == "threelevel":
        echo["threelevel"] = dict(tlv)
    if scenario == "dephasing":
        echo["dephasing"] = dict(dep)
    if scenario == "sweep":
        echo["sweep"] = {k: v for k, v in sweep_axes}

    return RunConfig(
        scenario=scenario,
        units=units,
        model=model,
        tolerances=tol,
        gedanken=ged,
        threelevel=tlv,
        dephasing=dep,
        sweep_axes=sweep_axes,
        out=out,
        formats=formats,
        seed=args.seed,
        jobs=args.jobs,
        echo=echo,
    )


def _model_params(model: dict) -> ModelParams:
    return ModelParams(
        xi=model["xi"],
        gamma=model["gamma"],
        Gamma=model["Gamma"],
        n0=model["n0"],
        t_grid=np.linspace(0.0, model["t_max"], model["samples"]),
        dim=model["dim"],
    )


def _threshold_verdict(p: ModelParams) -> str:
    lhs = 16.0 * p.xi**2
    rhs = p.gamma**2 + 2.0 * p.gamma * p.Gamma
    if lhs > rhs:
        return "above"
    if lhs < rhs:
        return "below"
    return "at"


# ----------------------------------------------------------------------
# Scenario implementations
# ----------------------------------------------------------------------


@dataclass
class ScenarioResult:
    rows: list
    columns: tuple
    report: dict
    exit_code: int = EXIT_OK
    extra_files: list = field(default_factory=list)  # (suffix, columns, rows)


def _empty_row(t: float) -> dict:
    return {"t": t}


def run_ideal(cfg: RunConfig) -> ScenarioResult:
    p = _model_params(cfg.model)
    n = ideal_n(p.t_grid, p.xi)
    rows = []
    for t, ni in zip(p.t_grid, n):
        row = _empty_row(t)
        row["n_analytic"] = ni
        rows.append(row)
    fit = fit_exponent(p.t_grid, n) if p.xi != 0 else FitResult(0.0, False)
    report = {
        "summary": {
            "final_n": _tag(float(n[-1]), "analytic"),
            "fitted_exponent": _tag(fit.slope, "analytic"),
            "growing": fit.growing,
        }
    }
    return ScenarioResult(rows, CSV_COLUMNS, report)


def _moment_series(p: ModelParams):
    nm, sm = integrate_moments(MomentState(p.n0, 0.0), p)
    na = analytic_n(p.t_grid, p)
    return nm, sm, na


def _moment_summary(p: ModelParams, n_series, times) -> dict:
    fit = fit_exponent(times, n_series)
    ss = steady_state_n(p)
    return {
        "final_n": _tag(float(n_series[-1]), "numeric"),
        "fitted_exponent": _tag(fit.slope, "numeric"),
        "growing": fit.growing,
        "characteristic_exponent": _tag(characteristic_exponent(p), "analytic"),
        "threshold_verdict": _threshold_verdict(p),
        "above_threshold": above_threshold(p),
        "steady_state_n": _tag(ss, "analytic"),
    }


def run_moments(cfg: RunConfig) -> ScenarioResult:
    p = _model_params(cfg.model)
    nm, sm, na = _moment_series(p)
    rows = []
    for t, ni, si, nai in zip(p.t_grid, nm, sm, na):
        row = _empty_row(t)
        row.update(n_numeric=ni, s_numeric=si, n_analytic=nai)
        rows.append(row)
    gap = float(np.max(np.abs(na - nm) / np.maximum(np.abs(nm), cfg.tolerances["abs_floor"])))
    report = {
        "summary": _moment_summary(p, nm, p.t_grid),
        "oracle": {"closed_form_max_rel_gap": _tag(gap, "numeric")},
    }
    return ScenarioResult(rows, CSV_COLUMNS, report)


def _lindblad_rows(p: ModelParams, traj, na):
    rows = []
    for i, t in enumerate(p.t_grid):
        row = _empty_row(t)
        row.update(
            n_numeric=traj.mean_n[i],
            n_analytic=na[i],
            s_numeric=traj.s_moment[i],
            trace_err=traj.trace_err[i],
            herm_err=traj.herm_err[i],
            leakage=traj.leakage[i],
        )
        rows.append(row)
    return rows


def _diag_summary(traj) -> dict:
    return {
        "max_trace_err": _tag(float(traj.trace_err.max()), "numeric"),
        "max_herm_err": _tag(float(traj.herm_err.max()), "numeric"),
        "max_leakage": _tag(float(traj.leakage.max()), "numeric"),
        "truncation_warning": traj.truncation_warning,
        "n_steps": traj.n_steps,
    }


def run_lindblad(cfg: RunConfig) -> ScenarioResult:
    p = _model_params(cfg.model)
    tol = cfg.tolerances
    traj = evolve(
        initial_state(p), p, rel_tol=tol["rel_tol"], abs_tol=tol["abs_tol"],
        leak_max=tol["leak_max"],
    )
    na = analytic_n(p.t_grid, p)
    report = {
        "summary": _moment_summary(p, traj.mean_n, p.t_grid),
        "diagnostics": _diag_summary(traj),
    }
    report["summary"]["dim"] = p.resolved_dim
    return ScenarioResult(_lindblad_rows(p, traj, na), CSV_COLUMNS, report)


def _compare_point(model: dict, tol: dict):
    """Evolve the master equation and measure its gap to the moment oracle."""
    p = _model_params(model)
    traj = evolve(
        initial_state(p), p, rel_tol=tol["rel_tol"], abs_tol=tol["abs_tol"],
        leak_max=tol["leak_max"],
    )
    nm, sm, na = _moment_series(p)
    floor = tol["abs_floor"]
    mask = traj.leakage < tol["leak_max"]
    rel_n = np.abs(traj.mean_n - nm) / np.maximum(np.abs(nm), floor)
    rel_s = np.abs(traj.s_moment - sm) / np.maximum(np.abs(sm), floor)
    if mask.any():
        gap_n = float(rel_n[mask].max())
        gap_s = float(rel_s[mask].max())
    else:
        gap_n = math.nan
        gap_s = math.nan
    agree = mask.any() and gap_n <= tol["compare_tol"] and gap_s <= tol["compare_tol"]
    return p, traj, nm, sm, na, gap_n, gap_s, agree, int(mask.sum())


def run_compare(cfg: RunConfig) -> ScenarioResult:
    p, traj, nm, sm, na, gap_n, gap_s, agree, n_valid = _compare_point(
        cfg.model, cfg.tolerances
    )
    rows = []
    for i, t in enumerate(p.t_grid):
        row = _empty_row(t)
        row.update(
            n_numeric=traj.mean_n[i],
            n_analytic=na[i],
            s_numeric=traj.s_moment[i],
            s_analytic=sm[i],
            trace_err=traj.trace_err[i],
            herm_err=traj.herm_err[i],
            leakage=traj.leakage[i],
        )
        rows.append(row)
    report = {
        "summary": _moment_summary(p, traj.mean_n, p.t_grid),
        "diagnostics": _diag_summary(traj),
        "oracle": {
            "n_max_rel_gap": _tag(gap_n, "numeric"),
            "s_max_rel_gap": _tag(gap_s, "numeric"),
            "tolerance": _tag(cfg.tolerances["compare_tol"], "numeric"),
            "valid_samples": n_valid,
            "agreement": agree,
        },
    }
    report["summary"]["dim"] = p.resolved_dim
    return ScenarioResult(
        rows, CSV_COLUMNS, report, EXIT_OK if agree else EXIT_DISAGREE
    )


def run_dephasing(cfg: RunConfig) -> ScenarioResult:
    dim = cfg.dephasing["dim"]
    model = dict(cfg.model)
    tol = cfg.tolerances
    rng = np.random.default_rng(cfg.seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho0 = g @ g.conj().T
    rho0 /= np.trace(rho0).real

    n0 = fock.mean_n(rho0)
    s0 = fock.s_moment(rho0)
    p = ModelParams(
        xi=0.0,
        gamma=0.0,
        Gamma=model["Gamma"],
        n0=n0,
        t_grid=np.linspace(0.0, model["t_max"], model["samples"]),
        dim=dim,
    )
    traj = evolve(rho0, p, rel_tol=tol["rel_tol"], abs_tol=tol["abs_tol"])
    mapped_final = dephase_map(rho0, p.Gamma, float(p.t_grid[-1]))
    gap = float(np.max(np.abs(traj.rho_final - mapped_final)))

    rows = []
    for i, t in enumerate(p.t_grid):
        row = _empty_row(t)
        # coherences two levels apart decay at exactly 2*Gamma
        row.update(
            n_numeric=traj.mean_n[i],
            n_analytic=n0,
            s_numeric=traj.s_moment[i],
            s_analytic=s0 * math.exp(-2.0 * p.Gamma * t),
            trace_err=traj.trace_err[i],
            herm_err=traj.herm_err[i],
            leakage=traj.leakage[i],
        )
        rows.append(row)
    report = {
        "summary": {
            "dim": dim,
            "Gamma": _tag(p.Gamma, "numeric"),
            "initial_n": _tag(n0, "numeric"),
        },
        "diagnostics": _diag_summary(traj),
        "oracle": {"final_elementwise_gap": _tag(gap, "numeric")},
    }
    return ScenarioResult(rows, CSV_COLUMNS, report)


def run_gedanken(cfg: RunConfig) -> ScenarioResult:
    model = cfg.model
    ged = cfg.gedanken
    if model["Gamma"] <= 0:
        raise UsageError("model.Gamma: gedanken scenario needs Gamma > 0 (dt = dt_scale/Gamma)")
    xi = model["xi"]
    dt = ged["dt_scale"] / model["Gamma"]
    steps = ged["steps"]
    series = gedanken_evolution(model["n0"], xi, dt, steps)
    times = np.arange(steps + 1) * dt
    fit = fit_exponent(times, series)
    per_step_exact = math.log(math.cosh(4.0 * xi * dt)) / dt
    reference = 8.0 * xi**2 / model["Gamma"]

    density = None
    if ged["density_check"]:
        density = gedanken_density_evolution(ged["dim"], xi, dt, steps)

    rows = []
    for i, t in enumerate(times):
        row = _empty_row(t)
        row["n_analytic"] = series[i]
        if density is not None:
            row["n_numeric"] = density[i]
        rows.append(row)

    report = {
        "summary": {
            "dt": _tag(dt, "numeric"),
            "fitted_exponent": _tag(fit.slope, "numeric"),
            "exact_log_growth_rate": _tag(per_step_exact, "analytic"),
            "reduced_exponent_reference": _tag(reference, "analytic"),
            "final_n": _tag(float(series[-1]), "analytic"),
        }
    }
    if density is not None:
        gap = float(
            np.max(np.abs(density - series) / np.maximum(np.abs(series), 1e-12))
        )
        report["oracle"] = {"density_loop_max_rel_gap": _tag(gap, "numeric")}
    return ScenarioResult(rows, CSV_COLUMNS, report)


def run_threelevel(cfg: RunConfig) -> ScenarioResult:
    sec = cfg.threelevel
    pars = ThreeLevelParams(
        delta_omega=sec["delta_omega"],
        kappa=sec["kappa"],
        rabi=sec["rabi"],
        field=(lambda t, e0=sec["e0"], nu=sec["nu"]: e0 * math.cos(nu * t)),
    )
    if sec["psi0"] == "ground":
        psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    elif sec["psi0"] == "excited_b":
        psi0 = np.array([0.0, 1.0, 0.0], dtype=complex)
    else:  # adiabatic: b occupied with c on the slow branch
        c0 = sec["kappa"] * sec["e0"] / sec["delta_omega"]
        psi0 = np.array([0.0, 1.0, c0], dtype=complex)
        psi0 /= np.linalg.norm(psi0)

    t_grid = np.linspace(0.0, sec["t_max"], sec["samples"])
    traj = integrate_three_level(psi0, pars, t_grid)

    rows = []
    eps = np.empty(t_grid.size)
    adiab_err = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        psi_a, psi_b, psi_c = traj.psi[i]
        eps[i] = effective_permittivity(psi_b, pars)
        field_t = sec["e0"] * math.cos(sec["nu"] * t)
        adiab_err[i] = abs(psi_c - adiabatic_psi_c(psi_b, field_t, pars))
        rows.append(
            {
                "t": t,
                "pop_a": abs(psi_a) ** 2,
                "pop_b": abs(psi_b) ** 2,
                "pop_c": abs(psi_c) ** 2,
                "norm_err": traj.norm_err[i],
                "eps_eff": eps[i],
                "adiabatic_err": adiab_err[i],
            }
        )

    report = {
        "summary": {
            "max_norm_err": _tag(float(traj.norm_err.max()), "numeric"),
            "eps_eff_max": _tag(float(eps.max()), "numeric"),
            "max_adiabatic_err": _tag(float(adiab_err.max()), "numeric"),
        }
    }
    if sec["rabi"] != 0.0:
        report["summary"]["rabi_harmonic_reference"] = _tag(
            2.0 * sec["rabi"], "analytic"
        )
    return ScenarioResult(rows, THREELEVEL_COLUMNS, report)


def _sweep_worker(task):
    index, model, tol = task
    p, traj, nm, sm, na, gap_n, gap_s, agree, n_valid = _compare_point(model, tol)
    rows = []
    for i, t in enumerate(p.t_grid):
        rows.append(
            {
                "t": t,
                "n_numeric": traj.mean_n[i],
                "n_analytic": na[i],
                "s_numeric": traj.s_moment[i],
                "s_analytic": sm[i],
                "trace_err": traj.trace_err[i],
                "herm_err": traj.herm_err[i],
                "leakage": traj.leakage[i],
            }
        )
    summary = _moment_summary(p, traj.mean_n, p.t_grid)
    summary["params"] = {k: model[k] for k in SWEEP_AXES}
    summary["oracle_n_max_rel_gap"] = _tag(gap_n, "numeric")
    summary["oracle_s_max_rel_gap"] = _tag(gap_s, "numeric")
    summary["oracle_agreement"] = agree
    summary["diagnostics"] = {
        "max_trace_err": _tag(float(traj.trace_err.max()), "numeric"),
        "max_herm_err": _tag(float(traj.herm_err.max()), "numeric"),
        "max_leakage": _tag(float(traj.leakage.max()), "numeric"),
    }
    return index, rows, summary


def run_sweep(cfg: RunConfig) -> ScenarioResult:
    points = [dict(cfg.model)]
    for axis, values in cfg.sweep_axes:
        points = [dict(pt, **{axis: v}) for pt in points for v in values]
    if cfg.units == "xi":
        for pt in points:
            if pt["xi"] != 1.0:
                raise UsageError("sweep.xi: sweeping xi requires units = absolute")

    tasks = [(i, pt, cfg.tolerances) for i, pt in enumerate(points)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_sweep_worker, tasks))
    else:
        results = [_sweep_worker(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    extra = []
    summaries = []
    for index, rows, summary in results:
        extra.append((f"_p{index:03d}", CSV_COLUMNS, rows))
        summaries.append(summary)

    report = {
        "summary": {
            "points": len(points),
            "axes": {k: v for k, v in cfg.sweep_axes},
        },
        "trajectories": summaries,
    }
    return ScenarioResult([], CSV_COLUMNS, report, extra_files=extra)


_DISPATCH = {
    "ideal": run_ideal,
    "lindblad": run_lindblad,
    "moments": run_moments,
    "compare": run_compare,
    "dephasing": run_dephasing,
    "gedanken": run_gedanken,
    "threelevel": run_threelevel,
    "sweep": run_sweep,
}


# ----------------------------------------------------------------------
# Output files
# ----------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{float(value):.17g}"


def _write_csv(path: str, columns, rows) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in columns])
    os.replace(tmp, path)


def _write_json(path: str, payload: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def _emit(cfg: RunConfig, result: ScenarioResult, wall_time: float) -> None:
    outdir = os.path.dirname(cfg.out)
    if outdir:
        os.makedirs(outdir, exist_ok=True)
    if "csv" in cfg.formats and (result.rows or not result.extra_files):
        _write_csv(cfg.out + ".csv", result.columns, result.rows)
    if "csv" in cfg.formats:
        for suffix, columns, rows in result.extra_files:
            _write_csv(cfg.out + suffix + ".csv", columns, rows)
    if "json" in cfg.formats:
        payload = {
            "version": __version__,
            "scenario": cfg.scenario,
            "config": cfg.echo,
            "wall_time_s": _tag(wall_time, "numeric"),
            "exit_code": result.exit_code,
        }
        payload.update(result.report)
        _write_json(cfg.out + ".json", payload)


# ----------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_argparser() -> _Parser:
    parser = _Parser(prog="dcesim", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="INI config file path")
    parser.add_argument("--scenario", choices=SCENARIOS, help="override run.scenario")
    parser.add_argument("--out", help="output path prefix (default dcesim_run)")
    parser.add_argument(
        "--format", help="comma-separated subset of csv,json (default both)"
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for test utilities")
    parser.add_argument("--jobs", type=int, default=1, help="parallel sweep jobs")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_argparser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("jobs: must be >= 1")
        cfg = build_config(args)
    except UsageError as exc:
        print(f"dcesim: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    start = time.perf_counter()
    try:
        result = _DISPATCH[cfg.scenario](cfg)
    except UsageError as exc:
        print(f"dcesim: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        wall = time.perf_counter() - start
        if "json" in cfg.formats:
            _write_json(
                cfg.out + ".json",
                {
                    "version": __version__,
                    "scenario": cfg.scenario,
                    "config": cfg.echo,
                    "wall_time_s": _tag(wall, "numeric"),
                    "exit_code": EXIT_INTEGRATION,
                    "failure": {
                        "kind": "integration",
                        "message": str(exc),
                        "t_last": _tag(exc.t_last, "numeric"),
                    },
                },
            )
        print(f"dcesim: integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION

    wall = time.perf_counter() - start
    _emit(cfg, result, wall)
    if result.exit_code == EXIT_DISAGREE:
        print("dcesim: oracle disagreement beyond tolerance", file=sys.stderr)
    return result.exit_code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
