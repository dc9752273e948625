import logging
from pathlib import Path
from typing import Callable, Dict

import numpy as np

from blowuplab.abel.fractional import abel_solve
from blowuplab.abel.multipoint import multipoint_rate
from blowuplab.abel.reduced import graded_times, reduced_solution_csv, reduced_solve
from blowuplab.abel.taylor import fit_vanishing_order
from blowuplab.ansatz.approx import glued_U1, u_inner, u_outer
from blowuplab.ansatz.constraints import check_constraints
from blowuplab.ansatz.matching import matching_report
from blowuplab.ansatz.scaling import mu0, path_from_alpha, unperturbed_path
from blowuplab.core.errors import DomainError
from blowuplab.core.types import FieldSnapshot, RadialGrid, TimeSeries
from blowuplab.core.writers import read_csv_columns, write_csv, write_key_values
from blowuplab.duhamel.blocks import upsilon_hat, vanishing_combo
from blowuplab.duhamel.phi1 import phi1_origin
from blowuplab.duhamel.probes import FAMILIES, bound_probe_appendix, probe_report_csv
from blowuplab.profiles.bubble import bubble_derivatives, kernel_Z0, kernel_Z0_derivative
from blowuplab.profiles.corrector import corrector_J
from blowuplab.profiles.eigen import MIN_EXTENT, negative_eigenpair
from blowuplab.profiles.hermite import eigen_residual, outer_profile_m
from blowuplab.profiles.output import profile_csv
from blowuplab.profiles.types import ProfileSample
from blowuplab.residual.error import bound_probe_g4, glued_error
from blowuplab.residual.norms import norm_report_csv
from blowuplab.residual.operators import radial_laplacian
from blowuplab.simulate.rates import fit_rate
from blowuplab.simulate.runner import ansatz_tracking, run, trajectory_csv
from blowuplab.simulate.types import Controls

from .plots import emit_plot
from .report import render_report
from .types import RunConfig, Series

logger = logging.getLogger(__name__)

HERMITE_RATES = (1, 2, 3, 4)
# Type I control experiment: u0 = amplitude exp(-|x|^2) on [0, extent]
CONTROL_AMPLITUDE = 5.0
CONTROL_EXTENT = 8.0
TRACKING_STEPS = 20_000


def _interior_sup(values: np.ndarray) -> float:
    return float(np.max(np.abs(values[:-1])))


def run_profiles(config: RunConfig) -> Path:
    out = config.output / "profiles"
    grid = RadialGrid.uniform(config.y_max, config.nodes)
    y = grid.nodes
    w, dw, _ = bubble_derivatives(y)
    z0 = kernel_Z0(y)
    j = corrector_J(y)
    profile_csv(ProfileSample(y, w, dw), out / "bubble.csv")
    profile_csv(ProfileSample(y, z0, kernel_Z0_derivative(y)), out / "z0.csv")
    profile_csv(j, out / "corrector.csv")

    def laplacian(values):
        return radial_laplacian(FieldSnapshot(grid, values)).values

    values = {
        "bubble_residual": _interior_sup(laplacian(w) + w**5),
        "z0_residual": _interior_sup(laplacian(z0) + 5 * w**4 * z0),
        "corrector_residual": _interior_sup(laplacian(j.value) + 5 * w**4 * j.value - 0.5 * z0),
        "corrector_slope": float(j.value[-1] / y[-1]),
    }
    hermite_grid = RadialGrid.geometric(0.5, 10.0, config.nodes)
    for k in HERMITE_RATES:
        report = eigen_residual(lambda z: outer_profile_m(z, k, config.params.A), 0.25 - k, hermite_grid, order=4)
        values[f"eigen_residual_k{k}"] = report.value
    if config.y_max >= MIN_EXTENT:
        pair = negative_eigenpair(grid)
        values["lambda_minus"] = pair.lambda_minus
        values["spectral_gap"] = pair.gap
    write_key_values(out / "residuals.txt", values)
    emit_plot(
        [Series("J(y) / y", list(y[1:]), list(j.value[1:] / y[1:]))],
        out / "corrector.svg",
        title="Corrector growth",
        x_label="y",
        y_label="J / y",
        log_x=True,
    )
    return out


def run_ansatz(config: RunConfig) -> Path:
    out = config.output / "ansatz"
    params = config.params
    taus = params.T * np.geomspace(1.0, 1e-4, config.time_samples)
    times = params.T - taus
    m0 = mu0(times, params)
    emit_plot(
        [Series("mu0", list(taus), list(m0))],
        out / "mu0.svg",
        title="Scaling law",
        x_label="T - t",
        y_label="mu0",
        log_x=True,
        log_y=True,
    )
    rows = []
    for tau in params.T * 2.0 ** -np.arange(1, 9):
        try:
            report = matching_report(params.T - tau, params)
        except DomainError as err:
            logger.debug("Skipping matching at T - t = %g: %s", tau, err)
            continue
        rows.append([report.t, report.inverse_gap, report.linear_gap, report.fitted_inner_inverse, report.fitted_outer_inverse])
    write_csv(out / "matching.csv", ["t", "inverse_gap", "linear_gap", "fitted_inner_inverse", "fitted_outer_inverse"], rows)

    t = 0.0
    x = np.geomspace(float(mu0(t, params)) / 20, 10 * np.sqrt(params.T), config.nodes)
    path = unperturbed_path(params, np.array([t]))
    write_csv(
        out / "u1.csv",
        ["x", "U1", "u_inner", "u_outer"],
        zip(x, glued_U1(x, t, params, path), u_inner(x, t, path), u_outer(x, t, params)),
    )
    write_key_values(out / "constraints.txt", {c.id: c.margin for c in check_constraints(params)})
    return out


def _jittered_grid(lo: float, hi: float, n: int, rng: np.random.Generator) -> RadialGrid:
    nodes = np.geomspace(lo, hi, n)
    spread = 0.25 * (nodes[1] / nodes[0] - 1)
    nodes[1:-1] *= 1 + spread * rng.uniform(-1.0, 1.0, n - 2)
    return RadialGrid.from_nodes(np.concatenate(([0.0], nodes)), "jittered")


def run_residual(config: RunConfig) -> Path:
    out = config.output / "residual"
    params = config.params
    rng = np.random.default_rng(config.seed)
    times = params.T * (1 - np.geomspace(1.0, 1e-3, config.time_samples))
    path = unperturbed_path(params, times)
    reports, rows = [], []
    for t in times:
        grid = _jittered_grid(float(mu0(t, params)) / 100, 10 * np.sqrt(params.T), config.nodes, rng)
        report = bound_probe_g4(float(t), params, path, grid)
        reports.append(report)
        error = glued_error(grid.nodes, float(t), params, path)
        rows.append([t, float(np.max(np.abs(error))), report.value])
    norm_report_csv(reports, out / "g4.csv")
    write_csv(out / "errors.csv", ["t", "sup_error", "g4_ratio"], rows)
    emit_plot(
        [Series("sup |S(U1)|", list(params.T - times), [r[1] for r in rows])],
        out / "errors.svg",
        title="Error of the glued ansatz",
        x_label="T - t",
        y_label="sup |S(U1)|",
        log_x=True,
        log_y=True,
    )
    return out


def run_nonlocal(config: RunConfig) -> Path:
    out = config.output / "nonlocal"
    params = config.params
    T, k = params.T, params.k
    reports = [r for family in FAMILIES for r in bound_probe_appendix(family, params)]
    probe_report_csv(reports, out / "probes.csv")

    tilde_kappas = T * np.arange(1, k + 1)
    probe = np.union1d(np.linspace(0.0, T, 257), T * (1 - 2.0 ** -np.arange(2, 9)))
    rows = []
    for i in range(1, k + 1):
        combo = vanishing_combo(T, tilde_kappas, i)
        increment = upsilon_hat(combo, probe) - upsilon_hat(combo, T)
        rows.append([i, fit_vanishing_order(TimeSeries.of(probe, increment), T)])
    write_csv(out / "vanishing.csv", ["i", "fitted_order"], rows)

    times = graded_times(T, 4 * config.time_samples)
    path = path_from_alpha(params, times, (1 - times / T) ** k)
    targets = path.times[8 :: max(1, len(path.times) // config.time_samples)]
    origin = [phi1_origin(path, params, float(t)) for t in targets]
    # Phi1(0, T) = 0 normalization
    offset = phi1_origin(path, params, T)
    write_csv(
        out / "phi1.csv",
        ["t", "phi1_origin", "phi1_normalized"],
        ((t, value, value - offset) for t, value in zip(targets, origin)),
    )
    return out


def _h_table(config: RunConfig) -> TimeSeries:
    T = config.params.T
    if config.h_table is None:
        return TimeSeries.sample(lambda t: 2 * np.sqrt(t), np.linspace(0.0, T, config.time_samples + 1), "sqrt")
    columns = read_csv_columns(config.h_table)
    if "t" not in columns or "h" not in columns:
        raise DomainError(f"{config.h_table} needs columns t and h")
    return TimeSeries.of(columns["t"], columns["h"], "sqrt")


def run_abel(config: RunConfig) -> Path:
    out = config.output / "abel"
    params = config.params
    h = _h_table(config)
    solved = abel_solve(h)
    write_csv(out / "alpha.csv", ["t", "h", "alpha"], zip(h.times, h.values, solved.alpha.values))
    values = {
        "samples": len(h.times),
        "alpha_sup": float(np.max(np.abs(solved.alpha.values))),
        "abel_residual": solved.residual,
    }

    if np.isclose(h.T, params.T) and h.values[0] == 0:
        times = graded_times(params.T)
        # A single rate equal to T makes the cancellation system singular
        tilde_kappas = [1.5 * params.T] if params.k == 1 else None
        solution = reduced_solve(TimeSeries.of(times, h(times), "sqrt"), params.k, params.T, tilde_kappas, params)
        reduced_solution_csv(solution, out / "reduced.csv")
        values["vanishing_order"] = solution.vanishing_order
        values["reduced_residual"] = solution.residual
    rate = multipoint_rate(1.0, params.T)
    write_csv(out / "multipoint.csv", ["t", "v", "mu"], zip(rate.times, rate.v, rate.mu))
    values["multipoint_power"] = rate.fitted_power
    values["multipoint_fit_residual"] = rate.fit_residual
    write_key_values(out / "abel.txt", values)
    return out


def run_simulate(config: RunConfig) -> Path:
    out = config.output / "simulate"
    grid = RadialGrid.uniform(CONTROL_EXTENT, config.nodes)
    u0 = FieldSnapshot.from_function(grid, lambda x: CONTROL_AMPLITUDE * np.exp(-x * x))
    traj = run(u0, Controls(threshold=config.threshold))
    trajectory_csv(traj, out / "trajectory.csv")
    fit = fit_rate(traj)
    write_key_values(
        out / "rate.txt",
        {"T_star": fit.T_star, "delta": fit.delta, "exponent": fit.exponent, "residual": fit.residual, "samples": fit.samples},
    )
    remaining = traj.remaining + fit.delta
    window = traj.sup_norm >= np.sqrt(traj.sup_norm[0] * traj.sup_norm[-1])
    scale = traj.sup_norm[-1] * fit.delta**fit.exponent
    emit_plot(
        [
            Series("sup |u|", list(remaining[window]), list(traj.sup_norm[window]), "points"),
            Series("fit", list(remaining[window]), list(scale * remaining[window] ** -fit.exponent)),
        ],
        out / "rate.svg",
        title="Blow-up rate",
        x_label="T* - t",
        y_label="sup |u|",
        log_x=True,
        log_y=True,
        slope=-fit.exponent,
    )

    tracking = ansatz_tracking(
        config.params, Controls(threshold=config.threshold, max_steps=TRACKING_STEPS), nodes=config.nodes
    )
    times = tracking.trajectory.times[np.concatenate(([True], np.diff(tracking.trajectory.times) > 0))]
    write_csv(out / "tracking.csv", ["t", "mu_est", "mu0"], zip(times, tracking.mu_est, tracking.mu0))
    write_key_values(
        out / "tracking.txt",
        {
            "ratio_min": tracking.ratio_min,
            "ratio_max": tracking.ratio_max,
            "growth": tracking.growth,
            "reason": tracking.trajectory.reason,
        },
    )
    return out


def run_report(config: RunConfig) -> Path:
    return render_report(config.output)


SUBCOMMANDS: Dict[str, Callable[[RunConfig], Path]] = {
    "profiles": run_profiles,
    "ansatz": run_ansatz,
    "residual": run_residual,
    "nonlocal": run_nonlocal,
    "abel": run_abel,
    "simulate": run_simulate,
    "report": run_report,
}


def run_subcommand(config: RunConfig) -> Path:
    logger.info("Running %s into %s", config.subcommand, config.output)
    return SUBCOMMANDS[config.subcommand](config)
