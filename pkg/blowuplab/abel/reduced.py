"""
The reduced equation for the modulation source alpha:

    integral_0^t alpha(s) (t-s)^(-1/2) ds = h(t) - sum_j c_j B_j(0, t)

Taking half integrals once more gives pi integral_0^t alpha = H(t) - sum_j c_j Upsilon_j(t)
with H the half integral of h, so choosing c to cancel the Taylor coefficients of
orders 1..k of the right side at T makes alpha vanish to order k there.
"""
import logging
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from blowuplab.ansatz.scaling import lambda_from_alpha, path_from_alpha, unperturbed_path
from blowuplab.ansatz.types import BlowupParams, ModulationPath
from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import TimeSeries
from blowuplab.core.writers import write_csv
from blowuplab.duhamel.blocks import (
    combination_blocks,
    combination_value,
    upsilon_derivative,
    upsilon_derivative_root,
    upsilon_taylor,
    vanishing_combo,
)

from .fractional import abel_derivative, abel_forward
from .taylor import fit_vanishing_order, taylor_at_T
from .types import FixedPointReport, ReducedSolution

logger = logging.getLogger(__name__)

# Smallest accepted singular value of the dimensionless cancellation matrix
MIN_SINGULAR = 1e-10
# Largest accepted full residual, relative to max(sup |h|, 1)
RESIDUAL_TOLERANCE = 1e-4
# Bisections of the alpha samples before the residual bound is given up
MAX_REFINEMENTS = 4


def graded_times(T: float, n: int = 600, power: float = 3.0) -> np.ndarray:
    """0 = t_0 < ... < t_n = T, clustered at T like T - t ~ (n - i)^power"""
    if n < 2:
        raise DomainError(f"Need at least 2 intervals, got {n}")
    x = np.linspace(0.0, 1.0, n + 1)
    times = T * (1 - (1 - x) ** power)
    times[-1] = T
    return times


def default_tilde_kappas(T: float, k: int) -> np.ndarray:
    return T * np.arange(1, k + 1, dtype=float)


def _cancellation_matrix(combos, T: float, k: int) -> np.ndarray:
    """Column j holds the Taylor coefficients of orders 1..k of Upsilon_j at T, rows scaled by T^p"""
    table = np.column_stack([upsilon_taylor(combo, T, k) for combo in combos])
    rows = T ** np.arange(k + 1)[:, None]
    scaled = table * rows
    scaled = scaled / np.max(np.abs(scaled), axis=0)
    smallest = np.linalg.svd(scaled[1:], compute_uv=False)[-1]
    if smallest < MIN_SINGULAR:
        raise NumericalError(
            f"The cancellation system is singular (smallest singular value {smallest:.3g}); "
            "pass distinct tilde_kappas different from T"
        )
    return (table * rows)[1:]


def _bisect(times: np.ndarray) -> np.ndarray:
    return np.sort(np.concatenate((times, 0.5 * (times[1:] + times[:-1]))))


def _singular_forward(h0: float, c, combos, targets: np.ndarray) -> np.ndarray:
    """
    integral_0^t of the t^(-1/2) part of alpha against the kernel, integrated with the
    algebraic end-point weights s^(-1/2) (t - s)^(-1/2) on its exact form.
    """

    def scaled(s):
        blocks = sum(cj * upsilon_derivative_root(combo, s) for cj, combo in zip(c, combos))
        return float(h0 - blocks) / np.pi

    values = np.empty(targets.shape)
    for j, t in enumerate(targets):
        values[j], _ = quad(scaled, 0.0, t, weight="alg", wvar=(-0.5, -0.5))
    return values


def _singular_alpha(h0: float, c, combos, times: np.ndarray) -> np.ndarray:
    # Cut at the first positive sample
    positive = times > 0
    singular = np.zeros(times.shape)
    singular[positive] = (
        h0 / np.sqrt(times[positive])
        - sum(cj * upsilon_derivative(combo, times[positive]) for cj, combo in zip(c, combos))
    ) / np.pi
    singular[~positive] = singular[positive][0]
    return singular


def reduced_solve(
    h: TimeSeries,
    k: int,
    T: float,
    tilde_kappas: Optional[Sequence[float]] = None,
    params: Optional[BlowupParams] = None,
    extra_degree: int = 4,
    taylor_rtol: float = 1e-8,
    tolerance: float = RESIDUAL_TOLERANCE,
    max_refinements: int = MAX_REFINEMENTS,
) -> ReducedSolution:
    """
    Solves the reduced equation for alpha and c, then rebuilds Lambda with Lambda(T) = 0.

    alpha is checked against the full equation: the sup over the samples of h in [T/10, T)
    of |integral_0^t alpha(s) (t-s)^(-1/2) ds - h(t) + sum_j c_j B_j(0, t)|. Its samples are
    bisected until that residual is at most `tolerance` times max(sup |h|, 1).

    :param h: sampled on [0, T], ending at T
    :param tilde_kappas: rates of the vanishing combinations, default (1..k) T
    :param params: supplies mu0 for the Lambda reconstruction; defaults use k and T
    :raises NumericalError: the residual bound still fails after `max_refinements` bisections
    """
    if not np.isclose(h.times[-1], T) or h.times[0] != 0:
        raise DomainError(f"The reduced equation needs h sampled on [0, T={T}]")
    params = BlowupParams(k=k, T=T) if params is None else params
    if params.k != k or not np.isclose(params.T, T):
        raise DomainError(f"Parameters (k={params.k}, T={params.T}) disagree with k={k}, T={T}")
    tilde_kappas = default_tilde_kappas(T, k) if tilde_kappas is None else np.asarray(tilde_kappas, dtype=float)
    times = h.times
    h = h.with_order("sqrt")

    combos = [vanishing_combo(T, tilde_kappas, i) for i in range(1, k + 1)]
    blocks = tuple(combination_blocks(combo) for combo in combos)
    H = abel_forward(h)
    d = taylor_at_T(H, k, T, extra_degree, taylor_rtol)
    matrix = _cancellation_matrix(combos, T, k)
    c = np.linalg.solve(matrix, d[1:] * T ** np.arange(1, k + 1))

    # The constant part of h and the block terms are inverted in closed form; both carry a
    # t^(-1/2) singularity. The rest goes through the sampled Abel derivative.
    h0 = float(h.values[0])
    regular = TimeSeries.of(times, h.values - h0, "sqrt")
    window = times[(times >= T / 10) & (times < T)]
    if len(window) == 0:
        raise DomainError("No samples of h inside [T/10, T)")
    target = h(window) - sum(cj * combination_value(b, window) for cj, b in zip(c, blocks))
    # What the regular part has to reproduce on the window
    remainder = target - _singular_forward(h0, c, combos, window)
    bound = tolerance * max(float(np.max(np.abs(h.values))), 1.0)

    alpha_times = times
    for refinement in range(max_refinements + 1):
        regular_alpha = TimeSeries.of(alpha_times, abel_derivative(regular, alpha_times).values / np.pi, "linear")
        residual = float(np.max(np.abs(abel_forward(regular_alpha, window).values - remainder)))
        if residual <= bound:
            break
        if refinement == max_refinements:
            raise NumericalError(
                f"Reduced equation residual {residual:.3g} exceeds {bound:.3g} on [T/10, T) "
                f"after {max_refinements} bisections of {len(times)} samples"
            )
        logger.debug("Reduced residual %.3g on %d samples; bisecting", residual, len(alpha_times))
        alpha_times = _bisect(alpha_times)
    alpha = regular_alpha.values + _singular_alpha(h0, c, combos, alpha_times)

    alpha_series = TimeSeries(alpha_times, alpha, "linear")
    order = fit_vanishing_order(alpha_series, T)
    if order < k - 1:
        raise NumericalError(f"alpha vanishes to order {order:.3g} at T, below k - 1 = {k - 1}")
    Lam, _ = lambda_from_alpha(params, alpha_times, alpha)
    logger.info(
        "Reduced solve k=%d T=%g: c=%s, vanishing order %.3g, residual %.3g",
        k,
        T,
        np.array2string(c, precision=4),
        order,
        residual,
    )
    return ReducedSolution(
        alpha_series,
        TimeSeries.of(alpha_times, Lam),
        c,
        blocks,
        tilde_kappas,
        d,
        order,
        residual,
    )


def reconstruct_lambda(alpha: TimeSeries, params: BlowupParams) -> TimeSeries:
    Lam, _ = lambda_from_alpha(params, alpha.times, alpha.values)
    return TimeSeries.of(alpha.times, Lam)


def solution_path(solution: ReducedSolution, params: BlowupParams) -> ModulationPath:
    return path_from_alpha(params, solution.alpha.times, solution.alpha.values)


def iterate_reduced(
    h_of_path: Callable[[ModulationPath, Optional[ReducedSolution]], TimeSeries],
    params: BlowupParams,
    times: Sequence[float],
    max_iter: int = 5,
    tol: float = 1e-3,
    tilde_kappas: Optional[Sequence[float]] = None,
) -> FixedPointReport:
    """
    Rebuilds h from the current modulation path and re-solves, starting from alpha = 0.
    Stops when the relative sup change of alpha drops below `tol` or after `max_iter` passes.
    """
    times = np.asarray(times, dtype=float)
    path = unperturbed_path(params, times[times < params.T])
    solution, previous = None, None
    changes = []
    for step in range(max_iter):
        solution = reduced_solve(h_of_path(path, solution), params.k, params.T, tilde_kappas, params)
        # Refinement may differ between passes; compare on the caller's times
        sampled = solution.alpha(times)
        current = np.where(np.isfinite(sampled), sampled, 0.0)
        if previous is not None:
            change = float(np.max(np.abs(current - previous)) / max(np.max(np.abs(current)), 1e-300))
            changes.append(change)
            logger.debug("Reduced iteration %d: relative change %.3g", step, change)
            if change <= tol:
                return FixedPointReport(solution, changes, True)
        previous = current
        path = solution_path(solution, params)
    logger.warning("Reduced iteration stopped after %d passes without meeting tol=%g", max_iter, tol)
    return FixedPointReport(solution, changes, False)


def reduced_solution_csv(solution: ReducedSolution, path: Path):
    comments = {
        "c": [float(v) for v in solution.c],
        "tilde_kappas": [float(v) for v in solution.tilde_kappas],
        "taylor": [float(v) for v in solution.taylor],
        "vanishing_order": solution.vanishing_order,
        "residual": solution.residual,
    }
    rows = zip(solution.alpha.times, solution.alpha.values, solution.Lambda.values)
    write_csv(path, ["t", "alpha", "Lambda"], rows, comments)
