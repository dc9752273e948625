import logging
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from blowuplab.ansatz.approx import glued_U1, u_outer
from blowuplab.ansatz.cutoff import CutoffSet
from blowuplab.ansatz.scaling import mu0, unperturbed_path
from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import FieldSnapshot, RadialGrid
from blowuplab.core.writers import write_csv

from .rates import track_mu
from .stepper import SSPRK3, LinearlyImplicit, Stepper
from .types import BLOWUP, DECAY, HORIZON, STEP_LIMIT, Controls, TrackingReport, Trajectory

logger = logging.getLogger(__name__)

# Halvings of a failed step before giving up
MAX_RETRIES = 40
# Refined core [0, CORE_WIDTH L] with L = ||u||^-2
CORE_WIDTH = 8.0
# Growth of ||u|| a tracking run must reach before its step budget runs out
MIN_GROWTH = 10.0


def regrid(state: FieldSnapshot, sup: float, intervals: int = 64) -> FieldSnapshot:
    """
    Replaces the nodes on [0, 8 L], L = sup^(-2), by intervals + 1 uniform ones and interpolates
    with a cubic spline through the even extension. The grid is left alone when it is
    already finer there or the core reaches half the domain.
    """
    r = state.grid.nodes
    core = CORE_WIDTH * sup**-2
    spacing = core / intervals
    if core >= 0.5 * r[-1] or spacing >= r[1]:
        return state
    outer = r[r > core + spacing]
    nodes = np.concatenate((np.linspace(0.0, core, intervals + 1), outer))
    spline = CubicSpline(np.concatenate((-r[:0:-1], r)), np.concatenate((state.values[:0:-1], state.values)))
    values = spline(nodes)
    values[-1] = state.values[-1]
    logger.debug("Regrid at sup %.3g: %d nodes, h_min %.3g", sup, len(nodes), spacing)
    return FieldSnapshot(RadialGrid(nodes, "refined"), values, None, state.t)


def _attempt(state: FieldSnapshot, sup: float, dt: float, stepper: Stepper, controls: Controls):
    """
    Steps from state, halving dt after a non-finite result or, for adaptive steppers,
    a relative change above twice the target. Returns (state, dt, change).
    """
    for _ in range(MAX_RETRIES):
        try:
            new = stepper.step(state, dt)
        except NumericalError:
            logger.warning("Step of %.3g overshot at t=%.17g; retrying at half size", dt, state.t)
            dt /= 2
            continue
        change = float(np.max(np.abs(new.values - state.values))) / sup if sup > 0 else 0.0
        if stepper.adaptive and change > 2 * controls.change:
            logger.debug("Step of %.3g changed u by %.3g at t=%.17g; halving", dt, change, state.t)
            dt /= 2
            continue
        return new, dt, change
    raise NumericalError(f"Step size underflow at t={state.t:.17g}, sup {sup:.3g}")


def run(u0: FieldSnapshot, controls: Optional[Controls] = None, stepper: Optional[Stepper] = None) -> Trajectory:
    """
    Integrates from u0 until the sup norm crosses the threshold, falls below the decay
    level, the horizon is reached, or the step budget runs out.

    A step producing non-finite values is retried at half the size.
    """
    controls = Controls() if controls is None else controls
    stepper = SSPRK3(controls) if stepper is None else stepper
    if not np.all(np.isfinite(u0.values)):
        raise DomainError("Initial data must be finite")
    state = u0
    sup = state.sup()
    times, steps, sups, centers = [state.t], [0.0], [sup], [float(state.values[0])]
    snapshots = [state]
    last_regrid = sup
    previous = None
    reason = STEP_LIMIT
    for count in range(controls.max_steps):
        if sup >= controls.threshold:
            reason = BLOWUP
            break
        if sup <= controls.decay:
            reason = DECAY
            break
        if state.t >= controls.horizon:
            reason = HORIZON
            break
        dt = min(stepper.propose(state, sup, previous), controls.horizon - state.t)
        state, dt, change = _attempt(state, sup, dt, stepper, controls)
        previous = (dt, change)
        sup = state.sup()
        if controls.regrid and sup >= 2 * last_regrid:
            state = regrid(state, sup, controls.core_intervals)
            last_regrid = sup
        times.append(state.t)
        steps.append(dt)
        sups.append(sup)
        centers.append(float(state.values[0]))
        if (count + 1) % controls.store_every == 0:
            snapshots.append(state)
    if snapshots[-1] is not state:
        snapshots.append(state)
    logger.info("Run stopped by %s after %d steps: t=%.17g, sup %.3g", reason, len(times) - 1, state.t, sup)
    return Trajectory(np.array(times), np.array(steps), np.array(sups), np.array(centers), snapshots, reason)


def trajectory_csv(traj: Trajectory, path: Path):
    positive = traj.center > 0
    mu_est = np.full(traj.center.shape, np.nan)
    mu_est[positive] = np.sqrt(3.0) / traj.center[positive] ** 2
    rows = zip(traj.times, traj.sup_norm, traj.center, mu_est)
    write_csv(path, ["t", "sup_norm", "u0", "mu_est"], rows, {"reason": traj.reason})


def ansatz_initial_data(params: BlowupParams, nodes: int = 400, r_min: Optional[float] = None) -> FieldSnapshot:
    """
    U1(., 0) on a geometric grid from r_min (default mu0(0)/20) to the far field
    10 sqrt(T). Past the outer cutoff eta_o2 the outer solution is kept, so the data
    meets its Dirichlet value.
    """
    x_max = 10 * np.sqrt(params.T)
    if r_min is None:
        r_min = float(mu0(0.0, params)) / 20
    grid = RadialGrid.geometric(r_min, x_max, nodes)
    path = unperturbed_path(params, np.array([0.0]))
    x = grid.nodes
    values = np.asarray(glued_U1(x, 0.0, params, path), dtype=float)
    cutoffs = CutoffSet(params, 0.0)
    far = (1 - cutoffs.eta_o1(x[1:]).value) * (1 - cutoffs.eta_o2(x[1:]).value)
    values[1:] += far * u_outer(x[1:], 0.0, params)
    return FieldSnapshot(grid, values, None, 0.0)


def ansatz_tracking(
    params: BlowupParams, controls: Optional[Controls] = None, nodes: int = 400, remaining: float = 0.05
) -> TrackingReport:
    """
    Runs from U1(., 0) with the outer solution as far-field Dirichlet data until
    T - t = remaining T, and compares the scale read off u(0, t) with mu0(t).

    The linearly implicit stepper lets the bubble core relax on its own time scale
    mu0^2 while steps follow the slow drift of mu0. The grid resolves the final
    scale mu0(t_end) from the start.
    """
    if not 0 < remaining < 1:
        raise DomainError(f"Remaining fraction must lie in (0, 1), got {remaining}")
    controls = Controls() if controls is None else controls
    t_end = params.T * (1 - remaining)
    u0 = ansatz_initial_data(params, nodes, float(mu0(t_end, params)) / 20)
    x_max = u0.grid.r_max
    controls = controls._replace(
        horizon=min(controls.horizon, t_end),
        regrid=False,
        boundary=lambda t: float(u_outer(x_max, min(t, t_end), params)),
    )
    traj = run(u0, controls, LinearlyImplicit(controls))
    growth = float(traj.sup_norm[-1] / traj.sup_norm[0])
    if traj.reason == STEP_LIMIT and growth < MIN_GROWTH:
        raise NumericalError(
            f"Tracking used {controls.max_steps} steps and reached t={traj.times[-1]:.6g} "
            f"with ||u|| grown x{growth:.3g}, short of x{MIN_GROWTH:g}"
        )
    mu_est = track_mu(traj)
    reference = mu0(mu_est.times, params)
    ratio = mu_est.values / reference
    logger.info(
        "Ansatz tracking k=%d: mu_est / mu0 in [%.4g, %.4g], sup grew x%.3g (%s)",
        params.k,
        ratio.min(),
        ratio.max(),
        growth,
        traj.reason,
    )
    return TrackingReport(traj, mu_est.values, reference, float(ratio.min()), float(ratio.max()), growth)
