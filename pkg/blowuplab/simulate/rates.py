import logging

import numpy as np
from scipy.optimize import minimize_scalar

from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import TimeSeries

from .types import BLOWUP, RateFit, Trajectory

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8
# Largest rms deviation of log ||u|| from the fitted power law
MAX_RESIDUAL = 0.1


def _power_fit(tau: np.ndarray, log_sup: np.ndarray):
    """Least squares of log_sup = b - p log tau; returns (p, b, rms)"""
    design = np.column_stack((-np.log(tau), np.ones_like(tau)))
    (p, b), *_ = np.linalg.lstsq(design, log_sup, rcond=None)
    rms = float(np.sqrt(np.mean((design @ (p, b) - log_sup) ** 2)))
    return float(p), float(b), rms


def fit_rate(traj: Trajectory) -> RateFit:
    """
    Fits ||u|| ~ (T* - t)^(-p) on the samples whose sup norm lies above the geometric
    midpoint of its first and last values. T* sits delta past the final sample;
    delta is found by a bounded scalar search in log delta.
    """
    if traj.reason != BLOWUP:
        raise DomainError(f"Rate fits need a trajectory stopped by {BLOWUP}, got {traj.reason}")
    remaining = traj.remaining
    cut = np.sqrt(traj.sup_norm[0] * traj.sup_norm[-1])
    window = traj.sup_norm >= cut
    tau, log_sup = remaining[window], np.log(traj.sup_norm[window])
    if len(tau) < MIN_SAMPLES:
        raise NumericalError(f"Only {len(tau)} samples in the fit window, need {MIN_SAMPLES}")
    smallest = traj.steps[-1]
    if smallest <= 0 or tau[0] <= 0:
        raise NumericalError("Fit window has no resolved time to blow-up")
    lo, hi = np.log(1e-3 * smallest), np.log(tau[0])
    search = minimize_scalar(
        lambda s: _power_fit(tau + np.exp(s), log_sup)[2], bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
    )
    delta = float(np.exp(search.x))
    exponent, _, residual = _power_fit(tau + delta, log_sup)
    span = (tau[0] + delta) / delta
    if span < 4:
        raise NumericalError(f"Fit window spans {np.log2(span):.2g} dyadic scales, need 2")
    if residual > MAX_RESIDUAL:
        raise NumericalError(f"Rate fit residual {residual:.3g} above {MAX_RESIDUAL}; exponent {exponent:.3g} unreliable")
    T_star = float(traj.times[-1] + delta)
    logger.info("Rate fit: exponent %.6g, T* = %.17g, residual %.3g", exponent, T_star, residual)
    return RateFit(delta, T_star, exponent, residual, (float(tau[0] + delta), delta), len(tau))


def track_mu(traj: Trajectory) -> TimeSeries:
    """mu_est = sqrt(3) / u(0, t)^2, inverting u(0) = 3^(1/4) mu^(-1/2)"""
    if np.any(traj.center <= 0):
        raise DomainError(f"Center values must be positive, got {np.min(traj.center)}")
    keep = np.concatenate(([True], np.diff(traj.times) > 0))
    mu = np.sqrt(3.0) / traj.center[keep] ** 2
    times = traj.times[keep]
    if len(times) == 1:
        return TimeSeries(times, mu)
    return TimeSeries.of(times, mu)
