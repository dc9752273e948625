import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from blowuplab.core.errors import DomainError

from .types import BlowupParams, ModulationPath, PathPoint

logger = logging.getLogger(__name__)

SQRT3 = np.sqrt(3.0)
QUARTER_ROOT3 = 3.0**0.25


def _time(t, params: BlowupParams, allow_terminal=False) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError(f"Times must be non-negative, got {np.min(t)}")
    too_late = t > params.T if allow_terminal else t >= params.T
    if np.any(too_late):
        raise DomainError(f"Times must precede the blow-up time T={params.T}, got {np.max(t)}")
    return t


def mu0(t, params: BlowupParams, allow_terminal=False):
    t = _time(t, params, allow_terminal)
    return SQRT3 * params.A * (params.T - t) ** (2 * params.k)


def mu0_derivatives(t, params: BlowupParams, allow_terminal=False):
    """mu0, mu0' and mu0'' in closed form"""
    t = _time(t, params, allow_terminal)
    tau = params.T - t
    k = params.k
    c = SQRT3 * params.A
    return (
        c * tau ** (2 * k),
        -2 * k * c * tau ** (2 * k - 1),
        2 * k * (2 * k - 1) * c * tau ** (2 * k - 2),
    )


def inner_radius(t, params: BlowupParams):
    """R(t) = mu0(t)^(-beta)"""
    return mu0(t, params) ** -params.beta


def self_similar_time(t, params: BlowupParams):
    """tau with d tau / dt = mu0^(-2)"""
    t = _time(t, params)
    k = params.k
    return (params.T - t) ** (1 - 4 * k) / (3.0 * params.A**2 * (4 * k - 1))


def time_from_self_similar(tau, params: BlowupParams):
    k = params.k
    tau = np.asarray(tau, dtype=float)
    return params.T - (3.0 * params.A**2 * (4 * k - 1) * tau) ** (1.0 / (1 - 4 * k))


def unperturbed_path(params: BlowupParams, times) -> ModulationPath:
    times = _time(times, params)
    zero = np.zeros_like(times)
    return ModulationPath(params, times, zero, zero.copy(), zero.copy())


def path_from_lambda(
    params: BlowupParams, times, Lam, dLam: Optional[np.ndarray] = None
) -> ModulationPath:
    times = _time(times, params)
    Lam = np.asarray(Lam, dtype=float)
    if dLam is None:
        dLam = np.gradient(Lam, times, edge_order=2)
    m0, dm0, _ = mu0_derivatives(times, params)
    alpha = -QUARTER_ROOT3 * m0**-0.5 * (dm0 * Lam + m0 * dLam)
    return ModulationPath(params, times, Lam, np.asarray(dLam, dtype=float), alpha)


def lambda_from_alpha(params: BlowupParams, times, alpha) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lambda(t) = mu0(t)^(-1) * integral_t^T 3^(-1/4) mu0^(1/2) alpha, so Lambda(T) = 0.

    The samples must end at T; Lambda' follows from the alpha coupling.
    """
    times = _time(times, params, allow_terminal=True)
    alpha = np.asarray(alpha, dtype=float)
    if not np.isclose(times[-1], params.T):
        raise DomainError("Reconstructing Lambda needs alpha sampled up to T")
    m0, dm0, _ = mu0_derivatives(times, params, allow_terminal=True)
    integrand = QUARTER_ROOT3**-1 * np.sqrt(m0) * np.where(np.isfinite(alpha), alpha, 0.0)
    forward = cumulative_trapezoid(integrand, times, initial=0.0)
    tail = forward[-1] - forward
    Lam = np.zeros_like(times)
    dLam = np.zeros_like(times)
    live = m0 > 0
    Lam[live] = tail[live] / m0[live]
    dLam[live] = (-(QUARTER_ROOT3**-1) * np.sqrt(m0[live]) * alpha[live] - dm0[live] * Lam[live]) / m0[live]
    return Lam, dLam


def path_from_alpha(params: BlowupParams, times, alpha) -> ModulationPath:
    times = np.asarray(times, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    Lam, dLam = lambda_from_alpha(params, times, alpha)
    keep = times < params.T
    return ModulationPath(params, times[keep], Lam[keep], dLam[keep], alpha[keep])


def path_point(path: ModulationPath, t: float) -> PathPoint:
    params = path.params
    m0, dm0, ddm0 = (float(v) for v in mu0_derivatives(t, params))
    if len(path.times) == 1:
        Lam, dLam, alpha = float(path.Lam[0]), float(path.dLam[0]), float(path.alpha[0])
    else:
        if t < path.times[0] - 1e-14 or t > path.times[-1] + 1e-14:
            raise DomainError(f"Time {t} is outside the sampled modulation history")
        Lam = float(np.interp(t, path.times, path.Lam))
        dLam = float(np.interp(t, path.times, path.dLam))
        alpha = float(np.interp(t, path.times, path.alpha))
    mu = m0 * (1 + Lam) ** 2
    dmu = dm0 * (1 + Lam) ** 2 + 2 * m0 * (1 + Lam) * dLam
    return PathPoint(t, m0, dm0, ddm0, Lam, dLam, mu, dmu, alpha)


def constant_path(params: BlowupParams, t: float, Lam=0.0, dLam=0.0, alpha=0.0) -> ModulationPath:
    """A single-sample path, for evaluations at one time"""
    t = float(_time(t, params))
    return ModulationPath(params, np.array([t]), np.array([Lam]), np.array([dLam]), np.array([alpha]))
