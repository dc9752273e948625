import logging
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp

from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.quadrature import composite_rule

from .bubble import BUBBLE_PEAK, bubble_w, kernel_Z0, kernel_Z0_derivative
from .types import ProfileSample

logger = logging.getLogger(__name__)

# Taylor start J = c2 y^2 + c4 y^4 from substituting into the equation at the origin
J_C2 = -BUBBLE_PEAK / 24.0
J_C4 = BUBBLE_PEAK / 16.0
Y_START = 1e-3
# Half width of the window around the zero of Z0 where the quadrature hands over to the ode
ZERO_WINDOW = 1e-2
# Largest accepted residual of the Wronskian identity at the window ends
HANDOVER_TOLERANCE = 1e-8


def _rhs(y, state):
    j, dj = state
    w = BUBBLE_PEAK / np.sqrt(1.0 + y * y)
    return [dj, 0.5 * kernel_Z0(y) - 5.0 * w**4 * j - 2.0 * dj / y]


@lru_cache(maxsize=8)
def _ode_solution(y_max: float):
    start = [J_C2 * Y_START**2 + J_C4 * Y_START**4, 2 * J_C2 * Y_START + 4 * J_C4 * Y_START**3]
    sol = solve_ivp(
        _rhs,
        (Y_START, y_max),
        start,
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    if not sol.success:
        raise NumericalError(f"Corrector ode failed to reach y={y_max}: {sol.message}")
    logger.debug("Integrated corrector ode to y=%g in %d steps", y_max, len(sol.t))
    return sol.sol


def _bucket(y_max: float) -> float:
    return float(max(64.0, 2.0 ** np.ceil(np.log2(max(y_max, 1.0)))))


def _corrector_ode(y: np.ndarray) -> ProfileSample:
    value = np.empty_like(y)
    deriv = np.empty_like(y)
    small = y < Y_START
    ys = y[small]
    value[small] = J_C2 * ys**2 + J_C4 * ys**4
    deriv[small] = 2 * J_C2 * ys + 4 * J_C4 * ys**3
    if np.any(~small):
        sol = _ode_solution(_bucket(float(np.max(y))))
        state = sol(y[~small])
        value[~small] = state[0]
        deriv[~small] = state[1]
    return ProfileSample(y, value, deriv)


def _half_mass(s: np.ndarray) -> np.ndarray:
    """(1/2) * integral_0^s rho^2 Z0(rho)^2 drho in closed form"""
    s = np.asarray(s, dtype=float)
    q = 1.0 + s * s
    closed = s - 2.5 * np.arctan(s) + 2.5 * s / q - s / q**2
    series = s**3 / 3.0 - s**5 + 13.0 * s**7 / 7.0
    return np.sqrt(3.0) / 8.0 * np.where(s < 0.05, series, closed)


def _reduction_integrand(s):
    z0 = kernel_Z0(s)
    return _half_mass(s) / (s * s * z0 * z0)


def _cumulative_integral(a: float, targets: np.ndarray) -> np.ndarray:
    """integral_a^b of the reduction-of-order integrand for each b in targets (b >= a)"""
    if targets.size == 0:
        return targets
    top = float(np.max(targets))
    fine = np.arange(a, min(top, 8.0), 0.05)
    coarse = np.geomspace(8.0, top, 64) if top > 8.0 else np.zeros(0)
    breaks = np.unique(np.concatenate(([a], fine, coarse, targets)))
    nodes, weights = composite_rule(breaks, 16)
    panel_values = (_reduction_integrand(nodes) * weights).reshape(len(breaks) - 1, -1).sum(axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(panel_values)))
    return cumulative[np.searchsorted(breaks, targets)]


def handover_residual() -> float:
    """
    Largest |y^2 (Z0 J' - Z0' J) - (1/2) integral_0^y s^2 Z0^2 ds| at the ends of the window
    around the zero of Z0, with J from the ode. Reduction of order rests on this identity.
    """
    ends = np.array([1.0 - ZERO_WINDOW, 1.0 + ZERO_WINDOW])
    ode = _corrector_ode(ends)
    wronskian = ends**2 * (kernel_Z0(ends) * ode.derivative - kernel_Z0_derivative(ends) * ode.value)
    return float(np.max(np.abs(wronskian - _half_mass(ends))))


def _corrector_quadrature(y: np.ndarray) -> ProfileSample:
    value = np.empty_like(y)
    deriv = np.empty_like(y)
    lo, hi = 1.0 - ZERO_WINDOW, 1.0 + ZERO_WINDOW
    below = (y > 0) & (y < lo)
    near = (y >= lo) & (y <= hi)
    above = y > hi
    origin = y == 0
    value[origin] = 0.0
    deriv[origin] = 0.0

    if np.any(below):
        ys = y[below]
        v = _cumulative_integral(0.0, ys)
        value[below] = kernel_Z0(ys) * v
        deriv[below] = kernel_Z0_derivative(ys) * v + kernel_Z0(ys) * _reduction_integrand(ys)
    if np.any(near | above):
        residual = handover_residual()
        if residual > HANDOVER_TOLERANCE:
            raise NumericalError(f"Corrector handover at the zero of Z0 is off by {residual:.3g}")
    if np.any(near):
        logger.debug("Corrector quadrature crossed the zero of Z0; using the ode on [%g, %g]", lo, hi)
        ode = _corrector_ode(y[near])
        value[near] = ode.value
        deriv[near] = ode.derivative
    if np.any(above):
        ys = y[above]
        anchor = _corrector_ode(np.array([hi]))
        v = anchor.value[0] / kernel_Z0(hi) + _cumulative_integral(hi, ys)
        value[above] = kernel_Z0(ys) * v
        deriv[above] = kernel_Z0_derivative(ys) * v + kernel_Z0(ys) * _reduction_integrand(ys)
    return ProfileSample(y, value, deriv)


def corrector_J(y, method: Literal["ode", "quadrature"] = "ode") -> ProfileSample:
    """
    The radial corrector J with J(0) = J'(0) = 0 solving
    J'' + (2/y) J' + 5 w^4 J = Z0 / 2.

    :param method: ``ode`` integrates outward from a Taylor start; ``quadrature``
        uses reduction of order against the kernel Z0
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise DomainError(f"Radius must be non-negative, got min {np.min(y)}")
    if method == "ode":
        return _corrector_ode(y)
    if method == "quadrature":
        return _corrector_quadrature(y)
    raise DomainError(f"Unknown corrector method {method}")


def corrector_laplacian(y, j=None):
    """Delta J = Z0/2 - 5 w^4 J"""
    if j is None:
        j = corrector_J(y).value
    return 0.5 * kernel_Z0(y) - 5.0 * bubble_w(y) ** 4 * j
