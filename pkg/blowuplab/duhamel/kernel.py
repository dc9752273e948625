"""
The 3d heat kernel acting on radial functions.

Integrating the Gaussian over angles leaves the one-dimensional kernel

    K(x, rho, tau) = rho / (x sqrt(4 pi tau)) [exp(-(x-rho)^2 / 4tau) - exp(-(x+rho)^2 / 4tau)]

which at x = 0 becomes 4 pi rho^2 (4 pi tau)^(-3/2) exp(-rho^2 / 4tau).
"""
import logging
from typing import TYPE_CHECKING, Callable, Optional, Sequence, Union

import numpy as np

from blowuplab.core.errors import DomainError
from blowuplab.core.quadrature import composite_rule, geometric_breaks
from blowuplab.core.types import FieldSnapshot
from blowuplab.core.workers import parallel_map

if TYPE_CHECKING:
    from .sources import RadialSource

logger = logging.getLogger(__name__)

# Half width of the integration window in units of sqrt(tau); exp(-WINDOW^2 / 4) ~ 2e-16
WINDOW = 12.0
# Smallest time scale resolved by the geometric panels, relative to t, for sources
# without a length scale
MIN_TIME_FRACTION = 2.0**-40


def radial_kernel(x: float, rho, tau: float):
    rho = np.asarray(rho, dtype=float)
    gauss = rho / np.sqrt(4 * np.pi * tau) * np.exp(-((x - rho) ** 2) / (4 * tau))
    if x == 0:
        return gauss * rho / tau
    return gauss * -np.expm1(-x * rho / tau) / x


def radial_quadrature(
    x: float,
    tau: float,
    f: Callable[[np.ndarray], np.ndarray],
    breaks: Sequence[float] = (),
    length_scale: Optional[float] = None,
    n: int = 16,
) -> float:
    """
    integral_0^inf K(x, rho, tau) f(rho) d rho on panels of width at most sqrt(tau) / 2.

    :param breaks: discontinuities of f, inserted as panel ends
    :param length_scale: a small feature size of f; panels are refined geometrically towards the origin
    """
    width = WINDOW * np.sqrt(tau)
    lo, hi = max(0.0, x - width), x + width
    count = int(np.ceil((hi - lo) / (0.5 * np.sqrt(tau))))
    edges = [np.linspace(lo, hi, count + 1), [b for b in breaks if lo < b < hi]]
    if lo < x < hi:
        edges.append([x])
    if length_scale is not None and lo == 0.0 and 0 < length_scale < hi:
        edges.append(geometric_breaks(length_scale / 4.0, min(hi, 4.0 * np.sqrt(tau) + x)))
    nodes, weights = composite_rule(np.concatenate([np.asarray(e, dtype=float) for e in edges]), n)
    return float(np.sum(weights * radial_kernel(x, nodes, tau) * f(nodes)))


def _initial_profile(u0: Union[FieldSnapshot, Callable]) -> Callable:
    if isinstance(u0, FieldSnapshot):
        return u0.evaluate
    return u0


def heat_flow(u0: Union[FieldSnapshot, Callable], x, t: float, breaks: Sequence[float] = ()):
    """Free evolution of radial initial data for time t"""
    if t < 0:
        raise DomainError(f"Heat flow needs t >= 0, got {t}")
    f = _initial_profile(u0)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if t == 0:
        values = np.asarray(f(np.abs(xs)), dtype=float)
    else:
        values = np.array([radial_quadrature(abs(xi), t, f, breaks) for xi in xs])
    return values.reshape(np.shape(x))


def _duhamel_point(source: "RadialSource", x: float, t: float, n: int) -> float:
    scale = source.time_scale(t)
    lo = scale if scale > 0 else MIN_TIME_FRACTION * t
    nodes, weights = composite_rule(geometric_breaks(lo, t), n)
    values = np.array([source.spatial_integral(x, tau, t - tau) for tau in nodes])
    return float(np.sum(weights * values))


def duhamel_radial(source: "RadialSource", x, t: float, n: int = 16):
    """
    psi(x, t) = integral_0^t (heat flow of f(., s) for time t - s)(x) ds, with psi(., 0) = 0.

    The time integral runs over tau = t - s on panels refined geometrically towards tau = 0.
    """
    if t < 0:
        raise DomainError(f"Duhamel integral needs t >= 0, got {t}")
    xs = np.atleast_1d(np.abs(np.asarray(x, dtype=float)))
    if t == 0:
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0
    values = np.array(parallel_map(lambda xi: _duhamel_point(source, float(xi), t, n), xs))
    logger.debug("Duhamel integral at t=%g over %d radii", t, len(xs))
    return values.reshape(np.shape(x)) if np.ndim(x) else float(values[0])
