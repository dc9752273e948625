import logging
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from blowuplab.core.errors import DomainError
from blowuplab.core.types import TimeSeries

from .fractional import abel_derivative
from .taylor import dyadic_times, fit_vanishing_order
from .types import MultipointRate

logger = logging.getLogger(__name__)


def multipoint_rate(c_star: float, T: float, times: Optional[Sequence[float]] = None) -> MultipointRate:
    """
    v with integral_0^t v'(s) (t-s)^(-1/2) ds = c_star and v(T) = 0, and the scale
    mu = (v / 2)^2 it drives.

    v' = (1/pi) d/dt integral_0^t c_star (t-s)^(-1/2) ds comes from the Abel derivative and
    behaves like t^(-1/2), so v is integrated in u = sqrt(t) where 2 u v'(u^2) is regular.
    The closed form is v(t) = -(2 c_star / pi) (sqrt(T) - sqrt(t)); the report carries the
    least-squares fit against that shape.
    """
    if T <= 0:
        raise DomainError(f"Blow-up time must be positive, got {T}")
    if times is None:
        times = np.union1d(np.linspace(0.0, T, 257), dyadic_times(T))
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(times > T):
        raise DomainError(f"Times must lie in [0, T={T}]")
    if times[-1] != T:
        times = np.append(times, T)
    if len(times) < 3:
        raise DomainError("The multipoint rate needs at least 3 times")

    source = TimeSeries.of(times, np.full(times.shape, float(c_star)), "sqrt")
    u = np.sqrt(times)
    regular = np.empty(times.shape)
    positive = times > 0
    regular[positive] = 2 * u[positive] * abel_derivative(source, times[positive]).values / np.pi
    if not positive[0]:
        # Linear extrapolation in u to the origin
        regular[0] = regular[1] - (regular[2] - regular[1]) * u[1] / (u[2] - u[1])
    integral = cumulative_trapezoid(regular, u, initial=0.0)
    v = integral - integral[-1]

    shape = u - np.sqrt(T)
    amplitude = float(np.dot(shape, v) / np.dot(shape, shape))
    scale = max(float(np.max(np.abs(v))), 1e-300)
    fit_residual = float(np.max(np.abs(v - amplitude * shape))) / scale
    mu = (v / 2) ** 2
    power = fit_vanishing_order(TimeSeries.of(times, mu), T)
    logger.debug(
        "Multipoint rate for c*=%g: v ~ %.6g (sqrt(t) - sqrt(T)) with fit residual %.3g, mu ~ (T - t)^%.4g",
        c_star,
        amplitude,
        fit_residual,
        power,
    )
    return MultipointRate(times, v, mu, power, amplitude, fit_residual)
