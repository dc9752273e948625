import logging
from typing import Optional, Sequence

import numpy as np

from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import TimeSeries

logger = logging.getLogger(__name__)

# Largest condition number of the scaled least-squares design matrix
MAX_CONDITION = 1e10
# Dyadic exponents m of the points T (1 - 2^-m) used for vanishing orders
DYADIC_RANGE = (2, 8)


def _fit(series: TimeSeries, T: float, width: float, degree: int) -> Optional[np.ndarray]:
    inside = (series.times >= T - width) & (series.times <= T)
    if np.count_nonzero(inside) < degree + 2:
        return None
    z = (T - series.times[inside]) / width
    design = z[:, None] ** np.arange(degree + 1)[None, :]
    condition = np.linalg.cond(design)
    if condition > MAX_CONDITION:
        raise NumericalError(f"Taylor fit on a window of width {width:.3g} is unstable (condition number {condition:.3g})")
    scaled, *_ = np.linalg.lstsq(design, series.values[inside], rcond=None)
    return scaled / width ** np.arange(degree + 1)


def taylor_at_T(
    g: TimeSeries,
    k: int,
    T: Optional[float] = None,
    extra_degree: int = 0,
    rtol: float = 0.01,
    max_halvings: int = 12,
) -> np.ndarray:
    """
    d_0..d_k with g(t) = sum_j d_j (T - t)^j + ..., fitted by least squares on [T - w, T].

    The window starts at w = T/2 and is halved until the contributions d_j w^j of two
    consecutive fits agree to `rtol` relative to the size of g on the window.

    :param extra_degree: additional fitted powers beyond k, dropped from the result
    """
    T = g.T if T is None else float(T)
    if k < 0:
        raise DomainError(f"Taylor degree must be non-negative, got {k}")
    degree = k + extra_degree
    width = T / 2
    previous = _fit(g, T, width, degree)
    if previous is None:
        raise NumericalError(f"Too few samples on [T/2, T] for a degree {degree} fit")
    for _ in range(max_halvings):
        width /= 2
        current = _fit(g, T, width, degree)
        if current is None:
            logger.warning("Taylor fit ran out of samples at window %.3g before settling", 2 * width)
            return previous[: k + 1]
        inside = g.times >= T - width
        size = max(float(np.max(np.abs(g.values[inside]))), 1e-300)
        change = np.max(np.abs(current[: k + 1] - previous[: k + 1]) * width ** np.arange(k + 1))
        logger.debug("Taylor window %.3g: change %.3g", width, change / size)
        previous = current
        if change <= rtol * size:
            return current[: k + 1]
    logger.warning("Taylor coefficients did not settle to %g after %d halvings", rtol, max_halvings)
    return previous[: k + 1]


def dyadic_times(T: float, m_range: Sequence[int] = DYADIC_RANGE) -> np.ndarray:
    return T * (1 - 2.0 ** -np.arange(m_range[0], m_range[1] + 1))


def fit_vanishing_order(series: TimeSeries, T: float, points: int = 3) -> float:
    """
    Slope of log |series| against log (T - t) through the last `points` of the dyadic
    times T (1 - 2^-m); infinite when the series vanishes there.
    """
    t = dyadic_times(T)[-points:]
    values = np.abs(series(t))
    if np.all(values == 0):
        return float("inf")
    usable = values > 0
    if np.count_nonzero(usable) < 2:
        return float("nan")
    return float(np.polyfit(np.log(T - t[usable]), np.log(values[usable]), 1)[0])
