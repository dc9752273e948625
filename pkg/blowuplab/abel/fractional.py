"""
Half-order integrals against the Abel kernel (t - s)^(-1/2) and their inversion.

Every integral is exact for the interpolant of the input TimeSeries: linear and
cubic pieces go through the substitution s = t - u^2, which leaves a polynomial in u
on each panel, and a + b sqrt(s) pieces use closed forms.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.quadrature import composite_rule
from blowuplab.core.types import TimeSeries

from .types import AbelSolution

logger = logging.getLogger(__name__)

# Gauss points per panel; exact for cubic pieces after the substitution
PANEL_NODES = 8


def _targets(f: TimeSeries, targets: Optional[Sequence[float]]) -> np.ndarray:
    t = f.times if targets is None else np.asarray(targets, dtype=float)
    if np.any(t < 0):
        raise DomainError(f"Abel integrals need t >= 0, got {np.min(t)}")
    return t


def _pieces(f: TimeSeries, t: float):
    """Left ends, right ends clipped at t, and indices of the pieces meeting [0, t]"""
    s = f.times
    live = s[:-1] < t
    lo = s[:-1][live]
    hi = np.minimum(s[1:][live], t)
    return lo, hi, np.nonzero(live)[0]


def _sqrt_coefficients(f: TimeSeries):
    """f = a_j + b_j sqrt(s) on piece j"""
    roots = np.sqrt(f.times)
    b = np.diff(f.values) / np.diff(roots)
    a = f.values[:-1] - b * roots[:-1]
    return a, b


def _plain_moment(t: float, lo, hi):
    """integral_lo^hi (t - s)^(-1/2) ds"""
    return 2 * (hi - lo) / (np.sqrt(t - lo) + np.sqrt(t - hi))


def _root_moment(t: float, lo, hi):
    """integral_lo^hi sqrt(s) (t - s)^(-1/2) ds"""

    def antiderivative(s):
        return t * np.arcsin(np.sqrt(np.clip(s / t, 0.0, 1.0))) - np.sqrt(s * np.clip(t - s, 0.0, None))

    return antiderivative(hi) - antiderivative(lo)


def _tail(f: TimeSeries, t: float) -> float:
    # Past the last sample the series is held constant
    last = f.times[-1]
    return f.values[-1] * 2 * np.sqrt(t - last) if t > last else 0.0


def _forward_at(f: TimeSeries, t: float) -> float:
    if t == 0:
        return 0.0
    if f.order == "sqrt":
        lo, hi, idx = _pieces(f, t)
        a, b = _sqrt_coefficients(f)
        return float(np.sum(a[idx] * _plain_moment(t, lo, hi) + b[idx] * _root_moment(t, lo, hi)) + _tail(f, t))
    top = np.sqrt(t)
    kinks = np.sqrt(t - f.times[f.times < t])
    nodes, weights = composite_rule(np.union1d([0.0, top], kinks), PANEL_NODES)
    return float(2 * np.sum(weights * f(t - nodes * nodes)))


def abel_forward(f: TimeSeries, targets: Optional[Sequence[float]] = None) -> TimeSeries:
    """t -> integral_0^t f(s) (t - s)^(-1/2) ds"""
    t = _targets(f, targets)
    return TimeSeries.of(t, [_forward_at(f, float(ti)) for ti in t], "sqrt")


def half_integral(f: TimeSeries, targets: Optional[Sequence[float]] = None) -> TimeSeries:
    """The Riemann-Liouville integral of order 1/2"""
    g = abel_forward(f, targets)
    return TimeSeries.of(g.times, g.values / np.sqrt(np.pi), "sqrt")


def abel_derivative(h: TimeSeries, targets: Optional[Sequence[float]] = None) -> TimeSeries:
    """
    d/dt integral_0^t h(s) (t - s)^(-1/2) ds = h(0) t^(-1/2) + integral_0^t h'(s) (t - s)^(-1/2) ds,
    with h' integrated exactly against the kernel on every piece.
    """
    t = _targets(h, targets)
    if h.order == "cubic":
        logger.debug("Differentiating a cubic series through its sqrt-basis interpolant")
        h = h.with_order("sqrt")
    h0 = float(h.values[0])
    values = np.empty(t.shape)
    if h.order == "sqrt":
        _, b = _sqrt_coefficients(h)
    else:
        slope = np.diff(h.values) / np.diff(h.times)
    for j, ti in enumerate(t):
        if ti == 0:
            if h0 != 0:
                values[j] = np.inf
            else:
                values[j] = b[0] * np.pi / 2 if h.order == "sqrt" else 0.0
            continue
        lo, hi, idx = _pieces(h, ti)
        if h.order == "sqrt":
            # h' = b / (2 sqrt(s)) and integral s^(-1/2) (t-s)^(-1/2) = 2 arcsin sqrt(s/t)
            pieces = b[idx] * (np.arcsin(np.sqrt(np.clip(hi / ti, 0.0, 1.0))) - np.arcsin(np.sqrt(lo / ti)))
        else:
            pieces = slope[idx] * _plain_moment(ti, lo, hi)
        values[j] = h0 / np.sqrt(ti) + np.sum(pieces)
    return TimeSeries(t, values, "linear")


def abel_residual(alpha: TimeSeries, h: TimeSeries, window: Optional[Sequence[float]] = None) -> float:
    """sup of |integral_0^t alpha(s) (t-s)^(-1/2) ds - h(t)| over the samples of h inside `window`"""
    t = h.times
    if window is not None:
        t = t[(t >= window[0]) & (t < window[1])]
    if len(t) == 0:
        raise DomainError("No samples inside the residual window")
    forward = np.array([_forward_at(alpha, float(ti)) for ti in t])
    return float(np.max(np.abs(forward - np.interp(t, h.times, h.values))))


def abel_solve(h: TimeSeries, tolerance: float = 1e-3) -> AbelSolution:
    """
    alpha with integral_0^t alpha(s) (t - s)^(-1/2) ds = h(t), from
    alpha = (1/pi) d/dt integral_0^t h(s) (t - s)^(-1/2) ds. h is read in the sqrt basis.

    :param tolerance: largest accepted forward residual, relative to sup |h|
    """
    scale = max(float(np.max(np.abs(h.values))), 1e-300)
    if abs(h.values[0]) > 1e-10 * max(scale, 1.0):
        raise DomainError(f"The Abel equation has no continuous solution for h(0)={h.values[0]}")
    h = TimeSeries.of(h.times, np.concatenate(([0.0], h.values[1:])), "sqrt")
    derivative = abel_derivative(h)
    alpha = TimeSeries.of(h.times, derivative.values / np.pi, "linear")
    residual = abel_residual(alpha, h)
    logger.debug("Abel solve on %d samples: forward residual %.3g", len(h.times), residual)
    if residual > tolerance * scale:
        raise NumericalError(f"Abel solve residual {residual:.3g} exceeds {tolerance:g} relative to sup |h|={scale:.3g}")
    return AbelSolution(alpha, residual)
