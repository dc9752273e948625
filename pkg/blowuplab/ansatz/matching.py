import logging

import numpy as np

from blowuplab.core.errors import DomainError
from blowuplab.profiles.bubble import BUBBLE_PEAK
from blowuplab.profiles.hermite import hermite_even_derivatives, outer_constant

from .approx import u_inner, u_outer
from .scaling import constant_path, mu0_derivatives
from .types import BlowupParams, MatchingReport

logger = logging.getLogger(__name__)

# Least-squares basis over the overlap window
BASIS_POWERS = (-3, -1, 0, 1, 3)
MIN_SCALE_SEPARATION = 100.0


def _fit(x, values):
    basis = np.stack([x**p for p in BASIS_POWERS], axis=1)
    scale = np.max(np.abs(basis), axis=0)
    coef, *_ = np.linalg.lstsq(basis / scale, values, rcond=None)
    coef = coef / scale
    return coef[BASIS_POWERS.index(-1)], coef[BASIS_POWERS.index(1)]


def matching_report(t: float, params: BlowupParams, samples: int = 64, spread: float = 10.0) -> MatchingReport:
    """
    Compares the inner and outer expansions at mu = mu0 over the window
    [x_m / spread, x_m * spread] around x_m = sqrt(mu0 sqrt(T - t)).
    """
    m0, dm0, _ = (float(v) for v in mu0_derivatives(t, params))
    tau = params.T - t
    if np.sqrt(tau) / m0 < MIN_SCALE_SEPARATION * spread**2:
        raise DomainError(
            f"Overlap window is empty at t={t}: sqrt(T-t)/mu0={np.sqrt(tau) / m0:.3g}"
        )
    k = params.k
    inner_inverse = BUBBLE_PEAK * np.sqrt(m0)
    outer_inverse = np.sqrt(params.A) * np.sqrt(3.0) * tau**k
    inner_linear = 0.25 * BUBBLE_PEAK * dm0 / np.sqrt(m0)
    _, _, ddH0 = hermite_even_derivatives(k, 0.0)
    outer_linear = np.sqrt(params.A) * outer_constant(k) * tau**k * float(ddH0) / (8.0 * tau)

    midpoint = np.sqrt(m0 * np.sqrt(tau))
    x = np.geomspace(midpoint / spread, midpoint * spread, samples)
    path = constant_path(params, t)
    inner_values = u_inner(x, t, path)
    outer_values = u_outer(x, t, params)
    fi_inv, fi_lin = _fit(x, inner_values)
    fo_inv, fo_lin = _fit(x, outer_values)

    u_in_mid = float(u_inner(midpoint, t, path))
    u_out_mid = float(u_outer(midpoint, t, params))
    report = MatchingReport(
        t,
        inner_inverse,
        outer_inverse,
        inner_linear,
        outer_linear,
        abs(inner_inverse - outer_inverse) / abs(outer_inverse),
        abs(inner_linear - outer_linear) / abs(outer_linear),
        float(fi_inv),
        float(fo_inv),
        float(fi_lin),
        float(fo_lin),
        [float(x[0]), float(x[-1])],
        float(midpoint),
        abs(u_in_mid - u_out_mid) / abs(u_out_mid),
    )
    logger.debug("Matching at t=%g: midpoint gap %.3g", t, report.midpoint_gap)
    return report
