import logging

import numpy as np

from blowuplab.ansatz.approx import u_inner_jet, u_outer_jet
from blowuplab.ansatz.cutoff import CutoffSet
from blowuplab.ansatz.scaling import QUARTER_ROOT3, path_point
from blowuplab.ansatz.types import BlowupParams, ModulationPath
from blowuplab.core.types import NormReport, RadialGrid, argsup_report
from blowuplab.profiles.bubble import bubble_derivatives, j_majorant, kernel_Z0
from blowuplab.profiles.corrector import corrector_J

logger = logging.getLogger(__name__)

BINOMIAL5 = (1.0, 5.0, 10.0, 10.0, 5.0, 1.0)


def power_increment(base, increment, skip: int = 1):
    """
    (a + b)^5 minus the first `skip` terms of its binomial expansion in b.

    Summing the remaining terms avoids cancelling the large a^5.
    """
    a = np.asarray(base, dtype=float)
    b = np.asarray(increment, dtype=float)
    total = np.zeros(np.broadcast(a, b).shape)
    for j in range(skip, 6):
        total = total + BINOMIAL5[j] * a ** (5 - j) * b**j
    return total


def leading_term(x, t: float, params: BlowupParams, path: ModulationPath):
    """chi(|x| <= c0 sqrt(T - t)) alpha / sqrt(mu^2 + x^2)"""
    x = np.asarray(x, dtype=float)
    p = path_point(path, t)
    chi = CutoffSet(params, t).leading_indicator(np.abs(x))
    return chi * p.alpha / np.sqrt(p.mu**2 + x * x)


def inner_error(x, t: float, path: ModulationPath):
    """
    S(u_in) in closed form.

    Uses Delta J = Z0/2 - 5 w^4 J so that the w^5 terms cancel analytically.
    """
    x = np.asarray(x, dtype=float)
    p = path_point(path, t)
    mu = p.mu
    y = np.abs(x) / mu
    w, _, _ = bubble_derivatives(y)
    j = corrector_J(y)
    J, dJ = j.value.reshape(y.shape), j.derivative.reshape(y.shape)
    z0 = kernel_Z0(y)
    modulation = -(p.dmu - p.dmu0) * mu**-1.5 * z0
    corrector = (
        -2 * p.ddmu0 * mu**0.5 * J
        - p.dmu0 * p.dmu * mu**-0.5 * J
        + 2 * p.dmu0 * p.dmu * mu**-0.5 * y * dJ
    )
    quintic = power_increment(mu**-0.5 * w, 2 * p.dmu0 * mu**0.5 * J, skip=2)
    return modulation + corrector + quintic


def glued_error(x, t: float, params: BlowupParams, path: ModulationPath):
    """
    S(U1) assembled from the cutoff jets, S(u_in) and the caloric defect of u_out.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cutoffs = CutoffSet(params, t)
    total = np.zeros(x.shape)
    glued = np.zeros(x.shape)
    eta1 = cutoffs.eta1(x)
    live = eta1.value != 0
    if np.any(live):
        e = eta1.restrict(live, x.shape)
        u = u_inner_jet(x[live], t, path)
        s_in = inner_error(x[live], t, path)
        total[live] += e.value * s_in + u.value * (e.lap - e.dt) + 2 * e.dr * u.dr - e.value * u.value**5
        glued[live] += e.value * u.value
    window = cutoffs.outer_window(x)
    live = window.value != 0
    if np.any(live):
        piece = window.restrict(live, x.shape).times(u_outer_jet(x[live], t, params))
        total[live] += -piece.dt + piece.lap
        glued[live] += piece.value
    return total + glued**5


def g4_majorant(x, t: float, params: BlowupParams, path: ModulationPath):
    """
    Pointwise majorant of eta1 S_in minus the leading term, term by term, with |J| <= h.
    """
    x = np.asarray(x, dtype=float)
    p = path_point(path, t)
    mu = p.mu
    cutoffs = CutoffSet(params, t)
    eta1 = cutoffs.eta1(x).value
    chi = cutoffs.leading_indicator(x)
    q = np.sqrt(mu**2 + x * x)
    h = j_majorant(np.abs(x) / mu)
    w = bubble_derivatives(np.abs(x) / mu)[0]
    shape = QUARTER_ROOT3 * mu**2 / q**3 - 0.5 * QUARTER_ROOT3 / q
    correction = 2 * abs(p.dmu0) * mu**0.5 * h
    return (
        2 * abs(p.alpha) * mu**2 / q**3 * eta1
        + abs(p.alpha) / q * np.abs(eta1 - chi)
        + p.Lam**2 * mu**-0.5 * abs(p.dmu0) * np.abs(shape) * eta1
        + 2 * abs(p.ddmu0) * mu**0.5 * h * eta1
        + 3 * abs(p.dmu0 * p.dmu) * mu**-0.5 * h * eta1
        + 20 * (mu**-0.5 * w + correction) ** 3 * correction**2 * eta1
    )


def bound_probe_g4(t: float, params: BlowupParams, path: ModulationPath, grid: RadialGrid) -> NormReport:
    """
    Sup over the grid of |eta1 S_in - leading term| / majorant.

    The cutoff radii are inserted as exact nodes; points where the majorant vanishes are skipped.
    """
    tau = params.T - t
    x = grid.with_nodes([params.r * np.sqrt(tau), 2 * params.r * np.sqrt(tau), params.c0 * np.sqrt(tau)]).nodes
    eta1 = CutoffSet(params, t).eta1(x).value
    lhs = eta1 * inner_error(x, t, path) - leading_term(x, t, params, path)
    majorant = g4_majorant(x, t, params, path)
    live = majorant > 0
    if not np.any(live):
        return NormReport("g4", 0.0, 0.0, t)
    ratio = np.abs(lhs[live]) / majorant[live]
    report = argsup_report("g4", ratio, x[live], np.full(ratio.shape, t))
    logger.debug("g4 ratio %.4g at x=%.4g, t=%g", report.value, report.arg_x, t)
    return report
