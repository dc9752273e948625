import numpy as np

from blowuplab.core.errors import DomainError
from blowuplab.profiles.bubble import bubble_derivatives, kernel_Z0
from blowuplab.profiles.corrector import corrector_J
from blowuplab.profiles.hermite import hermite_even_derivatives, outer_constant

from .cutoff import CutoffSet
from .scaling import path_point
from .types import BlowupParams, ModulationPath, RadialJet


def u_inner_jet(x, t: float, path: ModulationPath) -> RadialJet:
    """mu^(-1/2) w(x/mu) + 2 mu0' mu^(1/2) J(x/mu) with its derivatives"""
    x = np.asarray(x, dtype=float)
    p = path_point(path, t)
    mu = p.mu
    y = np.abs(x) / mu
    w, dw, _ = bubble_derivatives(y)
    j = corrector_J(y)
    J, dJ = j.value.reshape(y.shape), j.derivative.reshape(y.shape)
    z0 = kernel_Z0(y)
    value = mu**-0.5 * w + 2 * p.dmu0 * mu**0.5 * J
    dt = (
        p.dmu * mu**-1.5 * z0
        + 2 * p.ddmu0 * mu**0.5 * J
        + p.dmu0 * p.dmu * mu**-0.5 * (J - 2 * y * dJ)
    )
    dr = mu**-1.5 * dw + 2 * p.dmu0 * mu**-0.5 * dJ
    lap = -(mu**-2.5) * w**5 + 2 * p.dmu0 * mu**-1.5 * (0.5 * z0 - 5 * w**4 * J)
    return RadialJet(value, dt, dr, lap)


def u_inner(x, t: float, path: ModulationPath):
    return u_inner_jet(x, t, path).value


def u_outer_jet(x, t: float, params: BlowupParams) -> RadialJet:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("The outer solution has a pole at x=0")
    if t >= params.T:
        raise DomainError(f"Time {t} is not before T={params.T}")
    tau = params.T - t
    k = params.k
    c = np.sqrt(params.A) * outer_constant(k) * tau**k
    xi = x / (2.0 * np.sqrt(tau))
    H, dH, ddH = hermite_even_derivatives(k, xi)
    value = c * H / x
    dr = c * (dH / (2.0 * np.sqrt(tau) * x) - H / x**2)
    lap = c * ddH / (4.0 * tau * x)
    dt = c * (0.5 * xi * dH - k * H) / (tau * x)
    return RadialJet(value, dt, dr, lap)


def u_outer(x, t: float, params: BlowupParams):
    return u_outer_jet(x, t, params).value


def glued_U1_jet(x, t: float, params: BlowupParams, path: ModulationPath) -> RadialJet:
    """eta1 u_in + (1 - eta_o1) eta_o2 u_out"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cutoffs = CutoffSet(params, t)
    total = RadialJet.constant(0.0, x.shape)
    _accumulate(total, x, cutoffs.eta1(x), lambda xs: u_inner_jet(xs, t, path))
    _accumulate(total, x, cutoffs.outer_window(x), lambda xs: u_outer_jet(xs, t, params))
    return total


def _accumulate(total: RadialJet, x, weight: RadialJet, piece):
    """Adds weight * piece(x) where the weight is nonzero, so poles outside its support never evaluate"""
    live = weight.value != 0
    if not np.any(live):
        return
    part = weight.restrict(live, x.shape).times(piece(x[live]))
    for full, contribution in zip(total, part):
        full[live] += contribution


def glued_U1(x, t: float, params: BlowupParams, path: ModulationPath):
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    value = glued_U1_jet(np.atleast_1d(x), t, params, path).value
    return float(value[0]) if scalar else value
