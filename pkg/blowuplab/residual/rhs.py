"""
Right-hand sides of the outer problem (G, in x) and of the inner problem (H, in y = x / mu0).

phi is a FieldSnapshot in the inner variable y, psi and phi1 are FieldSnapshots in x.
Both phi and psi must carry gradient data.
"""
from typing import Optional

import numpy as np

from blowuplab.ansatz.approx import glued_U1, u_inner
from blowuplab.ansatz.cutoff import CutoffSet
from blowuplab.ansatz.scaling import path_point
from blowuplab.ansatz.types import BlowupParams, ModulationPath
from blowuplab.core.errors import DomainError
from blowuplab.core.types import FieldSnapshot
from blowuplab.profiles.bubble import bubble_w

from .error import glued_error, leading_term, power_increment


def _require_gradients(phi: FieldSnapshot, psi: FieldSnapshot):
    if phi.derivative is None or psi.derivative is None:
        raise DomainError("rhs evaluation needs gradient data for both phi and psi")


def _phi1(phi1: Optional[FieldSnapshot], x: np.ndarray) -> np.ndarray:
    return np.zeros(x.shape) if phi1 is None else phi1.evaluate(x)


def quintic_remainder(base, increment):
    """(a + b)^5 - a^5 - 5 a^4 b"""
    return power_increment(base, increment, skip=2)


def rhs_G(
    x,
    t: float,
    phi: FieldSnapshot,
    psi: FieldSnapshot,
    path: ModulationPath,
    params: BlowupParams,
    phi1: Optional[FieldSnapshot] = None,
):
    _require_gradients(phi, psi)
    x = np.atleast_1d(np.abs(np.asarray(x, dtype=float)))
    p = path_point(path, t)
    m0 = p.mu0
    etaR = CutoffSet(params, t).eta_R(x)
    y = x / m0
    ph, dph = phi.evaluate(y), phi.evaluate_derivative(y)
    ps = psi.evaluate(x)

    U1 = glued_U1(x, t, params, path)
    p1 = _phi1(phi1, x)
    base = U1 + p1
    bubble = p.mu**-0.5 * bubble_w(x / p.mu)
    Phi2 = ps + etaR.value * m0**-0.5 * ph
    outside = 1.0 - etaR.value

    cutoff_terms = (etaR.lap - etaR.dt) * m0**-0.5 * ph + 2 * etaR.dr * m0**-1.5 * dph
    potential = (5 * base**4 * outside + 5 * (base**4 - bubble**4) * etaR.value) * ps
    error = (glued_error(x, t, params, path) - leading_term(x, t, params, path)) * outside
    correction = power_increment(U1, p1, skip=1) * outside
    return cutoff_terms + potential + quintic_remainder(base, Phi2) + error + correction


def rhs_H(
    y,
    t: float,
    phi: FieldSnapshot,
    psi: FieldSnapshot,
    path: ModulationPath,
    params: BlowupParams,
    phi1: Optional[FieldSnapshot] = None,
):
    """
    Evaluated in scaled units: inner quantities are multiplied by mu0^(1/2)
    before taking powers, so the bubble scale never enters as a large number.
    """
    _require_gradients(phi, psi)
    y = np.atleast_1d(np.abs(np.asarray(y, dtype=float)))
    p = path_point(path, t)
    m0 = p.mu0
    x = m0 * y
    ph, dph = phi.evaluate(y), phi.evaluate_derivative(y)
    ps = psi.evaluate(x)

    scaled_in = m0**0.5 * u_inner(x, t, path)
    scaled_phi1 = m0**0.5 * _phi1(phi1, x)
    w = bubble_w(y)
    stretch = 1.0 + p.Lam

    potential = 5 * ((scaled_in + scaled_phi1) ** 4 - w**4) * ph
    outer = 5 * m0**0.5 * stretch**-4 * bubble_w(y / stretch**2) ** 4 * ps
    drift = m0 * p.dmu0 * (0.5 * ph + dph * y)
    error = m0**2.5 * (glued_error(x, t, params, path) - leading_term(x, t, params, path))
    correction = power_increment(scaled_in, scaled_phi1, skip=1)
    return potential + outer + drift + error + correction
