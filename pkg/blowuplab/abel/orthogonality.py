"""
The orthogonality of the inner right-hand side H to Z0 on B_2R, written as an Abel equation
for alpha. With m(R) the Z0-mass of 5 w^4 on B_2R,

    integral_{B_2R} H Z0 dy = mu0^(1/2) m(R) pi^(-1/2) (integral_0^t (t-s)^(-1/2) alpha ds - rhs(t)),

so the condition holds exactly when the Abel integral of alpha equals rhs(t).
"""
import logging
from typing import Optional, Sequence

import numpy as np

from blowuplab.ansatz.scaling import path_point
from blowuplab.ansatz.types import BlowupParams, ModulationPath
from blowuplab.core.errors import DomainError
from blowuplab.core.quadrature import composite_rule, geometric_breaks
from blowuplab.core.types import FieldSnapshot, RadialGrid, TimeSeries
from blowuplab.duhamel.kernel import duhamel_radial
from blowuplab.duhamel.phi1 import Block, block_sum, screened_integral
from blowuplab.duhamel.sources import LeadingTermSource
from blowuplab.profiles.bubble import bubble_w, kernel_Z0
from blowuplab.residual.rhs import rhs_H

from .types import OrthogonalityTerms

logger = logging.getLogger(__name__)

# The R -> infinity limit of z0_mass
Z0_MASS_LIMIT = 2.0 / 3.0 * np.pi * 3.0**1.25


def z0_mass(R):
    """integral over |y| <= 2R of 5 w^4 Z0 dy in closed form"""
    r = 2.0 * np.asarray(R, dtype=float)
    return 10 * np.pi * 3.0**1.25 * r**3 * (r * r - 5) / (15 * (r * r + 1) ** 2.5)


def ball_integral(f, radius: float, n: int = 16) -> float:
    """integral over |y| <= radius of a radial f, by composite Gauss on panels clustered at the origin"""
    nodes, weights = composite_rule(geometric_breaks(min(1e-3, radius / 4), radius), n)
    return float(4 * np.pi * np.sum(weights * nodes * nodes * f(nodes)))


def _zero_snapshot(extent: float) -> FieldSnapshot:
    grid = RadialGrid.uniform(extent, 16)
    zero = np.zeros(len(grid))
    return FieldSnapshot(grid, zero, zero.copy())


def orthogonality_rhs(
    phi: Optional[FieldSnapshot],
    psi: Optional[FieldSnapshot],
    path: ModulationPath,
    params: BlowupParams,
    t: float,
    c: Sequence[float] = (),
    blocks: Sequence[Block] = (),
    phi1: Optional[FieldSnapshot] = None,
) -> OrthogonalityTerms:
    """
    Every term on the right of the Abel equation at time t.

    :param phi: inner perturbation in y = x / mu0, with gradient; None means zero
    :param psi: outer perturbation in x, with gradient; None means zero
    :param c: block coefficients, entering as pi^(1/2) sum_j c_j B_j(0, t)
    :param phi1: the nonlocal correction in x; its value at the origin is taken out of
        the quintic remainder and accounted for by the exponential and correction terms
    """
    if t < 0 or t >= params.T:
        raise DomainError(f"Orthogonality needs 0 <= t < T={params.T}, got {t}")
    if len(path.times) > 1 and (t > path.times[-1] + 1e-14 or path.times[0] > 1e-12 * params.T):
        raise DomainError(f"The alpha history does not cover [0, {t}]")
    p = path_point(path, t)
    R = p.mu0**-params.beta
    phi = _zero_snapshot(4 * R) if phi is None else phi
    psi = _zero_snapshot(4 * p.mu0 * R) if psi is None else psi
    at_origin = 0.0 if phi1 is None else float(phi1.evaluate(0.0))

    def integrand(y):
        H = rhs_H(y, t, phi, psi, path, params, phi1)
        return (H - 5 * bubble_w(y) ** 4 * p.mu0**0.5 * at_origin) * kernel_Z0(y)

    mass = float(z0_mass(R))
    rest = np.sqrt(np.pi) * p.mu0**-0.5 * ball_integral(integrand, 2 * R) / mass
    exponential = 0.0
    correction = 0.0
    if t > 0 and np.any(path.alpha != 0):
        exponential = np.sqrt(np.pi) * (
            screened_integral(path, params, t, screen=False) - screened_integral(path, params, t, screen=True)
        )
        correction = np.sqrt(np.pi) * duhamel_radial(LeadingTermSource(params, path, "sqrt"), 0.0, t)
    block_term = np.sqrt(np.pi) * float(block_sum(c, blocks, t))
    h = exponential - correction - rest
    logger.debug("Orthogonality at t=%g: h=%.6g, blocks=%.6g, mass=%.6g", t, h, block_term, mass)
    return OrthogonalityTerms(t, exponential, block_term, correction, rest, mass, h, h - block_term)


def orthogonality_h(
    path: ModulationPath,
    params: BlowupParams,
    times: Sequence[float],
    phi: Optional[FieldSnapshot] = None,
    psi: Optional[FieldSnapshot] = None,
) -> TimeSeries:
    """
    h(t) on the given times for the reduced equation, with fixed perturbations.
    The value at T repeats the last earlier sample.
    """
    times = np.asarray(times, dtype=float)
    early = times < params.T
    values = np.array([orthogonality_rhs(phi, psi, path, params, float(t)).h for t in times[early]])
    if not np.all(early):
        values = np.concatenate((values, np.full(np.count_nonzero(~early), values[-1])))
    return TimeSeries.of(times, values, "sqrt")
