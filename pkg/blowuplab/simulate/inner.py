"""
The inner linear problem

    mu0^2 phi_t = Delta phi + 5 w^4 phi + h   on B_2R,   phi = 0 on the boundary,

started from e0 Z_minus. In self-similar time tau (d tau / dt = mu0^(-2)) this is
phi_tau = L phi + h, stepped by Crank-Nicolson on a fixed ball. The unstable direction
Z_minus is removed by shooting on e0.
"""
import logging
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from blowuplab.abel.orthogonality import ball_integral
from blowuplab.ansatz.scaling import mu0, self_similar_time, time_from_self_similar
from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import FieldSnapshot, RadialGrid
from blowuplab.profiles.bubble import bubble_w, kernel_Z0
from blowuplab.profiles.eigen import finite_volume_operator, negative_eigenpair

from .types import InnerProbeReport

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOLERANCE = 1e-6
BRACKET_EXPANSIONS = 20

Source = Callable[[np.ndarray, float], np.ndarray]


def _potential(y):
    return 5 * bubble_w(y) ** 4


def orthogonalize_against_kernel(h: FieldSnapshot, radius: float) -> FieldSnapshot:
    """h - c 5 w^4 with c chosen so that the result integrates to zero against Z0 on B_radius"""
    moment = ball_integral(lambda y: h.evaluate(y) * kernel_Z0(y), radius)
    mass = ball_integral(lambda y: _potential(y) * kernel_Z0(y), radius)
    values = h.values - moment / mass * _potential(h.grid.nodes)
    return FieldSnapshot(h.grid, values, None, h.t)


def _orthogonality_defect(h: Source, t: float, radius: float) -> float:
    moment = ball_integral(lambda y: h(y, t) * kernel_Z0(y), radius)
    size = ball_integral(lambda y: np.abs(h(y, t) * kernel_Z0(y)), radius)
    return abs(moment) / size if size > 0 else 0.0


def _apply(ab: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = ab[1] * v
    out[:-1] += ab[0, 1:] * v[1:]
    out[1:] += ab[2, :-1] * v[:-1]
    return out


class _Evolution:
    """Crank-Nicolson for phi_tau = -A phi + h with A = -Delta - 5 w^4, boundary node dropped"""

    def __init__(self, grid: RadialGrid, h: Source, params: BlowupParams, tau_span: float, steps: int):
        self.grid = grid
        op = finite_volume_operator(grid)
        self.volumes = op.volumes
        self.A = op.banded()
        self.dtau = tau_span / steps
        self.implicit = self.A * (0.5 * self.dtau)
        self.implicit[1] += 1.0
        tau0 = float(self_similar_time(0.0, params))
        self.times = np.concatenate(([0.0], time_from_self_similar(tau0 + self.dtau * np.arange(1, steps + 1), params)))
        y = grid.nodes[:-1]
        self.sources = [np.asarray(h(y, float(t)), dtype=float) for t in self.times]

    def run(self, start: np.ndarray) -> list:
        phi = start.copy()
        states = [phi]
        for n in range(len(self.times) - 1):
            rhs = phi - 0.5 * self.dtau * _apply(self.A, phi)
            rhs += 0.5 * self.dtau * (self.sources[n] + self.sources[n + 1])
            phi = solve_banded((1, 1), self.implicit, rhs)
            states.append(phi)
        return states

    def projection(self, phi: np.ndarray, z: np.ndarray) -> float:
        return float(np.sum(self.volumes * phi * z) / np.sum(self.volumes * z * z))


def _shoot(evolve: Callable[[float], float]) -> float:
    """Root of the final Z_minus coefficient as a function of e0, expanding [-b, b] until it brackets"""
    bound = 1.0
    for _ in range(BRACKET_EXPANSIONS):
        low, high = evolve(-bound), evolve(bound)
        if low * high <= 0:
            return brentq(evolve, -bound, bound, xtol=1e-14, rtol=1e-12)
        logger.debug("e0 bracket [-%g, %g] does not change sign", bound, bound)
        bound *= 4
    raise NumericalError(f"No e0 in [-{bound / 4:g}, {bound / 4:g}] controls the unstable mode")


def inner_evolution_probe(
    h: Source,
    params: BlowupParams,
    R: float,
    e0: Optional[float] = None,
    tau_span: float = 20.0,
    nodes: int = 400,
    steps: int = 400,
) -> InnerProbeReport:
    """
    Evolves the inner problem with source h(y, t) and reports
    sup (1 + y) |phi| / (mu0^nu R^((4 - sigma) / 3)) over the run.

    :param e0: initial multiple of Z_minus; found by shooting when None
    """
    grid = RadialGrid.uniform(2 * R, nodes)
    evolution = _Evolution(grid, h, params, tau_span, steps)
    defect = max(_orthogonality_defect(h, float(t), 2 * R) for t in evolution.times)
    if defect > ORTHOGONALITY_TOLERANCE:
        raise DomainError(f"The source is not orthogonal to Z0 on B_2R (relative defect {defect:.3g})")

    pair = negative_eigenpair(grid)
    z = pair.z_minus.values[:-1]

    def final_projection(e: float) -> float:
        return evolution.projection(evolution.run(e * z)[-1], z)

    if e0 is None:
        e0 = _shoot(final_projection)
    states = evolution.run(e0 * z)
    y = grid.nodes[:-1]
    scale = mu0(evolution.times, params) ** params.nu * R ** ((4 - params.sigma) / 3)
    ratio = max(float(np.max((1 + y) * np.abs(phi))) / s for phi, s in zip(states, scale))
    projection = evolution.projection(states[-1], z)
    logger.info("Inner probe R=%g: e0=%.6g, ratio %.4g, final Z_minus coefficient %.3g", R, e0, ratio, projection)
    return InnerProbeReport(R, float(e0), ratio, projection, pair.lambda_minus, defect)
