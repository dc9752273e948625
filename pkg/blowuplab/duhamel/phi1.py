"""
The nonlocal correction Phi1, solving

    d/dt Phi1 = Delta Phi1 + alpha(t) 1{|x| <= c0 sqrt(T - t)} (mu^2 + |x|^2)^(-1/2)

plus the caloric part sum_j c_j B_j built from Gaussian initial data.
"""
import logging
from typing import Literal, Sequence, Union

import numpy as np

from blowuplab.ansatz.types import BlowupParams, ModulationPath
from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.quadrature import composite_rule
from blowuplab.core.types import FieldSnapshot, RadialGrid
from blowuplab.residual.operators import radial_gradient

from .blocks import block_field, block_value, combination_field, combination_value
from .kernel import duhamel_radial
from .sources import LeadingTermSource
from .types import BlockCombination

logger = logging.getLogger(__name__)

# Fewest alpha samples on [0, t] accepted by the screened integral
MIN_HISTORY = 8

Block = Union[float, BlockCombination]


def _check_history(path: ModulationPath, t: float):
    times = path.times
    if t < 0:
        raise DomainError(f"Phi1 needs t >= 0, got {t}")
    if times[0] > 1e-12 * path.params.T:
        raise DomainError(f"The alpha history must start at 0, got {times[0]}")
    last_gap = times[-1] - times[-2] if len(times) > 1 else 0.0
    if t > times[-1] + 2 * last_gap + 1e-14:
        raise DomainError(f"Time {t} is beyond the sampled alpha history")
    if np.count_nonzero(times <= t) < MIN_HISTORY:
        raise NumericalError(
            f"Only {np.count_nonzero(times <= t)} alpha samples on [0, {t}], need {MIN_HISTORY}"
        )


def block_sum(c: Sequence[float], blocks: Sequence[Block], t: float, x=None):
    """sum_j c_j B_j(x, t), at the origin when x is None"""
    if len(c) != len(blocks):
        raise DomainError(f"Got {len(c)} coefficients for {len(blocks)} blocks")
    total = 0.0
    for cj, block in zip(c, blocks):
        if isinstance(block, BlockCombination):
            term = combination_value(block, t) if x is None else combination_field(block, x, t)
        else:
            term = block_value(block, t) if x is None else block_field(block, x, t)
        total = total + cj * term
    return total


def screened_integral(path: ModulationPath, params: BlowupParams, t: float, screen: bool = True) -> float:
    """
    pi^(-1/2) integral_0^t (t-s)^(-1/2) alpha(s) [1 - exp(-c0^2 (T-s) / (4 (t-s)))] ds,
    computed as 2 pi^(-1/2) integral_0^sqrt(t) alpha(t - u^2) [...] du.

    With screen=False the bracket is replaced by 1.
    """
    if t == 0:
        return 0.0
    top = np.sqrt(t)
    kinks = np.sqrt(t - path.times[path.times < t])
    nodes, weights = composite_rule(np.union1d(np.linspace(0.0, top, 33), kinks), 16)
    s = t - nodes * nodes
    alpha = np.interp(s, path.times, path.alpha)
    if screen:
        alpha = alpha * -np.expm1(-(params.c0**2) * (params.T - s) / (4 * nodes * nodes))
    return float(2 / np.sqrt(np.pi) * np.sum(weights * alpha))


def phi1_origin(
    path: ModulationPath,
    params: BlowupParams,
    t: float,
    c: Sequence[float] = (),
    blocks: Sequence[Block] = (),
    kernel: Literal["sqrt", "linear"] = "sqrt",
    screen: bool = True,
    correct: bool = True,
    normalized: bool = False,
) -> float:
    """
    Phi1(0, t): the screened weakly singular integral, the caloric part sum_j c_j B_j(0, t)
    and, when `correct` is set, the Duhamel integral of the near-field correction
    alpha 1{rho <= c0 sqrt(T-s)} [g(rho, mu) - 1/rho].

    :param blocks: Gaussian rates kappa_j or BlockCombinations, one per coefficient
    :param kernel: "sqrt" makes the sum the exact Duhamel integral of the leading term
    :param normalized: subtract the same sum at t = T, so that Phi1(0, T) = 0
    """
    if kernel not in ("sqrt", "linear"):
        raise DomainError(f"Unknown Phi1 kernel {kernel}")
    _check_history(path, t)
    value = screened_integral(path, params, t, screen) + float(block_sum(c, blocks, t))
    if correct and t > 0:
        value += duhamel_radial(LeadingTermSource(params, path, kernel), 0.0, t)
    if normalized:
        value -= phi1_origin(path, params, params.T, c, blocks, kernel, screen, correct)
    logger.debug("Phi1(0, %g) = %.6g", t, value)
    return value


def phi1_field(
    x,
    t: float,
    path: ModulationPath,
    params: BlowupParams,
    c: Sequence[float] = (),
    blocks: Sequence[Block] = (),
    normalized: bool = False,
):
    """
    Phi1(x, t) by radial Duhamel quadrature of the leading-term source plus the block fields.

    :param normalized: subtract phi1_terminal_offset so that Phi1(0, T) = 0
    """
    _check_history(path, t)
    xs = np.abs(np.asarray(x, dtype=float))
    forced = duhamel_radial(LeadingTermSource(params, path, "full"), xs, t)
    value = forced + block_sum(c, blocks, t, xs)
    if normalized:
        value = value - phi1_terminal_offset(path, params, c, blocks)
    return value


def phi1_terminal_offset(
    path: ModulationPath, params: BlowupParams, c: Sequence[float] = (), blocks: Sequence[Block] = ()
) -> float:
    """Phi1(0, T) of the unnormalized field"""
    return float(phi1_field(0.0, params.T, path, params, c, blocks))


def phi1_snapshot(
    grid: RadialGrid,
    t: float,
    path: ModulationPath,
    params: BlowupParams,
    c: Sequence[float] = (),
    blocks: Sequence[Block] = (),
    normalized: bool = False,
) -> FieldSnapshot:
    values = np.asarray(phi1_field(grid.nodes, t, path, params, c, blocks, normalized))
    snapshot = FieldSnapshot(grid, values, None, t)
    return FieldSnapshot(grid, values, radial_gradient(snapshot).values, t)
