import math
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial import hermite as H

from blowuplab.core.errors import DomainError
from blowuplab.core.types import NormReport, RadialGrid

from .types import HermiteProfile

MAX_K = 12


def _check_k(k: int):
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_K:
        raise DomainError(f"Hermite order k must be an integer in [1, {MAX_K}], got {k}")


def hermite_value(n: int, x):
    """Physicists' H_n by the recurrence H_{n+1} = 2x H_n - 2n H_{n-1}"""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.ones_like(x)
    prev, cur = np.ones_like(x), 2.0 * x
    for m in range(1, n):
        prev, cur = cur, 2.0 * x * cur - 2.0 * m * prev
    return cur


def hermite_even(k: int, x):
    _check_k(k)
    return hermite_value(2 * k, x)


def hermite_profile(k: int, A: float = 1.0) -> HermiteProfile:
    _check_k(k)
    coefficients = H.herm2poly([0.0] * (2 * k) + [1.0])
    return HermiteProfile(k, A, coefficients)


def outer_constant(k: int) -> float:
    """C_k = (-1)^k k! sqrt(3) / (2k)!"""
    _check_k(k)
    return (-1) ** k * math.factorial(k) * math.sqrt(3.0) / math.factorial(2 * k)


def outer_profile_m(z, k: int, A: float = 1.0):
    z = np.asarray(z, dtype=float)
    if np.any(z == 0):
        raise DomainError("The outer profile has a pole at z=0")
    return math.sqrt(A) * outer_constant(k) * hermite_even(k, 0.5 * z) / z


def hermite_even_derivatives(k: int, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """H_{2k}, H_{2k}' and H_{2k}'' using H_n' = 2n H_{n-1}"""
    _check_k(k)
    n = 2 * k
    return (
        hermite_value(n, x),
        2.0 * n * hermite_value(n - 1, x),
        4.0 * n * (n - 1) * hermite_value(n - 2, x),
    )


def eigen_residual(
    m: Callable[[np.ndarray], np.ndarray],
    gamma: float,
    grid: RadialGrid,
    h: Optional[float] = None,
    order: int = 2,
) -> NormReport:
    """
    Sup over the grid of m'' + (2/z - z/2) m' - (gamma + 1/4) m with
    derivatives taken by centered differences of the callable.

    :param h: difference step, defaults to the smallest grid spacing
    :param order: 2 or 4, accuracy of the difference stencils
    """
    z = grid.nodes[grid.nodes > 0]
    if len(z) != len(grid.nodes) - 1:
        raise DomainError("The eigen residual is evaluated away from z=0")
    if h is None:
        h = grid.h_min
    if h >= z[0]:
        raise DomainError(f"Difference step {h} reaches the pole at z=0")
    f0 = m(z)
    if order == 2:
        fp, fm = m(z + h), m(z - h)
        d1 = (fp - fm) / (2 * h)
        d2 = (fp - 2 * f0 + fm) / (h * h)
    elif order == 4:
        if 2 * h >= z[0]:
            raise DomainError(f"Difference step {h} reaches the pole at z=0")
        fp, fm, fpp, fmm = m(z + h), m(z - h), m(z + 2 * h), m(z - 2 * h)
        d1 = (-fpp + 8 * fp - 8 * fm + fmm) / (12 * h)
        d2 = (-fpp + 16 * fp - 30 * f0 + 16 * fm - fmm) / (12 * h * h)
    else:
        raise DomainError(f"Unsupported stencil order {order}")
    residual = np.abs(d2 + (2.0 / z - 0.5 * z) * d1 - (gamma + 0.25) * f0)
    idx = int(np.argmax(residual))
    return NormReport("eigen", float(residual[idx]), float(z[idx]), 0.0)
