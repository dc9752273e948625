from typing import Tuple

import numpy as np

from blowuplab.core.errors import DomainError

# w(0)
BUBBLE_PEAK = 3.0**0.25


def _radius(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError(f"Radius must be non-negative, got min {np.min(y)}")
    return y


def bubble_w(y):
    y = _radius(y)
    return BUBBLE_PEAK / np.sqrt(1.0 + y * y)


def bubble_derivatives(y) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """w, w' and w'' in closed form"""
    y = _radius(y)
    q = 1.0 + y * y
    w = BUBBLE_PEAK / np.sqrt(q)
    dw = -BUBBLE_PEAK * y * q**-1.5
    ddw = -BUBBLE_PEAK * (1.0 - 2.0 * y * y) * q**-2.5
    return w, dw, ddw


def kernel_Z0(y):
    y = _radius(y)
    return 0.5 * BUBBLE_PEAK * (y * y - 1.0) * (1.0 + y * y) ** -1.5


def kernel_Z0_derivative(y):
    y = _radius(y)
    return 0.5 * BUBBLE_PEAK * y * (5.0 - y * y) * (1.0 + y * y) ** -2.5


def kernel_Z0_from_scaling(y):
    """-(y w' + w/2), the generator of the scaling symmetry"""
    w, dw, _ = bubble_derivatives(y)
    return -(np.asarray(y) * dw + 0.5 * w)


def j_majorant(y):
    # y^2 near the origin, y at infinity
    y = _radius(y)
    return y * y / (1.0 + y)
