from typing import NamedTuple

import numpy as np

from blowuplab.core.types import FieldSnapshot


class ProfileSample(NamedTuple):
    # Dimensionless radius, value and radial derivative (scalars or matching arrays)
    y: np.ndarray
    value: np.ndarray
    derivative: np.ndarray


class HermiteProfile(NamedTuple):
    k: int
    A: float
    # Monomial coefficients of H_{2k}, lowest degree first
    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


class NegativeEigenpair(NamedTuple):
    lambda_minus: float
    z_minus: FieldSnapshot
    # Distance from lambda_minus to the next discrete eigenvalue
    gap: float
    next_eigenvalue: float
