import logging
from typing import NamedTuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import FieldSnapshot, RadialGrid

from .bubble import bubble_w
from .types import NegativeEigenpair

logger = logging.getLogger(__name__)

MIN_EXTENT = 30.0


class FiniteVolumeOperator(NamedTuple):
    """
    -Delta - 5 w^4 on the nodes r_0..r_{N-1} of a grid, Dirichlet at r_N.

    Cell i has volume volumes[i] (measure y^2 dy) and exchanges flux[i] with cell i+1;
    the operator is K / volumes with K symmetric tridiagonal.
    """

    volumes: np.ndarray
    flux: np.ndarray
    potential: np.ndarray

    @property
    def stiffness_diagonal(self) -> np.ndarray:
        flux_left = np.concatenate(([0.0], self.flux[:-1]))
        return self.flux + flux_left - self.potential * self.volumes

    def banded(self) -> np.ndarray:
        """Rows (upper, diagonal, lower) of K / volumes in scipy.linalg.solve_banded layout"""
        n = len(self.volumes)
        ab = np.zeros((3, n))
        ab[0, 1:] = -self.flux[:-1] / self.volumes[:-1]
        ab[1] = self.stiffness_diagonal / self.volumes
        ab[2, :-1] = -self.flux[:-1] / self.volumes[1:]
        return ab


def finite_volume_operator(grid: RadialGrid) -> FiniteVolumeOperator:
    r = grid.nodes
    mid = 0.5 * (r[:-1] + r[1:])
    faces = np.concatenate(([0.0], mid))
    volumes = (mid**3 - faces[:-1] ** 3) / 3.0
    flux = mid**2 / np.diff(r)
    return FiniteVolumeOperator(volumes, flux, 5.0 * bubble_w(r[:-1]) ** 4)


def negative_eigenpair(grid: RadialGrid) -> NegativeEigenpair:
    """
    Lowest eigenpair of -Delta - 5 w^4 on the ball of radius grid.r_max.

    Finite volumes with the measure y^2 dy give a symmetric tridiagonal pencil,
    Neumann by symmetry at the origin and Dirichlet at the last node.
    """
    if grid.r_max < MIN_EXTENT:
        raise DomainError(f"Grid must reach y >= {MIN_EXTENT}, got {grid.r_max}")
    op = finite_volume_operator(grid)
    diag = op.stiffness_diagonal / op.volumes
    off = -op.flux[:-1] / np.sqrt(op.volumes[:-1] * op.volumes[1:])
    try:
        eigenvalues, vectors = eigh_tridiagonal(diag, off, select="i", select_range=(0, 1))
    except LinAlgError as err:
        raise NumericalError(f"Tridiagonal eigen solve did not converge: {err}")

    lam, nxt = float(eigenvalues[0]), float(eigenvalues[1])
    z = vectors[:, 0] / np.sqrt(op.volumes)
    z = z / z[np.argmax(np.abs(z))]
    if np.min(z) < -1e-10:
        raise NumericalError("Ground state eigenvector changes sign; refine the grid")
    r = grid.nodes
    values = np.concatenate((z, [0.0]))
    derivative = np.gradient(values, r)
    derivative[0] = 0.0
    snapshot = FieldSnapshot(grid, values, derivative)
    logger.info("Negative eigenvalue %.10g, next eigenvalue %.3g", lam, nxt)
    return NegativeEigenpair(lam, snapshot, nxt - lam, nxt)
