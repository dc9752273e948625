from typing import NamedTuple

import numpy as np

from blowuplab.core.errors import DomainError


class GaussianBlock(NamedTuple):
    # Initial data exp(-kappa |x|^2)
    kappa: float

    @staticmethod
    def of(kappa: float) -> "GaussianBlock":
        if not kappa > 0:
            raise DomainError(f"Gaussian rate must be positive, got {kappa}")
        return GaussianBlock(float(kappa))


class UpsilonCombo(NamedTuple):
    """sum_q tilde_ell_q sqrt(t) / (t + tilde_kappa_q), built to cancel order i at T"""

    tilde_ell: np.ndarray
    tilde_kappa: np.ndarray
    i: int

    @staticmethod
    def of(tilde_ell, tilde_kappa, i: int) -> "UpsilonCombo":
        tilde_ell = np.atleast_1d(np.asarray(tilde_ell, dtype=float))
        tilde_kappa = np.atleast_1d(np.asarray(tilde_kappa, dtype=float))
        if tilde_ell.shape != tilde_kappa.shape:
            raise DomainError("Upsilon weights and rates must have the same length")
        if np.any(tilde_kappa <= 0):
            raise DomainError(f"Upsilon rates must be positive, got {tilde_kappa}")
        if len(np.unique(tilde_kappa)) != len(tilde_kappa):
            raise DomainError(f"Upsilon rates must be pairwise distinct, got {tilde_kappa}")
        return UpsilonCombo(tilde_ell, tilde_kappa, int(i))


class BlockCombination(NamedTuple):
    """sum_q weight_q * (heat flow of exp(-kappa_q |x|^2))"""

    kappas: np.ndarray
    weights: np.ndarray


class ProbeReport(NamedTuple):
    family: str
    bound_id: str
    ratio_sup: float
    fitted_power: float
    claimed_power: float
