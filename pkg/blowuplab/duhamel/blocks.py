import logging

import numpy as np
from scipy.special import binom

from blowuplab.core.errors import DomainError, NumericalError

from .types import BlockCombination, UpsilonCombo

logger = logging.getLogger(__name__)

# Largest condition number accepted for the vanishing system
MAX_CONDITION = 1e12


def _times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError(f"Times must be non-negative, got {np.min(t)}")
    return t


def block_value(kappa: float, t):
    """Heat flow of exp(-kappa |x|^2) at the origin"""
    return (4 * kappa * _times(t) + 1) ** -1.5


def block_half_integral(kappa: float, t):
    """integral_0^t block_value(kappa, s) (t - s)^(-1/2) ds in closed form"""
    t = _times(t)
    return 2 * np.sqrt(t) / (4 * kappa * t + 1)


def block_field(kappa: float, x, t):
    t = _times(t)
    x = np.asarray(x, dtype=float)
    spread = 4 * kappa * t + 1
    return spread**-1.5 * np.exp(-kappa * x * x / spread)


def upsilon_eval(combo: UpsilonCombo, t):
    t = _times(t)
    return np.sqrt(t) * upsilon_hat(combo, t)


def upsilon_hat(combo: UpsilonCombo, t):
    """The combination without its sqrt(t) factor; its increment at T vanishes to order i"""
    t = np.asarray(t, dtype=float)
    return np.sum(combo.tilde_ell[:, None] / (t.reshape(1, -1) + combo.tilde_kappa[:, None]), axis=0).reshape(t.shape)


def vanishing_matrix(T: float, tilde_kappas) -> np.ndarray:
    """M[p-1, q] = (T + tilde_kappa_q)^(-p) for p = 1..k"""
    base = T + np.asarray(tilde_kappas, dtype=float)
    powers = np.arange(1, len(base) + 1)[:, None]
    return base[None, :] ** -powers


def solve_vanishing(T: float, tilde_kappas, i: int) -> np.ndarray:
    """
    Solves M v = e_i. Then tilde_ell = v (T + tilde_kappa) makes the increment of
    sum tilde_ell / (t + tilde_kappa) at T equal (T - t)^i up to order k + 1.
    """
    tilde_kappas = np.atleast_1d(np.asarray(tilde_kappas, dtype=float))
    k = len(tilde_kappas)
    if not 1 <= i <= k:
        raise DomainError(f"Vanishing order must lie in [1, {k}], got {i}")
    if len(np.unique(tilde_kappas)) != k:
        raise DomainError(f"Rates must be pairwise distinct, got {tilde_kappas}")
    M = vanishing_matrix(T, tilde_kappas)
    # Rows differ by powers of T; equilibrate before judging the conditioning
    scale = np.max(np.abs(M), axis=1)
    M = M / scale[:, None]
    condition = np.linalg.cond(M)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise NumericalError(f"Vanishing system is near singular (condition number {condition:.3g})")
    rhs = np.zeros(k)
    rhs[i - 1] = 1.0 / scale[i - 1]
    v = np.linalg.solve(M, rhs)
    residual = np.linalg.norm(M @ v - rhs) / max(np.linalg.norm(M) * np.linalg.norm(v), 1e-300)
    if residual > 1e-12:
        raise NumericalError(f"Vanishing solve residual {residual:.3g} exceeds 1e-12")
    logger.debug("Vanishing solve k=%d i=%d: condition %.3g, residual %.3g", k, i, condition, residual)
    return v


def vanishing_combo(T: float, tilde_kappas, i: int) -> UpsilonCombo:
    tilde_kappas = np.atleast_1d(np.asarray(tilde_kappas, dtype=float))
    v = solve_vanishing(T, tilde_kappas, i)
    return UpsilonCombo.of(v * (T + tilde_kappas), tilde_kappas, i)


def combination_blocks(combo: UpsilonCombo) -> BlockCombination:
    """
    Gaussian blocks whose half integral at the origin is the Upsilon combination:
    kappa_q = 1 / (4 tilde_kappa_q), weight_q = tilde_ell_q / (2 tilde_kappa_q).
    """
    return BlockCombination(1.0 / (4.0 * combo.tilde_kappa), combo.tilde_ell / (2.0 * combo.tilde_kappa))


def combination_value(blocks: BlockCombination, t):
    t = np.asarray(t, dtype=float)
    return sum(w * block_value(k, t) for k, w in zip(blocks.kappas, blocks.weights))


def combination_field(blocks: BlockCombination, x, t):
    return sum(w * block_field(k, x, t) for k, w in zip(blocks.kappas, blocks.weights))


def upsilon_derivative_root(combo: UpsilonCombo, t):
    """sqrt(t) times d/dt of upsilon_eval, smooth up to t = 0"""
    t = np.asarray(t, dtype=float)
    shifted = t.reshape(1, -1) + combo.tilde_kappa[:, None]
    terms = combo.tilde_ell[:, None] * (combo.tilde_kappa[:, None] - t.reshape(1, -1)) / (2 * shifted**2)
    return np.sum(terms, axis=0).reshape(t.shape)


def upsilon_derivative(combo: UpsilonCombo, t):
    """d/dt of upsilon_eval; behaves like t^(-1/2) at the origin"""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return upsilon_derivative_root(combo, t) / np.sqrt(t)


def upsilon_taylor(combo: UpsilonCombo, T: float, order: int) -> np.ndarray:
    """
    Coefficients e_0..e_order with upsilon_eval(combo, t) = sum_n e_n (T - t)^n + ...,
    from sqrt(T - z) = sqrt(T) (1 - z/T)^(1/2) and 1/(T + kappa - z) = sum_n z^n / (T + kappa)^(n+1).
    """
    n = np.arange(order + 1)
    root = np.sqrt(T) * binom(0.5, n) * (-1.0 / T) ** n
    shifted = T + combo.tilde_kappa[:, None]
    hat = np.sum(combo.tilde_ell[:, None] / shifted ** (n[None, :] + 1), axis=0)
    return np.convolve(root, hat)[: order + 1]
