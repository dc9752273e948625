from typing import List, NamedTuple, Tuple

import numpy as np

from blowuplab.core.types import TimeSeries
from blowuplab.duhamel.types import BlockCombination


class ReducedSolution(NamedTuple):
    """
    Solution of  integral_0^t alpha(s) (t-s)^(-1/2) ds = h(t) - sum_j c_j B_j(0, t).

    B_j are the Gaussian block combinations whose half integrals are the vanishing
    combinations of order j; the c_j cancel the Taylor coefficients of orders 1..k at T.
    """

    alpha: TimeSeries
    Lambda: TimeSeries
    c: np.ndarray
    blocks: Tuple[BlockCombination, ...]
    tilde_kappas: np.ndarray
    # Taylor coefficients d_0..d_k at T of the half integral of h
    taylor: np.ndarray
    # Fitted power of (T - t) in alpha near T
    vanishing_order: float
    # sup over the samples of h in [T/10, T) of the residual of the full equation
    residual: float


class FixedPointReport(NamedTuple):
    solution: ReducedSolution
    # Relative sup change of alpha after every pass
    changes: List[float]
    converged: bool


class OrthogonalityTerms(NamedTuple):
    """
    The right-hand side of  integral_0^t (t-s)^(-1/2) alpha ds = rhs  at one time,
    split into its pieces. `h` is everything except the block term.
    """

    t: float
    # integral_0^t (t-s)^(-1/2) alpha(s) exp(-c0^2 (T-s) / (4 (t-s))) ds
    exponential: float
    # pi^(1/2) sum_j c_j B_j(0, t)
    blocks: float
    # pi^(1/2) times the Duhamel integral of the near-field correction
    correction: float
    # pi^(1/2) / m(R) times the Z0-weighted integral of the remaining inner terms
    rest: float
    mass: float
    h: float
    rhs: float


class MultipointRate(NamedTuple):
    times: np.ndarray
    v: np.ndarray
    mu: np.ndarray
    fitted_power: float
    # a in the least-squares fit v = a (sqrt(t) - sqrt(T)), and sup |v - fit| / sup |v|
    amplitude: float
    fit_residual: float


class AbelSolution(NamedTuple):
    alpha: TimeSeries
    # sup over the samples of h of the forward-map residual
    residual: float
