from typing import List, NamedTuple

import numpy as np


class BlowupParams(NamedTuple):
    k: int = 2
    A: float = 1.0
    T: float = 0.01
    # Cutoff radii in units of sqrt(T - t)
    r: float = 0.02
    r1: float = 0.02
    r2: float = 0.1
    # Leading-term cutoff scale
    c0: float = 1.0
    zeta1: float = 0.5
    zeta2: float = 0.5
    # R(t) = mu0(t)^(-beta)
    beta: float = 0.1
    # Norm exponents
    nu: float = 0.5
    sigma: float = 1.5
    a: float = 0.4
    a2: float = 1.5
    nu2: float = 0.1
    gamma: float = 0.5
    epsilon: float = 0.1


class ConstraintCheck(NamedTuple):
    id: str
    description: str
    satisfied: bool
    margin: float


class PathPoint(NamedTuple):
    t: float
    mu0: float
    dmu0: float
    ddmu0: float
    Lam: float
    dLam: float
    mu: float
    dmu: float
    alpha: float


class ModulationPath(NamedTuple):
    """
    Sampled modulation t -> (mu0, Lambda, mu, alpha) with
    mu = mu0 (1 + Lambda)^2 and alpha = -3^(1/4) mu0^(-1/2) (mu0 Lambda)'.

    Build with the constructors in blowuplab.ansatz.scaling.
    """

    params: BlowupParams
    times: np.ndarray
    Lam: np.ndarray
    dLam: np.ndarray
    alpha: np.ndarray

    @property
    def mu0(self) -> np.ndarray:
        from .scaling import mu0

        return mu0(self.times, self.params, allow_terminal=True)

    @property
    def mu(self) -> np.ndarray:
        return self.mu0 * (1.0 + self.Lam) ** 2


class RadialJet(NamedTuple):
    """A radial function with its time derivative, radial derivative and 3d Laplacian"""

    value: np.ndarray
    dt: np.ndarray
    dr: np.ndarray
    lap: np.ndarray

    @staticmethod
    def constant(value, shape) -> "RadialJet":
        return RadialJet(np.full(shape, float(value)), np.zeros(shape), np.zeros(shape), np.zeros(shape))

    def plus(self, other: "RadialJet") -> "RadialJet":
        return RadialJet(*(a + b for a, b in zip(self, other)))

    def minus(self, other: "RadialJet") -> "RadialJet":
        return RadialJet(*(a - b for a, b in zip(self, other)))

    def times(self, other: "RadialJet") -> "RadialJet":
        return RadialJet(
            self.value * other.value,
            self.dt * other.value + self.value * other.dt,
            self.dr * other.value + self.value * other.dr,
            self.lap * other.value + 2.0 * self.dr * other.dr + self.value * other.lap,
        )

    def scaled(self, c) -> "RadialJet":
        return RadialJet(*(c * a for a in self))

    def restrict(self, mask, shape) -> "RadialJet":
        return RadialJet(*(np.broadcast_to(a, shape)[mask] for a in self))

    def error(self) -> np.ndarray:
        """S(u) = -u_t + Delta u + u^5"""
        return -self.dt + self.lap + self.value**5


class MatchingReport(NamedTuple):
    t: float
    # Closed-form coefficients of 1/x and x in the inner and outer expansions
    inner_inverse: float
    outer_inverse: float
    inner_linear: float
    outer_linear: float
    inverse_gap: float
    linear_gap: float
    # Least-squares coefficients over the overlap window
    fitted_inner_inverse: float
    fitted_outer_inverse: float
    fitted_inner_linear: float
    fitted_outer_linear: float
    window: List[float]
    midpoint: float
    midpoint_gap: float
