from typing import NamedTuple, Tuple

import numpy as np

from .scaling import mu0_derivatives
from .types import BlowupParams, RadialJet


def cutoff_jet(s) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """eta, eta', eta'' for the C2 quintic ramp: 1 on [0,1], 0 on [2,inf)"""
    s = np.asarray(s, dtype=float)
    u = np.clip(s - 1.0, 0.0, 1.0)
    ramp = (s > 1.0) & (s < 2.0)
    eta = 1.0 - (10 * u**3 - 15 * u**4 + 6 * u**5)
    d1 = np.where(ramp, -(30 * u**2 - 60 * u**3 + 30 * u**4), 0.0)
    d2 = np.where(ramp, -(60 * u - 180 * u**2 + 120 * u**3), 0.0)
    return eta, d1, d2


def cutoff(s):
    return cutoff_jet(s)[0]


def _scaled_jet(x, length: float, log_rate: float) -> RadialJet:
    """
    Jet of eta(x / L(t)).

    :param log_rate: -L'(t) / L(t)
    """
    x = np.asarray(x, dtype=float)
    s = x / length
    eta, d1, d2 = cutoff_jet(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        radial = np.where(x > 0, 2.0 * d1 / (length * np.where(x > 0, x, 1.0)), 0.0)
    return RadialJet(eta, d1 * s * log_rate, d1 / length, d2 / length**2 + radial)


class CutoffSet(NamedTuple):
    """The four cutoffs of the glued ansatz at one time t"""

    params: BlowupParams
    t: float

    @property
    def tau(self) -> float:
        return self.params.T - self.t

    @property
    def R(self) -> float:
        return float(mu0_derivatives(self.t, self.params)[0] ** -self.params.beta)

    def eta1(self, x) -> RadialJet:
        return _scaled_jet(x, self.params.r * np.sqrt(self.tau), 0.5 / self.tau)

    def eta_R(self, x) -> RadialJet:
        m0, dm0, _ = (float(v) for v in mu0_derivatives(self.t, self.params))
        beta = self.params.beta
        return _scaled_jet(x, m0 ** (1 - beta), -(1 - beta) * dm0 / m0)

    def eta_o1(self, x) -> RadialJet:
        p = self.params
        return _scaled_jet(x, p.r1 * self.tau**p.zeta1, p.zeta1 / self.tau)

    def eta_o2(self, x) -> RadialJet:
        p = self.params
        return _scaled_jet(x, p.r2 * self.tau**p.zeta2, p.zeta2 / self.tau)

    def outer_window(self, x) -> RadialJet:
        """(1 - eta_o1) * eta_o2"""
        one = RadialJet.constant(1.0, np.shape(x))
        return one.minus(self.eta_o1(x)).times(self.eta_o2(x))

    def leading_indicator(self, x) -> np.ndarray:
        """Sharp indicator of |x| <= c0 sqrt(T - t)"""
        return (np.asarray(x, dtype=float) <= self.params.c0 * np.sqrt(self.tau)).astype(float)
