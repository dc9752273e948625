from abc import ABC, abstractmethod
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy.special import erf, gamma, gammainc, gammaincc

from blowuplab.ansatz.scaling import mu0
from blowuplab.ansatz.types import BlowupParams, ModulationPath
from blowuplab.core.errors import DomainError

from .kernel import radial_quadrature


class RadialSource(ABC):
    """A radial space-time source f(rho, s) for the forced heat equation"""

    @abstractmethod
    def value(self, rho, s: float):
        pass

    def breakpoints(self, s: float) -> Sequence[float]:
        return ()

    def length_scale(self, s: float) -> Optional[float]:
        return None

    def time_scale(self, t: float) -> float:
        """Smallest time lag the Duhamel quadrature must resolve"""
        scale = self.length_scale(t)
        return 0.0 if not scale else scale**2 / 16.0

    def spatial_integral(self, x: float, tau: float, s: float) -> float:
        """The heat flow of f(., s) for time tau, evaluated at radius x"""
        return radial_quadrature(
            x, tau, lambda rho: self.value(rho, s), self.breakpoints(s), self.length_scale(s)
        )


class ConstantSource(RadialSource):
    def __init__(self, c: float = 1.0):
        self.c = float(c)

    def value(self, rho, s: float):
        return np.full(np.shape(rho), self.c)

    def spatial_integral(self, x: float, tau: float, s: float) -> float:
        return self.c


class CallableSource(RadialSource):
    def __init__(
        self,
        fn: Callable[[np.ndarray, float], np.ndarray],
        breakpoints: Optional[Callable[[float], Sequence[float]]] = None,
        length_scale: Optional[Callable[[float], float]] = None,
    ):
        self.fn = fn
        self._breakpoints = breakpoints
        self._length_scale = length_scale

    def value(self, rho, s: float):
        return np.asarray(self.fn(rho, s), dtype=float)

    def breakpoints(self, s: float) -> Sequence[float]:
        return () if self._breakpoints is None else self._breakpoints(s)

    def length_scale(self, s: float) -> Optional[float]:
        return None if self._length_scale is None else self._length_scale(s)


class BallSource(RadialSource):
    """amplitude(s) times the indicator of the ball of radius radius(s)"""

    def __init__(self, amplitude: Callable[[float], float], radius: Callable[[float], float]):
        self.amplitude = amplitude
        self.radius = radius

    def value(self, rho, s: float):
        return np.where(np.asarray(rho) <= self.radius(s), self.amplitude(s), 0.0)

    def length_scale(self, s: float) -> Optional[float]:
        return self.radius(s)

    def spatial_integral(self, x: float, tau: float, s: float) -> float:
        a, amp = self.radius(s), self.amplitude(s)
        if a <= 0 or amp == 0:
            return 0.0
        spread = np.sqrt(4 * tau)
        if x * x < 1e-8 * tau:
            return float(amp * gammainc(1.5, a * a / (4 * tau)))
        mass = 0.5 * (erf((a - x) / spread) + erf((a + x) / spread))
        edge = np.sqrt(tau / np.pi) / x * np.exp(-((a - x) ** 2) / (4 * tau)) * -np.expm1(-a * x / tau)
        return float(amp * (mass - edge))


class TailSource(RadialSource):
    """amplitude(s) rho^(-exponent) outside the ball of radius radius(s)"""

    def __init__(self, amplitude: Callable[[float], float], exponent: float, radius: Callable[[float], float]):
        if not 0 <= exponent < 3:
            raise DomainError(f"Tail exponent must lie in [0, 3), got {exponent}")
        self.amplitude = amplitude
        self.exponent = float(exponent)
        self.radius = radius

    def value(self, rho, s: float):
        rho = np.asarray(rho, dtype=float)
        r = self.radius(s)
        outside = rho >= r
        return np.where(outside, self.amplitude(s) * np.where(outside, rho, 1.0) ** -self.exponent, 0.0)

    def breakpoints(self, s: float) -> Sequence[float]:
        return (self.radius(s),)

    def length_scale(self, s: float) -> Optional[float]:
        return self.radius(s) or None

    def spatial_integral(self, x: float, tau: float, s: float) -> float:
        amp = self.amplitude(s)
        if amp == 0:
            return 0.0
        if x * x < 1e-8 * tau:
            shape = (3 - self.exponent) / 2
            r = self.radius(s)
            tail = gammaincc(shape, r * r / (4 * tau)) * gamma(shape)
            return float(amp * (4 * tau) ** (-self.exponent / 2) * 2 / np.sqrt(np.pi) * tail)
        return super().spatial_integral(x, tau, s)


class LeadingTermSource(RadialSource):
    """
    alpha(s) 1{rho <= c0 sqrt(T - s)} g(rho, mu(s)), the source of Phi1 and its corrections:

    - full: g = (mu^2 + rho^2)^(-1/2)
    - sqrt: g = (mu^2 + rho^2)^(-1/2) - 1/rho
    - linear: g = 1/(mu + rho) - 1/rho
    """

    def __init__(
        self,
        params: BlowupParams,
        path: ModulationPath,
        profile: Literal["full", "sqrt", "linear"] = "full",
    ):
        if profile not in ("full", "sqrt", "linear"):
            raise DomainError(f"Unknown leading-term profile {profile}")
        self.params = params
        self.path = path
        self.profile = profile

    def alpha(self, s: float) -> float:
        return float(np.interp(s, self.path.times, self.path.alpha))

    def mu(self, s: float) -> float:
        Lam = float(np.interp(s, self.path.times, self.path.Lam))
        return float(mu0(min(s, self.params.T), self.params, allow_terminal=True)) * (1 + Lam) ** 2

    def support(self, s: float) -> float:
        return self.params.c0 * np.sqrt(max(self.params.T - s, 0.0))

    def value(self, rho, s: float):
        rho = np.asarray(rho, dtype=float)
        alpha = self.alpha(s)
        if alpha == 0:
            return np.zeros(rho.shape)
        mu = self.mu(s)
        if self.profile == "full":
            g = 1 / np.sqrt(mu * mu + rho * rho)
        elif self.profile == "sqrt":
            # mu^2 / (rho^2 + rho sqrt(mu^2 + rho^2)) = 1/rho - (mu^2 + rho^2)^(-1/2)
            g = -(mu * mu) / (rho * (rho + np.sqrt(mu * mu + rho * rho)))
        else:
            g = -mu / (rho * (mu + rho))
        return np.where(rho <= self.support(s), alpha * g, 0.0)

    def breakpoints(self, s: float) -> Sequence[float]:
        return (self.support(s),)

    def length_scale(self, s: float) -> Optional[float]:
        return self.mu(s) or None
