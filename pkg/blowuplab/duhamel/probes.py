"""
Probes of the a priori bounds for the forced heat equation psi_t = Delta psi + f, psi(., 0) = 0,
with the three model right-hand sides of the outer problem:

- rhs1: mu0^(nu - 5/2) R^(-2-a) on the ball of radius 2 mu0 R
- rhs2: mu0^nu2 |x|^(-a2) outside the ball of radius mu0 R
- rhs3: 1 on the ball of radius 4 sqrt(T), bounded by 1 like every source the bound covers

Each bound is reported as the sup of |quantity| / majorant together with the
power of mu0 (or of t, T - t for rhs3) fitted to the quantity.
"""
import logging
from pathlib import Path
from typing import Iterable, List, Literal, NamedTuple, Optional, Sequence

import numpy as np

from blowuplab.ansatz.scaling import mu0
from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import DomainError
from blowuplab.core.writers import write_csv

from .kernel import duhamel_radial
from .sources import BallSource, RadialSource, TailSource
from .types import ProbeReport

logger = logging.getLogger(__name__)

Family = Literal["rhs1", "rhs2", "rhs3"]
FAMILIES = ("rhs1", "rhs2", "rhs3")
# Relative step of the centered differences for the gradient
GRADIENT_STEP = 0.01
# Radii, in units of the family length scale, where psi and its gradient are sampled;
# the gradient skips the origin
SAMPLE_RADII = (0.0, 0.5, 1.0, 2.0, 4.0)
# Radius of the rhs3 source ball in units of sqrt(T)
RHS3_RADIUS = 4.0


def default_times(T: float) -> np.ndarray:
    return T * np.concatenate(([0.25], 1 - 2.0 ** -np.arange(1, 9)))


def _m0(s: float, params: BlowupParams) -> float:
    return float(mu0(min(s, params.T), params, allow_terminal=True))


def family_source(family: Family, params: BlowupParams) -> RadialSource:
    p = params
    if family == "rhs1":

        def amplitude(s):
            m = _m0(s, p)
            return 0.0 if m == 0 else m ** (p.nu - 2.5 + p.beta * (2 + p.a))

        return BallSource(amplitude, lambda s: 2 * _m0(s, p) ** (1 - p.beta))
    if family == "rhs2":
        return TailSource(lambda s: _m0(s, p) ** p.nu2, p.a2, lambda s: _m0(s, p) ** (1 - p.beta))
    if family == "rhs3":
        radius = RHS3_RADIUS * np.sqrt(p.T)
        return BallSource(lambda s: 1.0, lambda s: radius)
    raise DomainError(f"Unknown right-hand side family {family}")


def family_length(family: Family, params: BlowupParams, t: float) -> float:
    """Where the gradient of psi(., t) is largest, up to a constant"""
    if family == "rhs3":
        return np.sqrt(params.T)
    m = _m0(t, params)
    return (2 if family == "rhs1" else 1) * m ** (1 - params.beta) if m > 0 else 0.0


class Bound(NamedTuple):
    bound_id: str
    claimed_power: float
    # Power of R in the majorant; divided out before fitting
    r_power: float
    gradient: bool
    # Sup bounds compare sup_t |q(t)| with the majorant at time zero, swept over T
    over_T: bool
    # What the power refers to: mu0, t or T - t
    clock: Literal["mu0", "t", "lag"] = "mu0"

    def variable(self, t: float, params: BlowupParams) -> float:
        if self.clock == "mu0":
            return _m0(0.0 if self.over_T else t, params)
        if self.clock == "t":
            return params.T if self.over_T else t
        return params.T - t

    def factor(self, t: float, params: BlowupParams) -> float:
        if self.clock != "mu0":
            return 1.0
        return _m0(0.0 if self.over_T else t, params) ** (-params.beta * self.r_power)

    def majorant(self, t: float, params: BlowupParams) -> float:
        return self.variable(t, params) ** self.claimed_power * self.factor(t, params)


def family_bounds(family: Family, params: BlowupParams) -> List[Bound]:
    p = params
    if family == "rhs1":
        value, grad = p.nu - 0.5, p.nu - 1.5
        return [
            Bound("sup", value, -p.a, False, True),
            Bound("terminal", value, -p.a, False, False),
            Bound("gradient-sup", grad, -1 - p.a, True, True),
            Bound("gradient-terminal", grad, -1 - p.a, True, False),
        ]
    if family == "rhs2":
        value = p.nu2 + (2 - p.a2) / (4 * p.k)
        grad = p.nu2 + (1 - p.a2) / (4 * p.k)
        return [
            Bound("sup", value, 0.0, False, True),
            Bound("terminal", value, 0.0, False, False),
            Bound("gradient-sup", grad, 0.0, True, True),
            Bound("gradient-terminal", grad, 0.0, True, False),
        ]
    if family == "rhs3":
        return [
            Bound("sup", 1.0, 0.0, False, False, "t"),
            Bound("terminal", 1.0, 0.0, False, False, "lag"),
            Bound("gradient-sup", 0.5, 0.0, True, True, "t"),
            Bound("gradient-terminal", 0.5, 0.0, True, False, "lag"),
        ]
    raise DomainError(f"Unknown right-hand side family {family}")


def fitted_power(variable: np.ndarray, quantity: np.ndarray) -> float:
    """Least-squares slope of log quantity against log variable, nan with fewer than two usable points"""
    variable, quantity = np.asarray(variable, dtype=float), np.asarray(quantity, dtype=float)
    usable = (variable > 0) & (quantity > 0) & np.isfinite(quantity)
    if np.count_nonzero(usable) < 2 or np.ptp(np.log(variable[usable])) == 0:
        return float("nan")
    return float(np.polyfit(np.log(variable[usable]), np.log(quantity[usable]), 1)[0])


class _History(NamedTuple):
    params: BlowupParams
    times: np.ndarray
    # max over the sample radii of |psi(x, t)| and of |psi(x, t) - psi(x, T)|
    value: np.ndarray
    value_increment: np.ndarray
    # the same for grad psi
    gradient: np.ndarray
    gradient_increment: np.ndarray


def _gradient(source: RadialSource, radii: np.ndarray, t: float) -> np.ndarray:
    step = GRADIENT_STEP * radii
    plus = duhamel_radial(source, radii + step, t)
    minus = duhamel_radial(source, radii - step, t)
    return (plus - minus) / (2 * step)


def _history(family: Family, params: BlowupParams, times: np.ndarray, gradients: bool) -> _History:
    source = family_source(family, params)
    value = np.empty(times.shape)
    value_increment = np.empty(times.shape)
    gradient = np.full(times.shape, np.nan)
    gradient_increment = np.full(times.shape, np.nan)
    for j, t in enumerate(times):
        length = family_length(family, params, float(t))
        radii = length * np.asarray(SAMPLE_RADII)
        now = duhamel_radial(source, radii, float(t))
        later = duhamel_radial(source, radii, params.T)
        value[j] = np.max(np.abs(now))
        value_increment[j] = np.max(np.abs(now - later))
        if gradients:
            radii = radii[radii > 0]
            now = _gradient(source, radii, float(t))
            later = _gradient(source, radii, params.T)
            gradient[j] = np.max(np.abs(now))
            gradient_increment[j] = np.max(np.abs(now - later))
    logger.debug("Probe history for %s at T=%g: %d times", family, params.T, len(times))
    return _History(params, times, value, value_increment, gradient, gradient_increment)


def _quantity(bound: Bound, h: _History) -> np.ndarray:
    if bound.bound_id in ("sup", "gradient-sup"):
        return h.gradient if bound.gradient else h.value
    return h.gradient_increment if bound.gradient else h.value_increment


def _evaluate(bound: Bound, histories: Sequence[_History], family: Family) -> ProbeReport:
    base = histories[0]
    if bound.over_T:
        sups = np.array([np.nanmax(_quantity(bound, h)) for h in histories])
        majorants = np.array([bound.majorant(0.0, h.params) for h in histories])
        ratio = float(np.nanmax(sups / majorants))
        variable = np.array([bound.variable(0.0, h.params) for h in histories])
        factors = np.array([bound.factor(0.0, h.params) for h in histories])
        return ProbeReport(family, bound.bound_id, ratio, fitted_power(variable, sups / factors), bound.claimed_power)
    q = _quantity(bound, base)
    p = base.params
    majorants = np.array([bound.majorant(float(t), p) for t in base.times])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(majorants > 0, q / majorants, np.nan)
    ratio = float(np.nanmax(ratios)) if np.any(np.isfinite(ratios)) else 0.0
    late = base.times >= p.T / 2
    variable = np.array([bound.variable(float(t), p) for t in base.times[late]])
    factors = np.array([bound.factor(float(t), p) for t in base.times[late]])
    return ProbeReport(family, bound.bound_id, ratio, fitted_power(variable, q[late] / factors), bound.claimed_power)


def bound_probe_appendix(
    family: Family,
    params: BlowupParams,
    times: Optional[Sequence[float]] = None,
    T_values: Optional[Sequence[float]] = None,
    gradients: bool = True,
) -> List[ProbeReport]:
    """
    Solves the forced heat equation for one family and reports every bound.

    :param times: sample times in (0, T); defaults to T/4 and T (1 - 2^-m), m = 1..8
    :param T_values: extra blow-up times for the sup bounds. Sample times are rescaled
        with T, so the sup bounds are compared on self-similar time sets.
    """
    if family not in FAMILIES:
        raise DomainError(f"Unknown right-hand side family {family}")
    times = default_times(params.T) if times is None else np.asarray(times, dtype=float)
    if np.any(times <= 0) or np.any(times >= params.T):
        raise DomainError(f"Probe times must lie in (0, T={params.T})")
    fractions = times / params.T
    histories = [_history(family, params, times, gradients)]
    for T in T_values or ():
        if np.isclose(T, params.T):
            continue
        swept = params._replace(T=float(T))
        histories.append(_history(family, swept, fractions * T, gradients))
    reports = []
    for bound in family_bounds(family, params):
        if bound.gradient and not gradients:
            continue
        report = _evaluate(bound, histories, family)
        logger.info("Probe %s/%s: ratio %.4g, power %.4g", family, bound.bound_id, report.ratio_sup, report.fitted_power)
        reports.append(report)
    return reports


def probe_report_csv(reports: Iterable[ProbeReport], path: Path):
    write_csv(
        path,
        ["family", "bound_id", "ratio_sup", "fitted_power", "claimed_power"],
        ([r.family, r.bound_id, r.ratio_sup, r.fitted_power, r.claimed_power] for r in reports),
    )
