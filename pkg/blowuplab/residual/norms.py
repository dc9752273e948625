import logging
from pathlib import Path
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from blowuplab.ansatz.scaling import mu0
from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import DomainError
from blowuplab.core.types import NormReport, TimeSeries, argsup_report
from blowuplab.core.writers import write_csv

from .types import SpaceTimeSamples

logger = logging.getLogger(__name__)


def _before_T(samples: SpaceTimeSamples, params: BlowupParams) -> SpaceTimeSamples:
    keep = samples.times < params.T
    if not np.any(keep):
        raise DomainError("No samples precede the blow-up time")
    gradient = None if samples.gradient is None else samples.gradient[keep]
    return SpaceTimeSamples(samples.times[keep], samples.radii[keep], samples.values[keep], gradient)


def outer_weights(x, t, params: BlowupParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The weights rho1, rho2, rho3 of the outer right-hand side norm"""
    x, t = np.broadcast_arrays(np.abs(np.asarray(x, dtype=float)), np.asarray(t, dtype=float))
    m0 = mu0(t, params)
    R = m0**-params.beta
    rho1 = np.where(x <= 2 * m0 * R, m0 ** (params.nu - 2.5) * R ** (-2 - params.a), 0.0)
    far = x >= m0 * R
    rho2 = np.where(far, m0**params.nu2 / np.where(far, x, 1.0) ** params.a2, 0.0)
    return rho1, rho2, np.ones(x.shape)


def norm_inner(
    samples: SpaceTimeSamples, params: BlowupParams, nu: Optional[float] = None, sigma: Optional[float] = None
) -> NormReport:
    """sup over B_2R x (0,T) of mu0^(-nu) (1 + |y|^(2+sigma)) |h|"""
    nu = params.nu if nu is None else nu
    sigma = params.sigma if sigma is None else sigma
    s = _before_T(samples, params)
    ts = s.time_grid()
    m0 = mu0(ts, params)
    y = np.abs(s.radii)
    inside = y <= 2 * m0**-params.beta
    weighted = m0**-nu * (1 + y ** (2 + sigma)) * np.abs(s.values)
    return argsup_report("inner", weighted[inside], y[inside], ts[inside])


def norm_inner0(samples: SpaceTimeSamples, params: BlowupParams) -> NormReport:
    """sup over B_2R x (0,T) of (1+|y|) / (mu0^nu R^((4-sigma)/3)) [|phi| + (1+|y|) |grad phi|]"""
    if samples.gradient is None:
        raise DomainError("The inner0 norm needs gradient samples")
    s = _before_T(samples, params)
    ts = s.time_grid()
    m0 = mu0(ts, params)
    R = m0**-params.beta
    y = np.abs(s.radii)
    inside = y <= 2 * R
    weight = (1 + y) / (m0**params.nu * R ** ((4 - params.sigma) / 3))
    weighted = weight * (np.abs(s.values) + (1 + y) * np.abs(s.gradient))
    return argsup_report("inner0", weighted[inside], y[inside], ts[inside])


def norm_outer_rhs(samples: SpaceTimeSamples, params: BlowupParams) -> NormReport:
    s = _before_T(samples, params)
    ts = s.time_grid()
    rho1, rho2, rho3 = outer_weights(s.radii, ts, params)
    weighted = np.abs(s.values) / (rho1 + rho2 + rho3)
    return argsup_report("starstar", weighted, np.abs(s.radii), ts)


def _holder_term(psi: SpaceTimeSamples, params: BlowupParams) -> Tuple[float, float, float]:
    T = params.T
    best = (0.0, 0.0, 0.0)
    for j, t2 in enumerate(psi.times):
        if t2 >= T:
            continue
        t1 = psi.times[:j]
        admissible = (t2 - t1) <= (T - t2) / 10.0
        if not np.any(admissible):
            continue
        m0 = float(mu0(t2, params))
        weight = m0 ** (2 * params.gamma + 0.5 - params.nu) * m0 ** (-params.beta * (2 * params.gamma + params.a))
        diff = np.abs(psi.values[j][None, :] - psi.values[:j][admissible])
        quotient = weight * diff / ((t2 - t1[admissible]) ** params.gamma)[:, None]
        idx = np.unravel_index(int(np.argmax(quotient)), quotient.shape)
        if quotient[idx] > best[0]:
            best = (float(quotient[idx]), float(psi.radii[j][idx[1]]), float(t2))
    return best


def _outer_sol_terms(psi: SpaceTimeSamples, params: BlowupParams):
    if psi.gradient is None:
        raise DomainError("The star norm needs gradient samples")
    if not np.isclose(psi.times[-1], params.T):
        raise DomainError(f"The star norm needs samples at the terminal time T={params.T}")
    if not np.allclose(psi.radii, psi.radii[-1]):
        raise DomainError("Outer samples must share one radial sample set across times")
    p = params
    x = np.abs(psi.radii[-1])
    ts = psi.time_grid()
    m00 = float(mu0(0.0, p))
    R0 = m00**-p.beta

    def located(weighted, times):
        idx = np.unravel_index(int(np.argmax(weighted)), weighted.shape)
        return float(weighted[idx]), float(x[idx[1]]), float(times[idx])

    terms = [
        located(m00 ** (0.5 - p.nu) * R0**p.a * np.abs(psi.values), ts),
        located(m00 ** (1.5 - p.nu) * R0 ** (1 + p.a) * np.abs(psi.gradient), ts),
    ]
    early = psi.times < p.T
    m0 = mu0(psi.times[early], p)[:, None]
    R = m0**-p.beta
    terms.append(
        located(m0 ** (0.5 - p.nu) * R**p.a * np.abs(psi.values[early] - psi.values[-1]), ts[early])
    )
    terms.append(
        located(m0 ** (1.5 - p.nu) * R ** (1 + p.a) * np.abs(psi.gradient[early] - psi.gradient[-1]), ts[early])
    )
    terms.append(_holder_term(psi, p))
    return terms


def _report(terms) -> NormReport:
    largest = max(terms, key=lambda term: term[0])
    return NormReport("star", float(sum(term[0] for term in terms)), largest[1], largest[2], tuple(t[0] for t in terms))


def norm_outer_sol(
    psi: SpaceTimeSamples,
    params: BlowupParams,
    sampler: Optional[Callable[[np.ndarray], SpaceTimeSamples]] = None,
    tolerance: float = 0.01,
    max_doublings: int = 6,
) -> NormReport:
    """
    The five-term norm of an outer solution. The first two terms use the
    time-zero weights mu0(0), R(0).

    :param sampler: maps a time lattice to fresh samples; when given the lattice
        is doubled until the Holder term changes by less than `tolerance`
    """
    terms = _outer_sol_terms(psi, params)
    if sampler is None:
        return _report(terms)
    times = psi.times
    for _ in range(max_doublings):
        times = np.sort(np.concatenate((times, 0.5 * (times[1:] + times[:-1]))))
        refined = _outer_sol_terms(sampler(times), params)
        previous, current = terms[4][0], refined[4][0]
        terms = refined
        logger.debug("Holder term %.6g on %d times", current, len(times))
        if abs(current - previous) <= tolerance * max(abs(current), 1e-300):
            break
    else:
        logger.warning("Holder term did not settle after %d doublings", max_doublings)
    return _report(terms)


def norm_delta(h: TimeSeries, delta: float, T: float) -> NormReport:
    """sup over t < T of |(T - t)^(-delta) h(t)|"""
    keep = h.times < T
    if not np.any(keep):
        raise DomainError("No samples precede T")
    ts = h.times[keep]
    weighted = (T - ts) ** -delta * np.abs(h.values[keep])
    return argsup_report("delta", weighted, np.zeros(ts.shape), ts)


def norm_report_csv(reports: Iterable[NormReport], path: Path):
    write_csv(path, ["norm_id", "value", "arg_x", "arg_t"], ([r.norm_id, r.value, r.arg_x, r.arg_t] for r in reports))
