import logging
from typing import Callable, List, Tuple

from blowuplab.core.errors import ConstraintViolation, DomainError

from .types import BlowupParams, ConstraintCheck

logger = logging.getLogger(__name__)

Inequality = Tuple[str, str, Callable[[BlowupParams], float]]

# Each entry is (id, inequality, margin); the inequality reads margin > 0
OUTER: List[Inequality] = [
    ("outer-1", "1+a-sigma<0", lambda p: -(1 + p.a - p.sigma)),
    ("outer-2", "nu-nu2-1/2+a2-beta(a2-a-4)>0", lambda p: p.nu - p.nu2 - 0.5 + p.a2 - p.beta * (p.a2 - p.a - 4)),
    ("outer-3", "nu-beta(2-a)>0", lambda p: p.nu - p.beta * (2 - p.a)),
    ("outer-4", "nu-beta((14-2sigma)/3+a)>0", lambda p: p.nu - p.beta * ((14 - 2 * p.sigma) / 3 + p.a)),
    (
        "outer-5",
        "2nu-5/2+a2-beta(a2-2a-3)-nu2>0",
        lambda p: 2 * p.nu - 2.5 + p.a2 - p.beta * (p.a2 - 2 * p.a - 3) - p.nu2,
    ),
    (
        "outer-6",
        "a2-1/2-1/(2k)+beta(3-a2)-nu2>0",
        lambda p: p.a2 - 0.5 - 1 / (2 * p.k) + p.beta * (3 - p.a2) - p.nu2,
    ),
    ("outer-7", "1/2-1/(2k)-nu2>0", lambda p: 0.5 - 1 / (2 * p.k) - p.nu2),
    ("outer-8", "1/2+(a2-3)/(4k)-nu2>0", lambda p: 0.5 + (p.a2 - 3) / (4 * p.k) - p.nu2),
    (
        "outer-9",
        "5(1/2-1/(4k))-nu+5/2-beta(2+a)>0",
        lambda p: 5 * (0.5 - 1 / (4 * p.k)) - p.nu + 2.5 - p.beta * (2 + p.a),
    ),
    ("outer-10", "2-nu-1/(4k)-beta(2+a)>0", lambda p: 2 - p.nu - 1 / (4 * p.k) - p.beta * (2 + p.a)),
    (
        "outer-11",
        "a2+1/(4k)-3/2+beta(4-a2)-nu2>0",
        lambda p: p.a2 + 1 / (4 * p.k) - 1.5 + p.beta * (4 - p.a2) - p.nu2,
    ),
]

INNER: List[Inequality] = [
    ("inner-1", "1+1/(4k)-beta(4-sigma)/3>0", lambda p: 1 + 1 / (4 * p.k) - p.beta * (4 - p.sigma) / 3),
    ("inner-2", "0<sigma<2", lambda p: min(p.sigma, 2 - p.sigma)),
    ("inner-3", "a>0", lambda p: p.a),
    ("inner-4", "2-1/(2k)-beta(2sigma+7)/3>0", lambda p: 2 - 1 / (2 * p.k) - p.beta * (2 * p.sigma + 7) / 3),
    ("inner-5", "2-1/(2k)-beta(sigma-1)>0", lambda p: 2 - 1 / (2 * p.k) - p.beta * (p.sigma - 1)),
    ("inner-6", "4-1/k-beta(3+sigma)>0", lambda p: 4 - 1 / p.k - p.beta * (3 + p.sigma)),
    ("inner-7", "1+1/(4k)-nu>0", lambda p: 1 + 1 / (4 * p.k) - p.nu),
]

NORM: List[Inequality] = [
    (
        "norm-1",
        "nu2+(2-a2)/(4k)>nu-1/2+a*beta",
        lambda p: p.nu2 + (2 - p.a2) / (4 * p.k) - (p.nu - 0.5 + p.a * p.beta),
    ),
]


def check_constraints(params: BlowupParams) -> List[ConstraintCheck]:
    checks = []
    for id, description, margin_fn in OUTER + INNER + NORM:
        margin = float(margin_fn(params))
        checks.append(ConstraintCheck(id, description, margin > 0, margin))
    return checks


def validate_ranges(params: BlowupParams):
    """The standing assumptions on the parameter tuple; violations are domain errors"""
    p = params
    if not isinstance(p.k, int) or p.k < 1:
        raise DomainError(f"k must be a positive integer, got {p.k}")
    if p.A <= 0 or p.T <= 0:
        raise DomainError(f"A and T must be positive, got A={p.A}, T={p.T}")
    if not 0 < p.beta < 0.5:
        raise DomainError(f"beta must lie in (0, 1/2), got {p.beta}")
    if not 0 < p.a < 1 or not 0 < p.gamma < 1:
        raise DomainError(f"a and gamma must lie in (0, 1), got a={p.a}, gamma={p.gamma}")
    if not 1 <= p.a2 <= 2:
        raise DomainError(f"a2 must lie in [1, 2], got {p.a2}")
    if p.nu <= 0 or p.nu2 <= 0:
        raise DomainError(f"nu and nu2 must be positive, got nu={p.nu}, nu2={p.nu2}")
    if p.zeta1 != 0.5 or p.zeta2 != 0.5:
        raise DomainError(f"The outer cutoffs use zeta1 = zeta2 = 1/2, got {p.zeta1}, {p.zeta2}")
    if p.r1 < p.r or p.r2 <= 3 * p.r:
        raise DomainError(f"Cutoff radii need r1 >= r and r2 > 3r, got r={p.r}, r1={p.r1}, r2={p.r2}")
    if p.c0 <= 0:
        raise DomainError(f"c0 must be positive, got {p.c0}")


def validate_params(params: BlowupParams, override: bool = False) -> List[ConstraintCheck]:
    """
    Checks ranges and every inequality. Failing inequalities raise unless
    override is set, in which case each failure is logged as a warning.
    """
    validate_ranges(params)
    failures = [c for c in check_constraints(params) if not c.satisfied]
    if failures and not override:
        raise ConstraintViolation(failures)
    for failure in failures:
        logger.warning(
            "Constraint %s (%s) fails with margin %.4g", failure.id, failure.description, failure.margin
        )
    return failures
