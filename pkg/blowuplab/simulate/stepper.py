from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import FieldSnapshot
from blowuplab.residual.operators import laplacian_banded, radial_laplacian

from .types import Controls

# Largest factor between consecutive adaptive steps
MAX_STEP_GROWTH = 2.0


class Stepper(ABC):
    """
    One-step schemes for the radial system u_t = Delta u + u^5,
    with the Dirichlet value re-imposed at the last node after every stage.
    """

    # Adaptive steppers size their steps from the relative change of the last step
    adaptive = False

    def __init__(self, controls: Optional[Controls] = None):
        self.controls = Controls() if controls is None else controls

    def rate(self, values: np.ndarray, like: FieldSnapshot) -> np.ndarray:
        du = values**5
        if self.controls.laplacian:
            du = du + radial_laplacian(like.with_values(values)).values
        return du

    def boundary_value(self, t: float) -> float:
        boundary = self.controls.boundary
        return 0.0 if boundary is None else boundary(t)

    def enforce(self, values: np.ndarray, t: float) -> np.ndarray:
        if self.controls.laplacian:
            values[-1] = self.boundary_value(t)
        return values

    def propose(self, state: FieldSnapshot, sup: float, previous: Optional[Tuple[float, float]] = None) -> float:
        """
        Next step size. Explicit schemes take dt <= reaction ||u||^-4 and
        dt <= cfl h_min^2 / 2; previous is the (dt, relative change) of the last step.
        """
        dt = self.controls.reaction * sup**-4 if sup > 0 else np.inf
        if self.controls.laplacian:
            dt = min(dt, self.controls.cfl * state.grid.h_min**2 / 2)
        return dt

    @abstractmethod
    def combine(self, state: FieldSnapshot, dt: float) -> np.ndarray:
        pass

    def step(self, state: FieldSnapshot, dt: float) -> FieldSnapshot:
        if dt <= 0:
            raise DomainError(f"Time step must be positive, got {dt}")
        with np.errstate(over="ignore", invalid="ignore"):
            values = self.combine(state, dt)
        if not np.all(np.isfinite(values)):
            raise NumericalError(f"Non-finite values after a step of {dt:.3g} from t={state.t:.17g}")
        return FieldSnapshot(state.grid, values, None, state.t + dt)


class SSPRK3(Stepper):
    def combine(self, state: FieldSnapshot, dt: float) -> np.ndarray:
        t, u = state.t, state.values
        u1 = self.enforce(u + dt * self.rate(u, state), t + dt)
        u2 = self.enforce(0.75 * u + 0.25 * (u1 + dt * self.rate(u1, state)), t + 0.5 * dt)
        return self.enforce(u / 3 + 2 / 3 * (u2 + dt * self.rate(u2, state)), t + dt)


class Heun(Stepper):
    def combine(self, state: FieldSnapshot, dt: float) -> np.ndarray:
        t, u = state.t, state.values
        u1 = self.enforce(u + dt * self.rate(u, state), t + dt)
        return self.enforce(0.5 * (u + u1 + dt * self.rate(u1, state)), t + dt)


class LinearlyImplicit(Stepper):
    """
    Linearly implicit Euler: (I - dt J) du = dt (Delta u + u^5) with J = Delta + 5 u^4,
    one tridiagonal solve per step.

    Stiff modes of the bubble core relax instead of bounding the step, so steps are
    sized by the relative change ||du|| / ||u|| against controls.change.
    """

    adaptive = True

    def propose(self, state: FieldSnapshot, sup: float, previous: Optional[Tuple[float, float]] = None) -> float:
        if previous is None:
            return self.controls.reaction * sup**-4 if sup > 0 else np.inf
        dt, change = previous
        if change <= 0:
            return MAX_STEP_GROWTH * dt
        return dt * min(MAX_STEP_GROWTH, max(0.2, 0.9 * self.controls.change / change))

    def combine(self, state: FieldSnapshot, dt: float) -> np.ndarray:
        u = state.values
        if self.controls.laplacian:
            ab = -dt * laplacian_banded(state.grid)
        else:
            ab = np.zeros((3, len(u)))
        ab[1] += 1.0 - dt * 5.0 * u**4
        rhs = dt * self.rate(u, state)
        if self.controls.laplacian:
            ab[1, -1] = 1.0
            rhs[-1] = self.boundary_value(state.t + dt) - u[-1]
        try:
            du = solve_banded((1, 1), ab, rhs)
        except (LinAlgError, ValueError) as err:
            raise NumericalError(f"Implicit step of {dt:.3g} from t={state.t:.17g} failed: {err}")
        return u + du


def step(state: FieldSnapshot, dt: float, stepper: Optional[Stepper] = None) -> FieldSnapshot:
    stepper = SSPRK3() if stepper is None else stepper
    return stepper.step(state, dt)
