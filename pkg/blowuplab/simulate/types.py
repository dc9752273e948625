from typing import Callable, List, NamedTuple, Optional

import numpy as np

from blowuplab.core.types import FieldSnapshot

# Why a run stopped
BLOWUP = "blowup-threshold"
HORIZON = "horizon"
DECAY = "decay"
STEP_LIMIT = "step-limit"


class Controls(NamedTuple):
    threshold: float = 1e8
    horizon: float = 1.0
    decay: float = 1e-6
    # dt <= cfl h_min^2 / 2 and dt <= reaction ||u||^-4
    cfl: float = 0.4
    reaction: float = 0.1
    # Target relative change per step for adaptive steppers; twice this rejects a step
    change: float = 0.01
    max_steps: int = 200_000
    # Dirichlet value at the last node as a function of t; None means zero
    boundary: Optional[Callable[[float], float]] = None
    # False drops the Laplacian and the boundary, leaving u' = u^5 at every node
    laplacian: bool = True
    regrid: bool = True
    # Uniform pieces of the refined core [0, 8 ||u||^-2]
    core_intervals: int = 64
    store_every: int = 100


class Trajectory(NamedTuple):
    times: np.ndarray
    # Step that led to each sample; zero for the first
    steps: np.ndarray
    sup_norm: np.ndarray
    center: np.ndarray
    snapshots: List[FieldSnapshot]
    reason: str

    @property
    def remaining(self) -> np.ndarray:
        """Time left to the final sample, summed from the steps so it resolves below the clock"""
        tail = np.cumsum(self.steps[::-1])[::-1]
        return np.append(tail[1:], 0.0)

    @property
    def final(self) -> FieldSnapshot:
        return self.snapshots[-1]


class RateFit(NamedTuple):
    # Blow-up time as an offset past the final sample, and as an absolute time
    delta: float
    T_star: float
    exponent: float
    residual: float
    window: tuple
    samples: int


class TrackingReport(NamedTuple):
    trajectory: Trajectory
    mu_est: np.ndarray
    mu0: np.ndarray
    ratio_min: float
    ratio_max: float
    # sup norm at the end of the window over its initial value
    growth: float


class InnerProbeReport(NamedTuple):
    R: float
    e0: float
    ratio: float
    # Z_minus coefficient of the final state
    projection: float
    lambda_minus: float
    # Largest |integral h Z0| / integral |h Z0| over the sampled times
    orthogonality_defect: float
