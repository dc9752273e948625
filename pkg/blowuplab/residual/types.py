from typing import Callable, NamedTuple, Optional

import numpy as np

from blowuplab.core.errors import DomainError


class SpaceTimeSamples(NamedTuple):
    """
    Values on a (time, radius) lattice.

    radii is either one shared radial sample set or one row per time, so
    that inner samples can follow the shrinking ball B_2R(t).
    """

    times: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    gradient: Optional[np.ndarray] = None

    @staticmethod
    def of(times, radii, values, gradient=None) -> "SpaceTimeSamples":
        times = np.atleast_1d(np.asarray(times, dtype=float))
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[0] != len(times):
            raise DomainError(f"Expected {len(times)} rows of samples, got {values.shape[0]}")
        radii = np.broadcast_to(np.asarray(radii, dtype=float), values.shape)
        if gradient is not None:
            gradient = np.asarray(gradient, dtype=float)
            if gradient.shape != values.shape:
                raise DomainError(f"Gradient has shape {gradient.shape}, expected {values.shape}")
        return SpaceTimeSamples(times, radii, values, gradient)

    @staticmethod
    def from_function(
        f: Callable[[np.ndarray, float], np.ndarray],
        times,
        radii,
        df: Optional[Callable[[np.ndarray, float], np.ndarray]] = None,
    ) -> "SpaceTimeSamples":
        """
        :param radii: a shared 1d array, or a callable t -> radii for time-dependent samples
        """
        times = np.atleast_1d(np.asarray(times, dtype=float))
        rows = [radii(t) if callable(radii) else np.asarray(radii, dtype=float) for t in times]
        values = np.stack([f(r, t) for r, t in zip(rows, times)])
        gradient = None if df is None else np.stack([df(r, t) for r, t in zip(rows, times)])
        return SpaceTimeSamples.of(times, np.stack(rows), values, gradient)

    def scaled(self, c: float) -> "SpaceTimeSamples":
        gradient = None if self.gradient is None else c * self.gradient
        return SpaceTimeSamples(self.times, self.radii, c * self.values, gradient)

    def plus(self, other: "SpaceTimeSamples") -> "SpaceTimeSamples":
        if self.values.shape != other.values.shape:
            raise DomainError("Cannot add samples on different lattices")
        gradient = None
        if self.gradient is not None and other.gradient is not None:
            gradient = self.gradient + other.gradient
        return SpaceTimeSamples(self.times, self.radii, self.values + other.values, gradient)

    def time_grid(self) -> np.ndarray:
        return np.broadcast_to(self.times[:, None], self.values.shape)
