from typing import Callable, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError

MIN_NODES = 16


class RadialGrid(NamedTuple):
    # Nodes r_0 = 0 < r_1 < ... < r_N
    nodes: np.ndarray
    # How the nodes were laid out: uniform, geometric or refined
    stretching: str

    @staticmethod
    def uniform(r_max: float, n: int) -> "RadialGrid":
        if n < MIN_NODES:
            raise DomainError(f"A radial grid needs at least {MIN_NODES} intervals, got {n}")
        if r_max <= 0:
            raise DomainError(f"Grid extent must be positive, got {r_max}")
        return RadialGrid(np.linspace(0.0, r_max, n + 1), "uniform")

    @staticmethod
    def geometric(r_min: float, r_max: float, n: int) -> "RadialGrid":
        """Origin plus n geometrically spaced nodes from r_min to r_max"""
        if n < MIN_NODES:
            raise DomainError(f"A radial grid needs at least {MIN_NODES} intervals, got {n}")
        if not 0 < r_min < r_max:
            raise DomainError(f"Expected 0 < r_min < r_max, got {r_min}, {r_max}")
        nodes = np.concatenate(([0.0], np.geomspace(r_min, r_max, n)))
        return RadialGrid(nodes, "geometric")

    @staticmethod
    def from_nodes(nodes: Sequence[float], stretching: str = "custom") -> "RadialGrid":
        arr = np.asarray(nodes, dtype=float)
        if arr.ndim != 1 or len(arr) < MIN_NODES + 1:
            raise DomainError(f"A radial grid needs at least {MIN_NODES + 1} nodes")
        if arr[0] != 0.0:
            raise DomainError(f"A radial grid starts at the origin, got r_0={arr[0]}")
        if np.any(np.diff(arr) <= 0):
            raise DomainError("Radial grid nodes must be strictly increasing")
        return RadialGrid(arr, stretching)

    def with_nodes(self, extra: Sequence[float]) -> "RadialGrid":
        """Insert extra radii as exact nodes (points outside the grid are dropped)"""
        extra = np.asarray([e for e in extra if 0.0 < e < self.nodes[-1]], dtype=float)
        merged = np.union1d(self.nodes, extra)
        return RadialGrid(merged, self.stretching)

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def h_min(self) -> float:
        return float(np.min(np.diff(self.nodes)))

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def __len__(self):
        return len(self.nodes)


class FieldSnapshot(NamedTuple):
    grid: RadialGrid
    values: np.ndarray
    derivative: Optional[np.ndarray] = None
    t: float = 0.0

    @staticmethod
    def from_function(
        grid: RadialGrid,
        f: Callable[[np.ndarray], np.ndarray],
        df: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        t: float = 0.0,
    ) -> "FieldSnapshot":
        values = np.asarray(f(grid.nodes), dtype=float)
        derivative = None if df is None else np.asarray(df(grid.nodes), dtype=float)
        return FieldSnapshot(grid, values, derivative, t)

    def evaluate(self, r) -> np.ndarray:
        return np.interp(np.abs(r), self.grid.nodes, self.values)

    def evaluate_derivative(self, r) -> np.ndarray:
        if self.derivative is None:
            raise DomainError("Snapshot carries no gradient data")
        return np.interp(np.abs(r), self.grid.nodes, self.derivative)

    def with_values(self, values: np.ndarray, t: Optional[float] = None) -> "FieldSnapshot":
        return FieldSnapshot(self.grid, values, None, self.t if t is None else t)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


class TimeSeries(NamedTuple):
    times: np.ndarray
    values: np.ndarray
    # linear: affine pieces; sqrt: a + b*sqrt(t) pieces; cubic: spline pieces
    order: Literal["linear", "sqrt", "cubic"] = "linear"

    @staticmethod
    def sample(
        f: Callable[[np.ndarray], np.ndarray], times: Sequence[float], order: str = "linear"
    ) -> "TimeSeries":
        times = np.asarray(times, dtype=float)
        return TimeSeries.of(times, np.asarray(f(times), dtype=float), order)

    @staticmethod
    def of(times, values, order: str = "linear") -> "TimeSeries":
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.shape != values.shape or times.ndim != 1 or len(times) < 2:
            raise DomainError("A time series needs matching one-dimensional times and values")
        if np.any(np.diff(times) <= 0):
            raise DomainError("Time series samples must be strictly increasing")
        if order not in ("linear", "sqrt", "cubic"):
            raise DomainError(f"Unknown interpolation order {order}")
        return TimeSeries(times, values, order)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.order == "cubic":
            from scipy.interpolate import CubicSpline

            return CubicSpline(self.times, self.values)(t)
        if self.order == "sqrt":
            return np.interp(np.sqrt(t), np.sqrt(self.times), self.values)
        return np.interp(t, self.times, self.values)

    def with_order(self, order: str) -> "TimeSeries":
        return TimeSeries.of(self.times, self.values, order)


class NormReport(NamedTuple):
    norm_id: str
    value: float
    arg_x: float
    arg_t: float
    # Individual contributions for norms defined as sums
    terms: Tuple[float, ...] = ()


def argsup_report(norm_id: str, weighted: np.ndarray, xs: np.ndarray, ts: np.ndarray) -> NormReport:
    """Sup of an already weighted array of |values| with its location"""
    weighted = np.asarray(weighted, dtype=float)
    if weighted.size == 0:
        raise DomainError(f"Cannot take the {norm_id} norm of an empty sample set")
    idx = int(np.argmax(weighted))
    return NormReport(
        norm_id,
        float(weighted.flat[idx]),
        float(np.broadcast_to(xs, weighted.shape).flat[idx]),
        float(np.broadcast_to(ts, weighted.shape).flat[idx]),
    )
