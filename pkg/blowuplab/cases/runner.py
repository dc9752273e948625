import importlib
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, NamedTuple

import numpy as np

from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import BlowupLabError, DomainError
from blowuplab.core.types import RadialGrid, TimeSeries

from .types import Case, CaseLiteral, ExpectedResult

DEFAULT_RTOL = 1e-12

# Sampled functions available to `series` literals
SAMPLERS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "one": np.ones_like,
    "identity": lambda t: t,
    "square": lambda t: t * t,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "zero": np.zeros_like,
}


class CaseResult(NamedTuple):
    passed: bool
    reason: str


def _series(value: dict) -> TimeSeries:
    times = np.linspace(0.0, float(value["T"]), int(value["n"]) + 1)
    scale = float(value.get("scale", 1.0))
    return TimeSeries.sample(lambda t: scale * SAMPLERS[value["sample"]](t), times, value.get("order", "linear"))


def _grid(value: dict) -> RadialGrid:
    if value.get("kind", "uniform") == "geometric":
        return RadialGrid.geometric(float(value["r_min"]), float(value["r_max"]), int(value["n"]))
    return RadialGrid.uniform(float(value["r_max"]), int(value["n"]))


LITERALS: Dict[str, Callable[[Any], Any]] = {
    "fp64": float,
    "i64": int,
    "bool": bool,
    "string": str,
    "list<fp64>": lambda v: np.asarray(v, dtype=float),
    "params": lambda v: BlowupParams(**v),
    "grid": _grid,
    "series": _series,
}


def to_python(literal: CaseLiteral):
    if literal.type not in LITERALS:
        raise DomainError(f"Unknown case literal type {literal.type}")
    return LITERALS[literal.type](literal.value)


def select_field(value, field: str):
    for part in field.split("."):
        value = value[int(part)] if part.isdigit() else getattr(value, part)
    return value


def matches(actual, expected: ExpectedResult) -> bool:
    if expected.type in ("fp64", "list<fp64>"):
        want = np.asarray(expected.value, dtype=float)
        got = np.asarray(actual, dtype=float)
        if got.shape != want.shape and want.ndim > 0:
            return False
        tolerance = DEFAULT_RTOL if expected.tolerance is None else expected.tolerance
        if expected.relative or expected.tolerance is None:
            return bool(np.all(np.isclose(got, want, rtol=tolerance, atol=0.0, equal_nan=True)))
        return bool(np.all(np.isclose(got, want, rtol=0.0, atol=tolerance, equal_nan=True)))
    return actual == to_python(CaseLiteral(expected.value, expected.type))


class CaseRunner(ABC):
    @abstractmethod
    def run_case(self, case: Case) -> CaseResult:
        pass


class PythonCaseRunner(CaseRunner):
    """Calls base_uri.function with the decoded arguments and compares the result"""

    @staticmethod
    def resolve(case: Case) -> Callable:
        module = importlib.import_module(case.base_uri)
        fn = getattr(module, case.function, None)
        if fn is None:
            raise DomainError(f"{case.base_uri} defines no function {case.function}")
        return fn

    def run_case(self, case: Case) -> CaseResult:
        fn = self.resolve(case)
        args = [to_python(arg) for arg in case.args]
        try:
            actual = fn(*args, **dict(case.options))
        except (BlowupLabError, ValueError) as err:
            if case.result == "error":
                return CaseResult(True, f"Raised {type(err).__name__} as expected")
            return CaseResult(False, f"Unexpected {type(err).__name__}: {err}")
        if case.result == "error":
            return CaseResult(False, f"Expected an error, got {actual!r}")
        if case.result.field is not None:
            actual = select_field(actual, case.result.field)
        if matches(actual, case.result):
            return CaseResult(True, "")
        return CaseResult(False, f"Expected {case.result.value}, got {actual!r}")
