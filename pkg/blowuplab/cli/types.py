from pathlib import Path
from typing import Any, List, NamedTuple, Optional, Tuple

from blowuplab.ansatz.types import BlowupParams


class ConfigKey(NamedTuple):
    name: str
    type: str
    default: Any
    description: str
    # Field of BlowupParams rather than a run control
    param: bool = False
    minimum: Optional[float] = None
    positive: bool = False
    choices: Tuple[str, ...] = ()


class RunConfig(NamedTuple):
    subcommand: str
    params: BlowupParams
    nodes: int
    y_max: float
    x_max: float
    time_samples: int
    output: Path
    seed: int
    override: bool
    h_table: Optional[Path]
    threshold: float

    @property
    def far_field(self) -> float:
        return self.x_max if self.x_max > 0 else 10 * self.params.T**0.5


class Series(NamedTuple):
    label: str
    x: List[float]
    y: List[float]
    # line or points
    style: str = "line"
