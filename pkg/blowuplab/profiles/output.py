from pathlib import Path

import numpy as np

from blowuplab.core.writers import write_csv

from .types import ProfileSample


def profile_csv(sample: ProfileSample, path: Path):
    rows = zip(np.atleast_1d(sample.y), np.atleast_1d(sample.value), np.atleast_1d(sample.derivative))
    write_csv(path, ["y", "value", "derivative"], rows)
