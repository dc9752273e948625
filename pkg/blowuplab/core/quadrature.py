from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np


@lru_cache(maxsize=16)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]"""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def composite_rule(breaks: Sequence[float], n: int = 16) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an n-point Gauss rule on every panel between consecutive breaks"""
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if len(breaks) < 2:
        return np.zeros(0), np.zeros(0)
    x, w = gauss_legendre(n)
    lo = breaks[:-1, None]
    width = np.diff(breaks)[:, None]
    return (lo + width * x).ravel(), (width * w).ravel()


def geometric_breaks(lo: float, hi: float, ratio: float = 2.0) -> np.ndarray:
    """0, lo, lo*ratio, ... up to hi; panels cluster at the origin"""
    if hi <= 0:
        return np.array([0.0])
    lo = min(lo, hi)
    count = int(np.ceil(np.log(hi / lo) / np.log(ratio))) + 1
    inner = lo * ratio ** np.arange(count)
    inner = inner[inner < hi]
    return np.concatenate(([0.0], inner, [hi]))
