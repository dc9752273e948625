import numpy as np

from blowuplab.core.errors import DomainError
from blowuplab.core.types import FieldSnapshot, RadialGrid


def _check(grid: RadialGrid):
    if len(grid.nodes) < 3:
        raise DomainError(f"Radial operators need at least 3 nodes, got {len(grid.nodes)}")


def _same_grid(a: FieldSnapshot, b: FieldSnapshot):
    if not np.array_equal(a.grid.nodes, b.grid.nodes):
        raise DomainError("Snapshots live on different radial grids")


def _interior_weights(r: np.ndarray):
    """Three-point Lagrange weights for f' and f'' on a nonuniform grid"""
    hm = r[1:-1] - r[:-2]
    hp = r[2:] - r[1:-1]
    s = hm + hp
    d1 = (-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s))
    d2 = (2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s))
    return d1, d2


def _last_node(r: np.ndarray, f: np.ndarray):
    """f' and f'' at r_N from the quadratic through the last three nodes"""
    x0, x1, x2 = r[-3:]
    f0, f1, f2 = f[-3:]
    d01 = (f1 - f0) / (x1 - x0)
    d12 = (f2 - f1) / (x2 - x1)
    d012 = (d12 - d01) / (x2 - x0)
    return d12 + d012 * (x2 - x1), 2.0 * d012


def _derivatives(grid: RadialGrid, f: np.ndarray):
    _check(grid)
    r = grid.nodes
    f = np.asarray(f, dtype=float)
    (a1, b1, c1), (a2, b2, c2) = _interior_weights(r)
    first = np.empty_like(f)
    second = np.empty_like(f)
    first[1:-1] = a1 * f[:-2] + b1 * f[1:-1] + c1 * f[2:]
    second[1:-1] = a2 * f[:-2] + b2 * f[1:-1] + c2 * f[2:]
    # Even extension: f = f0 + c r^2 near the origin
    first[0] = 0.0
    second[0] = 2.0 * (f[1] - f[0]) / r[1] ** 2
    first[-1], second[-1] = _last_node(r, f)
    return first, second


def radial_gradient(f: FieldSnapshot) -> FieldSnapshot:
    first, _ = _derivatives(f.grid, f.values)
    return FieldSnapshot(f.grid, first, None, f.t)


def radial_laplacian(f: FieldSnapshot) -> FieldSnapshot:
    """f'' + (2/r) f' with Delta f(0) = 3 f''(0)"""
    first, second = _derivatives(f.grid, f.values)
    r = f.grid.nodes
    lap = np.empty_like(second)
    lap[0] = 3.0 * second[0]
    lap[1:] = second[1:] + 2.0 * first[1:] / r[1:]
    return FieldSnapshot(f.grid, lap, None, f.t)


def error_S(u_now: FieldSnapshot, u_prev: FieldSnapshot, dt: float) -> FieldSnapshot:
    """
    S(u) = -u_t + Delta u + u^5 at the midpoint of two snapshots dt apart.
    """
    _same_grid(u_now, u_prev)
    if dt <= 0:
        raise DomainError(f"Time step must be positive, got {dt}")
    mid = u_now.with_values(0.5 * (u_now.values + u_prev.values), t=0.5 * (u_now.t + u_prev.t))
    lap = radial_laplacian(mid).values
    values = -(u_now.values - u_prev.values) / dt + lap + mid.values**5
    return mid.with_values(values)


def error_S_analytic(u: FieldSnapshot, u_t) -> FieldSnapshot:
    """S(u) with a closed-form time derivative sampled on the same nodes"""
    u_t = np.asarray(u_t, dtype=float)
    if u_t.shape != u.values.shape:
        raise DomainError(f"Time derivative has shape {u_t.shape}, expected {u.values.shape}")
    return u.with_values(-u_t + radial_laplacian(u).values + u.values**5)


def laplacian_banded(grid: RadialGrid) -> np.ndarray:
    """
    The matrix of radial_laplacian in scipy.linalg.solve_banded layout (rows upper,
    diagonal, lower). The last row is left empty for a Dirichlet condition.
    """
    _check(grid)
    r = grid.nodes
    (a1, b1, c1), (a2, b2, c2) = _interior_weights(r)
    inner = r[1:-1]
    ab = np.zeros((3, len(r)))
    ab[1, 0] = -6.0 / r[1] ** 2
    ab[0, 1] = 6.0 / r[1] ** 2
    ab[2, :-2] = a2 + 2.0 * a1 / inner
    ab[1, 1:-1] = b2 + 2.0 * b1 / inner
    ab[0, 2:] = c2 + 2.0 * c1 / inner
    return ab
