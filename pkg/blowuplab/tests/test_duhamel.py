import math

import numpy as np
import pytest

from blowuplab.ansatz.scaling import unperturbed_path
from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.quadrature import composite_rule
from blowuplab.core.types import RadialGrid
from blowuplab.core.writers import read_csv_columns
from blowuplab.duhamel.blocks import (
    block_field,
    block_half_integral,
    block_value,
    combination_blocks,
    combination_value,
    solve_vanishing,
    upsilon_derivative,
    upsilon_derivative_root,
    upsilon_eval,
    upsilon_hat,
    upsilon_taylor,
    vanishing_combo,
)
from blowuplab.duhamel.kernel import duhamel_radial, heat_flow, radial_quadrature
from blowuplab.duhamel.phi1 import (
    block_sum,
    phi1_field,
    phi1_origin,
    phi1_snapshot,
    phi1_terminal_offset,
    screened_integral,
)
from blowuplab.duhamel.probes import bound_probe_appendix, fitted_power, probe_report_csv
from blowuplab.duhamel.sources import BallSource, CallableSource, ConstantSource, TailSource
from blowuplab.duhamel.types import GaussianBlock, UpsilonCombo

WIDE = BlowupParams(k=1, A=1.0, T=1.0)


def _half_integral_by_quadrature(f, t):
    # s = t - u^2 removes the endpoint singularity
    nodes, weights = composite_rule(np.linspace(0.0, math.sqrt(t), 17), 16)
    return 2 * float(np.sum(weights * f(t - nodes * nodes)))


@pytest.mark.parametrize("kappa,t", [(1.0, 0.3), (0.25, 2.0), (4.0, 0.05)])
def test_block_value_is_heat_flow_at_origin(kappa, t):
    flow = heat_flow(lambda r: np.exp(-kappa * r * r), 0.0, t)
    assert float(flow) == pytest.approx(block_value(kappa, t), rel=1e-8)


def test_block_field_is_heat_flow():
    kappa, t = 0.5, 0.4
    x = np.array([0.3, 1.0, 2.5])
    flow = heat_flow(lambda r: np.exp(-kappa * r * r), x, t)
    assert np.allclose(flow, block_field(kappa, x, t), rtol=1e-8)


def test_heat_flow_semigroup():
    kappa, t1, t2 = 1.0, 0.2, 0.3
    x = np.array([0.0, 0.7, 1.5])
    composed = heat_flow(lambda r: block_field(kappa, r, t1), x, t2)
    assert np.allclose(composed, block_field(kappa, x, t1 + t2), rtol=1e-6)


def test_heat_flow_rejects_negative_time():
    with pytest.raises(DomainError):
        heat_flow(np.ones_like, 0.0, -1.0)


@pytest.mark.parametrize("kappa,t", [(0.0, 0.5), (1.0, 0.3), (3.0, 2.0)])
def test_block_half_integral_matches_quadrature(kappa, t):
    expected = _half_integral_by_quadrature(lambda s: block_value(kappa, s), t)
    assert block_half_integral(kappa, t) == pytest.approx(expected, rel=1e-8)


def test_constant_block_half_integral():
    t = np.array([0.0, 0.25, 4.0])
    assert np.allclose(block_half_integral(0.0, t), 2 * np.sqrt(t))


def test_upsilon_single_term():
    combo = UpsilonCombo.of([2.0], [0.5], 1)
    T = 0.7
    assert float(upsilon_eval(combo, T)) == pytest.approx(2 * math.sqrt(T) / (T + 0.5))


def test_upsilon_zero_weights():
    combo = UpsilonCombo.of([0.0, 0.0], [1.0, 2.0], 1)
    assert np.all(upsilon_eval(combo, np.linspace(0, 1, 5)) == 0.0)


def test_upsilon_rates_distinct():
    with pytest.raises(DomainError):
        UpsilonCombo.of([1.0, 1.0], [1.0, 1.0], 1)
    with pytest.raises(DomainError):
        GaussianBlock.of(0.0)


def test_vanishing_one_term():
    T, kappa = 0.3, 0.45
    assert solve_vanishing(T, [kappa], 1) == pytest.approx([T + kappa])


@pytest.mark.parametrize("i", [1, 2, 3])
def test_vanishing_order(i):
    T = 1.0
    combo = vanishing_combo(T, np.array([1.0, 2.0, 3.0]) * T, i)
    z = np.geomspace(1e-3, 1e-2, 12)
    increment = upsilon_hat(combo, T - z) - upsilon_hat(combo, T)
    slope = np.polyfit(np.log(z), np.log(np.abs(increment)), 1)[0]
    assert slope == pytest.approx(i, rel=0.02)
    assert increment[0] / z[0] ** i == pytest.approx(1.0, rel=0.05)


def test_vanishing_permutation():
    T = 0.5
    kappas = np.array([0.2, 0.9, 1.7])
    order = np.array([2, 0, 1])
    v = solve_vanishing(T, kappas, 2)
    assert np.allclose(solve_vanishing(T, kappas[order], 2), v[order], rtol=1e-10)


def test_vanishing_rejects_bad_input():
    with pytest.raises(DomainError):
        solve_vanishing(1.0, [1.0, 2.0], 3)
    with pytest.raises(DomainError):
        solve_vanishing(1.0, [1.0, 1.0], 1)


def test_combination_blocks_reproduce_upsilon():
    combo = vanishing_combo(1.0, [1.0, 2.5], 1)
    blocks = combination_blocks(combo)
    t = 0.6
    half = sum(w * block_half_integral(k, t) for k, w in zip(blocks.kappas, blocks.weights))
    assert half == pytest.approx(upsilon_eval(combo, t), rel=1e-12)
    assert combination_value(blocks, 0.0) == pytest.approx(float(np.sum(blocks.weights)))


def test_upsilon_derivative_and_taylor():
    combo = UpsilonCombo.of([1.0, -0.5], [0.3, 1.1], 1)
    t, h = 0.4, 1e-6
    fd = (upsilon_eval(combo, t + h) - upsilon_eval(combo, t - h)) / (2 * h)
    assert float(upsilon_derivative(combo, t)) == pytest.approx(float(fd), rel=1e-7)
    # The sqrt(t) factored form stays finite at the origin
    assert float(upsilon_derivative_root(combo, 0.0)) == pytest.approx(1.0 / 0.6 - 0.5 / 2.2, rel=1e-14)
    assert math.isinf(float(upsilon_derivative(combo, 0.0)))
    T = 1.0
    e = upsilon_taylor(combo, T, 8)
    z = 0.05
    assert np.polyval(e[::-1], z) == pytest.approx(float(upsilon_eval(combo, T - z)), rel=1e-8)


def test_duhamel_of_constant_source():
    t = 0.7
    values = duhamel_radial(ConstantSource(1.0), np.array([0.0, 1.0, 5.0]), t)
    assert np.allclose(values, t, rtol=1e-9)
    assert duhamel_radial(ConstantSource(1.0), 0.0, 0.0) == 0.0


def test_ball_source_closed_form():
    ball = BallSource(lambda s: 2.0, lambda s: 1.0)
    generic = CallableSource(lambda r, s: np.where(r <= 1.0, 2.0, 0.0), breakpoints=lambda s: (1.0,))
    for x in (0.0, 0.5, 1.0, 3.0):
        assert ball.spatial_integral(x, 0.1, 0.0) == pytest.approx(generic.spatial_integral(x, 0.1, 0.0), abs=1e-10)


def test_tail_source_at_origin():
    tail = TailSource(lambda s: 1.5, 2.0, lambda s: 0.5)
    tau = 0.2
    generic = radial_quadrature(0.0, tau, lambda r: tail.value(r, 0.0), (0.5,))
    assert tail.spatial_integral(0.0, tau, 0.0) == pytest.approx(generic, rel=1e-8)


def test_tail_exponent_range():
    with pytest.raises(DomainError):
        TailSource(lambda s: 1.0, 3.0, lambda s: 1.0)


def _history(alpha, n=65):
    times = np.linspace(0.0, WIDE.T, n)
    path = unperturbed_path(WIDE, times[:-1])
    return path._replace(alpha=alpha(path.times))


def test_phi1_of_zero_history():
    path = _history(np.zeros_like)
    assert phi1_origin(path, WIDE, 0.5, correct=False) == 0.0
    assert phi1_origin(path, WIDE, 0.5) == pytest.approx(0.0, abs=1e-14)


def test_unscreened_integral_of_constant():
    path = _history(np.ones_like)
    t = 0.5
    assert screened_integral(path, WIDE, t, screen=False) == pytest.approx(2 * math.sqrt(t / math.pi), rel=1e-12)
    assert screened_integral(path, WIDE, t) < screened_integral(path, WIDE, t, screen=False)


def test_phi1_is_linear():
    t = 0.4
    a = _history(lambda s: np.sin(3 * s))
    b = _history(lambda s: s * s)
    both = a._replace(alpha=2 * a.alpha - b.alpha)
    kappas = [0.5, 2.0]
    va = phi1_origin(a, WIDE, t, [1.0, 0.0], kappas, correct=False)
    vb = phi1_origin(b, WIDE, t, [0.0, 1.0], kappas, correct=False)
    combined = phi1_origin(both, WIDE, t, [2.0, -1.0], kappas, correct=False)
    assert combined == pytest.approx(2 * va - vb, rel=1e-12, abs=1e-14)


def test_block_sum_checks_lengths():
    with pytest.raises(DomainError):
        block_sum([1.0], [0.5, 1.0], 0.1)


def test_phi1_history_checks():
    path = _history(np.ones_like)
    with pytest.raises(DomainError):
        phi1_origin(path._replace(times=path.times + 0.1), WIDE, 0.5, correct=False)
    short = _history(np.ones_like, n=5)
    with pytest.raises(NumericalError):
        phi1_origin(short, WIDE, 0.5, correct=False)


def test_phi1_snapshot_of_blocks():
    path = _history(np.zeros_like)
    grid = RadialGrid.uniform(2.0, 8)
    snap = phi1_snapshot(grid, 0.3, path, WIDE, [1.0], [0.5])
    assert np.allclose(snap.values, block_field(0.5, grid.nodes, 0.3), rtol=1e-10, atol=1e-12)
    assert snap.derivative is not None


def test_phi1_normalized_at_terminal_time():
    path = _history(np.zeros_like)
    grid = RadialGrid.uniform(2.0, 8)
    terminal = block_value(0.5, WIDE.T)
    assert phi1_terminal_offset(path, WIDE, [1.0], [0.5]) == pytest.approx(terminal, rel=1e-12)
    snap = phi1_snapshot(grid, 0.3, path, WIDE, [1.0], [0.5], normalized=True)
    assert np.allclose(snap.values, block_field(0.5, grid.nodes, 0.3) - terminal, rtol=1e-10, atol=1e-12)
    origin = phi1_origin(path, WIDE, 0.3, [1.0], [0.5], correct=False, normalized=True)
    assert origin == pytest.approx(block_value(0.5, 0.3) - terminal, rel=1e-12)
    assert phi1_origin(path, WIDE, WIDE.T, [1.0], [0.5], correct=False, normalized=True) == 0.0


def test_phi1_field_vanishes_at_origin_at_T():
    path = _history(lambda s: np.cos(2 * s))
    value = phi1_field(0.0, WIDE.T, path, WIDE, [1.0], [0.5], normalized=True)
    assert value == pytest.approx(0.0, abs=1e-12)
    # The offset is a constant in x and t
    x = np.array([0.0, 0.4])
    plain = phi1_field(x, 0.5, path, WIDE, [1.0], [0.5])
    shifted = phi1_field(x, 0.5, path, WIDE, [1.0], [0.5], normalized=True)
    assert np.allclose(plain - shifted, phi1_terminal_offset(path, WIDE, [1.0], [0.5]), rtol=1e-12)


def test_fitted_power():
    x = np.geomspace(1e-4, 1e-1, 10)
    assert fitted_power(x, 3 * x**1.5) == pytest.approx(1.5)
    assert math.isnan(fitted_power(x[:1], x[:1]))


def test_bounded_family_probe(tmp_path):
    reports = bound_probe_appendix("rhs3", WIDE, gradients=False)
    by_id = {r.bound_id: r for r in reports}
    assert set(by_id) == {"sup", "terminal"}
    assert by_id["sup"].ratio_sup <= 1.0 + 1e-9
    # The ball holds all but a few percent of the heat up to t = T
    assert by_id["sup"].fitted_power == pytest.approx(1.0, abs=0.05)
    path = tmp_path / "probes.csv"
    probe_report_csv(reports, path)
    assert read_csv_columns(path)["family"] == ["rhs3", "rhs3"]


def test_bounded_family_gradients():
    reports = bound_probe_appendix("rhs3", WIDE, T_values=[0.25])
    by_id = {r.bound_id: r for r in reports}
    assert 0 < by_id["gradient-sup"].ratio_sup < np.inf
    # The source is a fixed shape in x / sqrt(T), so grad psi scales like sqrt(T)
    assert by_id["gradient-sup"].fitted_power == pytest.approx(0.5, rel=1e-3)
    assert 0 < by_id["gradient-terminal"].ratio_sup < np.inf


SWEEP = BlowupParams(k=2, T=0.1, nu=0.9)


@pytest.fixture(scope="module")
def probe_sweep():
    """Reports of rhs1 and rhs2 at T = 0.1 and T = 0.01, and with both in one sweep"""
    reports = {}
    for family in ("rhs1", "rhs2"):
        for T in (0.1, 0.01):
            found = bound_probe_appendix(family, SWEEP._replace(T=T), gradients=False)
            reports[family, T] = {r.bound_id: r for r in found}
        swept = bound_probe_appendix(family, SWEEP, T_values=[0.01], gradients=False)
        reports[family, "sweep"] = {r.bound_id: r for r in swept}
    return reports


@pytest.mark.parametrize("family,bound_id", [("rhs1", "sup"), ("rhs1", "terminal"), ("rhs2", "sup"), ("rhs2", "terminal")])
def test_probe_ratio_is_bounded_across_T(probe_sweep, family, bound_id):
    large = probe_sweep[family, 0.1][bound_id].ratio_sup
    small = probe_sweep[family, 0.01][bound_id].ratio_sup
    assert 0 < large < np.inf and 0 < small < np.inf
    assert 0.5 < small / large < 2.0


def test_ball_family_power(probe_sweep):
    claim = SWEEP.nu - 0.5
    swept = probe_sweep["rhs1", "sweep"]["sup"]
    assert swept.claimed_power == pytest.approx(claim)
    assert swept.fitted_power == pytest.approx(claim, rel=0.1)
    for T in (0.1, 0.01):
        assert probe_sweep["rhs1", T]["terminal"].fitted_power == pytest.approx(claim, rel=0.1)


def test_tail_family_power(probe_sweep):
    claim = SWEEP.nu2 + (2 - SWEEP.a2) / (4 * SWEEP.k)
    swept = probe_sweep["rhs2", "sweep"]["sup"]
    assert swept.claimed_power == pytest.approx(claim)
    assert swept.fitted_power == pytest.approx(claim, rel=0.1)


def test_probe_rejects_bad_input():
    with pytest.raises(DomainError):
        bound_probe_appendix("rhs4", WIDE)
    with pytest.raises(DomainError):
        bound_probe_appendix("rhs3", WIDE, times=[WIDE.T])
