import math

import numpy as np
import pytest
from scipy.integrate import quad

from blowuplab.abel.fractional import abel_derivative, abel_forward, abel_residual, abel_solve, half_integral
from blowuplab.abel.multipoint import multipoint_rate
from blowuplab.abel.orthogonality import Z0_MASS_LIMIT, ball_integral, orthogonality_h, orthogonality_rhs, z0_mass
from blowuplab.abel.reduced import graded_times, iterate_reduced, reduced_solution_csv, reduced_solve
from blowuplab.abel.taylor import dyadic_times, fit_vanishing_order, taylor_at_T
from blowuplab.ansatz.scaling import path_point, unperturbed_path
from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import DomainError, NumericalError
from blowuplab.core.types import TimeSeries
from blowuplab.core.writers import read_csv_columns
from blowuplab.duhamel.blocks import block_half_integral, block_value, upsilon_taylor
from blowuplab.duhamel.kernel import duhamel_radial
from blowuplab.duhamel.sources import LeadingTermSource
from blowuplab.duhamel.types import UpsilonCombo
from blowuplab.profiles.bubble import bubble_w, kernel_Z0

UNIT = np.linspace(0.0, 1.0, 101)


def test_half_integral_of_constant():
    g = half_integral(TimeSeries.of(UNIT, np.ones_like(UNIT)), [0.25, 1.0])
    assert np.allclose(g.values, 2 * np.sqrt(g.times / np.pi), rtol=1e-13)


@pytest.mark.parametrize(
    "f,antiderivative",
    [
        (np.ones_like, lambda t: t),
        (lambda t: t, lambda t: t * t / 2),
        (lambda t: t * t, lambda t: t**3 / 3),
        (np.sin, lambda t: 1 - np.cos(t)),
    ],
)
def test_half_integral_composes_to_integral(f, antiderivative):
    times = np.linspace(0.0, 1.0, 1601)
    inner = half_integral(TimeSeries.sample(f, times))
    targets = [0.3, 0.7, 1.0]
    outer = half_integral(inner, targets)
    assert np.allclose(outer.values, antiderivative(np.array(targets)), rtol=0.0, atol=1e-6)


@pytest.mark.parametrize("order", ["linear", "cubic"])
def test_abel_forward_of_linear_function(order):
    f = TimeSeries.of(UNIT, UNIT, order)
    g = abel_forward(f, [0.37, 1.0])
    assert np.allclose(g.values, 4.0 / 3.0 * g.times**1.5, rtol=1e-12)


def test_abel_forward_in_sqrt_basis():
    f = TimeSeries.of(UNIT, np.sqrt(UNIT), "sqrt")
    g = abel_forward(f, [0.5, 1.0])
    assert np.allclose(g.values, np.pi / 2 * g.times, rtol=1e-12)


def test_abel_forward_holds_last_value():
    f = TimeSeries.of([0.0, 1.0], [1.0, 1.0])
    assert np.allclose(abel_forward(f, [1.0, 4.0]).values, [2.0, 4.0])


def test_abel_forward_rejects_negative_times():
    with pytest.raises(DomainError):
        abel_forward(TimeSeries.of(UNIT, UNIT), [-0.1])


def test_abel_solve_constant_alpha():
    h = TimeSeries.of(UNIT, 2 * np.sqrt(UNIT), "sqrt")
    solution = abel_solve(h)
    assert np.allclose(solution.alpha.values, 1.0, rtol=1e-12)
    assert solution.residual == pytest.approx(0.0, abs=1e-12)
    assert abel_residual(solution.alpha, h) == solution.residual


def test_abel_solve_smooth_alpha():
    times = np.linspace(0.0, 1.0, 401)
    exact = 2 * np.sqrt(times) + 4.0 / 3.0 * times**1.5
    solution = abel_solve(TimeSeries.of(times, exact, "sqrt"), tolerance=1e-2)
    late = times >= 0.1
    assert np.max(np.abs(solution.alpha.values[late] - (1 + times[late]))) < 2e-2
    assert solution.residual < 1e-2 * np.max(exact)


def test_abel_solve_rejects_large_residual():
    times = np.linspace(0.0, 1.0, 401)
    h = TimeSeries.of(times, 2 * np.sqrt(times) + 4.0 / 3.0 * times**1.5, "sqrt")
    with pytest.raises(NumericalError, match="residual"):
        abel_solve(h, tolerance=1e-14)


def test_abel_solve_needs_h_zero_at_origin():
    with pytest.raises(DomainError):
        abel_solve(TimeSeries.of(UNIT, np.ones_like(UNIT), "sqrt"))


def test_abel_derivative_blows_up_for_nonzero_start():
    h = TimeSeries.of(UNIT, np.ones_like(UNIT))
    d = abel_derivative(h, [0.0, 1.0])
    assert math.isinf(d.values[0])
    assert d.values[1] == pytest.approx(1.0)


def test_abel_residual_window():
    h = TimeSeries.of(UNIT, np.zeros_like(UNIT))
    with pytest.raises(DomainError):
        abel_residual(h, h, (2.0, 3.0))


def test_z0_mass_limit():
    assert z0_mass(1e4) == pytest.approx(Z0_MASS_LIMIT, rel=1e-6)
    assert z0_mass(1.0) < 0 < z0_mass(1.2)


def test_z0_mass_error_decays_like_inverse_square():
    R = np.array([5.0, 10.0, 20.0, 40.0])
    error = np.abs(z0_mass(R) - Z0_MASS_LIMIT)
    assert np.allclose(error[:-1] / error[1:], 4.0, rtol=0.1)


@pytest.mark.parametrize("R", [0.5, 2.0, 10.0])
def test_z0_mass_is_weighted_ball_integral(R):
    mass = ball_integral(lambda y: 5 * bubble_w(y) ** 4 * kernel_Z0(y), 2 * R)
    assert mass == pytest.approx(float(z0_mass(R)), rel=1e-9)


def test_ball_integral_volume():
    assert ball_integral(np.ones_like, 2.0) == pytest.approx(4.0 / 3.0 * np.pi * 8.0, rel=1e-12)


def test_taylor_of_polynomial():
    z = 1.0 - UNIT
    g = TimeSeries.of(UNIT, 1 + 2 * z + 3 * z * z)
    assert np.allclose(taylor_at_T(g, 2), [1.0, 2.0, 3.0], rtol=1e-8)


def test_taylor_rejects_bad_input():
    g = TimeSeries.of([0.0, 0.25, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        taylor_at_T(g, -1)
    with pytest.raises(NumericalError):
        taylor_at_T(g, 2)


@pytest.mark.parametrize("kappa,T", [(0.5, 1.0), (3.0, 0.1)])
def test_taylor_of_block_half_integral(kappa, T):
    # 2 sqrt(t) / (4 kappa t + 1) is the Upsilon combination with one rate 1 / (4 kappa)
    g = TimeSeries.sample(lambda t: block_half_integral(kappa, t), graded_times(T))
    d = taylor_at_T(g, 3, T, extra_degree=4, rtol=1e-8)
    exact = upsilon_taylor(UpsilonCombo.of([1 / (2 * kappa)], [1 / (4 * kappa)], 1), T, 3)
    scale = T ** np.arange(4)
    assert np.allclose(d * scale, exact * scale, rtol=0.0, atol=1e-6 * abs(exact[0]))


def test_vanishing_order_fit():
    times = np.union1d(UNIT, dyadic_times(1.0))
    assert fit_vanishing_order(TimeSeries.of(times, (1 - times) ** 3), 1.0) == pytest.approx(3.0, rel=1e-6)
    assert fit_vanishing_order(TimeSeries.of(times, np.zeros_like(times)), 1.0) == math.inf


def test_multipoint_rate():
    rate = multipoint_rate(1.0, 1.0)
    assert rate.v[-1] == pytest.approx(0.0, abs=1e-15)
    assert rate.v[0] == pytest.approx(-2 / np.pi)
    assert rate.fitted_power == pytest.approx(2.0, abs=0.01)
    with pytest.raises(DomainError):
        multipoint_rate(1.0, 0.0)
    with pytest.raises(DomainError):
        multipoint_rate(1.0, 1.0, [0.5, 2.0])


@pytest.mark.parametrize("c_star,T", [(1.0, 1.0), (3.0, 0.01)])
def test_multipoint_rate_matches_closed_form(c_star, T):
    rate = multipoint_rate(c_star, T)
    exact = -(2 * c_star / np.pi) * (np.sqrt(T) - np.sqrt(rate.times))
    assert np.allclose(rate.v, exact, rtol=1e-10, atol=1e-12 * np.sqrt(T))
    assert rate.amplitude == pytest.approx(2 * c_star / np.pi, rel=1e-10)
    assert rate.fit_residual < 1e-4


def test_multipoint_rate_away_from_origin():
    rate = multipoint_rate(1.0, 1.0, np.linspace(0.25, 0.75, 11))
    assert rate.times[-1] == 1.0
    assert rate.v[0] == pytest.approx(-1 / np.pi, rel=1e-10)


def test_graded_times():
    times = graded_times(2.0, 10)
    assert times[0] == 0.0 and times[-1] == 2.0
    assert np.all(np.diff(np.diff(times)) < 0)
    with pytest.raises(DomainError):
        graded_times(1.0, 1)


def _constant_h(T=1.0, n=600):
    times = graded_times(T, n)
    return TimeSeries.of(times, np.ones_like(times), "sqrt")


def test_reduced_solve_of_zero():
    times = graded_times(1.0, 200)
    solution = reduced_solve(TimeSeries.of(times, np.zeros_like(times)), 2, 1.0, tilde_kappas=[1.5, 2.5])
    assert np.all(solution.alpha.values == 0.0)
    assert np.allclose(solution.c, 0.0)
    assert solution.vanishing_order == math.inf
    assert np.all(solution.Lambda.values == 0.0)


def test_reduced_solve_cancels_terminal_value():
    solution = reduced_solve(_constant_h(), 1, 1.0, tilde_kappas=[1.5])
    # The half integral of h = 1 is 2 sqrt(t) = 2 - (T - t) + ...
    assert np.allclose(solution.taylor, [2.0, -1.0], rtol=1e-6)
    assert solution.c == pytest.approx([4.0], rel=1e-6)
    assert solution.alpha.values[-1] == pytest.approx(0.0, abs=1e-6)
    assert solution.vanishing_order == pytest.approx(1.0, abs=0.05)
    assert solution.Lambda.values[-1] == 0.0
    assert len(solution.blocks) == 1


def _oscillating_h(T):
    times = graded_times(T)
    return TimeSeries.of(times, np.sqrt(times) * (1 + np.sin(3 * times / T)), "sqrt")


@pytest.fixture(scope="module", params=[0.1, 0.01])
def oscillating(request):
    T = request.param
    return T, reduced_solve(_oscillating_h(T), 2, T)


def test_reduced_solve_generic_h(oscillating):
    T, solution = oscillating
    assert solution.residual <= 1e-4
    assert solution.vanishing_order > 1
    assert len(solution.alpha.times) >= len(graded_times(T))
    # |c_j| grows no faster than T^(1/2 - j) as T shrinks
    scaled = np.abs(solution.c) * T ** (np.arange(1, 3) - 0.5)
    assert np.all(scaled < 50)


def test_reduced_solve_raises_when_residual_bound_fails():
    with pytest.raises(NumericalError, match="bisections"):
        reduced_solve(_oscillating_h(0.1), 2, 0.1, tolerance=1e-14, max_refinements=0)


def test_reduced_solve_rejects_default_rates_for_k1():
    with pytest.raises(NumericalError):
        reduced_solve(_constant_h(), 1, 1.0)


def test_reduced_solve_checks_samples():
    h = _constant_h()
    with pytest.raises(DomainError):
        reduced_solve(TimeSeries.of(h.times + 0.1, h.values), 1, 1.1, tilde_kappas=[1.5])
    with pytest.raises(DomainError):
        reduced_solve(h, 1, 1.0, tilde_kappas=[1.5], params=BlowupParams(k=2, T=1.0))


def test_iterate_with_fixed_h(tmp_path):
    params = BlowupParams(k=1, A=1.0, T=1.0)
    h = _constant_h()
    report = iterate_reduced(lambda path, solution: h, params, h.times, tilde_kappas=[1.5])
    assert report.converged
    assert report.changes == [pytest.approx(0.0, abs=1e-15)]
    out = tmp_path / "alpha.csv"
    reduced_solution_csv(report.solution, out)
    columns = read_csv_columns(out)
    assert len(columns["alpha"]) == len(h.times)
    assert columns["t"][-1] == 1.0


@pytest.fixture(scope="module")
def unperturbed():
    params = BlowupParams()
    return params, unperturbed_path(params, np.linspace(0.0, params.T, 9)[:-1])


def test_orthogonality_terms(unperturbed):
    params, path = unperturbed
    t = params.T / 2
    terms = orthogonality_rhs(None, None, path, params, t, [1.0], [0.5])
    assert terms.exponential == 0.0 and terms.correction == 0.0
    assert terms.h == pytest.approx(-terms.rest)
    assert terms.blocks == pytest.approx(np.sqrt(np.pi) * block_value(0.5, t))
    assert terms.rhs == pytest.approx(terms.h - terms.blocks)
    assert terms.mass > 0
    with pytest.raises(DomainError):
        orthogonality_rhs(None, None, path, params, params.T)


def test_orthogonality_terms_with_constant_alpha(unperturbed):
    params, path = unperturbed
    path = path._replace(alpha=np.full_like(path.alpha, 0.3))
    t = params.T / 2
    terms = orthogonality_rhs(None, None, path, params, t, [1.0, -0.5], [0.5, 2.0])

    def screened(s):
        return 0.3 * np.exp(-(params.c0**2) * (params.T - s) / (4 * (t - s))) if s < t else 0.0

    exponential, _ = quad(screened, 0.0, t, weight="alg", wvar=(0.0, -0.5))
    assert terms.exponential == pytest.approx(exponential, rel=1e-8)
    correction = np.sqrt(np.pi) * duhamel_radial(LeadingTermSource(params, path, "sqrt"), 0.0, t)
    assert terms.correction == pytest.approx(correction, rel=1e-12)
    blocks = np.sqrt(np.pi) * (block_value(0.5, t) - 0.5 * block_value(2.0, t))
    assert terms.blocks == pytest.approx(blocks, rel=1e-12)
    assert terms.mass == pytest.approx(float(z0_mass(path_point(path, t).mu0 ** -params.beta)), rel=1e-12)
    assert terms.h == pytest.approx(terms.exponential - terms.correction - terms.rest, rel=1e-12)
    assert terms.rhs == pytest.approx(terms.h - terms.blocks, rel=1e-12)


def test_orthogonality_h_holds_last_value(unperturbed):
    params, path = unperturbed
    times = [0.0, params.T / 4, params.T / 2, params.T]
    h = orthogonality_h(path, params, times)
    assert h.order == "sqrt"
    assert h.values[-1] == h.values[-2]
    assert np.all(np.isfinite(h.values))
