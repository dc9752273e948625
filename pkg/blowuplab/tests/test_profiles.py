import math

import numpy as np
import pytest

from blowuplab.core.errors import DomainError
from blowuplab.core.types import FieldSnapshot, RadialGrid
from blowuplab.core.writers import read_csv_columns
from blowuplab.profiles.bubble import (
    BUBBLE_PEAK,
    bubble_derivatives,
    bubble_w,
    kernel_Z0,
    kernel_Z0_derivative,
    kernel_Z0_from_scaling,
)
from blowuplab.profiles.corrector import HANDOVER_TOLERANCE, corrector_J, corrector_laplacian, handover_residual
from blowuplab.profiles.eigen import negative_eigenpair
from blowuplab.profiles.hermite import (
    eigen_residual,
    hermite_even,
    hermite_even_derivatives,
    hermite_profile,
    outer_constant,
    outer_profile_m,
)
from blowuplab.profiles.output import profile_csv
from blowuplab.residual.operators import radial_laplacian


def _interior_sup(values):
    return float(np.max(np.abs(values[:-1])))


def test_bubble_tail():
    y = 1e3
    assert y * bubble_w(y) == pytest.approx(BUBBLE_PEAK, rel=1e-6)


def test_bubble_derivatives_match_differences():
    y = np.linspace(0.1, 5.0, 50)
    h = 1e-4
    _, dw, ddw = bubble_derivatives(y)
    assert np.allclose(dw, (bubble_w(y + h) - bubble_w(y - h)) / (2 * h), atol=1e-8)
    assert np.allclose(ddw, (bubble_w(y + h) - 2 * bubble_w(y) + bubble_w(y - h)) / h**2, atol=1e-5)


def test_scaling_generator_is_the_kernel():
    y = np.linspace(0.0, 50.0, 1001)
    assert np.allclose(kernel_Z0_from_scaling(y), kernel_Z0(y), rtol=0, atol=1e-14)


def test_kernel_derivative_matches_differences():
    y = np.linspace(0.1, 10.0, 100)
    h = 1e-6
    fd = (kernel_Z0(y + h) - kernel_Z0(y - h)) / (2 * h)
    assert np.allclose(kernel_Z0_derivative(y), fd, atol=1e-8)


@pytest.mark.parametrize("profile", ["bubble", "kernel"])
def test_profile_equations_converge_at_second_order(profile):
    errors = []
    for n in (800, 1600):
        grid = RadialGrid.uniform(50.0, n)
        y = grid.nodes
        if profile == "bubble":
            snap = FieldSnapshot(grid, bubble_w(y))
            residual = radial_laplacian(snap).values + snap.values**5
        else:
            snap = FieldSnapshot(grid, kernel_Z0(y))
            residual = radial_laplacian(snap).values + 5 * bubble_w(y) ** 4 * snap.values
        errors.append(_interior_sup(residual))
    assert errors[1] < 1e-2
    assert errors[0] / errors[1] > 3.5


def test_corrector_starts_flat():
    sample = corrector_J(0.0)
    assert sample.value[0] == 0.0
    assert sample.derivative[0] == 0.0


def test_corrector_linear_growth():
    y = 1e3
    sample = corrector_J(y)
    assert sample.value[0] / y == pytest.approx(BUBBLE_PEAK / 8, rel=1e-2)


def test_corrector_methods_agree():
    y = np.linspace(0.0, 50.0, 401)
    ode = corrector_J(y, method="ode")
    quad = corrector_J(y, method="quadrature")
    assert np.allclose(ode.value, quad.value, rtol=1e-6, atol=1e-6)
    assert np.allclose(ode.derivative, quad.derivative, rtol=1e-6, atol=1e-6)


def test_corrector_wronskian_at_handover():
    assert handover_residual() < HANDOVER_TOLERANCE / 10


def test_corrector_quadrature_continuous_across_zero_of_Z0():
    y = np.array([0.98, 0.99, 0.995, 1.0, 1.005, 1.01, 1.02])
    ode = corrector_J(y, method="ode")
    quad = corrector_J(y, method="quadrature")
    assert np.allclose(quad.value, ode.value, rtol=1e-5, atol=1e-8)
    assert np.allclose(quad.derivative, ode.derivative, rtol=1e-5, atol=1e-8)


def test_corrector_solves_its_equation(bubble_grid):
    y = bubble_grid.nodes
    j = corrector_J(y).value
    lap = radial_laplacian(FieldSnapshot(bubble_grid, j)).values
    assert _interior_sup(lap - corrector_laplacian(y, j)) < 1e-2


def test_corrector_rejects_bad_input():
    with pytest.raises(DomainError):
        corrector_J(-1.0)
    with pytest.raises(DomainError):
        corrector_J(1.0, method="spline")


@pytest.mark.parametrize("k", range(1, 13))
def test_hermite_value_at_origin(k):
    expected = (-1) ** k * math.factorial(2 * k) / math.factorial(k)
    assert hermite_even(k, 0.0) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_hermite_profile_matches_recurrence(k):
    profile = hermite_profile(k, 2.0)
    x = np.linspace(-2.0, 2.0, 21)
    assert profile.degree == 2 * k
    assert np.allclose(np.polynomial.polynomial.polyval(x, profile.coefficients), hermite_even(k, x), rtol=1e-12)


def test_hermite_derivatives():
    x = np.linspace(-1.0, 1.0, 11)
    h0, h1, h2 = hermite_even_derivatives(2, x)
    # H_4 = 16x^4 - 48x^2 + 12
    assert np.allclose(h0, 16 * x**4 - 48 * x**2 + 12)
    assert np.allclose(h1, 64 * x**3 - 96 * x)
    assert np.allclose(h2, 192 * x**2 - 96)


def test_hermite_order_range():
    with pytest.raises(DomainError):
        hermite_even(13, 0.0)
    with pytest.raises(DomainError):
        hermite_profile(0)


def test_outer_constant():
    assert outer_constant(1) == pytest.approx(-math.sqrt(3) / 2, rel=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_outer_profile_near_origin(k):
    z = 1e-6
    assert z * outer_profile_m(z, k, 4.0) == pytest.approx(2 * math.sqrt(3), rel=1e-9)


def test_outer_profile_pole():
    with pytest.raises(DomainError):
        outer_profile_m(0.0, 1)


def test_constant_solves_eigen_equation():
    grid = RadialGrid.geometric(0.5, 10.0, 64)
    report = eigen_residual(lambda z: np.ones_like(z), -0.25, grid)
    assert report.value == 0.0


def test_eigen_residual_second_order():
    values = []
    for h in (1e-2, 5e-3):
        grid = RadialGrid.geometric(0.5, 10.0, 64)
        values.append(eigen_residual(lambda z: outer_profile_m(z, 1), -0.75, grid, h=h).value)
    assert values[0] / values[1] == pytest.approx(4.0, rel=0.1)


def test_eigen_residual_fourth_order_k2():
    grid = RadialGrid.geometric(0.5, 10.0, 64)
    m = lambda z: outer_profile_m(z, 2)  # noqa: E731
    report = eigen_residual(m, 0.25 - 2, grid, h=1e-3, order=4)
    assert report.value < 1e-8 * np.max(np.abs(m(grid.nodes[1:])))


def test_eigen_residual_detects_wrong_gamma():
    grid = RadialGrid.geometric(0.5, 10.0, 64)
    report = eigen_residual(lambda z: outer_profile_m(z, 1), -1.75, grid, order=4, h=1e-3)
    assert report.value > 1.0


def test_eigen_residual_rejects_origin():
    with pytest.raises(DomainError):
        eigen_residual(lambda z: z, 0.0, RadialGrid.uniform(1.0, 32))


def test_negative_eigenpair(eigen_grid):
    pair = negative_eigenpair(eigen_grid)
    z = pair.z_minus.values
    assert pair.lambda_minus < 0
    assert pair.next_eigenvalue >= 0
    assert pair.gap > 0
    assert np.max(z) == pytest.approx(1.0)
    assert np.all(z[: len(z) // 2] > 0)
    assert np.all(z > -1e-10)
    assert z[-1] == 0.0


def test_negative_eigenvalue_refinement():
    coarse = negative_eigenpair(RadialGrid.uniform(40.0, 800)).lambda_minus
    fine = negative_eigenpair(RadialGrid.uniform(40.0, 1600)).lambda_minus
    assert fine == pytest.approx(coarse, rel=1e-2)


def test_negative_eigenfunction_decay():
    grid = RadialGrid.uniform(60.0, 1200)
    pair = negative_eigenpair(grid)
    y = grid.nodes
    window = (y >= 5) & (y <= 15)
    rate = math.sqrt(-pair.lambda_minus)
    flattened = np.log(pair.z_minus.values[window]) + rate * y[window] + np.log(y[window])
    slope = np.polyfit(y[window], flattened, 1)[0]
    assert abs(slope) < 0.1 * rate


def test_negative_eigenpair_needs_extent():
    with pytest.raises(DomainError):
        negative_eigenpair(RadialGrid.uniform(20.0, 400))


def test_profile_csv(tmp_path):
    y = np.array([0.0, 1.0, 2.0])
    path = tmp_path / "bubble.csv"
    profile_csv(corrector_J(y), path)
    columns = read_csv_columns(path)
    assert list(columns) == ["y", "value", "derivative"]
    assert columns["y"] == [0.0, 1.0, 2.0]
