import math

import numpy as np
import pytest

from bergnorm.common import DomainError, TruncationError
from bergnorm.zonal import unit
from bergnorm.kernels import (
    bracket, a_coefficient, series_coefficient, kernel_series, partial_sum,
    bergman_kernel, kernel_partial, truncation_degree, max_product,
    estimate_growth_constant, growth_sampler, growth_values, boundary_probe,
    sized_series, cauchy_gap, degree_cap_for, MAX_REACH,
)

@pytest.fixture(scope='module')
def disc_series():
    return kernel_series(2, 1.0)

def test_bracket_on_the_sphere_is_the_distance():
    x = np.array([0.3, -0.4])
    xi = np.array([0.6, 0.8])
    assert abs(bracket(x, xi) - np.linalg.norm(x - xi)) < 1e-14
    assert abs(bracket(x, xi) - bracket(xi, x)) < 1e-14

def test_coefficients():
    assert series_coefficient(2, 1.0, 0) == 1.0
    assert abs(series_coefficient(2, 1.0, 5) - 6.0) < 1e-12
    assert abs(a_coefficient(3, 2.0, 4000) / 4000 ** 2 - 1) < 2e-3

def test_disc_kernel_closed_form(disc_series):
    # n = 2, alpha = 1 along e_1: R = 2/(1 - rho)^2 - 1
    s, t = 0.5, 0.5
    rho = s * t
    value = bergman_kernel(disc_series, s * unit(2), t * unit(2))
    assert abs(value - (2 / (1 - rho) ** 2 - 1)) < 1e-7

def test_kernel_at_origin_and_symmetry(disc_series):
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.6, 0.6, (10, 2))
    y = rng.uniform(-0.6, 0.6, (10, 2))
    assert np.allclose(bergman_kernel(disc_series, np.zeros((10, 2)), y), 1.0)
    assert np.allclose(
        bergman_kernel(disc_series, x, y), bergman_kernel(disc_series, y, x),
        atol=1e-12,
    )

def test_partial_sum_range(disc_series):
    with pytest.raises(DomainError):
        partial_sum(disc_series, [0.1, 0.0], [0.2, 0.0], disc_series.degree_cap + 3)
    assert partial_sum(disc_series, [0.1, 0.0], [0.2, 0.0], 0) == 1.0

def test_kernel_partial_against_finite_differences(disc_series):
    x, y, h = np.array([0.2, 0.1]), np.array([-0.3, 0.5]), 1e-4
    e1 = unit(2)
    fd = (
        partial_sum(disc_series, x + h * e1, y, 60)
        - partial_sum(disc_series, x - h * e1, y, 60)
    ) / (2 * h)
    assert abs(kernel_partial(disc_series, (1, 0), x, y) - fd) < 1e-6

def test_truncation_limits():
    series = kernel_series(2, 1.0, degree_cap=10)
    with pytest.raises(TruncationError) as info:
        truncation_degree(series, 0.95)
    assert info.value.tail_bound > series.rel_tol
    assert 0 < max_product(series) < 0.95
    with pytest.raises(DomainError):
        truncation_degree(series, 1.0)

def test_growth_constant_does_not_depend_on_workers(disc_series):
    one = estimate_growth_constant(
        disc_series, 1, growth_sampler(samples=64, seed=11, chunk=16),
    )
    many = estimate_growth_constant(
        disc_series, 1, growth_sampler(samples=64, seed=11, chunk=16, workers=3),
    )
    assert one.empirical_value == many.empirical_value > 0
    assert list(one.history) == sorted(one.history)

def test_large_values_are_accepted_relative_to_the_sum(disc_series):
    # beyond the absolute reach of degree_cap = 200 on the diagonal
    rho = 0.885
    x = math.sqrt(rho) * unit(2)
    with pytest.raises(TruncationError):
        truncation_degree(disc_series, rho)
    value = bergman_kernel(disc_series, x, x)
    assert abs(value / (2 / (1 - rho) ** 2 - 1) - 1) < 1e-8
    with pytest.raises(TruncationError) as info:
        bergman_kernel(disc_series, x, -x)
    assert info.value.tail_bound > disc_series.rel_tol

def test_sized_series_reaches_the_boundary(disc_series):
    sized = sized_series(disc_series, 0.9)
    assert sized.degree_cap > disc_series.degree_cap
    assert sized.reach == 0.9
    assert 0 < sized.tail_bound <= sized.rel_tol
    x = math.sqrt(0.9) * unit(2)
    assert abs(bergman_kernel(sized, x, x) / 199 - 1) < 1e-9
    assert abs(bergman_kernel(sized, x, -x) - (2 / 1.9 ** 2 - 1)) < 1e-8
    assert sized_series(disc_series, 0.5).degree_cap == disc_series.degree_cap
    with pytest.raises(DomainError):
        degree_cap_for(2, 1.0, MAX_REACH + 0.005)

@pytest.mark.parametrize('n,alpha', [(2, 1.0), (3, 0.5)])
def test_partial_sums_are_cauchy_inside_the_reach(n, alpha):
    rng = np.random.default_rng(17)
    x = rng.standard_normal((12, n))
    y = rng.standard_normal((12, n))
    edge = math.sqrt(0.9)
    x *= edge / np.linalg.norm(x, axis=1, keepdims=True)
    y *= edge / np.linalg.norm(y, axis=1, keepdims=True)
    series = kernel_series(n, alpha)
    assert cauchy_gap(series, x, y) < series.rel_tol

def test_growth_at_order_zero_from_the_origin(disc_series):
    # R(0, y) = 1 and [0, y] = 1
    y = np.array([[0.3, 0.4], [-0.7, 0.1], [0.0, 0.95]])
    values = growth_values(disc_series, 0, np.zeros_like(y), y)
    expected = bracket(np.zeros_like(y), y) ** (2 - 1 + 1.0)
    assert np.allclose(values, expected, atol=1e-12)
    assert np.allclose(values, 1.0, atol=1e-12)
    growth = estimate_growth_constant(
        disc_series, 0, growth_sampler(samples=64, seed=5, chunk=32),
    )
    assert 1 < growth.empirical_value <= 6

def test_boundary_growth_is_evaluated_up_to_the_reach():
    # n = 2, alpha = 1: |grad R(r e_1, r e_1)| [x, x]^3 = 4 r
    series = kernel_series(2, 1.0, degree_cap=20)
    rows = boundary_probe(series, 1, (0.3, 0.9, 0.99))
    assert [r for r, _ in rows] == [0.3, 0.9, 0.99]
    for r, value in rows:
        assert abs(value / (4 * r) - 1) < 1e-6
    with pytest.raises(DomainError):
        boundary_probe(series, 1, (0.999,))
