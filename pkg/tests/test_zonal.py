import math

import numpy as np
import pytest

from bergnorm.common import DomainError
from bergnorm.zonal import (
    params, default_m, dim_harmonic, zonal, zonal_partial, extended_zonal,
    multi_indices, unit, EXPLICIT_DEGREE, DIRECT_COEFFICIENT_DEGREE,
)
from bergnorm.quadrature import build_sphere_rule, radial_split, integrate

def test_params_defaults_and_checks():
    pr = params(3, 0.5, 1.5)
    assert pr.m == default_m(3, 1.5) == 2
    assert pr.besov_exponent == 0
    assert params(2, 1, 2, k=(1, 1)).m == 2
    with pytest.raises(DomainError):
        params(2, 1, 2, m=1, k=(1, 1))
    with pytest.raises(DomainError):
        params(1, 1, 2)
    with pytest.raises(DomainError):
        params(2, 0, 2)
    with pytest.raises(DomainError):
        params(2, 1, 4, m=0).require_besov()

def test_dimension_formula():
    assert [dim_harmonic(3, j) for j in range(5)] == [1, 3, 5, 7, 9]
    assert all(dim_harmonic(2, j) == 2 for j in range(1, 10))
    assert dim_harmonic(4, 2) == 9

def test_multi_indices():
    ks = multi_indices(3, 2)
    assert len(ks) == 6
    assert all(sum(k) == 2 for k in ks)
    assert len(set(ks)) == 6

def test_low_degree_closed_forms():
    rng = np.random.default_rng(1)
    X = rng.uniform(-0.6, 0.6, (20, 2))
    e1 = unit(2)
    assert np.allclose(zonal(1, X, e1), 2 * X[:, 0], atol=1e-13)
    assert np.allclose(zonal(2, X, e1), 2 * (X[:, 0] ** 2 - X[:, 1] ** 2),
                       atol=1e-13)
    xi = np.array([0.0, 0.6, 0.8])
    Y = rng.uniform(-0.5, 0.5, (10, 3))
    assert np.allclose(zonal(1, Y, xi), 3 * Y @ xi, atol=1e-13)

@pytest.mark.parametrize('n', [2, 3, 5])
@pytest.mark.parametrize('j', [0, 3, EXPLICIT_DEGREE + 5, 40])
def test_zonal_on_the_diagonal_is_the_dimension(n, j):
    e = unit(n, 1)
    assert abs(zonal(j, e, e) / dim_harmonic(n, j) - 1) < 1e-9

def test_high_degree_coefficients_switch_smoothly():
    j = DIRECT_COEFFICIENT_DEGREE + 1
    x = np.array([0.3, 0.2, -0.1])
    xi = unit(3)
    value = zonal(j, x, xi)
    assert math.isfinite(value)
    assert abs(value) <= dim_harmonic(3, j) * np.linalg.norm(x) ** j * (1 + 1e-9)

def test_zonal_reproduces_on_the_sphere():
    rule = build_sphere_rule(3, radial_split(sphere_order=24))
    xi = np.array([0.6, 0.0, 0.8])
    zeta = np.array([0.0, 1.0, 0.0]) * 0.6 + np.array([0.8, 0.0, 0.0])
    for j, k in [(2, 2), (2, 3), (1, 4)]:
        value = integrate(
            rule, lambda Y: zonal(j, Y, xi) * zonal(k, Y, zeta),
        )
        expected = zonal(j, zeta, xi) if j == k else 0.0
        assert abs(value - expected) < 1e-10

def test_extended_zonal_is_homogeneous():
    x, y = np.array([0.4, -0.2]), np.array([0.1, 0.7])
    t = 0.5
    assert abs(
        extended_zonal(3, t * x, y) - t ** 3 * extended_zonal(3, x, y)
    ) < 1e-13

@pytest.mark.parametrize('k', [(1, 0), (0, 2), (2, 1), (1, 1, 1)])
def test_partials_against_finite_differences(k):
    n = len(k)
    x = np.full(n, 0.25)
    xi = unit(n, n - 1)
    j, h = 4, 1e-3

    def f(points):
        return zonal(j, points, xi)

    points, weights = [x], [1.0]
    for axis, order in enumerate(k):
        for _ in range(order):
            step = unit(n, axis) * h
            points = [q + s for q in points for s in (step, -step)]
            weights = [w * sign / (2 * h) for w in weights for sign in (1, -1)]
    fd = float(np.dot(weights, f(np.array(points))))
    assert abs(zonal_partial(j, k, x, xi) - fd) < 1e-5

@pytest.mark.parametrize('n,j', [(2, 5), (3, 4), (4, 3)])
def test_zonal_is_harmonic(n, j):
    x = np.linspace(0.1, 0.3, n)
    xi = unit(n)
    laplacian = sum(
        zonal_partial(j, tuple(2 * unit(n, i).astype(int)), x, xi)
        for i in range(n)
    )
    assert abs(laplacian) < 1e-9

def test_partial_order_above_degree_vanishes():
    assert zonal_partial(2, (2, 1), [0.1, 0.2], [1.0, 0.0]) == 0.0

@pytest.mark.parametrize('n', [2, 3, 5])
def test_zonal_is_symmetric_and_bounded_off_the_diagonal(n):
    rng = np.random.default_rng(23)
    xi = rng.standard_normal((6, n))
    eta = rng.standard_normal((6, n))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    eta /= np.linalg.norm(eta, axis=1, keepdims=True)
    for j in (0, 1, 3, EXPLICIT_DEGREE + 5, 40):
        for a, b in zip(xi, eta):
            ab, ba = zonal(j, a, b), zonal(j, b, a)
            assert abs(ab - ba) < 1e-12 * max(1, abs(ab))
            assert abs(ab) <= dim_harmonic(n, j) * (1 + 1e-9)
