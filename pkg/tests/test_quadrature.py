import math

import numpy as np
import pytest

from bergnorm.common import DomainError, EvaluationError, is_null
from bergnorm.zonal import params
from bergnorm.quadrature import (
    ball_volume, sphere_area, c_alpha, dv_alpha, dv_beta, TAU, LEBESGUE,
    radial_split, build_ball_rule, build_sphere_rule, build_zonal_rule,
    build_radial_rule, integrate, lp_norm, besov_seminorm, aggregate_partials,
    save_rule, load_rule, maybe_load_rule, rotate_rule, cached_rule,
)

def test_volumes():
    assert abs(ball_volume(2) - math.pi) < 1e-14
    assert abs(ball_volume(3) - 4 * math.pi / 3) < 1e-14
    assert abs(sphere_area(3) - 4 * math.pi) < 1e-14
    assert abs(c_alpha(3, 1) * ball_volume(3) - 1) < 1e-14

@pytest.mark.parametrize('n', [2, 3, 4])
@pytest.mark.parametrize('alpha', [0.5, 1.0, 2.0])
def test_dv_alpha_is_a_probability(n, alpha):
    rule = build_ball_rule(n, radial_split(24, 12), dv_alpha(alpha))
    assert abs(rule.mass - 1) < 1e-10

def test_lebesgue_moment():
    rule = build_ball_rule(2, radial_split(24, 12), LEBESGUE)
    assert abs(integrate(rule, lambda X: np.sum(X * X, axis=1)) - math.pi / 2) < 1e-12

def test_weighted_mass():
    # int (1 - |x|^2)^2 dv over the disc = pi / 3
    rule = build_ball_rule(2, radial_split(24, 12), dv_beta(2.0))
    assert abs(rule.mass - math.pi / 3) < 1e-12

def test_tau_needs_a_restricted_radius():
    with pytest.raises(DomainError):
        build_ball_rule(2, measure=TAU)
    rule = build_ball_rule(2, radial_split(40, 12), TAU, radius=0.5)
    assert abs(rule.mass - math.pi / 3) < 1e-10

def test_zonal_and_radial_rules_agree_with_ball_rule():
    split = radial_split(32, 16)
    f = lambda X: (1 + X[:, 0]) ** 2 * (1 - np.sum(X * X, axis=1))  # noqa
    ball = integrate(build_ball_rule(3, split, dv_alpha(1.5)), f)
    zonal = integrate(build_zonal_rule(3, split, dv_alpha(1.5)), f)
    assert abs(ball - zonal) < 1e-10
    g = lambda X: np.sum(X * X, axis=1) ** 2  # noqa
    assert abs(
        integrate(build_radial_rule(3, split), g)
        - integrate(build_ball_rule(3, split), g)
    ) < 1e-10

def test_rotation_keeps_polynomial_integrals():
    rule = build_ball_rule(4, radial_split(16, 8), LEBESGUE)
    rotated = rotate_rule(rule, seed=7)
    f = lambda X: X[:, 0] ** 2 + X[:, 1] * X[:, 2]  # noqa
    assert abs(integrate(rule, f) - integrate(rotated, f)) < 1e-12

def test_non_finite_integrand_names_the_node():
    rule = build_sphere_rule(2, radial_split(8, 8))
    with pytest.raises(EvaluationError) as info:
        integrate(rule, lambda X: 1.0 / (X[:, 0] - 1.0))
    assert info.value.node is not None

def test_lp_norm_of_constant():
    rule = build_ball_rule(2, radial_split(16, 8), dv_alpha(1))
    assert abs(lp_norm(rule, lambda X: 2 * np.ones(len(X)), 3) - 2) < 1e-12

def test_besov_seminorm_of_linear_function():
    pr = params(2, 1, 2)
    rule = build_ball_rule(2, radial_split(16, 8), dv_beta(pr.besov_exponent))

    def partials(k, X):
        return np.full(len(X), 1.0 if k == (1, 0) else 0.0)
    assert abs(besov_seminorm(pr, partials, rule) - math.sqrt(math.pi)) < 1e-12
    with pytest.raises(DomainError):
        besov_seminorm(pr, partials, build_ball_rule(2, measure=dv_alpha(1)))

def test_aggregations_differ_on_cancelling_partials():
    X = np.array([[0.1, 0.2]])

    def partials(k, X):
        return np.full(len(X), 1.0 if k == (1, 0) else -1.0)
    assert aggregate_partials(partials, X, 2, 1, 'l1').tolist() == [2.0]
    assert aggregate_partials(partials, X, 2, 1, 'signed').tolist() == [0.0]

def test_saved_rules_load_identically(tmp_path):
    rule = build_zonal_rule(2, radial_split(8, 8), dv_alpha(1))
    path = tmp_path / 'rule.json'
    save_rule(rule, path)
    loaded = load_rule(path)
    assert np.array_equal(loaded.nodes, rule.nodes)
    assert np.array_equal(loaded.weights, rule.weights)
    assert loaded.measure == rule.measure
    assert is_null(maybe_load_rule(tmp_path / 'missing.json'))

def test_cached_rule_goes_through_the_cache(tmp_path):
    split = radial_split(8, 8)
    built = cached_rule(tmp_path, 'zonal', 2, split, dv_alpha(1))
    assert len(list(tmp_path.glob('*.json'))) == 1
    again = cached_rule(tmp_path, 'zonal', 2, split, dv_alpha(1))
    assert np.array_equal(again.weights, built.weights)
    assert cached_rule(None, 'sphere', 3, split).measure.kind == 'sphere_sigma'

@pytest.mark.parametrize('n', [2, 3])
@pytest.mark.parametrize('alpha', [0.5, 1.0, 2.0])
def test_doubling_the_orders_leaves_smooth_integrals_unchanged(n, alpha):
    split = radial_split(24, 12)
    f = lambda X: np.exp(X[:, 0] + 0.5 * X[:, 1])  # noqa
    coarse = integrate(build_ball_rule(n, split, dv_alpha(alpha)), f)
    fine = integrate(build_ball_rule(n, split.refined(), dv_alpha(alpha)), f)
    assert abs(coarse - fine) < 1e-8 * abs(fine)
