import math

import numpy as np
import pytest

from bergnorm.common import DomainError
from bergnorm.zonal import params, zonal, unit
from bergnorm.quadrature import radial_split
from bergnorm.bounds import lower_constant_T, multiplier
from bergnorm.operators import (
    zonal_function, psi_k, f_m, h_j, random_candidates, tau_norm, apply_T,
    apply_P, p_image, harmonic_partials, projection_multiplier, t_norm,
    dirichlet_inner_product, schur_check, bracket_T_norm, bracket_P_norm,
    comparability_probe, finite_difference_partial, besov_norm_of_image,
    apply_P_partial, boundedness_probe,
)

DISC = params(2, 1, 2)
SMALL = radial_split(16, 8)

def test_witnesses_have_unit_norm():
    assert abs(tau_norm(psi_k(DISC), 2) - 1) < 1e-8
    assert abs(tau_norm(f_m(DISC), 2) - 1) < 1e-8
    assert tau_norm(f_m(DISC, 'displayed'), 2) <= 1 + 1e-8

def test_cut_off_functions_vanish_outside_support():
    h = h_j(DISC, 4)
    values = h(np.array([[0.4, 0.0], [0.6, 0.0]]))
    assert values[0] > 0 and values[1] == 0
    with pytest.raises(DomainError):
        h_j(DISC, 1)

def test_random_candidates_are_seeded():
    one = random_candidates(DISC, 4, seed=5)
    two = random_candidates(DISC, 4, seed=5)
    assert [f.descriptor() for f in one] == [f.descriptor() for f in two]
    assert all(c.a > 0.5 for f in one for c in f.components)

def test_apply_T_agrees_with_generic_quadrature():
    f = zonal_function(2, 1, a=2.0)
    x = np.array([0.2, 0.3])
    exact = apply_T(DISC, f, x)
    generic = apply_T(DISC, lambda Y: f(Y), x)
    assert abs(exact - generic) < 1e-6 * max(1, abs(exact))

def test_t_norm_of_psi_k_reaches_the_certified_constant():
    certified = lower_constant_T(DISC).certified
    assert t_norm(DISC, psi_k(DISC)) >= certified * (1 - 1e-6)

def test_projection_reproduces_harmonic_polynomials():
    g = zonal_function(2, 3)
    x = np.array([0.1, -0.4])
    assert abs(apply_P(DISC, g, x) - zonal(3, x, unit(2))) < 1e-12
    generic = apply_P(DISC, lambda Y: g(Y), x)
    assert abs(generic - zonal(3, x, unit(2))) < 1e-5

def test_projection_multiplier():
    assert projection_multiplier(DISC, 1.0, 1) == multiplier(2, 1, 1.0, 1)
    inner = projection_multiplier(DISC, 1.0, 1, 0.5)
    assert 0 < inner < projection_multiplier(DISC, 1.0, 1, 0.9)

def test_p_image_is_harmonic():
    f = zonal_function(2, 2, a=1.0, coef=3.0)
    g = p_image(DISC, f)
    assert g.kind == 'harmonic'
    assert all(c.a == 0 for c in g.components)
    assert abs(g.components[0].coef - 3 * multiplier(2, 1, 1.0, 2)) < 1e-14
    with pytest.raises(DomainError):
        harmonic_partials(f)

def test_harmonic_partials_match_finite_differences():
    g = p_image(DISC, zonal_function(2, 3, a=0.5))
    partials = harmonic_partials(g)
    x = np.array([0.3, 0.1])
    fd = finite_difference_partial(g, (1, 1), x)
    assert abs(float(partials((1, 1), x[None])[0]) - fd) < 1e-5

def test_constant_has_zero_seminorm():
    assert besov_norm_of_image(DISC, zonal_function(2, 0, a=1.0)) == 0.0

def test_dirichlet_orthogonality():
    pr = params(2, 1, 2)
    f = harmonic_partials(zonal_function(2, 2))
    g = harmonic_partials(zonal_function(2, 3))
    assert abs(dirichlet_inner_product(f, g, pr)) < 1e-10
    assert dirichlet_inner_product(f, f, pr) > 0

def test_schur_check_outside_the_support_is_infinite():
    rows = schur_check(DISC, 4, (0.1, 0.7), split=SMALL)
    inside, outside = rows
    assert math.isfinite(inside['first_ratio']) and inside['first_ratio'] > 0
    assert outside['first_ratio'] == math.inf
    assert outside['second_ratio'] == math.inf

def test_bracket_T_is_deterministic():
    kw = dict(trials=2, seed=9, norm_split=SMALL, t_split=radial_split(24, 16))
    one = bracket_T_norm(DISC, **kw)
    two = bracket_T_norm(DISC, **kw)
    assert one.report() == two.report()
    assert one.lower_margined <= one.lower_empirical
    assert one.lower_empirical >= one.extras['psi_k_quotient']
    assert len(one.witnesses) == 3

def test_bracket_P_reports_its_witnesses():
    bracket = bracket_P_norm(
        DISC, trials=1, seed=9, norm_split=SMALL, growth_samples=32,
    )
    check = bracket.extras['f_m_check']
    assert abs(check['measured_exact'] / check['certified'] - 1) < 1e-3
    assert abs(check['ratio'] / check['explained_ratio'] - 1) < 1e-3
    assert abs(check['explained_ratio'] - math.pi * math.sqrt(2)) < 1e-12
    assert bracket.operator == 'P'
    assert bracket.lower_empirical > 0
    assert bracket.conjecture_ratio > 0
    assert set(bracket.upper_paper) == {
        'displayed', 'proof_assembled', 'certified',
    }
    assert bracket.extras['growth_constant'] > 0

def test_comparability_probe_rows():
    rows = comparability_probe(DISC, 2, trials=2, split=SMALL)
    assert len(rows) == 2
    assert all(r['seminorm_m'] > 0 and r['seminorm_m2'] > 0 for r in rows)
    with pytest.raises(DomainError):
        comparability_probe(DISC, 1)

def test_projection_partials_under_the_integral():
    # d/dx_1 of Z_2(x, e_1) = 2 (x_1^2 - x_2^2) is 4 x_1
    g = zonal_function(2, 2)
    x = np.array([0.2, 0.1])
    assert abs(apply_P_partial(DISC, g, (1, 0), x) - 0.8) < 1e-5

def test_boundedness_probe_rows():
    report = boundedness_probe(
        DISC, levels=(1.0, 0.5), per_level=2, split=SMALL, cap=1e6,
    )
    assert [r['margin'] for r in report['levels']] == [1.0, 0.5]
    assert all(r['max_quotient'] > 0 for r in report['levels'])
    assert report['bounded']
