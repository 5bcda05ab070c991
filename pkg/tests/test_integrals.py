import pytest

from bergnorm.common import DomainError
from bergnorm.specfun import f21
from bergnorm.integrals import (
    i_args, i_closed_form, i_quadrature, i_prefactor, lemma1_constants,
    gauss_consistency, sphere_identity_check, i_sweep, admissible,
    asymptotics_probe, DEFAULT_I_GRID,
)

def test_args_checks():
    with pytest.raises(DomainError):
        i_args(2, 1.0, 0.5, 0.3)
    with pytest.raises(DomainError):
        i_args(2, 1.0, -1.0, 1.5)
    with pytest.raises(DomainError):
        i_args(2, 0.5, -1.5, 0.0)

@pytest.mark.parametrize('n', [2, 3])
def test_sweep_matches_closed_form(n):
    rows = i_sweep(n)
    assert len(rows) == sum(admissible(a, s) for a, s, _ in DEFAULT_I_GRID)
    assert max(r['rel_err'] for r in rows) < 1e-5

def test_sweep_rows_do_not_depend_on_workers():
    grid = [(1.0, -0.5, 0.3), (2.0, -1.5, 0.7)]
    assert i_sweep(2, grid) == i_sweep(2, grid, workers=2)

@pytest.mark.parametrize('alpha,s', [(0.5, -0.5), (1.0, -1.5), (2.0, -0.5)])
def test_extremes(alpha, s):
    n = 3
    high, low = lemma1_constants(n, alpha, s)
    assert abs(i_closed_form(i_args(n, alpha, s, 0.0)) / low - 1) < 1e-12
    assert low == i_prefactor(n, alpha)
    assert abs(i_closed_form(i_args(n, alpha, s, 1.0)) / high - 1) < 1e-10
    values = [
        i_closed_form(i_args(n, alpha, s, x)) for x in (0.0, 0.5, 0.9, 0.99)
    ]
    assert values == sorted(values)
    assert low <= values[-1] <= high

def test_quadrature_at_origin():
    args = i_args(2, 2.0, -0.5, 0.0)
    high, low = lemma1_constants(2, 2.0, -0.5)
    assert abs(i_quadrature(args) / low - 1) < 1e-5

@pytest.mark.parametrize('n', [2, 3, 4])
def test_gauss_consistency(n):
    assert gauss_consistency(n, 1.5, -0.75) < 1e-10

@pytest.mark.parametrize('n,c', [(2, 0.5), (2, 2.5), (3, 1.0), (3, 3.5)])
def test_sphere_identity(n, c):
    for r in (0.0, 0.4, 0.8):
        closed = f21(c / 2, (c - n) / 2 + 1, n / 2, r * r)
        assert sphere_identity_check(n, c, r) / closed < 1e-6

def test_asymptotics_of_an_admissible_integral_are_bounded():
    report = asymptotics_probe(2, 1.0, -0.5)
    assert report.classification == 'bounded'
    assert len(report.samples) == 8

@pytest.mark.parametrize('s,classification', [
    (0.0, 'logarithmic'), (0.5, 'power'),
])
def test_asymptotics_of_growing_integrals(s, classification):
    report = asymptotics_probe(2, 1.0, s)
    assert report.classification == classification
    if classification == 'power':
        assert 0.25 < report.exponent < 0.75
    values = [v for _, v in report.samples]
    assert values == sorted(values)
