import math
import itertools

import pytest

from bergnorm.common import DomainError
from bergnorm.zonal import params
from bergnorm.bounds import (
    displayed_D, tilde_D, proof_D, jensen_gap, schur_upper_constant,
    lower_constant_T, lower_constant_P, multiplier, derivative_aggregates,
    fm_normalizer_exact, beta_displayed, beta_exact, displayed_A, audit,
    sandwich_findings, stirling_limit_probe, normalization_constants,
    proof_value_factors,
)

# n = 2, alpha = 1, p = 2 gives m = 1 and Schur exponent c = 2
DISC = params(2, 1, 2)

def test_schur_constants_for_the_disc():
    g = math.gamma
    assert abs(displayed_D(DISC) / (math.sqrt(2) / g(3.5) ** 2) - 1) < 1e-12
    assert abs(tilde_D(DISC) / (math.sqrt(2) / (g(4.5) * g(2.5))) - 1) < 1e-12
    assert abs(proof_D(DISC) / (math.sqrt(96) / (g(4.5) * g(2.5))) - 1) < 1e-12

def test_schur_report_certifies_the_assembled_value():
    D, Dt = schur_upper_constant(DISC)
    assert D.certified == D.proof_assembled == proof_D(DISC)
    assert Dt.displayed <= D.displayed
    assert D.rel_discrepancy > 0.5

@pytest.mark.parametrize(
    'n,alpha,p', list(itertools.product((2, 3), (0.5, 1.0, 2.0), (1.5, 2.0, 4.0))),
)
def test_jensen_gap_is_non_negative(n, alpha, p):
    assert jensen_gap(params(n, alpha, p)) >= -1e-12

def test_lower_constant_T_variants():
    A = lower_constant_T(DISC)
    assert abs(A.displayed - 1.25 * math.pi) < 1e-12
    assert abs(A.proof_assembled - math.pi * math.sqrt(5) / 4) < 1e-12
    assert abs(A.certified - math.sqrt(5) / 4) < 1e-12
    assert A.displayed == displayed_A(DISC)

def test_beta_conventions_differ_by_n():
    ratio = beta_displayed(DISC) / beta_exact(DISC)
    assert abs(ratio - math.sqrt(2)) < 1e-12

def test_multiplier():
    assert abs(multiplier(2, 1, 1, 1) - 1 / 3) < 1e-14
    assert abs(multiplier(3, 2.5, 0.0, 6) - 1) < 1e-12
    with pytest.raises(DomainError):
        multiplier(2, 1, -1, 0)

def test_fm_normalizer():
    assert abs(fm_normalizer_exact(DISC) ** 2 - math.pi) < 1e-10
    norms = normalization_constants(DISC)
    assert abs(norms['c_alpha'] - 1 / math.pi) < 1e-14
    assert norms['multiplier_exact'] > 0

def test_derivative_aggregates_of_a_cancelling_zonal():
    # Z_2(x, e_1) = 2 (x_1^2 - x_2^2) in the plane
    aggregates = derivative_aggregates(params(2, 1, 2, m=2))
    assert dict(aggregates) == {'l1': 8.0, 'signed': 0.0, 'displayed': 4.0}

def test_lower_constant_P():
    B, M = lower_constant_P(DISC)
    assert B.displayed > 0 and B.certified > 0
    assert M.proof_assembled == M.displayed
    with pytest.raises(DomainError):
        lower_constant_P(params(2, 1, 4, m=0))

def test_audit_sandwich_findings():
    rows = sandwich_findings(audit(DISC))
    consistent = {r['variant']: r['consistent'] for r in rows}
    assert consistent == {
        'displayed': False, 'proof_assembled': False, 'certified': True,
    }

def test_constants_reject_inadmissible_parameters():
    with pytest.raises(DomainError):
        displayed_D(params(2, 1, 2, m=0))
    with pytest.raises(DomainError):
        displayed_A(params(2, 1, 4, m=0))

def test_stirling_probe():
    report = stirling_limit_probe(3, 0.5, 2, ps=(2, 4, 8, 16, 32, 64))
    assert report.grows and report.increasing_tail
    assert report.predicted_slope == 5.5
    with pytest.raises(DomainError):
        stirling_limit_probe(2, 1.0, 1, ps=(4, 2))

def test_proof_value_factors_are_named():
    # |S| = 2 pi from the sphere normalization, n^(-1/p) = 1/sqrt(2)
    factors = proof_value_factors(DISC)
    assert abs(factors['sigma'] - 2 * math.pi) < 1e-12
    assert abs(factors['radial_n'] - 1 / math.sqrt(2)) < 1e-12
    assert factors['aggregates'] == 1.0
    assert abs(factors['total'] - math.pi * math.sqrt(2)) < 1e-12
    B, _ = lower_constant_P(DISC)
    assert 'sigma normalization' in B.note and 'radial factor n' in B.note
