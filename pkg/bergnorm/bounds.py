'''Named norm constants for T_k^alpha and P_alpha, and their audit

Each constant is computed three ways:

- displayed: the closed form as it is stated,
- proof_assembled: re-assembled from the steps that lead to it,
- certified: re-derived with the normalizations this package uses
  (normalized sigma, c_alpha inside dv_alpha, exact L^p(dtau) norms of
  the test functions).

Discrepancies are measured and logged, never resolved by choosing a
side.

'''
import math
import logging
from typing import Sequence

import numpy as np
from pyrsistent import PClass, field, pmap, pvector

from .common import DomainError, require
from .specfun import gamma_ratio, log_gamma, binomial
from .zonal import Params, dim_harmonic, zonal, zonal_partials, unit
from .quadrature import ball_volume, sphere_area, c_alpha, integrate
from .integrals import lemma1_constants, i_prefactor, sphere_rule

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

AUDIT_TOL = 1e-9
VARIANTS = ('displayed', 'proof_assembled', 'certified')

class ConstantReport(PClass):
    name = field(type=str, mandatory=True)
    displayed = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v > 0, 'displayed value must be > 0'),
    )
    proof_assembled = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v > 0, 'proof-assembled value must be > 0'),
    )
    certified = field(type=float, factory=float, initial=math.nan)
    inputs = field(type=Params, mandatory=True)
    note = field(type=str, initial='')

    @property
    def rel_discrepancy(self):
        return abs(self.displayed / self.proof_assembled - 1.0)

    def value(self, variant):
        return getattr(self, variant)

    def row(self):
        return dict(
            self.inputs.row(), name=self.name, displayed=self.displayed,
            proof_assembled=self.proof_assembled, certified=self.certified,
            rel_discrepancy=self.rel_discrepancy, note=self.note,
        )

def _report(name, displayed, proof_assembled, inputs, certified=math.nan,
            note=''):
    report = ConstantReport(
        name=name, displayed=displayed, proof_assembled=proof_assembled,
        certified=certified, inputs=inputs, note=note,
    )
    if report.rel_discrepancy > AUDIT_TOL:
        log.warning(
            f'{name} at {inputs.row()}: displayed {displayed:.6g} vs'
            f' proof-assembled {proof_assembled:.6g}'
            f' (rel. discrepancy {report.rel_discrepancy:.3g})'
        )
    return report

def _positive_gamma_args(name, **arguments):
    for label, value in arguments.items():
        require(
            value > 0,
            f'{name}: Gamma argument {label} = {value:g} is not positive',
        )

def _besov_radial(params: Params, factor_n=False):
    '''int_B (1 - |x|^2)^(pm - n) dv, optionally with the extra factor n'''
    n, e = params.n, params.besov_exponent
    require(
        e > -1, f'pm - n = {e:g} must exceed -1 for a finite radial integral',
    )
    value = math.pi ** (n / 2) * gamma_ratio([e + 1], [e + n / 2 + 1])
    return n * value if factor_n else value

# ----------------------------------------------------------------------
#
# Schur-test upper constant
#
# ----------------------------------------------------------------------

def schur_exponent(params: Params) -> float:
    '''c = (n + m + alpha - 1)/q + m/p'''
    n, a, m = params.n, params.alpha, params.m
    return (n + m + a - 1) / params.q + m / params.p

def _schur_pieces(params: Params):
    n, a, m, p, q = params.n, params.alpha, params.m, params.p, params.q
    require(m >= 1, f'the Schur constant needs m >= 1, got m = {m}')
    big = (p / q) * (n + m + a - 1)
    small = (q / p) * m
    u = (m + a + 1) / 2
    v = (m + n + a - 1) / 2
    mean = (n + a - 1) / q + m
    _positive_gamma_args(
        'D', big=big, small=small, mean_u=mean + u, mean_v=mean + v,
    )
    return big, small, u, v, mean

def displayed_D(params: Params) -> float:
    '''Gamma(n/2 + a) G(P)^(1/p) G(Q)^(1/q)
    / (G(mean + u) G(mean + v))

    >>> from bergnorm.zonal import params
    >>> abs(displayed_D(params(2, 1, 2)) * math.gamma(3.5) ** 2 - math.sqrt(2)) < 1e-12
    True
    '''
    n, a, p, q = params.n, params.alpha, params.p, params.q
    big, small, u, v, mean = _schur_pieces(params)
    return math.exp(
        log_gamma(n / 2 + a) + log_gamma(big) / p + log_gamma(small) / q
        - log_gamma(mean + u) - log_gamma(mean + v)
    )

def tilde_D(params: Params) -> float:
    '''The constant before the Jensen step: the four-block Gamma form'''
    n, a, p, q = params.n, params.alpha, params.p, params.q
    big, small, u, v, _ = _schur_pieces(params)
    return math.exp(
        log_gamma(n / 2 + a)
        + (log_gamma(big) - log_gamma(big + u) - log_gamma(big + v)) / p
        + (log_gamma(small) - log_gamma(small + u) - log_gamma(small + v)) / q
    )

def jensen_gap(params: Params) -> float:
    '''log D - log D~ (log-convexity of Gamma makes it >= 0)

    >>> from bergnorm.zonal import params
    >>> jensen_gap(params(2, 1, 2)) >= 0
    True
    '''
    return math.log(displayed_D(params)) - math.log(tilde_D(params))

def _lemma1_max(name, alpha, s, n):
    try:
        high, _ = lemma1_constants(n, alpha, s)
    except DomainError as error:
        raise DomainError(
            f'{name}: C({alpha:g}, {s:g}) is not admissible: {error}'
        ) from error
    return high

def proof_D(params: Params) -> float:
    '''c_alpha C(pc + a, -pc + m)^(1/p) C(qc - n + 1, -qc + n + m + a - 1)^(1/q)'''
    n, a, m, p, q = params.n, params.alpha, params.m, params.p, params.q
    _schur_pieces(params)
    c = schur_exponent(params)
    first = _lemma1_max('first Schur inequality', p * c + a, -p * c + m, n)
    second = _lemma1_max(
        'second Schur inequality', q * c - n + 1, -q * c + n + m + a - 1, n,
    )
    return c_alpha(n, a) * first ** (1 / p) * second ** (1 / q)

def schur_upper_constant(params: Params):
    '''(D, D~) ConstantReports for the Schur-test upper bound

    The certified value of D is the assembled Schur bound: it carries
    c_alpha, as T does here through dv_alpha.

    >>> from bergnorm.zonal import params
    >>> D, Dt = schur_upper_constant(params(2, 1, 2))
    >>> round(D.displayed, 4), Dt.displayed <= D.displayed
    (0.128, True)
    '''
    gap = jensen_gap(params)
    if gap < 0:
        log.warning(f'Jensen step reversed at {params.row()}: gap {gap:.3g}')
    proof = proof_D(params)
    D = _report(
        'D', displayed_D(params), proof, params, certified=proof,
        note=f'jensen_gap={gap:.6g}',
    )
    Dt = _report(
        'D_tilde', tilde_D(params), proof, params, certified=proof,
        note='before the Jensen step',
    )
    return D, Dt

# ----------------------------------------------------------------------
#
# Test-function normalizers and the projection multiplier
#
# ----------------------------------------------------------------------

def beta_displayed(params: Params) -> float:
    '''(n pi^(n/2) Gamma(p(m + a) + 1) / Gamma(p(m + a) + n/2 + 1))^(1/p)'''
    n, e = params.n, params.p * (params.m + params.alpha)
    return (
        n * math.pi ** (n / 2) * gamma_ratio([e + 1], [e + n / 2 + 1])
    ) ** (1 / params.p)

def beta_exact(params: Params) -> float:
    '''||(1 - |x|^2)^(m + a + n/p)||_{L^p(dtau)}'''
    n, e = params.n, params.p * (params.m + params.alpha)
    return (
        math.pi ** (n / 2) * gamma_ratio([e + 1], [e + n / 2 + 1])
    ) ** (1 / params.p)

def multiplier(n: int, alpha: float, a: float, l: int) -> float:
    '''P_alpha[(1 - |y|^2)^a Z_l(y, w)] = multiplier * Z_l(x, w)

    >>> round(multiplier(3, 1.5, 0.0, 4), 12)
    1.0
    >>> round(multiplier(2, 1, 1, 1), 12)
    0.333333333333
    '''
    require(a + alpha > 0, f'multiplier needs a + alpha > 0, got {a + alpha}')
    return gamma_ratio(
        [l + n / 2 + alpha, a + alpha], [alpha, a + alpha + l + n / 2],
    )

def fm_normalizer_displayed(params: Params) -> float:
    '''(n |S| / (n + m - 1))^(1/p) dim H_m'''
    n, m = params.n, params.m
    return (
        (n * sphere_area(n) / (n + m - 1)) ** (1 / params.p)
        * dim_harmonic(n, m)
    )

def fm_normalizer_exact(params: Params, rule=None) -> float:
    '''||Z_m(., e_1) (1 - |x|^2)^(n/p)||_{L^p(dtau)}

    Equals (n |B| / (pm + n) int_S |Z_m(xi, e_1)|^p dsigma)^(1/p).

    >>> from bergnorm.zonal import params
    >>> pr = params(2, 1, 2)
    >>> abs(fm_normalizer_exact(pr) ** 2 - math.pi) < 1e-10
    True
    '''
    n, m, p = params.n, params.m, params.p
    rule = rule or sphere_rule(n)
    e1 = unit(n)
    sphere_mean = integrate(rule, lambda X: np.abs(zonal(m, X, e1)) ** p)
    return (n * ball_volume(n) / (p * m + n) * sphere_mean) ** (1 / p)

def derivative_aggregates(params: Params):
    '''Constant aggregates of d^k Z_m(., e_1) over |k| = m

    l1 is sum_k |d^k Z_m|, signed is |sum_k d^k Z_m| and displayed is
    m! dim H_m.

    >>> from bergnorm.zonal import params
    >>> derivative_aggregates(params(2, 1, 2, m=2))['l1']
    8.0
    '''
    n, m = params.n, params.m
    x, e1 = np.full(n, 0.1), unit(n)
    parts = list(zonal_partials(m, m, x, e1).values())
    return pmap({
        'l1': float(round(math.fsum(abs(v) for v in parts), 9)),
        'signed': float(round(abs(math.fsum(parts)), 9)),
        'displayed': float(math.factorial(m) * dim_harmonic(n, m)),
    })

def normalization_constants(params: Params, rule=None):
    '''Every normalizer the constants depend on, in both conventions'''
    n, a, m, p = params.n, params.alpha, params.m, params.p
    c_displayed = fm_normalizer_displayed(params)
    c_exact = fm_normalizer_exact(params, rule)
    core = multiplier(n, a, n / p, m)
    return pmap({
        'c_alpha': c_alpha(n, a),
        'ball_volume': ball_volume(n),
        'sphere_area': sphere_area(n),
        'beta_displayed': beta_displayed(params),
        'beta_exact': beta_exact(params),
        'fm_normalizer_displayed': c_displayed,
        'fm_normalizer_exact': c_exact,
        'multiplier_displayed': core / (c_displayed * sphere_area(n)),
        'multiplier_exact': core / c_exact,
    })

# ----------------------------------------------------------------------
#
# Lower constants
#
# ----------------------------------------------------------------------

def displayed_A(params: Params) -> float:
    n, a, m, p = params.n, params.alpha, params.m, params.p
    e = p * (m + a)
    _positive_gamma_args('A', radial=params.besov_exponent + 1)
    return (
        math.pi ** (n / 2)
        * gamma_ratio(
            [e + n / 2 + 1, m + a + n / p + 1],
            [e + 1, m + a + n / 2 + n / p + 1],
        )
        * gamma_ratio(
            [params.besov_exponent + 1], [params.besov_exponent + n / 2 + 1],
        ) ** (1 / p)
    )

def lower_constant_T(params: Params) -> ConstantReport:
    '''A, the psi_k lower bound for ||T_k^alpha||

    proof_assembled follows the chain beta^-1 min I (radial)^(1/p) with
    T over dv. certified uses the exact beta, T over dv_alpha and the
    exact radial integral.

    >>> from bergnorm.zonal import params
    >>> A = lower_constant_T(params(2, 1, 2))
    >>> round(A.displayed / math.pi, 12), round(A.certified ** 2, 10)
    (1.25, 0.3125)
    '''
    n, a, m, p = params.n, params.alpha, params.m, params.p
    radial = _besov_radial(params, factor_n=True)
    shifted = m + a + n / p + 1
    proof = i_prefactor(n, shifted) * radial ** (1 / p) / beta_displayed(params)
    weighted = m + 2 * a + n / p
    certified = (
        c_alpha(n, a) * i_prefactor(n, weighted)
        * _besov_radial(params) ** (1 / p) / beta_exact(params)
    )
    return _report(
        'A', displayed_A(params), proof, params, certified=certified,
        note='psi_k witness',
    )

def displayed_B(params: Params) -> float:
    n, a, m, p = params.n, params.alpha, params.m, params.p
    e = params.besov_exponent
    _positive_gamma_args('B', radial=e + 1)
    head = gamma_ratio(
        [n / 2, m + 1, m + n / 2 + a, n / p + a], [m + n / p + a + n / 2],
    ) / (2 * math.pi ** (n / 2))
    tail = (
        n * (n + m - 1) * gamma_ratio([n / 2, e + 1], [e + n / 2 + 1]) / 2
    ) ** (1 / p)
    return head * tail

def proof_value_factors(params: Params, aggregates=None):
    '''Factors between the proof-assembled B and ||P_alpha f_m|| measured
    with the displayed normalizer

    sigma: the proof's multiplier carries Gamma(n/2)/(2 pi^(n/2)) = 1/|S|
    where the kernel integral over the sphere uses the unnormalized sigma.
    radial_n: the proof's radial integral carries an extra factor n.
    aggregates: the l1 derivative aggregate over the displayed one.

    >>> from bergnorm.zonal import params
    >>> factors = proof_value_factors(params(2, 1, 2))
    >>> round(factors['total'] / (math.pi * math.sqrt(2)), 12)
    1.0
    '''
    n, p = params.n, params.p
    if aggregates is None:
        aggregates = derivative_aggregates(params)
    sigma = sphere_area(n)
    radial_n = n ** (-1 / p)
    ratio = aggregates['l1'] / aggregates['displayed']
    return pmap({
        'sigma': sigma, 'radial_n': radial_n, 'aggregates': ratio,
        'total': sigma * radial_n * ratio,
    })

def lower_constant_P(params: Params, rule=None):
    '''(B, M) ConstantReports for the f_m lower bound of ||P_alpha||

    certified B is the Rayleigh quotient of f_m computed with the exact
    multiplier, the l1 derivative aggregate and the exact ||f_m||.

    >>> from bergnorm.zonal import params
    >>> B, M = lower_constant_P(params(2, 1, 2))
    >>> B.proof_assembled > 0 and M.displayed > 0
    True
    '''
    require(params.m >= 1, f'the f_m witness needs m >= 1, got {params.m}')
    n, m, p = params.n, params.m, params.p
    norms = normalization_constants(params, rule)
    aggregates = derivative_aggregates(params)
    M = _report(
        'M', norms['multiplier_displayed'], norms['multiplier_displayed'],
        params, certified=norms['multiplier_exact'],
        note='unnormalized sigma in the displayed form',
    )
    radial = _besov_radial(params, factor_n=True)
    proof = aggregates['displayed'] * M.displayed * radial ** (1 / p)
    certified = (
        aggregates['l1'] * norms['multiplier_exact']
        * _besov_radial(params) ** (1 / p)
    )
    if abs(aggregates['l1'] - aggregates['displayed']) > 1e-9:
        log.warning(
            f'derivative aggregate at n={n}, m={m}: l1 {aggregates["l1"]:g},'
            f' signed {aggregates["signed"]:g},'
            f' displayed {aggregates["displayed"]:g}'
        )
    factors = proof_value_factors(params, aggregates)
    B = _report(
        'B', displayed_B(params), proof, params, certified=certified,
        note=(
            f'proof value x {factors["total"]:.6g} = ||P f_m|| (displayed'
            f' normalizer): |S| = {factors["sigma"]:.6g} (sigma'
            f' normalization), n^(-1/p) = {factors["radial_n"]:.6g}'
            f' (radial factor n), l1/displayed aggregate'
            f' = {factors["aggregates"]:.6g};'
            f' aggregates l1={aggregates["l1"]:g}'
            f' signed={aggregates["signed"]:g}'
            f' displayed={aggregates["displayed"]:g}'
        ),
    )
    return B, M

def beta_report(params: Params) -> ConstantReport:
    value = beta_displayed(params)
    return _report(
        'beta', value, value, params, certified=beta_exact(params),
        note='psi_k normalizer',
    )

# ----------------------------------------------------------------------
#
# Audit
#
# ----------------------------------------------------------------------

def audit(params: Params, rule=None):
    '''ConstantReports for D, D~, A, B, M and beta

    >>> from bergnorm.zonal import params
    >>> [r.name for r in audit(params(2, 1, 2))]
    ['D', 'D_tilde', 'A', 'B', 'M', 'beta']
    '''
    D, Dt = schur_upper_constant(params)
    B, M = lower_constant_P(params, rule)
    return (D, Dt, lower_constant_T(params), B, M, beta_report(params))

def sandwich_findings(reports: Sequence[ConstantReport]):
    '''A <= D per variant; rows with consistent=False are findings

    >>> from bergnorm.zonal import params
    >>> rows = sandwich_findings(audit(params(2, 1, 2)))
    >>> [(r['variant'], r['consistent']) for r in rows]
    [('displayed', False), ('proof_assembled', False), ('certified', True)]
    '''
    by_name = {r.name: r for r in reports}
    lower, upper = by_name['A'], by_name['D']
    rows = pvector(
        pmap({
            'variant': variant, 'lower': 'A', 'upper': 'D',
            'lower_value': lower.value(variant),
            'upper_value': upper.value(variant),
            'consistent': lower.value(variant) <= upper.value(variant),
        })
        for variant in VARIANTS
    )
    for row in rows:
        if not row['consistent']:
            log.warning(
                f'A > D ({row["variant"]}) at {lower.inputs.row()}:'
                f' {row["lower_value"]:.6g} > {row["upper_value"]:.6g}'
            )
    return rows

def conjecture_denominator(params: Params) -> float:
    '''C(m + n - 1, m) D_p^m'''
    return binomial(params.m + params.n - 1, params.m) * displayed_D(params)

# ----------------------------------------------------------------------
#
# Growth in p
#
# ----------------------------------------------------------------------

STIRLING_SLOPE_TOL = 0.2

class StirlingReport(PClass):
    ps = field(initial=pvector())
    values = field(initial=pvector())
    grows = field(type=bool, mandatory=True)
    increasing_tail = field(type=bool, mandatory=True)
    tail_slope = field(type=float, factory=float, mandatory=True)
    predicted_slope = field(type=float, factory=float, mandatory=True)

    @property
    def slope_ok(self):
        return (
            abs(self.tail_slope / self.predicted_slope - 1)
            <= STIRLING_SLOPE_TOL
        )

def stirling_limit_probe(n: int, alpha: float, m: int,
                         ps: Sequence[float] = (2, 4, 8, 16, 32)):
    '''D_p^m along an increasing p grid

    log D_p grows like (n + m + alpha) log p; the slope of the last two
    grid points is compared against that.

    >>> report = stirling_limit_probe(2, 1.0, 1)
    >>> report.grows, report.increasing_tail, report.slope_ok
    (True, True, True)
    '''
    ps = tuple(float(p) for p in ps)
    require(len(ps) >= 2, 'the p grid needs at least two points')
    require(
        all(a < b for a, b in zip(ps, ps[1:])), 'the p grid must increase',
    )
    values = [displayed_D(Params(n=n, alpha=alpha, p=p, m=m)) for p in ps]
    half = len(values) // 2
    tail = values[half:]
    slope = (
        (math.log(values[-1]) - math.log(values[-2]))
        / (math.log(ps[-1]) - math.log(ps[-2]))
    )
    return StirlingReport(
        ps=pvector(ps), values=pvector(values),
        grows=values[-1] > values[0],
        increasing_tail=all(a < b for a, b in zip(tail, tail[1:])),
        tail_slope=slope, predicted_slope=n + m + alpha,
    )
