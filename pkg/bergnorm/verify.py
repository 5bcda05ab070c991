'''Verification suites: identities, lemma1, kernels and operators

Each check is a CheckResult. Hard checks gate the exit code; soft ones
(auditor findings, reported discrepancies) never do.

'''
import math
import logging
import itertools

import numpy as np
from pyrsistent import PClass, field, pmap, pvector

from .common import BergnormError, require
from .specfun import (
    f21, gauss_value, series_sum, series_control, hyp2f1_derivative,
    euler_residuals,
)
from .zonal import params as make_params, dim_harmonic, zonal, unit
from .quadrature import DEFAULT_SEED
from .integrals import (
    DEFAULT_I_GRID, i_args, i_closed_form, i_sweep, lemma1_constants,
    gauss_consistency, sphere_identity_check, sphere_rule, admissible,
)
from .kernels import (
    kernel_series, bergman_kernel, a_coefficient, boundary_probe, cauchy_gap,
    sized_series, estimate_growth_constant, growth_sampler,
)
from .bounds import (
    audit, jensen_gap, sandwich_findings, stirling_limit_probe,
    lower_constant_T, lower_constant_P, proof_value_factors,
)
from .operators import (
    psi_k, f_m, zonal_function, tau_norm, t_norm, apply_T, apply_P,
    projection_multiplier, harmonic_partials, dirichlet_inner_product,
    tau_monotonicity, besov_norm_of_image, finite_difference_partial,
    p_image,
)
from .parallel import pmap as parallel_map

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

class CheckResult(PClass):
    name = field(type=str, mandatory=True)
    passed = field(type=bool, mandatory=True)
    residual = field(type=float, factory=float, initial=0.0)
    hard = field(type=bool, initial=True)
    detail = field(type=str, initial='')

    def row(self):
        return {
            'name': self.name, 'passed': self.passed,
            'residual': self.residual, 'hard': self.hard,
            'detail': self.detail,
        }

def check(name, residual, tol, hard=True, detail=''):
    '''Pass iff residual <= tol

    >>> check('x', 1e-9, 1e-6).passed
    True
    '''
    residual = float(residual)
    return CheckResult(
        name=name, passed=bool(residual <= tol), residual=residual,
        hard=hard, detail=detail or f'tol={tol:g}',
    )

def flag(name, ok, hard=True, detail=''):
    return CheckResult(name=name, passed=bool(ok), hard=hard, detail=detail)

def hard_failures(results):
    return tuple(r for r in results if r.hard and not r.passed)

def _guarded(name, func):
    '''A check that raised is a failed hard check, not a crash'''
    try:
        return tuple(func())
    except BergnormError as error:
        log.error(f'{name}: {error}')
        return (flag(name, False, detail=f'{type(error).__name__}: {error}'),)

def _rel(a, b):
    return abs(a - b) / abs(b) if b else abs(a)

# ----------------------------------------------------------------------
#
# identities
#
# ----------------------------------------------------------------------

GAUSS_GRID = tuple(
    (a, b, a + b + s)
    for a, b, s in itertools.product(
        (0.25, 0.5, 1.0, 1.5, 2.0), (0.5, 1.0), (1.5, 2.0, 2.5, 3.0, 4.0),
    )
)
SLOW_SERIES = series_control(max_terms=1_000_000, rel_tol=1e-10)

def gauss_checks(grid=GAUSS_GRID, ctl=SLOW_SERIES):
    residual = max(
        _rel(series_sum(a, b, c, 1.0, ctl), gauss_value(a, b, c))
        for a, b, c in grid
    )
    yield check(f'gauss value vs series at t=1 ({len(grid)} points)',
                residual, 1e-4)

def derivative_checks(points=((0.5, 1.5, 2.5, 0.3), (1.0, 2.0, 3.5, 0.7),
                              (0.25, 0.75, 1.25, 0.9)), h=1e-5):
    residual = max(
        _rel(
            (f21(a, b, c, t + h) - f21(a, b, c, t - h)) / (2 * h),
            hyp2f1_derivative(a, b, c, t),
        )
        for a, b, c, t in points
    )
    yield check('2F1 derivative identity vs finite differences',
                residual, 1e-6)

def euler_checks(points=((0.5, 0.75, 2.0, 0.3), (1.5, 0.25, 3.0, 0.6))):
    rows = [euler_residuals(*point) for point in points]
    yield check('Euler transformation (standard form)',
                max(r['standard'] for r in rows), 1e-10)
    yield flag(
        'Euler transformation (with 1 - t^2)',
        all(r['as_printed'] < 1e-10 for r in rows), hard=False,
        detail=f'max residual {max(r["as_printed"] for r in rows):.3g}',
    )

def zonal_checks(dims=(2, 3, 4), degrees=range(7), pairs=8,
                 seed=DEFAULT_SEED):
    residual = asymmetry = excess = 0.0
    rng = np.random.default_rng(seed)
    for n in dims:
        xi, eta = (_sample_sphere(n, pairs, rng) for _ in range(2))
        for j in degrees:
            e = unit(n)
            residual = max(residual, _rel(zonal(j, e, e), dim_harmonic(n, j)))
            for a, b in zip(xi, eta):
                ab = zonal(j, a, b)
                asymmetry = max(asymmetry, abs(ab - zonal(j, b, a)))
                excess = max(excess, abs(ab) - dim_harmonic(n, j))
    yield check('Z_j(xi, xi) = dim H_j', residual, 1e-10)
    yield check('Z_j(xi, eta) = Z_j(eta, xi)', asymmetry, 1e-12)
    yield check('|Z_j(xi, eta)| <= dim H_j', max(excess, 0.0), 1e-9)

def _sample_sphere(n, count, rng):
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)

def sphere_checks(dims=(2, 3), radii=(0.0, 0.3, 0.6, 0.9)):
    residual = 0.0
    for n in dims:
        rule = sphere_rule(n)
        for c, r in itertools.product((0.5, 1.0, n - 1.0, n + 0.5), radii):
            closed = f21(c / 2, (c - n) / 2 + 1, n / 2, r * r)
            residual = max(
                residual, sphere_identity_check(n, c, r, rule) / closed,
            )
    yield check('sphere identity for |x - xi|^-c', residual, 1e-6)

def identities_suite(config=None):
    ctl = series_control(
        max_terms=_config(config, 'max_terms', SLOW_SERIES.max_terms),
        rel_tol=SLOW_SERIES.rel_tol,
    )
    return pvector(itertools.chain.from_iterable(
        _guarded(name, func) for name, func in (
            ('gauss', lambda: gauss_checks(ctl=ctl)),
            ('derivative', derivative_checks),
            ('euler', euler_checks), ('zonal', zonal_checks),
            ('sphere', sphere_checks),
        )
    ))

# ----------------------------------------------------------------------
#
# lemma1
#
# ----------------------------------------------------------------------

def lemma1_checks(n, grid=DEFAULT_I_GRID, workers=1):
    rows = i_sweep(n, grid, workers=workers)
    yield check(f'n={n}: quadrature vs closed form',
                max(r['rel_err'] for r in rows), 1e-5)
    min_err = min_quad_err = limit_err = 0.0
    monotone = True
    ordered = sorted(rows, key=lambda r: (r['alpha'], r['s'], r['x']))
    for (alpha, s), group in itertools.groupby(
            ordered, key=lambda r: (r['alpha'], r['s'])):
        group = list(group)
        high, low = lemma1_constants(n, alpha, s)
        closed = [r['closed'] for r in group]
        monotone &= all(a <= b for a, b in zip(closed, closed[1:]))
        at_zero = [r for r in group if r['x'] == 0]
        if at_zero:
            min_err = max(min_err, _rel(at_zero[0]['closed'], low))
            min_quad_err = max(min_quad_err, _rel(at_zero[0]['quad'], low))
        limit_err = max(
            limit_err, _rel(i_closed_form(i_args(n, alpha, s, 1.0)), high),
        )
    yield check(f'n={n}: min at x=0 (closed form)', min_err, 1e-8)
    yield check(f'n={n}: min at x=0 (quadrature)', min_quad_err, 1e-5)
    yield check(f'n={n}: limit x -> 1 equals C(alpha, s)', limit_err, 1e-8)
    yield flag(f'n={n}: monotone in |x|', monotone)

def gauss_consistency_checks(n, grid=DEFAULT_I_GRID):
    pairs = {(alpha, s) for alpha, s, _ in grid if admissible(alpha, s)}
    residual = max(gauss_consistency(n, alpha, s) for alpha, s in pairs)
    yield check(f'n={n}: C(alpha, s) = prefactor x Gauss value', residual,
                1e-10)

def lemma1_suite(config=None):
    dims = _config(config, 'n', (2, 3))
    dims = dims if isinstance(dims, (list, tuple)) else (dims,)
    workers = _config(config, 'workers', 1)
    return pvector(itertools.chain.from_iterable(
        _guarded(f'lemma1 n={n}', lambda n=n: itertools.chain(
            lemma1_checks(n, workers=workers), gauss_consistency_checks(n),
        ))
        for n in dims
    ))

# ----------------------------------------------------------------------
#
# kernels
#
# ----------------------------------------------------------------------

def _sample_points(n, count, radius, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.random(count) ** (1.0 / n))[:, None]

def reproducing_checks(n=2, alpha=1.0, degrees=range(5), count=50,
                       radius=0.8, seed=DEFAULT_SEED, workers=1):
    pr = make_params(n, alpha, 2)
    series = kernel_series(pr)
    points = _sample_points(n, count, radius, seed)
    e1 = unit(n)

    def worst(j):
        return max(
            abs(apply_P(pr, lambda Y: zonal(j, Y, e1), x, series=series)
                - zonal(j, x, e1))
            for x in points
        )
    residual = max(parallel_map('thread', workers)(worst, degrees))
    yield check(f'n={n}: P_alpha reproduces Z_j, j <= {max(degrees)}',
                residual, 1e-5)

BOUNDARY_RADII = (0.5, 0.7, 0.8, 0.9, 0.95, 0.99)
CAUCHY_REACH = 0.9

def kernel_checks(n=2, alpha=1.0, seed=DEFAULT_SEED, radii=BOUNDARY_RADII):
    series = kernel_series(n, alpha)
    rng = np.random.default_rng(seed)
    x = _sample_points(n, 20, 0.9, rng)
    y = _sample_points(n, 20, 0.9, rng)
    yield check(
        'R_alpha(0, y) = 1', np.max(np.abs(bergman_kernel(series, 0 * x, y) - 1)),
        1e-12,
    )
    yield check(
        'R_alpha symmetric',
        np.max(np.abs(bergman_kernel(series, x, y) - bergman_kernel(series, y, x))),
        1e-10,
    )
    edge = math.sqrt(CAUCHY_REACH)
    wide_x = _sample_points(n, 20, edge, rng)
    wide_y = _sample_points(n, 20, edge, rng)
    yield check(
        f'partial sums at J and 2J agree for |x||y| <= {CAUCHY_REACH:g}',
        cauchy_gap(series, wide_x, wide_y), series.rel_tol,
    )
    ratios = [a_coefficient(n, alpha, j) / j ** alpha for j in (1000, 4000)]
    yield check('A_j ~ j^alpha', abs(ratios[-1] - 1), 1e-2)
    reach = max(radii) ** 2
    growth = estimate_growth_constant(
        sized_series(series, reach, 1), 1, growth_sampler(seed=seed),
    )
    rows = boundary_probe(series, 1, radii)
    values = [v for _, v in rows]
    yield flag(
        'kernel growth stays bounded along the boundary path',
        all(math.isfinite(v) for v in values)
        and values[-1] <= 2 * max(values[:-1], default=values[-1]),
        detail=' '.join(f'{r:g}:{v:.6g}' for r, v in rows),
    )
    yield flag(
        'kernel growth near the boundary stays below the sampled C_alpha^1',
        all(v <= growth.empirical_value * (1 + 1e-9) for v in values),
        hard=False,
        detail=f'C_alpha^1 >= {growth.empirical_value:.6g}'
               f' for |x||y| <= {reach:g}',
    )

def kernels_suite(config=None):
    n = _first(config, 'n', 2)
    alpha = _first(config, 'alpha', 1.0)
    seed = _config(config, 'seed', DEFAULT_SEED)
    workers = _config(config, 'workers', 1)
    return pvector(itertools.chain(
        _guarded('kernel', lambda: kernel_checks(n, alpha, seed)),
        _guarded('reproducing', lambda: reproducing_checks(
            n, alpha, seed=seed, workers=workers,
        )),
    ))

# ----------------------------------------------------------------------
#
# operators
#
# ----------------------------------------------------------------------

CONSTANT_GRID = tuple(itertools.product((2, 3), (0.5, 1.0, 2.0), (1.5, 2.0, 4.0)))

def constant_checks(grid=CONSTANT_GRID):
    finite, jensen, findings = True, 0.0, 0
    for n, alpha, p in grid:
        reports = audit(make_params(n, alpha, p))
        finite &= all(
            math.isfinite(r.displayed) and math.isfinite(r.proof_assembled)
            for r in reports
        )
        jensen = min(jensen, jensen_gap(make_params(n, alpha, p)))
        findings += sum(
            not row['consistent'] for row in sandwich_findings(reports)
        )
    yield flag('constants finite on the grid', finite)
    yield check('Jensen step D~ <= D', max(0.0, -jensen), 0.0)
    yield flag('A <= D in every variant', findings == 0, hard=False,
               detail=f'{findings} inconsistent (params, variant) rows')
    stirling = stirling_limit_probe(2, 1.0, 1)
    yield flag(
        'D_p grows with p', stirling.grows and stirling.increasing_tail,
        detail=f'values {list(stirling.values)}',
    )
    yield flag(
        'log D_p slope matches Stirling', stirling.slope_ok, hard=False,
        detail=f'{stirling.tail_slope:.4g} vs {stirling.predicted_slope:.4g}',
    )

def witness_checks(pr):
    psi = psi_k(pr)
    yield check('||psi_k||_{L^p(dtau)} = 1', abs(tau_norm(psi, pr.p) - 1), 1e-6)
    yield flag(
        '||f_m||_{L^p(dtau)} <= 1 with the displayed normalizer',
        tau_norm(f_m(pr, 'displayed'), pr.p) <= 1 + 1e-9,
    )
    one = apply_T(pr, lambda Y: np.ones(len(Y)), np.zeros(pr.n))
    yield check('T 1 (0) = 1', abs(one - 1), 1e-10)
    x = np.full(pr.n, 0.3 / math.sqrt(pr.n))
    direct = apply_T(pr, lambda Y: psi(Y), x)
    linear = _rel(apply_T(pr, lambda Y: 2 * psi(Y), x), 2 * direct)
    yield check('T linear', linear, 1e-12)
    yield check('T: Funk-Hecke profile vs direct quadrature',
                _rel(apply_T(pr, psi, x), direct), 1e-5)
    A = lower_constant_T(pr)
    measured = t_norm(pr, psi)
    yield flag(
        '||T psi_k|| >= certified A', measured >= A.certified * (1 - 1e-3),
        detail=f'{measured:.6g} vs {A.certified:.6g}',
    )
    yield flag(
        '||T psi_k|| >= proof-assembled A',
        measured >= A.proof_assembled * (1 - 1e-3), hard=False,
        detail=f'{measured:.6g} vs {A.proof_assembled:.6g}',
    )

def projection_checks(pr):
    fm = f_m(pr)
    e1 = unit(pr.n)
    x = np.full(pr.n, 0.4 / math.sqrt(pr.n))
    M = projection_multiplier(pr, pr.n / pr.p, pr.m)
    quad = apply_P(pr, lambda Y: fm(Y), x)
    closed = fm.components[0].coef * M * zonal(pr.m, x, e1)
    yield check('P f_m = M Z_m (quadrature)', _rel(quad, closed), 1e-5)
    zero = apply_P(pr, lambda Y: np.zeros(len(Y)), x)
    yield check('P 0 = 0', abs(zero), 0.0)
    g = p_image(pr, fm)
    point = np.full(pr.n, 0.2)
    gp = harmonic_partials(g)
    fd = max(
        abs(finite_difference_partial(g, k, point) - float(gp(k, point[None])[0]))
        for k in itertools.product(range(pr.m + 1), repeat=pr.n)
        if sum(k) == pr.m
    )
    yield check('analytic vs finite-difference partials', fd, 1e-4)
    B, _ = lower_constant_P(pr)
    exact = besov_norm_of_image(pr, fm)
    yield check(
        '||P f_m||_{B^p} equals certified B', _rel(exact, B.certified), 1e-3,
        detail=f'{exact:.6g} vs {B.certified:.6g}',
    )
    factors = proof_value_factors(pr)
    measured = besov_norm_of_image(pr, f_m(pr, 'displayed'))
    source = (
        f'|S| = {factors["sigma"]:.6g} from the sigma normalization,'
        f' n^(-1/p) = {factors["radial_n"]:.6g} from the radial factor n,'
        f' l1/displayed aggregate = {factors["aggregates"]:.6g}'
    )
    yield check(
        '||P f_m||_{B^p} (displayed normalizer) = proof value x named factors',
        _rel(measured, B.proof_assembled * factors['total']), 1e-3,
        detail=source,
    )
    yield flag(
        '||P f_m||_{B^p} matches the proof value',
        _rel(measured, B.proof_assembled) <= 1e-3, hard=False,
        detail=f'{measured:.6g} vs {B.proof_assembled:.6g}; {source}',
    )

def inner_product_checks(pr, radius=0.9):
    f1 = harmonic_partials(zonal_function(pr.n, 1))
    f2 = harmonic_partials(zonal_function(pr.n, 2))
    yield check('<Z_1, Z_2> = 0', abs(dirichlet_inner_product(f1, f2, pr)),
                1e-6)
    yield flag('<Z_2, Z_2> >= 0', dirichlet_inner_product(f2, f2, pr) >= 0)
    monotone = tau_monotonicity(pr, psi_k(pr), radius)
    yield flag(
        '||Tf||_{dv_(pm-n)} <= ||Tf||_{dtau} on rB', monotone['holds'],
        detail=f'r = {radius:g}',
    )

def operators_suite(config=None):
    pr = make_params(
        _first(config, 'n', 2), _first(config, 'alpha', 1.0),
        _first(config, 'p', 2.0), _first(config, 'm', None),
    )
    dirichlet = make_params(pr.n, pr.alpha, 2.0)
    radius = _config(config, 'radius', 0.9)
    return pvector(itertools.chain(
        _guarded('constants', constant_checks),
        _guarded('witnesses', lambda: witness_checks(pr)),
        _guarded('projection', lambda: projection_checks(pr)),
        _guarded(
            'inner product', lambda: inner_product_checks(dirichlet, radius),
        ),
    ))

# ----------------------------------------------------------------------
#
# Dispatch
#
# ----------------------------------------------------------------------

def _config(config, key, default):
    value = (config or {}).get(key)
    return default if value is None else value

def _first(config, key, default):
    value = _config(config, key, default)
    if isinstance(value, (list, tuple)):
        return value[0] if value else default
    return value

SUITES = pmap({
    'identities': identities_suite,
    'lemma1': lemma1_suite,
    'kernels': kernels_suite,
    'operators': operators_suite,
})

def run_suite(name: str, config=None):
    require(name in SUITES, f'unknown suite {name}; choose from {sorted(SUITES)}')
    results = SUITES[name](config)
    for r in results:
        level = logging.INFO if r.passed else (
            logging.ERROR if r.hard else logging.WARNING
        )
        log.log(level, f'[{name}] {r.name}: {"pass" if r.passed else "FAIL"}'
                f' (residual {r.residual:.3g}) {r.detail}')
    return results
