'''T_k^alpha, P_alpha, the test functions that probe them and
empirical operator-norm brackets

    T_k^alpha f(x) = int_B f(y) [x, y]^-(n + alpha + |k| - 1) dv_alpha(y)
    P_alpha f(x)   = int_B R_alpha(x, y) f(y) dv_alpha(y)

A TestFunction is a finite sum of components
coef (1 - |x|^2)^a Z_l(x, omega), optionally cut off at |x| < support.
For these P_alpha is exact (each component goes to a multiple of
Z_l(x, omega)) and T reduces to a radial profile by Funk-Hecke. Any
other callable goes through kernel and bracket quadrature.

Every lower bound reported here is a Rayleigh quotient of a concrete
function, so it is a norm lower bound up to quadrature error.

'''
import math
import logging
from typing import Callable, Sequence

import numpy as np
from multipledispatch import dispatch
from pyrsistent import PClass, field, pmap, pvector

from .common import Null, require, maybe, no_pyrsistent
from .specfun import f21, binomial
from .zonal import (
    Params, dim_harmonic, multi_indices, zonal, zonal_partial, unit,
)
from .quadrature import (
    DEFAULT_SEED, TAU, radial_split, dv_alpha, dv_beta, c_alpha,
    ball_volume, build_ball_rule, build_zonal_rule, integrate, lp_norm,
    node_values, require_measure, besov_seminorm,
)
from .kernels import (
    bracket, kernel_series, series_coefficient, bergman_kernel,
    kernel_partial, max_product,
    estimate_growth_constant, growth_sampler,
)
from .bounds import (
    beta_exact, fm_normalizer_displayed, fm_normalizer_exact, multiplier,
    schur_exponent, lower_constant_T, lower_constant_P,
    schur_upper_constant, sandwich_findings, conjecture_denominator,
    proof_value_factors, VARIANTS,
)
from .integrals import lemma1_constants
from .parallel import pmap as parallel_map

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

T_SPLIT = radial_split(radial_order=64, sphere_order=48)
NORM_SPLIT = radial_split(radial_order=48, sphere_order=32)
P_SPLIT = radial_split(radial_order=48, sphere_order=96)
OUTER_SPLIT = radial_split(radial_order=12, sphere_order=8)
CHUNK = 4096
GROWTH_SAMPLES = 512
RANDOM_COMPONENTS = 3
DECAY_MARGIN = (0.1, 3.0)
REFINEMENT_TOL = 1e-4

# ----------------------------------------------------------------------
#
# Test functions
#
# ----------------------------------------------------------------------

class Component(PClass):
    coef = field(type=float, factory=float, mandatory=True)
    a = field(type=float, factory=float, mandatory=True)
    l = field(
        type=int, mandatory=True,
        invariant=lambda v: (v >= 0, 'degree l must be >= 0'),
    )
    omega = field(type=tuple, factory=tuple, mandatory=True)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        decay = (1.0 - np.sum(X * X, axis=-1)) ** self.a
        return self.coef * decay * zonal(self.l, X, self.omega)

TEST_KINDS = ('h_j', 'psi_k', 'f_m', 'random_smooth', 'zonal', 'harmonic')

class TestFunction(PClass):
    __test__ = False

    kind = field(
        type=str, mandatory=True,
        invariant=lambda v: (v in TEST_KINDS, f'unknown test function {v}'),
    )
    n = field(type=int, mandatory=True)
    components = field(initial=pvector())
    support = field(
        type=float, factory=float, initial=1.0,
        invariant=lambda v: (0 < v <= 1, 'support radius must be in (0, 1]'),
    )
    label = field(type=str, initial='')

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        total = sum(
            (c(X) for c in self.components), np.zeros(np.shape(X)[:-1]),
        )
        if self.support < 1:
            inside = np.sqrt(np.sum(X * X, axis=-1)) < self.support
            total = np.where(inside, total, 0.0)
        return total

    @property
    def decay(self):
        return min(c.a for c in self.components)

    def descriptor(self):
        return pmap({
            'kind': self.kind, 'label': self.label, 'support': self.support,
            'components': pvector(
                pmap({
                    'coef': c.coef, 'a': c.a, 'l': c.l,
                    'omega': pvector(c.omega),
                })
                for c in self.components
            ),
        })

def _omega(n, omega=None):
    return tuple(float(v) for v in (unit(n) if omega is None else omega))

def zonal_function(n: int, l: int, omega=None, a: float = 0.0,
                   coef: float = 1.0) -> TestFunction:
    '''coef (1 - |x|^2)^a Z_l(x, omega)

    >>> round(float(zonal_function(2, 1)(np.array([[0.25, 0.5]]))[0]), 12)
    0.5
    '''
    return TestFunction(
        kind='zonal', n=n, label=f'Z_{l}',
        components=pvector([
            Component(coef=coef, a=a, l=l, omega=_omega(n, omega)),
        ]),
    )

def psi_k(params: Params) -> TestFunction:
    '''(1 - |x|^2)^(m + alpha + n/p), scaled to unit L^p(dtau) norm'''
    n = params.n
    return TestFunction(
        kind='psi_k', n=n, label='psi_k',
        components=pvector([Component(
            coef=1.0 / beta_exact(params),
            a=params.m + params.alpha + n / params.p, l=0, omega=_omega(n),
        )]),
    )

def f_m(params: Params, normalizer: str = 'exact', rule=None) -> TestFunction:
    '''Z_m(x, e_1) (1 - |x|^2)^(n/p) / c

    With the exact normalizer ||f_m||_{L^p(dtau)} = 1; the displayed one
    gives ||f_m|| <= 1.

    '''
    n = params.n
    c = {
        'exact': lambda: fm_normalizer_exact(params, rule),
        'displayed': lambda: fm_normalizer_displayed(params),
    }[normalizer]()
    return TestFunction(
        kind='f_m', n=n, label=f'f_m[{normalizer}]',
        components=pvector([Component(
            coef=1.0 / c, a=n / params.p, l=params.m, omega=_omega(n),
        )]),
    )

def h_j(params: Params, j: int, c: float = None) -> TestFunction:
    '''(1 - |x|^2)^c on |x| < 1/sqrt(j), zero outside'''
    require(j >= 2, f'h_j needs j >= 2, got {j}')
    c = schur_exponent(params) if c is None else c
    n = params.n
    return TestFunction(
        kind='h_j', n=n, label=f'h_{j}', support=1.0 / math.sqrt(j),
        components=pvector([Component(coef=1.0, a=c, l=0, omega=_omega(n))]),
    )

def random_smooth(params: Params, rng: np.random.Generator, index: int = 0,
                  min_degree: int = 0) -> TestFunction:
    '''Seeded finite sum of (1 - |x|^2)^a Z_l(x, omega) with a > (n-1)/p'''
    n, p = params.n, params.p
    lo, hi = DECAY_MARGIN
    count = int(rng.integers(1, RANDOM_COMPONENTS + 1))
    components = []
    for _ in range(count):
        omega = rng.standard_normal(n)
        components.append(Component(
            coef=float(rng.standard_normal()),
            a=(n - 1) / p + float(rng.uniform(lo, hi)),
            l=int(rng.integers(min_degree, min_degree + 3)),
            omega=tuple((omega / np.linalg.norm(omega)).tolist()),
        ))
    return TestFunction(
        kind='random_smooth', n=n, label=f'random_smooth#{index}',
        components=pvector(components),
    )

def random_candidates(params: Params, trials: int, seed: int = DEFAULT_SEED,
                      min_degree: int = 0):
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return tuple(
        random_smooth(params, rng, i, min_degree) for i in range(trials)
    )

def tau_norm(f: TestFunction, p: float, split=NORM_SPLIT) -> float:
    '''||f||_{L^p(dtau)}

    Cut-off functions integrate against tau on their support; otherwise
    the decay (1 - |x|^2)^a moves into a dv_beta weight.

    >>> from bergnorm.zonal import params
    >>> abs(tau_norm(psi_k(params(2, 1, 2)), 2) - 1) < 1e-6
    True
    '''
    n = f.n
    if f.support < 1:
        rule = build_ball_rule(n, split, TAU, radius=f.support)
        return lp_norm(rule, f, p)
    a = f.decay
    require(
        p * a - n > -1,
        f'{f.label}: decay a = {a:g} too weak for L^{p:g}(dtau)',
    )
    rule = build_ball_rule(n, split, dv_beta(p * a - n))
    return lp_norm(
        rule, lambda X: f(X) / (1.0 - np.sum(X * X, axis=-1)) ** a, p,
    )

# ----------------------------------------------------------------------
#
# T_k^alpha
#
# ----------------------------------------------------------------------

def t_exponent(params: Params) -> float:
    exponent = params.n + params.alpha + params.m - 1
    require(exponent > 0, f'n + alpha + |k| - 1 = {exponent:g} must be > 0')
    return exponent

def t_profile(params: Params, component: Component, radii,
              support: float = 1.0, split=T_SPLIT):
    '''lambda(rho) with T[component](x) = coef lambda(|x|) Z_l(x/|x|, omega)'''
    n, alpha, l = params.n, params.alpha, component.l
    gamma_ = t_exponent(params)
    rule = build_zonal_rule(
        n, split, dv_beta(component.a + alpha - 1.0), radius=support,
    )
    e1 = unit(n)
    zy = zonal(l, rule.nodes, e1) / dim_harmonic(n, l)
    scale = c_alpha(n, alpha)
    return np.array([
        scale * integrate(rule, lambda Y: zy * bracket(rho * e1, Y) ** -gamma_)
        for rho in np.asarray(radii, dtype=float)
    ])

def _directions(X):
    X = np.asarray(X, dtype=float)
    r = np.sqrt(np.sum(X * X, axis=-1))
    safe = np.where(r > 0, r, 1.0)
    directions = X / safe[..., None]
    return np.where((r > 0)[..., None], directions, unit(X.shape[-1])), r

def t_image(params: Params, f: TestFunction, X, radii=None, split=T_SPLIT):
    '''T f at the points X (one profile per distinct radius)'''
    X = np.atleast_2d(np.asarray(X, dtype=float))
    directions, r = _directions(X)
    radii = r if radii is None else np.asarray(radii, dtype=float)
    unique, inverse = np.unique(radii, return_inverse=True)
    total = np.zeros(len(X))
    for c in f.components:
        profile = t_profile(params, c, unique, f.support, split)
        total += c.coef * profile[inverse] * zonal(c.l, directions, c.omega)
    return total

@dispatch(Params, TestFunction, object)
def apply_T(params, f, x, rule=None):
    '''T_k^alpha f(x)

    >>> from bergnorm.zonal import params
    >>> pr = params(2, 1, 2)
    >>> round(apply_T(pr, lambda Y: np.ones(len(Y)), np.zeros(2)), 10)
    1.0
    >>> abs(apply_T(pr, zonal_function(2, 0, a=1.0), np.zeros(2)) - 0.5) < 1e-10
    True
    '''
    return float(t_image(params, f, np.asarray(x, dtype=float)[None])[0])

@dispatch(Params, object, object)  # noqa
def apply_T(params, f, x, rule=None):
    rule = rule or build_ball_rule(params.n, NORM_SPLIT, dv_alpha(params.alpha))
    require_measure(rule, 'weighted_dv_alpha', params.alpha)
    x = np.asarray(x, dtype=float)
    require(float(x @ x) < 1, f'T needs |x| < 1, got {x.tolist()}')
    exponent = t_exponent(params)
    return integrate(rule, lambda Y: f(Y) * bracket(x, Y) ** -exponent)

def besov_rule(params: Params, split=NORM_SPLIT, radius: float = 1.0):
    '''Ball rule for dv_{pm-n}'''
    return build_ball_rule(
        params.n, split, dv_beta(params.besov_exponent), radius=radius,
    )

def t_norm(params: Params, f: TestFunction, rule=None, split=T_SPLIT):
    '''||T f||_{L^p(dv_{pm-n})}'''
    params.require_besov()
    rule = rule or besov_rule(params)
    require_measure(rule, 'weighted_dv_beta', params.besov_exponent)
    values = t_image(params, f, rule.nodes, rule.radii, split)
    return lp_norm(rule, lambda X: values, params.p)

def t_quotient(params: Params, f: TestFunction, norm_split=NORM_SPLIT,
               t_split=T_SPLIT) -> float:
    return (
        t_norm(params, f, besov_rule(params, norm_split), t_split)
        / tau_norm(f, params.p, norm_split)
    )

def tau_monotonicity(params: Params, f: TestFunction, radius: float = 0.9,
                     split=NORM_SPLIT):
    '''||T f||_{L^p(rB, dv_{pm-n})} <= ||T f||_{L^p(rB, dtau)}

    >>> from bergnorm.zonal import params
    >>> tau_monotonicity(params(2, 1, 2), zonal_function(2, 0, a=2.0))['holds']
    True
    '''
    require(0 < radius < 1, f'radius must be in (0, 1), got {radius}')
    values = {}
    for name, rule in (
            ('weighted', besov_rule(params, split, radius)),
            ('tau', build_ball_rule(params.n, split, TAU, radius=radius))):
        image = t_image(params, f, rule.nodes, rule.radii)
        values[name] = lp_norm(rule, lambda X: image, params.p)
    return pmap(dict(values, radius=radius,
                     holds=values['weighted'] <= values['tau']))

# ----------------------------------------------------------------------
#
# P_alpha
#
# ----------------------------------------------------------------------

def projection_multiplier(params: Params, a: float, l: int,
                          radius: float = 1.0) -> float:
    '''P_alpha[(1 - |y|^2)^a Z_l(y, w) 1_{|y| < radius}] / Z_l(x, w)

    Reduces to Gamma(l + n/2 + alpha) Gamma(a + alpha)
    / (Gamma(alpha) Gamma(a + alpha + l + n/2)) on the whole ball.

    >>> from bergnorm.zonal import params
    >>> pr = params(2, 1, 2)
    >>> abs(projection_multiplier(pr, 1.0, 1, 0.999999) - projection_multiplier(pr, 1.0, 1)) < 1e-6
    True
    '''
    n, alpha = params.n, params.alpha
    if radius >= 1:
        return multiplier(n, alpha, a, l)
    b = l + n / 2
    t = radius * radius
    coefficient = series_coefficient(n, alpha, l)
    incomplete = t ** b / b * f21(b, 1.0 - (a + alpha), b + 1.0, t)
    return coefficient * c_alpha(n, alpha) * n * ball_volume(n) * incomplete / 2

def p_image(params: Params, f: TestFunction) -> TestFunction:
    '''P_alpha f as a harmonic TestFunction'''
    return TestFunction(
        kind='harmonic', n=f.n, label=f'P[{f.label}]',
        components=pvector(
            c.set(
                coef=c.coef * projection_multiplier(params, c.a, c.l, f.support),
                a=0.0,
            )
            for c in f.components
        ),
    )

def harmonic_partials(g: TestFunction) -> Callable:
    '''(k, X) -> d^k g(X) for a harmonic TestFunction'''
    require(
        all(c.a == 0 for c in g.components) and g.support >= 1,
        f'{g.label} is not a harmonic polynomial',
    )

    def partials(k, X):
        return sum(
            (c.coef * np.asarray(zonal_partial(c.l, k, X, c.omega))
             for c in g.components),
            np.zeros(np.shape(X)[:-1]),
        )
    return partials

def _chunked(func: Callable, size: int = CHUNK) -> Callable:
    def evaluate(Y):
        return np.concatenate([
            np.atleast_1d(func(Y[i:i + size])) for i in range(0, len(Y), size)
        ]) if len(Y) else np.zeros(0)
    return evaluate

def projection_rule(params: Params, split=P_SPLIT):
    return build_ball_rule(params.n, split, dv_alpha(params.alpha))

@dispatch(Params, TestFunction, object)
def apply_P(params, f, x, series=None, rule=None):
    '''P_alpha f(x)

    >>> from bergnorm.zonal import params
    >>> pr = params(2, 1, 2)
    >>> g = zonal_function(2, 2)
    >>> x = np.array([0.3, -0.2])
    >>> abs(apply_P(pr, g, x) - zonal(2, x, unit(2))) < 1e-12
    True
    '''
    g = p_image(params, f)
    return float(g(np.asarray(x, dtype=float)[None])[0])

@dispatch(Params, object, object)  # noqa
def apply_P(params, f, x, series=None, rule=None):
    series = series or kernel_series(params)
    rule = rule or projection_rule(params)
    require_measure(rule, 'weighted_dv_alpha', params.alpha)
    x = np.asarray(x, dtype=float)
    return integrate(
        rule, _chunked(lambda Y: bergman_kernel(series, x, Y) * f(Y)),
    )

def apply_P_partial(params: Params, f: Callable, k: Sequence[int], x,
                    series=None, rule=None) -> float:
    '''d^k P_alpha f(x) with the derivative taken under the integral'''
    series = series or kernel_series(params)
    rule = rule or projection_rule(params)
    require_measure(rule, 'weighted_dv_alpha', params.alpha)
    x = np.asarray(x, dtype=float)
    return integrate(
        rule, _chunked(lambda Y: kernel_partial(series, k, x, Y) * f(Y)),
    )

def finite_difference_partial(func: Callable, k: Sequence[int], x,
                              h: float = 1e-3) -> float:
    '''Central-difference d^k func(x), one axis at a time

    >>> round(finite_difference_partial(lambda X: X[:, 0] ** 2 * X[:, 1], (2, 1), [0.1, 0.2]), 8)
    2.0
    '''
    x = np.asarray(x, dtype=float)
    points, weights = [x], [1.0]
    for axis, order in enumerate(k):
        for _ in range(order):
            step = np.zeros_like(x)
            step[axis] = h
            points, weights = (
                [q + s for q in points for s in (step, -step)],
                [w * sign / (2 * h) for w in weights for sign in (1, -1)],
            )
    values = np.asarray(func(np.array(points)), dtype=float)
    return float(math.fsum((np.array(weights) * values).tolist()))

@dispatch(Params, TestFunction)
def besov_norm_of_image(params, f, series=None, rule=None, aggregation='l1'):
    '''Besov seminorm of P_alpha f

    For TestFunctions the image is an exact harmonic polynomial. Other
    callables go through kernel_partial under the integral; their rule
    must stay where the kernel series resolves |x||y|.

    >>> from bergnorm.zonal import params
    >>> besov_norm_of_image(params(2, 1, 2), zonal_function(2, 0))
    0.0
    '''
    rule = rule or besov_rule(params)
    return besov_seminorm(
        params, harmonic_partials(p_image(params, f)), rule, aggregation,
    )

@dispatch(Params, object)  # noqa
def besov_norm_of_image(params, f, series=None, rule=None, aggregation='l1'):
    series = series or kernel_series(params)
    outer = rule or besov_rule(params, OUTER_SPLIT, radius=0.5)
    reach = max_product(series, params.m)
    require(
        outer.radius < reach,
        f'outer radius {outer.radius:g} beyond the resolvable {reach:.4f}',
    )
    inner = projection_rule(params)
    values = node_values(inner, f)

    def partials(k, X):
        return np.array([
            integrate(inner, lambda Y: kernel_partial(series, k, x, Y) * values)
            for x in X
        ])
    return besov_seminorm(params, partials, outer, aggregation)

def dirichlet_inner_product(f_partials: Callable, g_partials: Callable,
                            params: Params, rule=None) -> float:
    '''sum_{|k| = m} int (1 - |x|^2)^(2m) d^k f d^k g dtau

    >>> from bergnorm.zonal import params
    >>> pr = params(2, 1, 2)
    >>> f = harmonic_partials(zonal_function(2, 1))
    >>> g = harmonic_partials(zonal_function(2, 2))
    >>> abs(dirichlet_inner_product(f, g, pr)) < 1e-10
    True
    '''
    n, m = params.n, params.m
    exponent = 2 * m - n
    rule = rule or build_ball_rule(n, NORM_SPLIT, dv_beta(exponent))
    require_measure(rule, 'weighted_dv_beta', exponent)
    return integrate(rule, lambda X: sum(
        np.asarray(f_partials(k, X)) * np.asarray(g_partials(k, X))
        for k in multi_indices(n, m)
    ))

def p_quotient(params: Params, f: TestFunction, split=NORM_SPLIT,
               aggregation='l1') -> float:
    return (
        besov_norm_of_image(
            params, f, rule=besov_rule(params, split), aggregation=aggregation,
        )
        / tau_norm(f, params.p, split)
    )

# ----------------------------------------------------------------------
#
# Norm brackets
#
# ----------------------------------------------------------------------

class NormBracket(PClass):
    operator = field(
        type=str, mandatory=True,
        invariant=lambda v: (v in ('T', 'P'), f'unknown operator {v}'),
    )
    params = field(type=Params, mandatory=True)
    lower_paper = field(mandatory=True)
    lower_empirical = field(type=float, factory=float, mandatory=True)
    lower_margined = field(type=float, factory=float, mandatory=True)
    upper_paper = field(mandatory=True)
    trials = field(type=int, mandatory=True)
    best_witness = field(initial=Null)
    witnesses = field(initial=pvector())
    quad_error_est = field(type=float, factory=float, initial=0.0)
    conjecture_ratio = field(initial=None)
    findings = field(initial=pvector())
    extras = field(initial=pmap())

    __invariant__ = lambda r: (
        r.lower_margined <= r.lower_empirical,
        'margined lower bound must not exceed the raw one',
    )

    def report(self):
        return no_pyrsistent(pmap({
            'operator': self.operator,
            'params': self.params.row(),
            'lower_paper': self.lower_paper,
            'lower_empirical': self.lower_empirical,
            'lower_margined': self.lower_margined,
            'upper_paper': self.upper_paper,
            'trials': self.trials,
            'witnesses': self.witnesses,
            'best_witness': maybe(self.best_witness, None),
            'quad_error_est': self.quad_error_est,
            'conjecture_ratio': self.conjecture_ratio,
            'findings': self.findings,
        }).update(self.extras))

def _variants(report):
    return pmap({v: report.value(v) for v in VARIANTS})

def _witness_rows(candidates, quotients):
    return pvector(
        pmap({'id': i, 'label': f.label, 'quotient': q})
        for i, (f, q) in enumerate(zip(candidates, quotients))
    )

def _best(candidates, quotients):
    i = max(range(len(quotients)), key=lambda v: (quotients[v], -v))
    return i, candidates[i], quotients[i]

def _sandwich_rows(lower, upper, certified_upper=True):
    rows = []
    for variant, value in upper.items():
        if lower > value:
            rows.append(pmap({
                'kind': 'sandwich', 'variant': variant,
                'lower_empirical': lower, 'upper': value,
                'certified_upper': certified_upper,
            }))
            log.warning(
                f'empirical lower bound {lower:.6g} exceeds the {variant}'
                f' upper constant {value:.6g}'
            )
    return rows

def _refinement_error(label, lower, refined):
    error = abs(refined - lower)
    if error > REFINEMENT_TOL * abs(lower):
        log.warning(
            f'{label}: refined rule moves the best quotient from'
            f' {lower:.6g} to {refined:.6g}'
        )
    return error

def _quotients(quotient, candidates, workers):
    return tuple(parallel_map('thread', workers)(quotient, candidates))

def bracket_T_norm(params: Params, trials: int = 100,
                   seed: int = DEFAULT_SEED, workers: int = 1,
                   norm_split=NORM_SPLIT, t_split=T_SPLIT) -> NormBracket:
    '''A <= ||T_k^alpha|| <= D against explicit witnesses

    Candidates are psi_k and `trials` seeded random_smooth functions.

    '''
    params.require_besov()
    candidates = (psi_k(params),) + random_candidates(params, trials, seed)
    quotients = _quotients(
        lambda f: t_quotient(params, f, norm_split, t_split),
        candidates, workers,
    )
    i, best, lower = _best(candidates, quotients)
    refined = t_quotient(params, best, norm_split.refined(), t_split.refined())
    error = _refinement_error('T bracket', lower, refined)
    A = lower_constant_T(params)
    D, _ = schur_upper_constant(params)
    upper = _variants(D)
    findings = _sandwich_rows(lower, upper) + [
        row.set('kind', 'constants')
        for row in sandwich_findings((A, D)) if not row['consistent']
    ]
    return NormBracket(
        operator='T', params=params, lower_paper=_variants(A),
        lower_empirical=lower, lower_margined=lower - error,
        upper_paper=upper, trials=trials, best_witness=best.descriptor(),
        witnesses=_witness_rows(candidates, quotients),
        quad_error_est=error, findings=pvector(findings),
        extras=pmap({'psi_k_quotient': quotients[0]}),
    )

def bracket_P_norm(params: Params, trials: int = 100,
                   seed: int = DEFAULT_SEED, workers: int = 1,
                   norm_split=NORM_SPLIT, growth_samples=GROWTH_SAMPLES,
                   series=None) -> NormBracket:
    '''B <= ||P_alpha|| <= C_alpha^m C(m+n-1, m) D against witnesses

    The upper constant uses a sampled C_alpha^m, itself a lower estimate,
    so the upper values are not certified.

    '''
    params.require_besov()
    n, m = params.n, params.m
    fm = f_m(params)
    candidates = (fm,) + random_candidates(params, trials, seed, min_degree=m)
    quotients = _quotients(
        lambda f: p_quotient(params, f, norm_split), candidates, workers,
    )
    i, best, lower = _best(candidates, quotients)
    error = _refinement_error(
        'P bracket', lower, p_quotient(params, best, norm_split.refined()),
    )
    B, _ = lower_constant_P(params)
    D, _ = schur_upper_constant(params)
    series = series or kernel_series(params)
    growth = estimate_growth_constant(
        series, m, growth_sampler(samples=growth_samples, seed=seed),
    )
    factor = growth.empirical_value * binomial(m + n - 1, m)
    upper = pmap({v: factor * value for v, value in _variants(D).items()})
    rule = besov_rule(params, norm_split)
    displayed_fm = f_m(params, 'displayed')
    measured = {
        aggregation: besov_norm_of_image(
            params, displayed_fm, rule=rule, aggregation=aggregation,
        )
        for aggregation in ('l1', 'signed')
    }
    factors = proof_value_factors(params)
    fm_check = pmap({
        'measured_l1': measured['l1'],
        'measured_signed': measured['signed'],
        'proof_value': B.proof_assembled,
        'ratio': measured['l1'] / B.proof_assembled,
        'explained_ratio': factors['total'],
        'sigma_factor': factors['sigma'],
        'radial_n_factor': factors['radial_n'],
        'measured_exact': besov_norm_of_image(params, fm, rule=rule),
        'certified': B.certified,
    })
    return NormBracket(
        operator='P', params=params, lower_paper=_variants(B),
        lower_empirical=lower, lower_margined=lower - error,
        upper_paper=upper, trials=trials, best_witness=best.descriptor(),
        witnesses=_witness_rows(candidates, quotients),
        quad_error_est=error,
        conjecture_ratio=lower / conjecture_denominator(params),
        findings=pvector(_sandwich_rows(lower, upper, certified_upper=False)),
        extras=pmap({
            'growth_constant': growth.empirical_value,
            'f_m_check': fm_check,
        }),
    )

# ----------------------------------------------------------------------
#
# Probes
#
# ----------------------------------------------------------------------

def schur_check(params: Params, j: int, points: Sequence[float],
                split=T_SPLIT):
    '''Both Schur-test inequalities with h_j, as LHS / RHS ratios

    Points are radii |x| (first inequality) and |y| (second). A point
    outside the support of h_j has RHS = 0 and ratio inf.

    '''
    n, a, m, p, q = params.n, params.alpha, params.m, params.p, params.q
    c = schur_exponent(params)
    support = 1.0 / math.sqrt(j)
    gamma_ = t_exponent(params)
    jj = j / (j - 1.0)
    C1, _ = lemma1_constants(n, p * c + a, -p * c + m)
    C2, _ = lemma1_constants(n, q * c - n + 1, -q * c + n + m + a - 1)
    first_rule = build_zonal_rule(n, split, dv_beta(p * c + a - 1), support)
    second_rule = build_zonal_rule(n, split, dv_beta(q * c - n), support)
    e1 = unit(n)

    def ratio(lhs, rhs):
        return lhs / rhs if rhs > 0 else math.inf

    rows = []
    for r in points:
        require(0 <= r < 1, f'Schur check needs |x| < 1, got {r}')
        h = (1 - r * r) ** c if r < support else 0.0
        lhs1 = integrate(first_rule, lambda X: bracket(r * e1, X) ** -gamma_)
        lhs2 = (1 - r * r) ** (n + a - 1) * integrate(
            second_rule, lambda X: bracket(r * e1, X) ** -gamma_,
        )
        rows.append(pmap({
            'r': float(r),
            'first_ratio': ratio(lhs1, jj ** (p * c) * C1 * h ** p),
            'second_ratio': ratio(lhs2, jj ** (q * c) * C2 * h ** q),
        }))
    return pvector(rows)

def comparability_probe(params: Params, m2: int, candidates=None,
                        trials: int = 8, seed: int = DEFAULT_SEED,
                        split=NORM_SPLIT, band=(1e-3, 1e3)):
    '''Besov seminorms of P_alpha f at orders m < m2, and their ratio'''
    require(m2 > params.m, f'm2 = {m2} must exceed m = {params.m}')
    high = params.with_m(m2)
    candidates = candidates or random_candidates(
        high, trials, seed, min_degree=m2,
    )
    lo_rule, hi_rule = besov_rule(params, split), besov_rule(high, split)
    rows = []
    for f in candidates:
        a = besov_norm_of_image(params, f, rule=lo_rule)
        b = besov_norm_of_image(high, f, rule=hi_rule)
        ratio = b / a if a > 0 else math.inf
        rows.append(pmap({
            'label': f.label, 'seminorm_m': a, 'seminorm_m2': b,
            'ratio': ratio, 'within': band[0] <= ratio <= band[1],
        }))
    return pvector(rows)

def boundedness_probe(params: Params, levels: Sequence[float] = (2.0, 1.0, 0.5, 0.25),
                      per_level: int = 50, seed: int = DEFAULT_SEED,
                      split=NORM_SPLIT, cap: float = None):
    '''Max P_alpha Rayleigh quotient as the candidate decay margin shrinks

    Level e draws components with a = (n - 1)/p + e, degrees m..m+2.
    The cap defaults to C(m+n-1, m) times the assembled D, scaled by a
    sampled C_alpha^m.

    '''
    n, m, p = params.n, params.m, params.p
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if cap is None:
        growth = estimate_growth_constant(
            kernel_series(params), m, growth_sampler(seed=seed),
        )
        D, _ = schur_upper_constant(params)
        cap = growth.empirical_value * binomial(m + n - 1, m) * D.proof_assembled
    rows = []
    for margin in levels:
        best = 0.0
        for i in range(per_level):
            f = random_smooth(params, rng, i, min_degree=m)
            f = f.set(components=pvector(
                c.set(a=(n - 1) / p + margin) for c in f.components
            ))
            best = max(best, p_quotient(params, f, split))
        rows.append(pmap({'margin': margin, 'max_quotient': best}))
    return pmap({
        'cap': cap,
        'levels': pvector(rows),
        'bounded': all(r['max_quotient'] <= cap for r in rows),
    })
