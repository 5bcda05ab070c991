'''The integral

    I_{alpha,s}(x) = int_B (1 - |y|^2)^(alpha - 1) [x, y]^-(n + alpha + s - 1) dv(y)

in closed form (a Gauss hypergeometric function of |x|^2) and by
quadrature, its extrema over the ball, the sphere identity for
|x - xi|^-c and a probe of its growth as |x| -> 1.

'''
import math
import logging
import itertools
from typing import Iterable, Sequence

import numpy as np
from pyrsistent import PClass, field, pvector

from .common import checked, require
from .specfun import f21, gamma_ratio, gauss_value, DEFAULT_SERIES
from .quadrature import (
    RadialSplit, radial_split, build_zonal_rule, integrate, dv_beta,
    SPHERE_SIGMA, require_measure,
)
from .kernels import bracket
from .parallel import pmap

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

I_SPLIT = radial_split(radial_order=120, sphere_order=64)
SPHERE_SPLIT = radial_split(radial_order=4, sphere_order=128)
ASYMPTOTIC_SPLIT = radial_split(radial_order=160, sphere_order=160,
                                clustering=4.0)
ASYMPTOTIC_LEVELS = tuple(range(3, 11))

class IArgs(PClass):
    n = field(
        type=int, initial=2,
        invariant=lambda v: (v >= 2, 'n must be >= 2'),
    )
    alpha = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v > 0, 'alpha must be > 0'),
    )
    s = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v < 0, 's must be < 0'),
    )
    x_abs = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (0 <= v <= 1, 'x_abs must be in [0, 1]'),
    )
    __invariant__ = lambda r: (r.s + r.alpha > -1, 's + alpha must be > -1')

def i_args(n, alpha, s, x_abs):
    '''Validated IArgs

    >>> i_args(2, 0.5, -1.5, 0.3)
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: IArgs: ('s + alpha must be > -1',)
    '''
    return checked(IArgs)(n=n, alpha=alpha, s=s, x_abs=x_abs)

def i_hypergeometric_parameters(n, alpha, s):
    return (
        (n + alpha + s - 1) / 2.0,
        (alpha + s + 1) / 2.0,
        alpha + n / 2.0,
    )

def i_prefactor(n, alpha):
    '''pi^(n/2) Gamma(alpha) / Gamma(n/2 + alpha), the value at x = 0'''
    return math.pi ** (n / 2) * gamma_ratio([alpha], [n / 2 + alpha])

def i_closed_form(args: IArgs, ctl=DEFAULT_SERIES) -> float:
    '''Prefactor times 2F1 at t = |x|^2; the limit value at |x| = 1

    >>> round(i_closed_form(i_args(2, 1, -1, 0.0)), 12) == round(math.pi, 12)
    True
    >>> round(i_closed_form(i_args(2, 1, -1, 1.0)), 10)
    4.0
    '''
    a, b, c = i_hypergeometric_parameters(args.n, args.alpha, args.s)
    return i_prefactor(args.n, args.alpha) * f21(a, b, c, args.x_abs ** 2, ctl)

def i_rule(n: int, alpha: float, split: RadialSplit = I_SPLIT):
    '''Zonal rule carrying the (1 - |y|^2)^(alpha - 1) weight'''
    return build_zonal_rule(n, split, dv_beta(alpha - 1.0))

def i_integral(n: int, alpha: float, s: float, x_abs: float, rule=None):
    '''I_{alpha,s}(x_abs e_1) by quadrature, for any real s'''
    require(0 <= x_abs < 1, f'quadrature needs |x| < 1, got {x_abs}')
    rule = rule or i_rule(n, alpha)
    require_measure(rule, 'weighted_dv_beta', alpha - 1.0)
    x = np.zeros(n)
    x[0] = x_abs
    exponent = n + alpha + s - 1
    return integrate(rule, lambda Y: bracket(x, Y) ** -exponent)

def i_quadrature(args: IArgs, rule=None) -> float:
    '''Quadrature value of I_{alpha,s}; x sits on e_1 by symmetry

    >>> args = i_args(2, 1, -1, 0.3)
    >>> abs(i_quadrature(args) / i_closed_form(args) - 1) < 1e-6
    True
    '''
    return i_integral(args.n, args.alpha, args.s, args.x_abs, rule)

def lemma1_constants(n: int, alpha: float, s: float):
    '''(max, min) of I_{alpha,s} over the ball

    max = C(alpha, s) = pi^(n/2) Gamma(alpha) Gamma(-s)
          / (Gamma((alpha - s + 1)/2) Gamma((n + alpha - s - 1)/2)),
    reached as |x| -> 1; min = pi^(n/2) Gamma(alpha) / Gamma(n/2 + alpha)
    at x = 0.

    >>> hi, lo = lemma1_constants(2, 1, -1)
    >>> round(hi, 10), round(lo / math.pi, 12)
    (4.0, 1.0)
    >>> lemma1_constants(2, 1, 0.5)
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: IArgs: ('s must be < 0',)
    '''
    i_args(n, alpha, s, 0.0)
    high = math.pi ** (n / 2) * gamma_ratio(
        [alpha, -s], [(alpha - s + 1) / 2, (n + alpha - s - 1) / 2],
    )
    return high, i_prefactor(n, alpha)

def gauss_consistency(n: int, alpha: float, s: float) -> float:
    '''Relative gap between C(alpha, s) and prefactor x Gauss value'''
    high, _ = lemma1_constants(n, alpha, s)
    a, b, c = i_hypergeometric_parameters(n, alpha, s)
    return abs(i_prefactor(n, alpha) * gauss_value(a, b, c) / high - 1.0)

# ----------------------------------------------------------------------
#
# Sphere identity
#
# ----------------------------------------------------------------------

def sphere_rule(n: int, split: RadialSplit = SPHERE_SPLIT):
    return build_zonal_rule(n, split, SPHERE_SIGMA)

def sphere_mean(n: int, c: float, x_abs: float, rule=None) -> float:
    '''int_S |x - xi|^-c dsigma(xi) with x = x_abs e_1'''
    require(0 <= x_abs < 1, f'sphere identity needs |x| < 1, got {x_abs}')
    rule = rule or sphere_rule(n)
    require_measure(rule, 'sphere_sigma')
    x = np.zeros(n)
    x[0] = x_abs
    return integrate(
        rule, lambda Y: np.linalg.norm(Y - x, axis=-1) ** -c,
    )

def sphere_identity_check(n: int, c: float, x_abs: float, rule=None):
    '''|int_S |x - xi|^-c dsigma - 2F1(c/2, (c - n)/2 + 1; n/2; |x|^2)|

    >>> sphere_identity_check(3, 1.0, 0.0) < 1e-14
    True
    >>> sphere_identity_check(3, 1.0, 0.6) < 1e-8
    True
    '''
    closed = f21(c / 2, (c - n) / 2 + 1, n / 2, x_abs ** 2)
    return abs(sphere_mean(n, c, x_abs, rule) - closed)

# ----------------------------------------------------------------------
#
# Growth near the boundary
#
# ----------------------------------------------------------------------

ASYMPTOTIC_CLASSES = ('bounded', 'logarithmic', 'power')
EXPONENT_BAND = 0.25

class AsymptoticsReport(PClass):
    classification = field(
        type=str, mandatory=True,
        invariant=lambda v: (
            v in ASYMPTOTIC_CLASSES, f'unknown asymptotic class {v}'
        ),
    )
    exponent = field(type=float, factory=float, mandatory=True)
    fit_error = field(type=float, factory=float, mandatory=True)
    samples = field(initial=pvector())

def _line_fit(xs, ys):
    A = np.column_stack([np.ones(len(xs)), xs])
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - A @ coef
    return coef, float(np.sqrt(np.mean(resid ** 2)))

def asymptotics_probe(n: int, alpha: float, s: float,
                      levels: Sequence[int] = ASYMPTOTIC_LEVELS, rule=None):
    '''Classify I_{alpha,s}(x) as |x| -> 1 along 1 - |x|^2 = 2^-k

    Least squares on log-transformed increments of I between
    consecutive levels: their slope per halving is ~ s (power growth
    when s > 0, constant for logarithmic growth, decay when I stays
    bounded). Power classes carry the exponent fitted to log I.

    '''
    require(alpha > 0, f'asymptotics probe needs alpha > 0, got {alpha}')
    rule = rule or i_rule(n, alpha, ASYMPTOTIC_SPLIT)
    ts = np.array([2.0 ** -k for k in levels])
    values = np.array([
        i_integral(n, alpha, s, math.sqrt(1.0 - t), rule) for t in ts
    ])
    L = -np.log(ts)
    increments = np.diff(values)
    samples = pvector(zip(ts.tolist(), values.tolist()))
    if np.any(increments <= 0):
        _, err = _line_fit(L, values / values[-1])
        return AsymptoticsReport(
            classification='bounded', exponent=0.0, fit_error=err,
            samples=samples,
        )
    (_, slope), err = _line_fit(L[1:], np.log(increments))
    if slope < -EXPONENT_BAND:
        classification, exponent = 'bounded', slope
    elif slope <= EXPONENT_BAND:
        classification, exponent = 'logarithmic', slope
    else:
        (_, exponent), err = _line_fit(L, np.log(values))
        classification = 'power'
    log.debug(
        f'I_(alpha={alpha}, s={s}) near the boundary: {classification}'
        f' (exponent {exponent:.4f}, fit error {err:.2e})'
    )
    return AsymptoticsReport(
        classification=classification, exponent=exponent, fit_error=err,
        samples=samples,
    )

# ----------------------------------------------------------------------
#
# Sweeps
#
# ----------------------------------------------------------------------

DEFAULT_I_GRID = pvector([
    (alpha, s, x)
    for alpha, s, x in itertools.product(
        (0.5, 1.0, 2.0), (-0.5, -1.5), (0.0, 0.3, 0.7, 0.95),
    )
])

def admissible(alpha, s):
    return s < 0 and s + alpha > -1

def i_sweep(n: int, grid: Iterable = DEFAULT_I_GRID, split=I_SPLIT,
            workers: int = 1):
    '''Rows (n, alpha, s, x, closed, quad, rel_err); inadmissible grid
    points (s + alpha <= -1) are skipped

    '''
    grid = tuple(grid)
    points = [(alpha, s, x) for alpha, s, x in grid if admissible(alpha, s)]
    skipped = len(grid) - len(points)
    if skipped:
        log.info(f'i_sweep: skipped {skipped} points with s + alpha <= -1')
    rules = {alpha: i_rule(n, alpha, split) for alpha, _, _ in points}

    def row(point):
        alpha, s, x = point
        args = i_args(n, alpha, s, x)
        closed = i_closed_form(args)
        quad = i_quadrature(args, rules[alpha])
        return {
            'n': n, 'alpha': alpha, 's': s, 'x': x, 'closed': closed,
            'quad': quad, 'rel_err': abs(quad - closed) / abs(closed),
        }

    return tuple(pmap('thread', workers)(row, points))
