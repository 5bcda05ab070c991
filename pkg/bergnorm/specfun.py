'''Scalar special functions: log-gamma, Pochhammer symbols, binomials and
the Gauss hypergeometric function 2F1 on [0, 1]

Every Gamma-heavy expression in the package goes through
gamma_ratio, which works in log space and exponentiates once.

'''
import math
import logging
from typing import Sequence

from pyrsistent import PClass, field, pmap

from .common import (
    Accumulator, DomainError, TruncationError, checked, require,
    is_int_like, is_nonpositive_int,
)

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

# ----------------------------------------------------------------------
#
# Gamma function family
#
# ----------------------------------------------------------------------

LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)

def _lanczos_log_gamma(x):
    x -= 1.0
    acc = Accumulator(LANCZOS_COEFFICIENTS[0])
    for i, coefficient in enumerate(LANCZOS_COEFFICIENTS[1:], 1):
        acc.add(coefficient / (x + i))
    t = x + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc.total)

def log_gamma(x: float) -> float:
    '''log Gamma(x) for x > 0 (Lanczos, g = 7)

    >>> abs(log_gamma(1.0)) < 1e-14, abs(log_gamma(2.0)) < 1e-14
    (True, True)
    >>> round(log_gamma(3.5), 10) == round(math.log(15 * math.sqrt(math.pi) / 8), 10)
    True
    >>> log_gamma(0)
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: log_gamma needs x > 0, got 0
    '''
    require(x > 0, f'log_gamma needs x > 0, got {x}')
    if x < 0.5:
        return _lanczos_log_gamma(x + 1.0) - math.log(x)
    return _lanczos_log_gamma(x)

def gamma_sign_log(x: float):
    '''(log|Gamma(x)|, sign Gamma(x)) for any x that is not a pole

    >>> l, s = gamma_sign_log(-0.5)
    >>> s, round(math.exp(l), 12) == round(2 * math.sqrt(math.pi), 12)
    (-1, True)
    '''
    if x > 0:
        return log_gamma(x), 1
    require(not is_int_like(x), f'Gamma has a pole at {x}')
    sine = math.sin(math.pi * x)
    return (
        math.log(math.pi) - math.log(abs(sine)) - log_gamma(1.0 - x),
        1 if sine > 0 else -1,
    )

def gamma(x: float) -> float:
    lg, sign = gamma_sign_log(x)
    return sign * math.exp(lg)

def rgamma(x: float) -> float:
    '''1/Gamma(x), zero at the poles

    >>> rgamma(0), rgamma(-3), rgamma(1)
    (0.0, 0.0, 1.0)
    '''
    if is_nonpositive_int(x):
        return 0.0
    lg, sign = gamma_sign_log(x)
    return sign * math.exp(-lg)

def gamma_ratio(numerators: Sequence[float],
                denominators: Sequence[float] = ()) -> float:
    '''prod Gamma(numerators) / prod Gamma(denominators)

    Poles in the denominator make the ratio zero; poles in the numerator
    are a DomainError.

    >>> round(gamma_ratio([3, 1], [2, 2]), 12)
    2.0
    >>> gamma_ratio([1.5], [-1])
    0.0
    '''
    if any(is_nonpositive_int(d) for d in denominators):
        return 0.0
    total, sign = 0.0, 1
    for x in numerators:
        lg, s = gamma_sign_log(x)
        total, sign = total + lg, sign * s
    for x in denominators:
        lg, s = gamma_sign_log(x)
        total, sign = total - lg, sign * s
    return sign * math.exp(total)

def log_gamma_ratio(numerators, denominators=()) -> float:
    '''log of a positive Gamma ratio (all arguments positive)

    '''
    return (
        math.fsum(log_gamma(x) for x in numerators)
        - math.fsum(log_gamma(x) for x in denominators)
    )

def pochhammer(a: float, n: int) -> float:
    '''Shifted factorial (a)_n = a (a + 1) ... (a + n - 1)

    >>> pochhammer(7.3, 0), pochhammer(1, 4), pochhammer(0.5, 2)
    (1.0, 24.0, 0.75)
    '''
    require(n >= 0, f'pochhammer needs n >= 0, got {n}')
    return math.prod((a + i for i in range(n)), start=1.0)

def binomial(a: int, b: int) -> int:
    '''C(a, b) with C(a, b) = 0 when b < 0 or a < b

    >>> binomial(5, 2), binomial(1, 2), binomial(-1, 1)
    (10, 0, 0)
    '''
    if b < 0 or a < b or a < 0:
        return 0
    return math.comb(a, b)

# ----------------------------------------------------------------------
#
# Hypergeometric 2F1
#
# ----------------------------------------------------------------------

NEAR_ONE = 0.95
INTEGER_GAP = 1e-9
C_PERTURBATION = 1e-5

class SeriesControl(PClass):
    max_terms = field(
        type=int, mandatory=True,
        invariant=lambda v: (v >= 1, 'max_terms must be >= 1'),
    )
    rel_tol = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (0 < v < 1, 'rel_tol must be in (0, 1)'),
    )

DEFAULT_SERIES = SeriesControl(max_terms=100_000, rel_tol=1e-16)

def series_control(max_terms=100_000, rel_tol=1e-16):
    return checked(SeriesControl)(max_terms=max_terms, rel_tol=rel_tol)

class Hyp2F1Args(PClass):
    a = field(type=float, factory=float, mandatory=True)
    b = field(type=float, factory=float, mandatory=True)
    c = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (
            not is_nonpositive_int(v), 'c must not be 0 or a negative integer'
        ),
    )
    t = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (0 <= v <= 1, 't must be in [0, 1]'),
    )
    __invariant__ = lambda r: (
        r.t < 1 or r.c - r.a - r.b > 0,
        'the series diverges at t = 1 unless c - a - b > 0',
    )

@checked
def hyp2f1_args(a, b, c, t):
    return Hyp2F1Args(a=a, b=b, c=c, t=t)

def _is_polynomial(a, b):
    return is_nonpositive_int(a) or is_nonpositive_int(b)

def _direct_series(a, b, c, t, ctl):
    acc = Accumulator(1.0)
    term = 1.0
    for i in range(ctl.max_terms):
        term *= (a + i) * (b + i) / ((c + i) * (i + 1)) * t
        acc.add(term)
        if term == 0.0 or abs(term) <= ctl.rel_tol * abs(acc.total):
            return acc.total
    raise TruncationError(
        f'2F1({a}, {b}; {c}; {t}) did not converge in'
        f' {ctl.max_terms} terms (last increment {term:.3e})',
        last_increment=term,
    )

def _near_one(a, b, c, t, ctl):
    s = c - a - b
    if is_int_like(s, INTEGER_GAP):
        log.debug(f'2F1 near one with integer c-a-b={s}: perturbing c')
        return 0.5 * (
            _near_one(a, b, c + C_PERTURBATION, t, ctl)
            + _near_one(a, b, c - C_PERTURBATION, t, ctl)
        )
    if s < 0:
        return (1.0 - t) ** s * _near_one(c - a, c - b, c, t, ctl)
    w = 1.0 - t
    return (
        gamma_ratio([c, s], [c - a, c - b])
        * _direct_series(a, b, 1.0 - s, w, ctl)
        + w ** s * gamma_ratio([c, -s], [a, b])
        * _direct_series(c - a, c - b, 1.0 + s, w, ctl)
    )

def hyp2f1(args: Hyp2F1Args, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    '''Gauss hypergeometric function 2F1(a, b; c; t), t in [0, 1]

    Direct compensated summation up to NEAR_ONE, the linear
    transformation in (1 - t) above it, and Gauss's value at t = 1.

    >>> hyp2f1(hyp2f1_args(0.3, 0.7, 1.9, 0.0))
    1.0
    >>> round(hyp2f1(hyp2f1_args(1, 1, 2, 0.5)), 12) == round(2 * math.log(2), 12)
    True
    >>> round(hyp2f1(hyp2f1_args(1, 1, 3, 1.0)), 12)
    2.0
    '''
    a, b, c, t = args.a, args.b, args.c, args.t
    if t == 1.0:
        return gauss_value(a, b, c)
    if t > NEAR_ONE and not _is_polynomial(a, b):
        return _near_one(a, b, c, t, ctl)
    return _direct_series(a, b, c, t, ctl)

def f21(a, b, c, t, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    '''hyp2f1 from plain numbers

    >>> round(f21(0.5, 0, 1.5, 0.25), 12)
    1.0
    '''
    return hyp2f1(hyp2f1_args(a, b, c, t), ctl)

def series_sum(a, b, c, t, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    '''Plain partial sums of the 2F1 series, no transformation

    At t = 1 this is the slowly converging limit Gauss's value
    closes; a looser rel_tol keeps it inside the term budget.

    >>> round(series_sum(1, 1, 4, 1.0, series_control(rel_tol=1e-10)), 4)
    1.5
    '''
    args = hyp2f1_args(a, b, c, t)
    return _direct_series(args.a, args.b, args.c, args.t, ctl)

def gauss_value(a, b, c) -> float:
    '''2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))

    >>> gauss_value(0, 2.5, 4.0)
    1.0
    >>> round(gauss_value(0.5, 0.5, 2), 5)
    1.27324
    >>> gauss_value(1, 1, 2)
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: 2F1(1, 1; 2; 1) diverges: c - a - b = 0 <= 0
    '''
    require(
        c - a - b > 0,
        f'2F1({a}, {b}; {c}; 1) diverges: c - a - b = {c - a - b} <= 0',
    )
    require(not is_nonpositive_int(c), f'c = {c} is a pole of Gamma')
    return gamma_ratio([c, c - a - b], [c - a, c - b])

def hyp2f1_derivative(a, b, c, t, ctl: SeriesControl = DEFAULT_SERIES):
    '''d/dt 2F1(a, b; c; t) = (ab/c) 2F1(a+1, b+1; c+1; t), t < 1

    >>> hyp2f1_derivative(0, 1.5, 2.5, 0.4)
    0.0
    '''
    require(0 <= t < 1, f'hyp2f1_derivative needs 0 <= t < 1, got {t}')
    if a * b == 0:
        return 0.0
    return a * b / c * f21(a + 1, b + 1, c + 1, t, ctl)

def euler_residuals(a, b, c, t, ctl: SeriesControl = DEFAULT_SERIES):
    '''Relative residuals of the two Euler-transformation forms

    standard: 2F1(a,b;c;t) vs (1-t)^(c-a-b) 2F1(c-a,c-b;c;t)
    as_printed: the same with (1-t^2)^(c-a-b)

    >>> r = euler_residuals(0.5, 0.75, 2.0, 0.3)
    >>> r['standard'] < 1e-12, r['as_printed'] > 1e-3
    (True, True)
    '''
    value = f21(a, b, c, t, ctl)
    transformed = f21(c - a, c - b, c, t, ctl)
    s = c - a - b

    def residual(prefactor):
        return abs(value - prefactor * transformed) / abs(value)

    return pmap({
        'value': value,
        'standard': residual((1.0 - t) ** s),
        'as_printed': residual((1.0 - t * t) ** s),
    })
