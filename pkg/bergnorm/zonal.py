'''Zonal harmonics on the unit ball

The degree-j zonal harmonic is handled as a polynomial G_j(u, w) in
u = x.y and w = |x|^2 |y|^2, which gives the bi-homogeneous extension
Z_j(x, y) = |x|^j |y|^j Z_j(x/|x|, y/|y|) for two ball points for free.
Partial derivatives in x go through a symbolic chain rule (chain_plan)
applied to a table of (u, w)-derivatives (derivative_table).

'''
import math
import logging
import functools
import itertools
from typing import Sequence, Tuple

import numpy as np
from pyrsistent import PClass, field, pvector, pmap

from .common import (
    DomainError, checked, require, is_int_like,
)
from .specfun import binomial, log_gamma, pochhammer

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

SPHERE_TOL = 1e-12
ORIGIN_W = 1e-28
EXPLICIT_DEGREE = 12
DEFAULT_DEGREE_CAP = 200

# ----------------------------------------------------------------------
#
# Problem parameters and points
#
# ----------------------------------------------------------------------

def _integral(value):
    if isinstance(value, (int, float, np.integer, np.floating)) and \
       is_int_like(value):
        return int(value)
    return value

def default_m(n: int, p: float) -> int:
    '''Smallest positive integer m with m > (n - 1)/p

    >>> default_m(2, 2), default_m(3, 1.5), default_m(2, 4)
    (1, 2, 1)
    '''
    return max(1, math.floor((n - 1) / p) + 1)

class Params(PClass):
    n = field(
        type=int, factory=_integral, mandatory=True,
        invariant=lambda v: (v >= 2, 'n must be >= 2'),
    )
    alpha = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v > 0, 'alpha must be > 0'),
    )
    p = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v > 1, 'p must be > 1'),
    )
    m = field(
        type=int, factory=_integral, mandatory=True,
        invariant=lambda v: (v >= 0, 'm must be >= 0'),
    )
    k = field(type=tuple, factory=tuple, initial=())

    __invariant__ = lambda r: (
        not r.k or (
            len(r.k) == r.n and sum(r.k) == r.m and min(r.k) >= 0
        ),
        'multi-index k must have n nonnegative entries summing to m',
    )

    @property
    def q(self):
        return self.p / (self.p - 1.0)

    @property
    def multi_index(self):
        return self.k or (self.m,) + (0,) * (self.n - 1)

    @property
    def besov_exponent(self):
        '''pm - n, the exponent of the dv_{mp-n} weight'''
        return self.p * self.m - self.n

    @property
    def besov_ok(self):
        return self.m > (self.n - 1) / self.p

    def require_besov(self):
        require(
            self.besov_ok,
            f'm = {self.m} must exceed (n - 1)/p = {(self.n - 1) / self.p}',
        )
        return self

    def with_m(self, m):
        return self.set(m=m, k=())

    def row(self):
        return {
            'n': self.n, 'alpha': self.alpha, 'p': self.p, 'q': self.q,
            'm': self.m,
        }

def params(n, alpha, p, m=None, k=()):
    '''Validated Params; m defaults to the smallest admissible order

    >>> pr = params(2, 1, 2)
    >>> pr.m, pr.q, pr.multi_index
    (1, 2.0, (1, 0))
    >>> params(2, 1, 0.5)
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: Params: ('p must be > 1',)
    '''
    if m is None:
        m = sum(k) if k else default_m(_integral(n), float(p))
    return checked(Params)(n=n, alpha=alpha, p=p, m=m, k=tuple(k))

def ball_point(coords, closed=False):
    '''Point of the open (or closed) unit ball as a read-only array

    >>> ball_point([0.6, 0.0]).tolist()
    [0.6, 0.0]
    >>> ball_point([1.0, 0.0])
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: |x| = 1.0 is outside the open unit ball
    '''
    x = np.array(coords, dtype=float)
    r = float(np.linalg.norm(x))
    require(
        r <= 1.0 if closed else r < 1.0,
        f'|x| = {r} is outside the {"closed" if closed else "open"} unit ball',
    )
    x.flags.writeable = False
    return x

def sphere_point(coords):
    x = np.array(coords, dtype=float)
    r = float(np.linalg.norm(x))
    require(
        abs(r - 1.0) <= SPHERE_TOL, f'|xi| = {r} is not on the unit sphere',
    )
    x.flags.writeable = False
    return x

def unit(n: int, l: int = 0):
    '''Coordinate unit vector e_l in R^n

    >>> unit(3, 1).tolist()
    [0.0, 1.0, 0.0]
    '''
    e = np.zeros(n)
    e[l] = 1.0
    return e

# ----------------------------------------------------------------------
#
# Dimension formula and explicit coefficients
#
# ----------------------------------------------------------------------

def dim_harmonic(n: int, j: int) -> int:
    '''Dimension of the degree-j spherical harmonics in R^n

    >>> dim_harmonic(3, 0), dim_harmonic(3, 2), dim_harmonic(2, 7)
    (1, 5, 2)
    '''
    require(n >= 2, f'n must be >= 2, got {n}')
    return binomial(n + j - 1, n - 1) - binomial(n + j - 3, n - 1)

@functools.lru_cache(maxsize=None)
def coefficient_table(n: int, j: int):
    '''(log|c_ji|, sign c_ji) for G_j(u, w) = sum_i c_ji u^(j-2i) w^i

    The product n (n+2) ... (n+2j-2i-4) is empty (= 1) when its last
    factor is below n.

    >>> [round(s * math.exp(l), 12) for l, s in coefficient_table(2, 2)]
    [4.0, -2.0]
    '''
    require(j >= 0, f'zonal degree must be >= 0, got {j}')
    if j == 0:
        return pvector([(0.0, 1)])
    rows = []
    for i in range(j // 2 + 1):
        log_abs = (
            math.log(n + 2 * j - 2)
            + math.fsum(math.log(n + 2 * l) for l in range(j - i - 1))
            - i * math.log(2)
            - log_gamma(i + 1)
            - log_gamma(j - 2 * i + 1)
        )
        rows.append((log_abs, -1 if i % 2 else 1))
    return pvector(rows)

DIRECT_COEFFICIENT_DEGREE = 60

@functools.lru_cache(maxsize=None)
def coefficients(n: int, j: int):
    '''Float coefficients c_ji (exact products for moderate degrees)

    >>> coefficients(3, 3).tolist()
    [17.5, -10.5]
    '''
    if j == 0:
        return np.array([1.0])
    if j <= DIRECT_COEFFICIENT_DEGREE:
        return np.array([
            (-1) ** i * (n + 2 * j - 2)
            * math.prod(n + 2 * l for l in range(j - i - 1))
            / (2 ** i * math.factorial(i) * math.factorial(j - 2 * i))
            for i in range(j // 2 + 1)
        ])
    return np.array([s * math.exp(l) for l, s in coefficient_table(n, j)])

def _falling(v, a):
    return math.prod(range(v - a + 1, v + 1)) if a <= v else 0

def _explicit_block(n, j, u, w, amax, bmax):
    c = coefficients(n, j)
    out = np.zeros((amax + 1, bmax + 1) + u.shape)
    for i, cji in enumerate(c):
        du, dw = j - 2 * i, i
        for a in range(min(amax, du) + 1):
            for b in range(min(bmax, dw) + 1):
                factor = cji * _falling(du, a) * _falling(dw, b)
                out[a, b] += factor * u ** (du - a) * w ** (dw - b)
    return out

# ----------------------------------------------------------------------
#
# Three-term recurrences for high degrees
#
# ----------------------------------------------------------------------

def gegenbauer_sequence(mu: float, degree: int, t):
    '''C_0^mu(t), ..., C_degree^mu(t) by the three-term recurrence

    >>> gegenbauer_sequence(0.5, 2, np.array(0.5)).tolist()
    [1.0, 0.5, -0.125]
    '''
    t = np.asarray(t, dtype=float)
    out = np.zeros((degree + 1,) + t.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = 2.0 * mu * t
    for j in range(2, degree + 1):
        out[j] = (
            2.0 * t * (j + mu - 1) * out[j - 1] - (j + 2 * mu - 2) * out[j - 2]
        ) / j
    return out

def chebyshev_sequence(degree: int, t):
    t = np.asarray(t, dtype=float)
    out = np.zeros((degree + 1,) + t.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = t
    for j in range(2, degree + 1):
        out[j] = 2.0 * t * out[j - 1] - out[j - 2]
    return out

def _u_derivatives(n, J, u, w, amax):
    '''U[j, a] = d^a/du^a G_j(u, w) from Gegenbauer polynomials'''
    lam = (n - 2) / 2.0
    root = np.sqrt(w)
    safe = np.where(root > 0, root, 1.0)
    t = np.clip(np.where(root > 0, u / safe, 0.0), -1.0, 1.0)
    out = np.zeros((J + 1, amax + 1) + u.shape)
    if n == 2:
        cheb = chebyshev_sequence(J, t)
        out[0, 0] = 1.0
        for j in range(1, J + 1):
            out[j, 0] = 2.0 * root ** j * cheb[j]
    else:
        geg = gegenbauer_sequence(lam, J, t)
        for j in range(J + 1):
            out[j, 0] = (j + lam) / lam * root ** j * geg[j]
    for a in range(1, amax + 1):
        if a > J:
            break
        geg = gegenbauer_sequence(lam + a, J - a, t)
        scale = 2.0 ** a * pochhammer(lam + 1, a - 1)
        for j in range(a, J + 1):
            out[j, a] = (j + lam) * scale * root ** (j - a) * geg[j - a]
    return out

def _origin_block(n, j, shape, amax, bmax):
    out = np.zeros((amax + 1, bmax + 1) + shape)
    c = coefficients(n, j)
    for a in range(amax + 1):
        b2 = j - a
        if b2 >= 0 and b2 % 2 == 0 and b2 // 2 <= bmax:
            b = b2 // 2
            out[a, b] = c[b] * math.factorial(a) * math.factorial(b)
    return out

def derivative_table(n: int, J: int, u, w, amax: int, bmax: int):
    '''D[j, a, b, ...] = d^a/du^a d^b/dw^b G_j(u, w) for j <= J

    Degrees up to EXPLICIT_DEGREE use the explicit monomial expansion;
    higher degrees use Gegenbauer recurrences for the u-derivatives and
    weighted homogeneity (u G_u + 2w G_w = j G) for the w-derivatives.

    >>> D = derivative_table(3, 2, np.array([0.3]), np.array([0.25]), 1, 1)
    >>> [round(float(v), 12) for v in D[2, :, :, 0].ravel()]
    [0.05, -2.5, 4.5, 0.0]
    '''
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.zeros((J + 1, amax + 1, bmax + 1) + u.shape)
    top = min(J, EXPLICIT_DEGREE)
    for j in range(top + 1):
        out[j] = _explicit_block(n, j, u, w, amax, bmax)
    if J <= EXPLICIT_DEGREE:
        return out

    U = _u_derivatives(n, J, u, w, amax + bmax)
    origin = w < ORIGIN_W
    safe_w = np.where(origin, 1.0, w)
    for j in range(top + 1, J + 1):
        block = np.zeros((amax + bmax + 1, bmax + 1) + u.shape)
        block[:, 0] = U[j]
        for b in range(1, bmax + 1):
            for a in range(amax + bmax + 1 - b):
                degree = j - a - 2 * b
                if degree < 0:
                    continue
                block[a, b] = (
                    (degree + 2) * block[a, b - 1] - u * block[a + 1, b - 1]
                ) / (2.0 * safe_w)
        out[j] = block[:amax + 1]
        if origin.any():
            at_origin = _origin_block(n, j, u.shape, amax, bmax)
            out[j] = np.where(origin, at_origin, out[j])
    return out

# ----------------------------------------------------------------------
#
# Multi-indices and the chain rule
#
# ----------------------------------------------------------------------

def multi_indices(n: int, m: int) -> Tuple[Tuple[int, ...], ...]:
    '''All multi-indices k in N^n with |k| = m, in a fixed order

    >>> multi_indices(2, 2)
    ((2, 0), (1, 1), (0, 2))
    '''
    def to_index(combo):
        return tuple(combo.count(l) for l in range(n))
    return tuple(sorted(
        {to_index(c) for c in
         itertools.combinations_with_replacement(range(n), m)},
        reverse=True,
    ))

class PlanTerm(PClass):
    coef = field(type=float, mandatory=True)
    ypow = field(type=tuple, mandatory=True)
    spow = field(type=int, mandatory=True)
    xpow = field(type=tuple, mandatory=True)
    a = field(type=int, mandatory=True)
    b = field(type=int, mandatory=True)

def _bump(powers, l, delta):
    return powers[:l] + (powers[l] + delta,) + powers[l + 1:]

@functools.lru_cache(maxsize=None)
def chain_plan(k: Tuple[int, ...]):
    '''Chain rule for d^k/dx^k F(x.y, |x|^2 |y|^2)

    Each term is coef * y^ypow * |y|^(2 spow) * x^xpow * F_ab where
    F_ab is the (a, b)-th (u, w)-derivative of F.

    >>> [(t.coef, t.ypow, t.a, t.b) for t in chain_plan((1, 0))]
    [(2.0, (0, 0), 0, 1), (1.0, (1, 0), 1, 0)]
    '''
    n = len(k)
    zero = (0,) * n
    terms = {(zero, 0, zero, 0, 0): 1.0}
    for l in itertools.chain.from_iterable(
            itertools.repeat(l, kl) for l, kl in enumerate(k)):
        new = {}

        def add(key, value):
            new[key] = new.get(key, 0.0) + value

        for (ypow, spow, xpow, a, b), coef in terms.items():
            if xpow[l]:
                add((ypow, spow, _bump(xpow, l, -1), a, b), coef * xpow[l])
            add((_bump(ypow, l, 1), spow, xpow, a + 1, b), coef)
            add((ypow, spow + 1, _bump(xpow, l, 1), a, b + 1), 2.0 * coef)
        terms = new
    return tuple(
        PlanTerm(coef=coef, ypow=ypow, spow=spow, xpow=xpow, a=a, b=b)
        for (ypow, spow, xpow, a, b), coef in sorted(terms.items())
        if coef != 0.0
    )

def plan_orders(plan):
    return (
        max((t.a for t in plan), default=0),
        max((t.b for t in plan), default=0),
    )

def apply_plan(plan, table, x, y):
    '''Evaluate a chain plan against table[a, b, ...] (already summed
    over degrees) at points x, y of shape (..., n)

    '''
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sigma = np.sum(y * y, axis=-1)
    total = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]))
    for term in plan:
        value = term.coef * sigma ** term.spow * table[term.a, term.b]
        for l, e in enumerate(term.ypow):
            if e:
                value = value * y[..., l] ** e
        for l, e in enumerate(term.xpow):
            if e:
                value = value * x[..., l] ** e
        total = total + value
    return total

def uw(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (
        np.sum(x * y, axis=-1),
        np.sum(x * x, axis=-1) * np.sum(y * y, axis=-1),
    )

# ----------------------------------------------------------------------
#
# Zonal harmonics
#
# ----------------------------------------------------------------------

def _shape_out(value, x, y):
    shape = np.broadcast_shapes(
        np.shape(x)[:-1], np.shape(y)[:-1]
    )
    value = np.reshape(value, shape)
    return float(value) if shape == () else value

def extended_zonal(j: int, x, y):
    '''Bi-homogeneous Z_j(x, y) for two points of the closed ball

    >>> round(extended_zonal(2, [0.5, 0.0], [0.5, 0.0]), 12)
    0.125
    '''
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u, w = uw(x, y)
    table = derivative_table(x.shape[-1], j, u.ravel(), w.ravel(), 0, 0)
    return _shape_out(table[j, 0, 0], x, y)

def zonal(j: int, x, xi: Sequence[float]):
    '''Z_j(x, xi) for x in R^n and xi on the unit sphere

    >>> zonal(0, [0.3, 0.1], [1.0, 0.0])
    1.0
    >>> round(zonal(1, [0.3, 0.1, 0.2], [0.0, 1.0, 0.0]), 12)
    0.3
    >>> zonal(3, [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]) == dim_harmonic(3, 3)
    True
    '''
    return extended_zonal(j, x, sphere_point(xi))

def zonal_partial(j: int, k: Sequence[int], x, xi: Sequence[float]):
    '''Exact partial derivative d^k/dx^k Z_j(x, xi)

    >>> round(zonal_partial(1, (1, 0), [0.2, 0.4], [0.6, 0.8]), 12)
    1.2
    >>> zonal_partial(1, (1, 1), [0.2, 0.4], [0.6, 0.8])
    0.0
    '''
    k = tuple(int(v) for v in k)
    xi = sphere_point(xi)
    x = np.asarray(x, dtype=float)
    require(len(k) == x.shape[-1], f'multi-index {k} does not match n')
    if sum(k) > j:
        return _shape_out(np.zeros(np.shape(x)[:-1]), x, xi)
    plan = chain_plan(k)
    amax, bmax = plan_orders(plan)
    u, w = uw(x, xi)
    flat_x = np.reshape(x, (-1, x.shape[-1]))
    table = derivative_table(
        x.shape[-1], j, np.ravel(u), np.ravel(w), amax, bmax,
    )[j]
    return _shape_out(apply_plan(plan, table, flat_x, xi), x, xi)

def zonal_partials(j: int, m: int, x, xi):
    '''{k: d^k Z_j(x, xi)} over all |k| = m'''
    x = np.asarray(x, dtype=float)
    return pmap({
        k: zonal_partial(j, k, x, xi)
        for k in multi_indices(x.shape[-1], m)
    })
