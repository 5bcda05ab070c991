'''The bracket [x, y], the weighted harmonic Bergman kernel R_alpha as a
truncated zonal series, its x-derivatives and kernel growth constants

Kernel values are in units of R_alpha(0, .) = 1 (alpha > 0). A truncated
sum is accepted when its tail bound is below rel_tol max(|sum|, 1): the
tolerance is relative for large values and absolute near zero.

'''
import math
import logging
import functools
from typing import Sequence

import numpy as np
from pyrsistent import PClass, field, pvector

from .common import (
    DomainError, TruncationError, checked, require, Null,
)
from .specfun import log_gamma_ratio
from .zonal import (
    DEFAULT_DEGREE_CAP, dim_harmonic, derivative_table, chain_plan,
    plan_orders, apply_plan, uw, multi_indices,
)
from .quadrature import ball_volume, DEFAULT_SEED
from .parallel import pmap

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

DEFAULT_KERNEL_TOL = 1e-8
BRACKET_CLAMP = 1e-12
MAX_REACH = 0.99
MAX_DEGREE_CAP = 25600

# ----------------------------------------------------------------------
#
# Bracket
#
# ----------------------------------------------------------------------

def bracket(x, y):
    '''[x, y] = (1 - 2 x.y + |x|^2 |y|^2)^(1/2)

    >>> bracket([0.0, 0.0], [0.3, 0.4])
    1.0
    >>> round(bracket([0.6, 0.0], [0.6, 0.0]), 12)
    0.64
    >>> round(bracket([0.5, 0.0], [0.0, 1.0]), 12) == round(math.sqrt(1.25), 12)
    True
    '''
    u, w = uw(x, y)
    radicand = 1.0 - 2.0 * u + w
    if np.any(radicand < -BRACKET_CLAMP):
        raise DomainError(
            f'negative bracket radicand {float(np.min(radicand)):.3e}'
        )
    value = np.sqrt(np.maximum(radicand, 0.0))
    return float(value) if np.ndim(value) == 0 else value

# ----------------------------------------------------------------------
#
# Series coefficients and truncation
#
# ----------------------------------------------------------------------

def a_coefficient(n: int, alpha: float, j: int) -> float:
    '''A_j = Gamma(j + n/2 + alpha) / Gamma(j + n/2)

    >>> round(a_coefficient(2, 1, 3), 12)
    4.0
    '''
    return math.exp(log_gamma_ratio([j + n / 2 + alpha], [j + n / 2]))

def series_coefficient(n: int, alpha: float, j: int) -> float:
    '''Coefficient of Z_j(x, y) in R_alpha: omega_alpha A_j for alpha > 0,
    (n + 2j)/(n |B|) for the unweighted kernel

    >>> series_coefficient(3, 1.5, 0)
    1.0
    >>> round(series_coefficient(2, 1, 2), 12)
    3.0
    '''
    if alpha == 0:
        return (n + 2 * j) / (n * ball_volume(n))
    if j == 0:
        return 1.0
    return math.exp(log_gamma_ratio(
        [n / 2, j + n / 2 + alpha], [n / 2 + alpha, j + n / 2],
    ))

class KernelSeries(PClass):
    n = field(type=int, mandatory=True)
    alpha = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v >= 0, 'alpha must be >= 0'),
    )
    degree_cap = field(
        type=int, mandatory=True,
        invariant=lambda v: (v >= 0, 'degree_cap must be >= 0'),
    )
    rel_tol = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (0 < v < 1, 'rel_tol must be in (0, 1)'),
    )
    coefficients = field(mandatory=True)
    params = field(initial=Null)
    # |x||y| the degree_cap was sized for and the tail bound there
    reach = field(type=float, factory=float, initial=0.0)
    tail_bound = field(type=float, factory=float, initial=0.0)

    __invariant__ = lambda r: (
        len(r.coefficients) == r.degree_cap + 3
        and bool(np.all(r.coefficients > 0)),
        'coefficients must be positive, one per degree up to degree_cap + 2',
    )

def kernel_series(n_or_params, alpha=None, degree_cap=DEFAULT_DEGREE_CAP,
                  rel_tol=DEFAULT_KERNEL_TOL):
    '''Truncated R_alpha for Params (or n and alpha)

    >>> series = kernel_series(2, 1.0, degree_cap=10)
    >>> [round(c, 12) for c in series.coefficients[:3]]
    [1.0, 2.0, 3.0]
    '''
    params = Null
    if hasattr(n_or_params, 'n'):
        params, n = n_or_params, n_or_params.n
        alpha = params.alpha if alpha is None else alpha
    else:
        n = n_or_params
    require(alpha is not None, 'kernel_series needs alpha')
    coefficients = np.array([
        series_coefficient(n, alpha, j) for j in range(degree_cap + 3)
    ])
    coefficients.flags.writeable = False
    return checked(KernelSeries)(
        n=n, alpha=alpha, degree_cap=degree_cap, rel_tol=rel_tol,
        coefficients=coefficients, params=params,
    )

@functools.lru_cache(maxsize=64)
def _log_dims(n, count):
    logs = np.array([math.log(dim_harmonic(n, j)) for j in range(count)])
    logs.flags.writeable = False
    return logs

def _log_tail_terms(series, rho, order):
    j = np.arange(series.degree_cap + 3)
    return (
        np.log(series.coefficients) + _log_dims(series.n, len(j))
        + 2 * order * np.log(np.maximum(j, 1)) + j * math.log(rho)
    )

def _tail_bounds(series, rho, order):
    '''Heuristic bound on sum_{j > J} |term_j| for J = 0..degree_cap'''
    logs = _log_tail_terms(series, rho, order)
    ratio = np.exp(logs[2:] - logs[1:-1])
    with np.errstate(divide='ignore'):
        bounds = np.where(
            ratio < 1, np.exp(logs[1:-1]) / (1.0 - ratio), np.inf,
        )
    return bounds

def tail_bound(series: KernelSeries, rho: float, J: int, order: int = 0):
    '''Bound on the terms past degree J at |x||y| = rho'''
    if rho == 0:
        return 0.0
    return float(_tail_bounds(series, rho, order)[J])

def truncation_degree(series: KernelSeries, rho: float, order: int = 0):
    '''Smallest J with estimated tail <= rel_tol at |x||y| = rho

    Derivatives of order |k| inflate the terms by j^(2|k|).

    >>> truncation_degree(kernel_series(2, 1.0), 0.0, 1)
    1
    '''
    require(0 <= rho < 1, f'|x||y| = {rho} outside the convergence region')
    if rho == 0:
        return min(order, series.degree_cap)
    bounds = _tail_bounds(series, rho, order)
    ok = np.flatnonzero(bounds[order:] <= series.rel_tol)
    if len(ok) == 0:
        raise TruncationError(
            f'|x||y| = {rho:.6f} needs more than degree_cap ='
            f' {series.degree_cap} terms (tail bound {bounds[-1]:.3e})',
            tail_bound=float(bounds[-1]),
        )
    J = order + int(ok[0])
    log.debug(f'kernel truncated at J={J} for rho={rho:.4f}, order={order}')
    return J

@functools.lru_cache(maxsize=256)
def _max_product(n, alpha, degree_cap, rel_tol, order):
    series = kernel_series(n, alpha, degree_cap, rel_tol)
    lo, hi = 0.0, 1.0 - 1e-12
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        try:
            truncation_degree(series, mid, order)
            lo = mid
        except TruncationError:
            hi = mid
    return lo

def max_product(series: KernelSeries, order: int = 0) -> float:
    '''Largest |x||y| at which the tail bound within degree_cap is below
    rel_tol in absolute terms; larger kernel values reach further

    '''
    return _max_product(
        series.n, series.alpha, series.degree_cap, series.rel_tol, order,
    )

@functools.lru_cache(maxsize=256)
def degree_cap_for(n: int, alpha: float, rho: float,
                   rel_tol: float = DEFAULT_KERNEL_TOL, order: int = 0):
    '''degree_cap, doubled from the default, whose absolute tail bound at
    |x||y| = rho is below rel_tol

    >>> degree_cap_for(2, 1.0, 0.5)
    200
    >>> degree_cap_for(2, 1.0, 0.9)
    400
    '''
    require(
        0 <= rho <= MAX_REACH,
        f'|x||y| = {rho} outside the evaluation region [0, {MAX_REACH}]',
    )
    cap = DEFAULT_DEGREE_CAP
    while True:
        try:
            truncation_degree(kernel_series(n, alpha, cap, rel_tol), rho, order)
            return cap
        except TruncationError:
            if cap >= MAX_DEGREE_CAP:
                raise
            cap = min(2 * cap, MAX_DEGREE_CAP)

def sized_series(series: KernelSeries, rho: float, order: int = 0):
    '''series, or a copy with a larger degree_cap, that resolves every
    value at |x||y| = rho for derivatives of the given order

    >>> sized = sized_series(kernel_series(2, 1.0), 0.9)
    >>> sized.degree_cap, sized.reach, sized.tail_bound <= sized.rel_tol
    (400, 0.9, True)
    '''
    cap = degree_cap_for(series.n, series.alpha, rho, series.rel_tol, order)
    if cap > series.degree_cap:
        log.debug(
            f'kernel degree_cap {series.degree_cap} -> {cap}'
            f' for rho={rho:.4f}, order={order}'
        )
        series = kernel_series(
            series.n, series.alpha, cap, series.rel_tol,
        ).set(params=series.params)
    J = truncation_degree(series, rho, order)
    return series.set(
        reach=float(rho), tail_bound=tail_bound(series, rho, J, order),
    )

# ----------------------------------------------------------------------
#
# Kernel evaluation
#
# ----------------------------------------------------------------------

def _points(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast_shapes(x.shape, y.shape)
    return (
        np.broadcast_to(x, shape).reshape(-1, shape[-1]),
        np.broadcast_to(y, shape).reshape(-1, shape[-1]),
        shape[:-1],
    )

def _finish(value, shape):
    value = np.reshape(value, shape)
    return float(value) if shape == () else value

def _rho(u, w):
    rho = float(np.sqrt(np.max(w))) if len(w) else 0.0
    require(rho < 1, f'|x||y| = {rho} outside the convergence region')
    return rho

def partial_sum(series: KernelSeries, x, y, J: int):
    '''sum_{j <= J} coefficient_j Z_j(x, y)'''
    require(
        0 <= J <= series.degree_cap + 2,
        f'J = {J} outside 0..{series.degree_cap + 2}',
    )
    X, Y, shape = _points(x, y)
    u, w = uw(X, Y)
    table = derivative_table(series.n, J, u, w, 0, 0)[:, 0, 0]
    return _finish(series.coefficients[:J + 1] @ table, shape)

def _accepted(series, rho, order, J, value):
    '''Tail bound at J, raising unless it is below rel_tol max(|value|, 1)
    at every point'''
    bound = tail_bound(series, rho, J, order)
    scale = max(float(np.min(np.abs(value))), 1.0) if np.size(value) else 1.0
    if bound > series.rel_tol * scale:
        raise TruncationError(
            f'|x||y| = {rho:.6f} needs more than degree_cap ='
            f' {series.degree_cap} terms (tail bound {bound:.3e}'
            f' against {series.rel_tol * scale:.3e})',
            tail_bound=bound,
        )
    return bound

def _kernel_sum(series, k, X, Y):
    u, w = uw(X, Y)
    rho = _rho(u, w)
    order = sum(k)
    try:
        J = truncation_degree(series, rho, order)
    except TruncationError:
        J = series.degree_cap
    plan = chain_plan(k)
    amax, bmax = plan_orders(plan)
    table = derivative_table(series.n, J, u, w, amax, bmax)
    summed = np.tensordot(series.coefficients[:J + 1], table, axes=(0, 0))
    value = apply_plan(plan, summed, X, Y)
    _accepted(series, rho, order, J, value)
    return value

def bergman_kernel(series: KernelSeries, x, y):
    '''R_alpha(x, y) for |x||y| < 1

    >>> bergman_kernel(kernel_series(3, 0.5), [0.0, 0.0, 0.0], [0.2, 0.5, 0.1])
    1.0
    '''
    X, Y, shape = _points(x, y)
    return _finish(_kernel_sum(series, (0,) * X.shape[-1], X, Y), shape)

def kernel_partial(series: KernelSeries, k: Sequence[int], x, y):
    '''d^k/dx^k R_alpha(x, y), term by term

    >>> round(kernel_partial(kernel_series(2, 1.0), (1, 0), [0.0, 0.0], [0.5, 0.0]), 12)
    2.0
    '''
    k = tuple(int(v) for v in k)
    X, Y, shape = _points(x, y)
    require(len(k) == X.shape[-1], f'multi-index {k} does not match n')
    return _finish(_kernel_sum(series, k, X, Y), shape)

def cauchy_gap(series: KernelSeries, x, y) -> float:
    '''max |S_2J - S_J| / max(|S_2J|, 1) over the points, with J the
    truncation degree at their largest |x||y|

    >>> cauchy_gap(kernel_series(2, 1.0), [0.9, 0.0], [0.9, 0.0]) < 1e-8
    True
    '''
    X, Y, _ = _points(x, y)
    u, w = uw(X, Y)
    rho = _rho(u, w)
    J = truncation_degree(sized_series(series, rho), rho)
    doubled = kernel_series(
        series.n, series.alpha, max(2 * J, series.degree_cap), series.rel_tol,
    )
    wide = np.atleast_1d(partial_sum(doubled, X, Y, 2 * J))
    narrow = np.atleast_1d(partial_sum(doubled, X, Y, J))
    return float(np.max(np.abs(wide - narrow) / np.maximum(np.abs(wide), 1.0)))

def kernel_gradient_l1(series: KernelSeries, m: int, x, y):
    '''sum_{|k| = m} |d^k_x R_alpha(x, y)|'''
    n = np.shape(x)[-1]
    return sum(
        np.abs(kernel_partial(series, k, x, y)) for k in multi_indices(n, m)
    )

# ----------------------------------------------------------------------
#
# Growth constants
#
# ----------------------------------------------------------------------

class GrowthConstant(PClass):
    order = field(type=int, mandatory=True)
    empirical_value = field(
        type=float, factory=float, mandatory=True,
        invariant=lambda v: (v > 0, 'empirical_value must be > 0'),
    )
    sample_count = field(type=int, mandatory=True)
    max_attained_at = field(type=tuple, mandatory=True)
    history = field(initial=pvector())

    def record(self, series):
        return {
            'n': series.n, 'alpha': series.alpha, 'm': self.order,
            'value': self.empirical_value, 'samples': self.sample_count,
            'argmax': self.max_attained_at,
        }

class GrowthSampler(PClass):
    samples = field(
        type=int, mandatory=True,
        invariant=lambda v: (v >= 1, 'samples must be >= 1'),
    )
    seed = field(type=int, initial=DEFAULT_SEED)
    chunk = field(
        type=int, initial=128,
        invariant=lambda v: (v >= 1, 'chunk must be >= 1'),
    )
    workers = field(type=int, initial=1)

def growth_sampler(samples=512, seed=DEFAULT_SEED, chunk=128, workers=1):
    return checked(GrowthSampler)(
        samples=samples, seed=seed, chunk=chunk, workers=workers,
    )

def _random_directions(rng, count, n):
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)

def sample_pairs(rng, count, n, rho_cap):
    '''Seeded (x, y) pairs with |x||y| <= rho_cap, biased toward the
    boundary and toward nearby directions where the kernel peaks

    '''
    rho = rho_cap * rng.random(count) ** 0.25
    share = rng.random(count)
    rx, ry = rho ** share, rho ** (1.0 - share)
    dx = _random_directions(rng, count, n)
    spread = rng.exponential(0.3, count)[:, None]
    dy = dx + spread * _random_directions(rng, count, n)
    dy /= np.linalg.norm(dy, axis=1, keepdims=True)
    return rx[:, None] * dx, ry[:, None] * dy

def growth_values(series, m, x, y):
    '''|d^m_x R_alpha(x, y)| [x, y]^(n - 1 + alpha + m), l1 over |k| = m'''
    return (
        kernel_gradient_l1(series, m, x, y)
        * bracket(x, y) ** (series.n - 1 + series.alpha + m)
    )

def estimate_growth_constant(series: KernelSeries, m: int,
                             sampler: GrowthSampler = None):
    '''Running maximum of |d^m R_alpha| [x, y]^(n-1+alpha+m) over seeded
    samples; a lower estimate of C_alpha^m

    Chunks are seeded from one SeedSequence, so the result does not
    depend on the worker count.

    '''
    require(m >= 0, f'growth constant order must be >= 0, got {m}')
    sampler = sampler or growth_sampler()
    rho_cap = max_product(series, m)
    chunks = math.ceil(sampler.samples / sampler.chunk)
    seeds = np.random.SeedSequence(sampler.seed).spawn(chunks)
    sizes = [
        min(sampler.chunk, sampler.samples - i * sampler.chunk)
        for i in range(chunks)
    ]

    def chunk_max(seed, size):
        rng = np.random.default_rng(seed)
        x, y = sample_pairs(rng, size, series.n, rho_cap)
        values = np.atleast_1d(growth_values(series, m, x, y))
        i = int(np.argmax(values))
        return float(values[i]), (x[i].tolist(), y[i].tolist())

    best, where, history = 0.0, ((), ()), []
    for value, at in pmap('thread', sampler.workers)(chunk_max, seeds, sizes):
        if value > best:
            best, where = value, at
        history.append(best)
    log.info(
        f'C_alpha^{m} (n={series.n}, alpha={series.alpha}) >= {best:.6g}'
        f' over {sampler.samples} samples'
    )
    return GrowthConstant(
        order=m, empirical_value=best, sample_count=sampler.samples,
        max_attained_at=(tuple(where[0]), tuple(where[1])),
        history=pvector(history),
    )

def boundary_probe(series: KernelSeries, m: int, radii: Sequence[float]):
    '''(r, |d^m R_alpha(r e_1, r e_1)| [x, y]^(n-1+alpha+m)) as r -> 1

    Each radius is evaluated with a series sized for |x||y| = r^2, up to
    r^2 = MAX_REACH.

    >>> rows = boundary_probe(kernel_series(2, 1.0), 1, (0.5, 0.99))
    >>> [(r, round(v, 6)) for r, v in rows]
    [(0.5, 2.0), (0.99, 3.96)]
    '''
    e1 = np.zeros(series.n)
    e1[0] = 1.0
    rows = []
    for r in radii:
        require(
            0 <= r and r * r <= MAX_REACH,
            f'boundary radius {r} outside [0, sqrt({MAX_REACH})]',
        )
        sized = sized_series(series, r * r, m)
        rows.append((float(r), float(growth_values(sized, m, r * e1, r * e1))))
    return tuple(rows)
