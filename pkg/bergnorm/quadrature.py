'''Quadrature on the unit ball and sphere

Ball rules are products of a radial Gauss-Legendre rule and a sphere
rule. On the full ball the radial variable is r = 1 - (1 - u)^kappa with
kappa (1 + e) an integer, so the weight (1 - r^2)^e dr turns into a
polynomial in u times a smooth factor.

Integrands are vectorized fields: f(X) takes an (N, n) array of nodes
and returns N values. Wrap scalar functions with pointwise().

'''
import json
import math
import logging
import functools
from pathlib import Path
from typing import Callable, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from pyrsistent import PClass, field

from .common import (
    EvaluationError, checked, require, compensated_sum,
    maybe, Null,
)
from .specfun import gamma_ratio
from .zonal import multi_indices

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

RULE_FORMAT_VERSION = 1
MAX_DIMENSION = 6
DEFAULT_SEED = 20240101

# ----------------------------------------------------------------------
#
# Measure constants
#
# ----------------------------------------------------------------------

def ball_volume(n: int) -> float:
    '''|B| = pi^(n/2) / Gamma(n/2 + 1)

    >>> round(ball_volume(2), 12) == round(math.pi, 12)
    True
    '''
    return math.pi ** (n / 2) * gamma_ratio([], [n / 2 + 1])

def sphere_area(n: int) -> float:
    '''|S| = n |B|

    >>> round(sphere_area(3), 12) == round(4 * math.pi, 12)
    True
    '''
    return n * ball_volume(n)

def c_alpha(n: int, alpha: float) -> float:
    '''Normalizer making (1 - |x|^2)^(alpha - 1) c_alpha dv a probability

    >>> round(c_alpha(2, 1), 12) == round(1 / math.pi, 12)
    True
    '''
    require(alpha > 0, f'c_alpha needs alpha > 0, got {alpha}')
    return gamma_ratio([n / 2 + alpha], [alpha]) / math.pi ** (n / 2)

# ----------------------------------------------------------------------
#
# Measure tags and rule configuration
#
# ----------------------------------------------------------------------

MEASURE_KINDS = (
    'lebesgue_dv', 'weighted_dv_alpha', 'tau', 'weighted_dv_beta',
    'sphere_sigma',
)

class MeasureTag(PClass):
    kind = field(
        type=str, mandatory=True,
        invariant=lambda v: (v in MEASURE_KINDS, f'unknown measure {v}'),
    )
    exponent = field(type=float, factory=float, initial=0.0)

    def weight_exponent(self, n):
        '''e in the radial weight (1 - r^2)^e'''
        return {
            'lebesgue_dv': 0.0,
            'weighted_dv_alpha': self.exponent - 1.0,
            'tau': -float(n),
            'weighted_dv_beta': self.exponent,
        }[self.kind]

    def normalizer(self, n):
        if self.kind == 'weighted_dv_alpha':
            return c_alpha(n, self.exponent)
        return 1.0

    def label(self):
        if self.kind in ('weighted_dv_alpha', 'weighted_dv_beta'):
            return f'{self.kind}({self.exponent:g})'
        return self.kind

LEBESGUE = MeasureTag(kind='lebesgue_dv')
TAU = MeasureTag(kind='tau')
SPHERE_SIGMA = MeasureTag(kind='sphere_sigma')

def dv_alpha(alpha):
    '''Probability measure c_alpha (1 - |x|^2)^(alpha - 1) dv'''
    require(alpha > 0, f'dv_alpha needs alpha > 0, got {alpha}')
    return MeasureTag(kind='weighted_dv_alpha', exponent=alpha)

def dv_beta(beta):
    '''Unnormalized (1 - |x|^2)^beta dv'''
    return MeasureTag(kind='weighted_dv_beta', exponent=beta)

class RadialSplit(PClass):
    radial_order = field(
        type=int, mandatory=True,
        invariant=lambda v: (v >= 4, 'radial_order must be >= 4'),
    )
    sphere_order = field(
        type=int, mandatory=True,
        invariant=lambda v: (v >= 4, 'sphere_order must be >= 4'),
    )
    clustering = field(
        type=float, factory=float, initial=2.0,
        invariant=lambda v: (v >= 1, 'clustering must be >= 1'),
    )
    rotations = field(
        type=int, initial=2,
        invariant=lambda v: (v >= 1, 'rotations must be >= 1'),
    )
    seed = field(type=int, initial=DEFAULT_SEED)

    def refined(self):
        return self.set(
            radial_order=2 * self.radial_order,
            sphere_order=2 * self.sphere_order,
        )

DEFAULT_SPLIT = RadialSplit(radial_order=40, sphere_order=24)

def radial_split(radial_order=40, sphere_order=24, clustering=2.0,
                 rotations=2, seed=DEFAULT_SEED):
    return checked(RadialSplit)(
        radial_order=radial_order, sphere_order=sphere_order,
        clustering=clustering, rotations=rotations, seed=seed,
    )

class QuadratureRule(PClass):
    kind = field(type=str, mandatory=True)
    n = field(type=int, mandatory=True)
    nodes = field(mandatory=True)
    weights = field(mandatory=True)
    radii = field(mandatory=True)
    measure = field(type=MeasureTag, mandatory=True)
    radius = field(type=float, factory=float, initial=1.0)
    key = field(type=str, initial='')

    __invariant__ = lambda r: (
        len(r.nodes) == len(r.weights) == len(r.radii)
        and bool(np.all(r.weights > 0)),
        'nodes, weights and radii must align and weights be positive',
    )

    def __len__(self):
        return len(self.weights)

    @property
    def mass(self):
        return compensated_sum(self.weights.tolist())

def rule_cache_key(kind, n, split, measure, radius=1.0):
    '''Cache key (n, orders, measure, seed, radius)

    >>> rule_cache_key('ball', 2, DEFAULT_SPLIT, dv_alpha(1))
    'ball-n2-r40-s24-c2-weighted_dv_alpha(1)-seed20240101-R1'
    '''
    return (
        f'{kind}-n{n}-r{split.radial_order}-s{split.sphere_order}'
        f'-c{split.clustering:g}-{measure.label()}-seed{split.seed}'
        f'-R{radius:g}'
    )

def _dimension(params_or_n):
    n = getattr(params_or_n, 'n', params_or_n)
    require(
        2 <= n <= MAX_DIMENSION, f'dimension n = {n} outside 2..{MAX_DIMENSION}',
    )
    return int(n)

def _frozen(array):
    array = np.ascontiguousarray(array, dtype=float)
    array.flags.writeable = False
    return array

# ----------------------------------------------------------------------
#
# One-dimensional pieces
#
# ----------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _gauss_legendre_01(order):
    z, w = leggauss(order)
    return (z + 1.0) / 2.0, w / 2.0

def radial_nodes(n: int, order: int, exponent: float, radius: float = 1.0,
                 clustering: float = 2.0):
    '''Nodes r_i and weights W_i for int_0^radius r^(n-1) (1-r^2)^e g(r) dr

    >>> r, W = radial_nodes(2, 8, 0.0)
    >>> round(float(W.sum()), 12)
    0.5
    '''
    require(0 < radius <= 1, f'radius must be in (0, 1], got {radius}')
    u, w = _gauss_legendre_01(order)
    if radius < 1:
        r = radius * u
        return r, radius * w * r ** (n - 1) * (1.0 - r * r) ** exponent
    require(
        exponent > -1,
        f'weight (1-|x|^2)^{exponent:g} is not integrable on the ball;'
        ' integrate a weighted integrand (dv_beta) or restrict the radius',
    )
    N = math.ceil(max(2.0, clustering) * (1.0 + exponent))
    kappa = N / (1.0 + exponent)
    s = 1.0 - u
    r = 1.0 - s ** kappa
    return r, w * kappa * s ** (N - 1) * r ** (n - 1) * (1.0 + r) ** exponent

def random_rotation(n: int, rng: np.random.Generator):
    '''Haar-distributed orthogonal matrix from a seeded generator'''
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))

def _sphere_product(n, order):
    if n == 2:
        count = 2 * order
        phi = 2 * math.pi * np.arange(count) / count
        return (
            np.column_stack([np.cos(phi), np.sin(phi)]),
            np.full(count, 1.0 / count),
        )
    if n == 3:
        z, wz = leggauss(order)
        count = 2 * order
        phi = 2 * math.pi * np.arange(count) / count
        s = np.sqrt(1.0 - z * z)
        nodes = np.stack([
            np.repeat(z, count),
            np.outer(s, np.cos(phi)).ravel(),
            np.outer(s, np.sin(phi)).ravel(),
        ], axis=1)
        return nodes, np.outer(wz / 2.0, np.full(count, 1.0 / count)).ravel()
    theta, wt = _gauss_legendre_01(order)
    theta = math.pi * theta
    wt = wt * np.sin(theta) ** (n - 2)
    inner, winner = _sphere_product(n - 1, max(4, order // 2))
    nodes = np.concatenate([
        np.repeat(np.cos(theta), len(inner))[:, None],
        (np.sin(theta)[:, None, None] * inner[None]).reshape(-1, n - 1),
    ], axis=1)
    weights = np.outer(wt, winner).ravel()
    return nodes, weights / weights.sum()

def sphere_nodes(n: int, order: int, rotations: int = 1,
                 seed: int = DEFAULT_SEED):
    '''Normalized sphere rule (weights sum to 1)

    n >= 4 averages `rotations` seeded random rotations of the product rule.

    >>> nodes, weights = sphere_nodes(2, 4)
    >>> nodes.shape, float(weights.sum())
    ((8, 2), 1.0)
    '''
    nodes, weights = _sphere_product(n, order)
    if n >= 4:
        rng = np.random.default_rng(seed)
        nodes = np.concatenate([
            nodes @ random_rotation(n, rng).T for _ in range(rotations)
        ])
        weights = np.tile(weights, rotations) / rotations
    return nodes, weights

def polar_nodes(n: int, order: int):
    '''Angle theta from e_1 with normalized sin^(n-2) weights'''
    theta, w = _gauss_legendre_01(order)
    theta = math.pi * theta
    w = w * np.sin(theta) ** (n - 2)
    return theta, w / w.sum()

# ----------------------------------------------------------------------
#
# Rule builders
#
# ----------------------------------------------------------------------

def _radial_part(n, split, measure, radius):
    require(
        not (measure.kind == 'tau' and radius >= 1),
        'the tau measure has infinite mass on the ball; integrate against'
        ' dv_beta with the decay carried by the weight, or restrict the'
        ' radius',
    )
    r, W = radial_nodes(
        n, split.radial_order, measure.weight_exponent(n), radius,
        split.clustering,
    )
    return r, W * sphere_area(n) * measure.normalizer(n)

def build_sphere_rule(n_or_params, split: RadialSplit = DEFAULT_SPLIT):
    n = _dimension(n_or_params)
    nodes, weights = sphere_nodes(
        n, split.sphere_order, split.rotations, split.seed,
    )
    return QuadratureRule(
        kind='sphere', n=n, nodes=_frozen(nodes), weights=_frozen(weights),
        radii=_frozen(np.ones(len(weights))), measure=SPHERE_SIGMA,
        key=rule_cache_key('sphere', n, split, SPHERE_SIGMA),
    )

def build_ball_rule(n_or_params, split: RadialSplit = DEFAULT_SPLIT,
                    measure: MeasureTag = LEBESGUE, radius: float = 1.0):
    '''Product rule for the tagged measure on the ball of radius `radius`

    >>> rule = build_ball_rule(2, measure=dv_alpha(1))
    >>> round(rule.mass, 10)
    1.0
    >>> build_ball_rule(2, measure=TAU)
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: the tau measure has infinite mass on the ball; integrate against dv_beta with the decay carried by the weight, or restrict the radius
    '''
    n = _dimension(n_or_params)
    if measure.kind == 'sphere_sigma':
        return build_sphere_rule(n, split)
    r, W = _radial_part(n, split, measure, radius)
    sphere, sigma = sphere_nodes(
        n, split.sphere_order, split.rotations, split.seed,
    )
    nodes = (r[:, None, None] * sphere[None]).reshape(-1, n)
    weights = np.outer(W, sigma).ravel()
    log.debug(f'ball rule n={n} {measure.label()}: {len(weights)} nodes')
    return QuadratureRule(
        kind='ball', n=n, nodes=_frozen(nodes), weights=_frozen(weights),
        radii=_frozen(np.repeat(r, len(sigma))), measure=measure,
        radius=radius, key=rule_cache_key('ball', n, split, measure, radius),
    )

def build_zonal_rule(n_or_params, split: RadialSplit = DEFAULT_SPLIT,
                     measure: MeasureTag = LEBESGUE, radius: float = 1.0):
    '''Rule for integrands invariant under rotations fixing e_1

    Nodes lie in the (e_1, e_2) half plane; the polar angle carries the
    sin^(n-2) density. With the sphere_sigma measure only the angle is
    integrated.

    '''
    n = _dimension(n_or_params)
    theta, wt = polar_nodes(n, 2 * split.sphere_order)
    if measure.kind == 'sphere_sigma':
        r, W = np.ones(1), np.ones(1)
    else:
        r, W = _radial_part(n, split, measure, radius)
    directions = np.zeros((len(theta), n))
    directions[:, 0] = np.cos(theta)
    directions[:, 1] = np.sin(theta)
    nodes = (r[:, None, None] * directions[None]).reshape(-1, n)
    return QuadratureRule(
        kind='zonal', n=n, nodes=_frozen(nodes),
        weights=_frozen(np.outer(W, wt).ravel()),
        radii=_frozen(np.repeat(r, len(theta))), measure=measure,
        radius=radius, key=rule_cache_key('zonal', n, split, measure, radius),
    )

def build_radial_rule(n_or_params, split: RadialSplit = DEFAULT_SPLIT,
                      measure: MeasureTag = LEBESGUE, radius: float = 1.0):
    '''Rule for radial integrands (nodes r e_1)

    >>> rule = build_radial_rule(2, radius=0.5)
    >>> round(rule.mass, 12) == round(math.pi / 4, 12)
    True
    '''
    n = _dimension(n_or_params)
    r, W = _radial_part(n, split, measure, radius)
    nodes = np.zeros((len(r), n))
    nodes[:, 0] = r
    return QuadratureRule(
        kind='radial', n=n, nodes=_frozen(nodes), weights=_frozen(W),
        radii=_frozen(r), measure=measure, radius=radius,
        key=rule_cache_key('radial', n, split, measure, radius),
    )

def rotate_rule(rule: QuadratureRule, seed: int):
    '''The same rule under a seeded random rotation'''
    rotation = random_rotation(rule.n, np.random.default_rng(seed))
    return rule.set(
        nodes=_frozen(rule.nodes @ rotation.T), key=f'{rule.key}-rot{seed}',
    )

# ----------------------------------------------------------------------
#
# Integration
#
# ----------------------------------------------------------------------

def pointwise(func: Callable) -> Callable:
    '''Vectorize a scalar field f(x) -> float over an (N, n) node array

    >>> pointwise(lambda x: x[0] + x[1])(np.array([[1.0, 2.0], [3.0, 4.0]])).tolist()
    [3.0, 7.0]
    '''
    @functools.wraps(func)
    def vectorized(X):
        return np.fromiter((func(x) for x in X), dtype=float, count=len(X))
    return vectorized

def node_values(rule: QuadratureRule, f: Callable):
    values = np.broadcast_to(
        np.asarray(f(rule.nodes), dtype=float), rule.weights.shape,
    )
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        node = rule.nodes[i]
        raise EvaluationError(
            f'integrand is not finite ({values[i]}) at node {i}:'
            f' {node.tolist()}', node=node,
        )
    return values

def integrate(rule: QuadratureRule, f: Callable) -> float:
    '''sum_i w_i f(node_i) in a fixed order, exactly rounded

    >>> rule = build_sphere_rule(3)
    >>> round(integrate(rule, lambda X: np.ones(len(X))), 12)
    1.0
    >>> abs(integrate(rule, lambda X: X[:, 0])) < 1e-12
    True
    '''
    values = node_values(rule, f)
    return compensated_sum((rule.weights * values).tolist())

def lp_norm(rule: QuadratureRule, f: Callable, p: float) -> float:
    '''(int |f|^p dmu)^(1/p) for the rule's measure

    >>> lp_norm(build_sphere_rule(2), lambda X: np.zeros(len(X)), 2)
    0.0
    '''
    require(p >= 1, f'lp_norm needs p >= 1, got {p}')
    values = np.abs(node_values(rule, f))
    total = compensated_sum((rule.weights * values ** p).tolist())
    return total ** (1.0 / p) if total > 0 else 0.0

def require_measure(rule: QuadratureRule, kind: str, exponent=None):
    require(
        rule.measure.kind == kind and (
            exponent is None
            or math.isclose(rule.measure.exponent, exponent, abs_tol=1e-12)
        ),
        f'rule measure {rule.measure.label()} does not match {kind}'
        + ('' if exponent is None else f'({exponent:g})'),
    )

AGGREGATIONS = ('l1', 'signed')

def aggregate_partials(f_partials: Callable, X, n: int, m: int,
                       aggregation: str = 'l1'):
    '''|d^m f| = sum_k |d^k f| (l1) or |sum_k d^k f| (signed), |k| = m

    >>> aggregate_partials(lambda k, X: X[:, k.index(1)], np.array([[1.0, -2.0]]), 2, 1).tolist()
    [3.0]
    '''
    require(
        aggregation in AGGREGATIONS, f'unknown aggregation {aggregation}',
    )
    parts = [
        np.asarray(f_partials(k, X), dtype=float)
        for k in multi_indices(n, m)
    ]
    if aggregation == 'l1':
        return np.sum(np.abs(parts), axis=0)
    return np.abs(np.sum(parts, axis=0))

def besov_seminorm(params, f_partials: Callable, rule: QuadratureRule,
                   aggregation: str = 'l1') -> float:
    '''(int (1-|x|^2)^(mp) |d^m f|^p dtau)^(1/p)

    Realized as the L^p norm of |d^m f| against dv_{mp-n} (rule must
    carry that weight). f_partials(k, X) returns d^k f at the nodes.

    '''
    params.require_besov()
    require_measure(rule, 'weighted_dv_beta', params.besov_exponent)
    values = aggregate_partials(
        f_partials, rule.nodes, params.n, params.m, aggregation,
    )
    return lp_norm(rule, lambda X: values, params.p)

# ----------------------------------------------------------------------
#
# Caching
#
# ----------------------------------------------------------------------

def save_rule(rule: QuadratureRule, path: Union[str, Path]):
    payload = {
        'version': RULE_FORMAT_VERSION,
        'kind': rule.kind,
        'n': rule.n,
        'key': rule.key,
        'measure': {'kind': rule.measure.kind,
                    'exponent': rule.measure.exponent},
        'radius': rule.radius,
        'nodes': rule.nodes.tolist(),
        'weights': rule.weights.tolist(),
        'radii': rule.radii.tolist(),
    }
    Path(path).expanduser().write_text(json.dumps(payload))
    return True

def load_rule(path: Union[str, Path]) -> QuadratureRule:
    payload = json.loads(Path(path).expanduser().read_text())
    require(
        payload.get('version') == RULE_FORMAT_VERSION,
        f'rule file {path} has version {payload.get("version")},'
        f' expected {RULE_FORMAT_VERSION}',
    )
    return QuadratureRule(
        kind=payload['kind'], n=payload['n'], key=payload['key'],
        measure=MeasureTag(**payload['measure']),
        radius=payload['radius'],
        nodes=_frozen(payload['nodes']),
        weights=_frozen(payload['weights']),
        radii=_frozen(payload['radii']),
    )

def maybe_load_rule(path: Union[str, Path]):
    try:
        return load_rule(path)
    except (OSError, ValueError, KeyError):
        log.debug(f'no usable cached rule at {path}')
        return Null

BUILDERS = {
    'ball': build_ball_rule,
    'zonal': build_zonal_rule,
    'radial': build_radial_rule,
    'sphere': lambda n, split, measure, radius: build_sphere_rule(n, split),
}

def cached_rule(cache_dir, kind, n, split=DEFAULT_SPLIT, measure=LEBESGUE,
                radius=1.0):
    '''Build a rule, going through a JSON cache directory when given

    '''
    require(kind in BUILDERS, f'unknown rule kind {kind}')
    if kind == 'sphere':
        measure, radius = SPHERE_SIGMA, 1.0
    if cache_dir is None:
        return BUILDERS[kind](n, split, measure, radius)
    path = Path(cache_dir, f'{rule_cache_key(kind, n, split, measure, radius)}.json')
    cached = maybe(maybe_load_rule(path), None)
    if cached is not None:
        log.debug(f'rule cache hit: {path}')
        return cached
    rule = BUILDERS[kind](n, split, measure, radius)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_rule(rule, path)
    return rule
