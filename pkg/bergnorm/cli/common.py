'''Run configuration shared by the bergnorm commands

Values come from three layers: RunConfig defaults, an optional YAML file
(--config) and the command-line flags. Later layers win.

'''
import itertools
import logging
from pathlib import Path
from typing import Union

import click
from toolz.curried import curry, merge, valfilter, keymap, pipe
from pyrsistent import PClass, field, pvector

from ..common import DomainError, checked, no_pyrsistent, is_seq
from ..quadrature import DEFAULT_SEED, radial_split
from ..kernels import DEFAULT_KERNEL_TOL, kernel_series
from ..zonal import DEFAULT_DEGREE_CAP, params as make_params
from ..yaml import read_yaml

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

@curry
def exit_with_msg(logger, msg):
    '''Log msg and stop with click's usage-error exit code (2)'''
    logger.error(msg)
    raise click.UsageError(msg)

_exit_with_msg = exit_with_msg(log)

# ----------------------------------------------------------------------
#
# RunConfig
#
# ----------------------------------------------------------------------

def _sweep(value):
    '''Scalar, sequence or comma-separated string -> tuple

    >>> _sweep('1.5, 2,4'), _sweep(3), _sweep(None), _sweep('')
    (('1.5', '2', '4'), (3,), (), ())
    '''
    if value is None:
        return ()
    if isinstance(value, str):
        return tuple(v.strip() for v in value.split(',') if v.strip())
    if is_seq(value):
        return tuple(value)
    return (value,)

def _numbers(cast):
    def factory(value):
        return tuple(cast(v) for v in _sweep(value))
    return factory

def _int(value):
    number = float(value)
    if number != int(number):
        raise DomainError(f'{value} is not an integer')
    return int(number)

FORMATS = ('json', 'csv')

class RunConfig(PClass):
    n = field(type=tuple, factory=_numbers(_int), initial=(2,))
    alpha = field(type=tuple, factory=_numbers(float), initial=(1.0,))
    p = field(type=tuple, factory=_numbers(float), initial=(2.0,))
    m = field(type=tuple, factory=_numbers(_int), initial=())
    seed = field(
        type=int, initial=DEFAULT_SEED,
        invariant=lambda v: (0 <= v < 2**64, 'seed must be a 64-bit integer'),
    )
    radial_order = field(
        type=int, initial=48,
        invariant=lambda v: (v >= 4, 'radial_order must be >= 4'),
    )
    sphere_order = field(
        type=int, initial=32,
        invariant=lambda v: (v >= 4, 'sphere_order must be >= 4'),
    )
    degree_cap = field(
        type=int, initial=DEFAULT_DEGREE_CAP,
        invariant=lambda v: (v >= 0, 'degree_cap must be >= 0'),
    )
    rel_tol = field(
        type=float, factory=float, initial=DEFAULT_KERNEL_TOL,
        invariant=lambda v: (0 < v < 1, 'rel_tol must be in (0, 1)'),
    )
    max_terms = field(
        type=int, initial=1_000_000,
        invariant=lambda v: (v >= 1, 'max_terms must be >= 1'),
    )
    trials = field(
        type=int, initial=100,
        invariant=lambda v: (v >= 0, 'trials must be >= 0'),
    )
    format = field(
        type=str, initial='json',
        invariant=lambda v: (v in FORMATS, f'format must be one of {FORMATS}'),
    )
    out = field(initial=None)
    workers = field(
        type=int, initial=1,
        invariant=lambda v: (v >= 1, 'workers must be >= 1'),
    )
    radius = field(
        type=float, factory=float, initial=0.9,
        invariant=lambda v: (0 < v < 1, 'radius must be in (0, 1)'),
    )

    def combos(self):
        '''Cartesian product of the sweep axes, in a fixed order'''
        return tuple(
            {'n': n, 'alpha': alpha, 'p': p, 'm': m}
            for n, alpha, p, m in itertools.product(
                self.n, self.alpha, self.p, self.m or (None,),
            )
        )

    @property
    def split(self):
        return radial_split(self.radial_order, self.sphere_order)

    def kernel_series(self, params):
        return kernel_series(
            params, degree_cap=self.degree_cap, rel_tol=self.rel_tol,
        )

    def resolved(self):
        '''Plain dict embedded in every report'''
        return no_pyrsistent(dict(
            {k: getattr(self, k) for k in self._pclass_fields},
            out=None if self.out is None else str(self.out),
        ))

def combo_params(combo):
    return make_params(combo['n'], combo['alpha'], combo['p'], combo['m'])

# ----------------------------------------------------------------------
#
# Layering
#
# ----------------------------------------------------------------------

def _normalize_keys(data):
    return keymap(lambda k: str(k).replace('-', '_'), dict(data or {}))

def read_config_file(path: Union[str, Path, None]):
    '''YAML config with keys mirroring the long flag names'''
    if path is None:
        return {}
    data = read_yaml(path)
    if not isinstance(data, dict):
        _exit_with_msg(f'config file {path} must hold a mapping')
    return _normalize_keys(no_pyrsistent(data))

def run_config(file_values: dict, flag_values: dict) -> RunConfig:
    '''RunConfig from defaults < file < flags (unset flags are None)

    >>> cfg = run_config({'p': [1.5, 2]}, {'p': None, 'n': '2,3'})
    >>> cfg.n, cfg.p, cfg.seed
    ((2, 3), (1.5, 2.0), 20240101)
    '''
    values = pipe(
        merge(_normalize_keys(file_values), valfilter(
            lambda v: v is not None, _normalize_keys(flag_values),
        )),
        lambda d: {k: v for k, v in d.items() if k in RunConfig._pclass_fields},
    )
    unknown = set(_normalize_keys(file_values)) - set(RunConfig._pclass_fields)
    if unknown:
        log.warning(f'ignoring unknown config keys: {sorted(unknown)}')
    try:
        return checked(RunConfig)(**values)
    except (DomainError, ValueError, TypeError) as error:
        _exit_with_msg(f'bad configuration: {error}')

def require_sweep(config: RunConfig):
    combos = config.combos()
    if not combos:
        _exit_with_msg('empty parameter sweep: nothing to run')
    return pvector(combos)
