import io
import csv
import json
import math
import logging
import functools
import collections.abc
from collections import OrderedDict
from typing import Iterable, Union, Sequence, Any

from pyrsistent import pmap, pvector, InvariantException, PTypeError

try:
    from cytoolz.curried import (
        curry, pipe, map, concatv,
    )
except ImportError:
    from toolz.curried import (
        curry, pipe, map, concatv,
    )

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

# ----------------------------------------------------------------------
#
# Monad(ish) functions (e.g. approximation to Maybe monad)
#
# ----------------------------------------------------------------------

class _null:
    '''Null type for creating pseudo-monads.

    Similar to Nothing in Haskell

    Do **not** use as an iterable (i.e. in for loops or over maps), as
    this leads to **infinite loops**.

    '''
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(_null, cls).__new__(cls)
        return cls._instance

    def __iter__(self):
        return iter([])

    def __repr__(self):
        return 'Null'

    def __bool__(self):
        return False

    def __len__(self):
        return 0

    def __eq__(self, other):
        return False

    def __hash__(self):
        return 0

    def __getattr__(self, key):
        if key == '__wrapped__':
            return lambda *a, **kw: None
        return self.__class__._instance

    def __getitem__(self, key):
        return self.__class__._instance

    def __call__(self, *a, **kw):
        return self.__class__._instance

Null = _null()

def is_null(v):
    return v is None or v is Null

def maybe(value, default=Null):
    '''If value is "null" (i.e. is either None or the Null object), return
    default, otherwise return value.

    Examples:

    >>> maybe({'a': [0, {'b': 1}]}.get('a'))[1]['b']
    1
    >>> maybe({}.get('a'))[1]['b']
    Null

    '''
    if is_null(value):
        return default
    return value

# ----------------------------------------------------------------------
#
# Error handling
#
# ----------------------------------------------------------------------

class BergnormError(ValueError):
    pass

class DomainError(BergnormError):
    pass

class TruncationError(BergnormError):
    '''A series did not reach its tolerance inside its term budget

    '''
    def __init__(self, msg, *, last_increment=math.nan,
                 tail_bound=math.nan):
        super().__init__(msg)
        self.last_increment = last_increment
        self.tail_bound = tail_bound

class EvaluationError(BergnormError):
    def __init__(self, msg, *, node=None):
        super().__init__(msg)
        self.node = node

def require(condition, msg, error=DomainError):
    '''Raise error(msg) unless condition holds

    >>> require(1 < 2, 'never raised')
    >>> require(2 < 1, 'n must be small')
    Traceback (most recent call last):
      ...
    bergnorm.common.DomainError: n must be small
    '''
    if not condition:
        raise error(msg)

def checked(factory):
    '''Turn pyrsistent invariant failures of factory into DomainError

    '''
    @functools.wraps(factory)
    def build(*a, **kw):
        try:
            return factory(*a, **kw)
        except InvariantException as error:
            raise DomainError(
                f'{factory.__name__}: {error.invariant_errors or error}'
            ) from error
        except PTypeError as error:
            raise DomainError(f'{factory.__name__}: {error}') from error
    return build

# ----------------------------------------------------------------------
#
# Basic type operations
#
# ----------------------------------------------------------------------

def is_dict(d):
    return isinstance(d, collections.abc.Mapping)

def is_seq(s):
    return (isinstance(s, collections.abc.Iterable) and not
            is_dict(s) and not
            isinstance(s, (str, bytes)))

def is_int_like(value, tol=0.0):
    '''Is value (within tol) an integer?

    >>> is_int_like(3.0), is_int_like(2.5), is_int_like(2 + 1e-12, 1e-9)
    (True, False, True)
    '''
    return abs(value - round(value)) <= tol

def is_nonpositive_int(value, tol=0.0):
    return value <= tol and is_int_like(value, tol)

# ----------------------------------------------------------------------
#
# Supplemental versions of toolz functions, especially variadic
# versions.
#
# ----------------------------------------------------------------------

@curry
def vmap(func, seq):
    '''Variadic map

    Example:

    >>> pipe([(2, 1), (2, 2), (2, 3)], vmap(lambda a, b: a ** b), tuple)
    (2, 4, 8)
    '''
    return (func(*v) for v in seq)

# ----------------------------------------------------------------------
#
# pyrsistent object functions
#
# ----------------------------------------------------------------------

def no_pyrsistent(obj):
    '''Convert pyrsistent objects (and numpy scalars/arrays) to plain
    Python types

    pmap -> dict
    pvector, ndarray -> tuple

    Examples:

    >>> pipe(pmap({'a': pvector([1, 2, 3])}), no_pyrsistent)
    {'a': (1, 2, 3)}
    '''
    if hasattr(obj, 'serialize') and callable(obj.serialize):
        return no_pyrsistent(obj.serialize())
    if is_dict(obj):
        return pipe(
            obj.items(),
            vmap(lambda k, v: (k, no_pyrsistent(v))),
            dict,
        )
    if hasattr(obj, 'tolist'):
        return no_pyrsistent(obj.tolist())
    if is_seq(obj):
        return pipe(obj, map(no_pyrsistent), tuple)
    if is_null(obj):
        return None
    if isinstance(obj, bool):
        return bool(obj)
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, float):
        return float(obj)
    return obj

# ----------------------------------------------------------------------
#
# Compensated summation
#
# ----------------------------------------------------------------------

def two_sum(u, v):
    '''Error free transformation of a sum: u + v == s + t exactly

    >>> two_sum(1.0, 1e-17)
    (1.0, 1e-17)
    '''
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)

class Accumulator:
    '''Running compensated sum (like math.fsum, but incremental)

    >>> acc = Accumulator()
    >>> for v in [1.0, 1e-16, 1e-16, -1.0]:
    ...     acc.add(v)
    >>> abs(acc.total - 2e-16) < 1e-30
    True
    '''
    def __init__(self, value=0.0):
        self._s = float(value)
        self._t = 0.0

    def add(self, y):
        y, u = two_sum(float(y), self._t)
        self._s, self._t = two_sum(y, self._s)
        if self._s == 0:
            self._s = u
        else:
            self._t += u

    @property
    def total(self):
        return self._s + self._t

def compensated_sum(values):
    '''Exactly rounded sum in a fixed order

    >>> compensated_sum([0.1] * 10)
    1.0
    '''
    return math.fsum(values)

# ----------------------------------------------------------------------
#
# JSON and CSV functions
#
# ----------------------------------------------------------------------

@curry
@functools.wraps(json.dumps)
def json_dumps(*a, **kw):
    return json.dumps(*a, **kw)

def stable_json(obj):
    '''Byte-stable JSON rendering of (possibly pyrsistent) data

    >>> stable_json({'b': 1, 'a': pvector([0.5, None])})
    '{\\n  "a": [\\n    0.5,\\n    null\\n  ],\\n  "b": 1\\n}\\n'
    '''
    return json.dumps(
        no_pyrsistent(obj), sort_keys=True, indent=2, allow_nan=True,
    ) + '\n'

@curry
def csv_rows_to_fp(wfp, rows: Iterable[Union[dict, Sequence[str]]], *,
                   header: bool = True, columns: Iterable[str] = None,
                   **writer_kw):
    r'''Save CSV rows to file-like object

    Args:

      wfp (file-like): File-like object into which to write the CSV
        content

      rows (Iterable[dict]): Row data to write to CSV. If columns is
        None, columns come from the keys of the first row (in order)

      header (bool): Should there be a header in the final CSV?

      columns (Iterable[str]): Columns to be used in final CSV

    Examples:

    >>> wfp = io.StringIO()
    >>> pipe(
    ...     [{'a': 1, 'b': 2}, {'a': 3, 'b': 4}],
    ...     csv_rows_to_fp(wfp),
    ... )
    >>> wfp.getvalue() == 'a,b\r\n1,2\r\n3,4\r\n'
    True
    >>> wfp = io.StringIO()
    >>> pipe([], csv_rows_to_fp(wfp))
    >>> wfp.getvalue()
    ''
    '''
    row_iter = iter(rows)
    try:
        first_row = next(row_iter)
    except StopIteration:
        log.error('No rows in row iterator... stopping, no write made.')
        return

    columns = tuple(columns or first_row.keys())
    writer = csv.DictWriter(wfp, columns, **writer_kw)
    if header:
        writer.writeheader()
    writer.writerows(
        OrderedDict((c, r.get(c)) for c in columns)
        for r in concatv([first_row], row_iter)
    )

def csv_rows_to_content(rows, *, header=True, columns=None, **writer_kw):
    '''Save CSV rows to a string

    '''
    buf = io.StringIO()
    csv_rows_to_fp(buf, rows, header=header, columns=columns, **writer_kw)
    return buf.getvalue()

def flatdict(obj: Union[dict, Any], keys=()):
    '''Flatten a Python dictionary such that nested values are returned
    with the key sequence required to access them.

    Examples:

    >>> pipe({'a': {'b': [1, 2, 3]}, 'c': 2}, flatdict, list)
    [('a', 'b', [1, 2, 3]), ('c', 2)]
    '''
    if is_dict(obj):
        for k, v in obj.items():
            yield from flatdict(v, keys + (k, ))
    else:
        yield keys + (obj,)

def flat_row(record: dict, sep='.'):
    '''One-level dict with dotted keys (for CSV rows)

    >>> flat_row({'params': {'n': 2}, 'value': 1.5})
    {'params.n': 2, 'value': 1.5}
    '''
    return pipe(
        flatdict(no_pyrsistent(record)),
        map(lambda t: (sep.join(map(str, t[:-1])), t[-1])),
        dict,
    )
