'''Report documents and their JSON/CSV renderings

A report is one document: the resolved configuration, the package
version and a list of rows. JSON keeps the nesting; CSV flattens each
row with dotted keys under a versioned header comment. Both renderings
are byte-stable for identical inputs.

'''
import math
import logging
from pathlib import Path
from collections.abc import Mapping
from typing import Union

from toolz.curried import pipe, map, concat, unique
from multipledispatch import dispatch
from pyrsistent import pmap, pvector

from .common import (
    BergnormError, no_pyrsistent, stable_json, json_dumps,
    csv_rows_to_content, flat_row,
)
from .zonal import Params
from .bounds import ConstantReport, VARIANTS, audit, jensen_gap
from .operators import NormBracket
from .verify import CheckResult

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

REPORT_FORMAT_VERSION = 1
FORMATS = ('json', 'csv')

# ----------------------------------------------------------------------
#
# Rows
#
# ----------------------------------------------------------------------

@dispatch(ConstantReport)
def to_row(report):
    return report.row()

@dispatch(CheckResult)  # noqa
def to_row(result):
    return result.row()

@dispatch(NormBracket)  # noqa
def to_row(bracket):
    return bracket.report()

@dispatch(Params)  # noqa
def to_row(params):
    return params.row()

@dispatch(Mapping)  # noqa
def to_row(mapping):
    return no_pyrsistent(mapping)

def error_row(params_row: dict, error: Exception):
    '''Row recording an inadmissible sweep point instead of aborting

    >>> error_row({'n': 2}, ValueError('bad'))
    {'n': 2, 'error': 'ValueError: bad'}
    '''
    return dict(params_row, error=f'{type(error).__name__}: {error}')

def constants_row(params: Params, rule=None):
    '''All named constants of one Params point, every variant

    >>> from bergnorm.zonal import params
    >>> row = constants_row(params(2, 1, 2))
    >>> row['n'], row['m'], round(row['A.displayed'] / math.pi, 12)
    (2, 1, 1.25)
    '''
    row = dict(params.row())
    for report in audit(params, rule):
        for variant in VARIANTS:
            row[f'{report.name}.{variant}'] = report.value(variant)
        row[f'{report.name}.rel_discrepancy'] = report.rel_discrepancy
    row['jensen_gap'] = jensen_gap(params)
    return row

def sweep_rows(func, combos, mapper=None):
    '''func over sweep combinations; BergnormErrors become error rows

    Rows come back in sweep order whatever the worker count.

    '''
    def row(combo):
        try:
            return func(combo)
        except BergnormError as error:
            log.error(f'{combo}: {error}')
            return error_row(combo, error)

    if mapper is None:
        return tuple(row(c) for c in combos)
    return tuple(mapper(row, combos))

def failed_rows(rows):
    return tuple(r for r in rows if 'error' in r)

# ----------------------------------------------------------------------
#
# Documents
#
# ----------------------------------------------------------------------

def report_document(command: str, config, rows, **extra):
    '''{command, config, format_version, version, rows, ...}

    >>> doc = report_document('constants', {'seed': 1}, [{'a': 1}])
    >>> sorted(doc)
    ['command', 'config', 'format_version', 'rows', 'version']
    '''
    from . import __version__
    return pmap(dict({
        'command': command,
        'config': no_pyrsistent(config),
        'format_version': REPORT_FORMAT_VERSION,
        'version': __version__,
        'rows': pvector(to_row(r) for r in rows),
    }, **extra))

def _finite(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value

def csv_columns(rows):
    '''Sorted union of the flattened keys (stable across runs)

    >>> csv_columns([{'b': 1}, {'a': 2, 'b': 3}])
    ('a', 'b')
    '''
    return pipe(rows, map(lambda r: r.keys()), concat, unique, sorted, tuple)

def render_json(document) -> str:
    return stable_json(document)

def render_csv(document) -> str:
    '''CSV rows under "# bergnorm ..." header comments

    >>> doc = report_document('constants', {}, [{'n': 2, 'x': {'y': 1.5}}])
    >>> print(render_csv(doc).splitlines()[-1])
    2,1.5
    '''
    rows = [
        {k: _finite(v) for k, v in flat_row(r).items()}
        for r in document['rows']
    ]
    header = (
        f'# bergnorm {document["version"]} report format'
        f' {document["format_version"]}: {document["command"]}\n'
        f'# config: {json_dumps(document["config"], sort_keys=True)}\n'
    )
    if not rows:
        return header
    return header + csv_rows_to_content(
        rows, columns=csv_columns(rows), lineterminator='\n',
    )

RENDERERS = {
    'json': render_json,
    'csv': render_csv,
}

def render(document, fmt: str = 'json') -> str:
    if fmt not in RENDERERS:
        raise BergnormError(f'unknown report format {fmt}; choose {FORMATS}')
    return RENDERERS[fmt](document)

def write_report(content: str, path: Union[str, Path, None] = None):
    '''Write to path (single writer), or to stdout when path is None'''
    if path is None:
        print(content, end='')
        return None
    path = Path(path).expanduser()
    path.write_text(content)
    log.info(f'report written to {path}')
    return path
