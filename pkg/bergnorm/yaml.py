'''YAML config files (ruamel round-trip)

'''
import io
import logging
from pathlib import Path
from collections.abc import Mapping, Iterable

import ruamel.yaml
from ruamel.yaml.comments import CommentedMap
from toolz import pipe
from multipledispatch import dispatch

from . import common

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

def _yaml():
    yaml = ruamel.yaml.YAML(typ='rt')
    yaml.default_flow_style = False
    yaml.width = 2**31
    return yaml

def dump(data) -> str:
    '''Dump data as a YAML string

    >>> print(dump({'n': [2, 3], 'alpha': 1.0}), end='')
    n:
    - 2
    - 3
    alpha: 1.0
    '''
    buf = io.StringIO()
    _yaml().dump(data, buf)
    return buf.getvalue()

def load(content: str):
    '''Load YAML content

    >>> data = load('seed: 7\\np: [2, 4]')
    >>> data['seed'], list(data['p'])
    (7, [2, 4])
    '''
    return _yaml().load(content)

def read_yaml(path: (str, Path)):
    '''Read YAML data from path and return object
    '''
    with Path(path).expanduser().open() as rfp:
        return _yaml().load(rfp)

def _write_yaml(path, data):
    with Path(path).expanduser().open('w') as wfp:
        _yaml().dump(data, wfp)
    return True

@dispatch((str, Path), Mapping)
def write_yaml(path, dict_data):
    '''Write data as YAML to path

    Args:
      path (str, Path): path to write to

      data (dict-like): dictionary-like object to write (will be
         recursively converted to base Python types)

    Returns: (bool) success of write operation,

    Raises: on error, will raise exception

    '''
    return _write_yaml(path, pipe(dict_data,
                                  common.no_pyrsistent,
                                  CommentedMap))

@dispatch((str, Path), Iterable)  # noqa
def write_yaml(path, iterable_data):
    return _write_yaml(path, pipe(iterable_data, common.no_pyrsistent, list))

@dispatch((str, Path), object)  # noqa
def write_yaml(path, object_data):
    return _write_yaml(path, object_data)
