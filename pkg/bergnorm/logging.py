import time
import logging
import contextlib

import coloredlogs
from toolz import merge

def new_log(name):
    log = logging.getLogger(name)
    log.addHandler(logging.NullHandler())
    return log

def setup_logging(loglevel: str, **config_kw):
    '''Install coloredlogs on the root logger (CLI entry points only)

    '''
    fmt = (
        '{asctime} {levelname: <6} [{name}:{lineno: >4}]  {message}'
    )
    datefmt = '%Y-%m-%d %H:%M:%S'
    kw = merge({
        'level': loglevel.upper(),
        'datefmt': datefmt,
        'fmt': fmt,
        'style': '{',
    }, config_kw)
    coloredlogs.install(**kw)

@contextlib.contextmanager
def timed(log: logging.Logger, label: str, level=logging.INFO):
    '''Log wall time spent in the block

    Timings only go to the log; reports never carry them, so repeated
    runs stay byte-identical.

    >>> with timed(new_log('doctest'), 'nothing'):
    ...     pass
    '''
    start = time.perf_counter()
    try:
        yield
    finally:
        log.log(level, f'{label}: {time.perf_counter() - start:.3f} s')
