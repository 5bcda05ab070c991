'''Order-preserving executor maps

Results always come back in submission order, so any reduction over
them is deterministic regardless of the worker count.

'''
import logging
import concurrent.futures

from toolz.curried import curry, concatv

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

def serial_map(func, iterable, *iterables, **_):
    '''Plain map with the same signature as the executor maps

    >>> list(serial_map(lambda a, b: a + b, [1, 2], [10, 20]))
    [11, 22]
    '''
    yield from map(func, *concatv((iterable,), iterables))

@curry
def thread_map(func, iterable, *iterables, **tpe_kw):
    '''Threaded map

    >>> list(thread_map(lambda v: v * 2, range(4), max_workers=2))
    [0, 2, 4, 6]
    '''
    with concurrent.futures.ThreadPoolExecutor(**tpe_kw) as executor:
        for value in executor.map(func, *concatv((iterable,), iterables)):
            yield value

MAPS = {'thread': thread_map}

def pmap(ptype: str, workers: int = 1):
    '''Pick a map by name; a single worker always means serial

    >>> pmap('thread', 1) is serial_map
    True
    '''
    if workers is None or workers <= 1:
        return serial_map
    chosen = MAPS[ptype]
    log.debug(f'{ptype} map with {workers} workers')
    return chosen(max_workers=workers)
