"""Lazy fluent pipelines over experiment samples.

```python
@sweep
def samples(config: RunConfig) -> Iterator[tuple[int, RunConfig]]:
    for k in range(config.samples):
        yield k, config

rows = samples(config).parallel_map(probe, workers=4).flatten().to_list()
```
"""
import itertools
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from functools import wraps
from typing import Generic, ParamSpec, TypeVar

_T = TypeVar('_T')
_R = TypeVar('_R')
_P = ParamSpec('_P')

_ConditionFunc = Callable[[_T], bool]


def sweep(func: Callable[_P, Iterator[_T]]) -> Callable[_P, 'Sweep[_T]']:
    """Convert result of the generator function to Sweep

    :param func: function that returns an iterator
    :return: new function
    """
    @wraps(func)
    def wrapper(*args: _P.args, **kwargs: _P.kwargs) -> 'Sweep[_T]':
        return Sweep(func(*args, **kwargs))
    return wrapper


class Sweep(Generic[_T]):
    """Single-pass iterator with chainable transformations"""

    __slots__ = ('_it', )

    def __init__(self, it: Iterable[_T] | Iterator[_T]):
        self._it: Iterator[_T] = iter(it)

    def __iter__(self) -> Iterator[_T]:
        return self._it

    def __next__(self) -> _T:
        return next(self._it)

    def to_list(self) -> list[_T]:
        return list(self._it)

    def map(self, func: Callable[[_T], _R]) -> 'Sweep[_R]':
        return Sweep(map(func, self))

    def flatten(self: 'Sweep[Iterable[_R]]') -> 'Sweep[_R]':
        """Flatten one level of nesting, e.g. per-state row lists into rows

        :raise TypeError: if an encountered item is not an Iterable
        """
        return Sweep(itertools.chain.from_iterable(self))

    def count_where(self, func: _ConditionFunc) -> int:
        """Number of items satisfying the condition, consumes the iterator"""
        return sum(1 for item in self if func(item))

    def parallel_map(self, func: Callable[[_T], _R], workers: int = 1) -> 'Sweep[_R]':
        """Like :meth:`map`, spread over a process pool when workers > 1.

        Results keep the input order. func and the items must be picklable.

        :param func: module-level function
        :param workers: number of processes, 1 runs in the current process
        """
        if workers <= 1:
            return self.map(func)
        items = self.to_list()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(func, items))
        return Sweep(results)
