from collections.abc import Iterable, Iterator

import pytest

from entropic_qc.sweep import Sweep, sweep


def _square(x: int) -> int:
    return x * x


def _pair(x: int) -> list[int]:
    return [x, -x]


class TestSweep:

    def test_to_list(self):
        r = range(5)
        actual_list = Sweep(r).to_list()
        assert isinstance(actual_list, list)
        assert actual_list == list(r)

    def test_single_pass(self):
        it = Sweep(range(3))
        assert next(it) == 0
        assert it.to_list() == [1, 2]
        assert it.to_list() == []

    def test_map(self):
        assert Sweep(range(10)).map(lambda x: x ** 2).to_list() == [x ** 2 for x in range(10)]

    @pytest.mark.parametrize(['it', 'expected'], (
        ((range(3), range(3, 7)), [0, 1, 2, 3, 4, 5, 6]),
        (([], [1], []), [1]),
        ((), []),
    ))
    def test_flatten(self, it: Iterable[Iterable[int]], expected: list[int]):
        assert Sweep(it).flatten().to_list() == expected

    def test_flatten_needs_iterables(self):
        with pytest.raises(TypeError):
            Sweep([1, 2]).flatten().to_list()

    @pytest.mark.parametrize(['items', 'expected'], (
        ([True, False, True], 2),
        ([], 0),
        ([0.0, -1.0, 2.0], 2),
    ))
    def test_count_where(self, items: list, expected: int):
        assert Sweep(items).count_where(bool) == expected

    @pytest.mark.parametrize('workers', (1, 2))
    def test_parallel_map_keeps_order(self, workers: int):
        assert Sweep(range(20)).parallel_map(_square, workers=workers).to_list() == [x * x for x in range(20)]

    def test_parallel_map_then_flatten(self):
        assert Sweep(range(3)).parallel_map(_pair, workers=2).flatten().to_list() == [0, 0, 1, -1, 2, -2]


def test_sweep():
    r = range(10)

    @sweep
    def generator() -> Iterator[int]:
        yield from r

    it = generator()
    assert isinstance(it, Sweep)
    assert it.to_list() == list(r)
