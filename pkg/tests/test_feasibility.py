import math
import random
from itertools import combinations

import pytest

from carshare.feasibility import (DisplacementIndex, SegmentTree,
                                  is_feasible_set)
from carshare.instance import STATION_A, STATION_B
from conftest import build_reduction_example, micro_corpus


class NaiveIndex:
    """O(|T|) reference implementation: full arrays, full prefix scans."""

    def __init__(self, inst):
        self.inst = inst
        self.times = {st: inst.station_times(st) for st in (STATION_A, STATION_B)}
        self.pos = {st: {t: i for i, t in enumerate(ts)}
                    for st, ts in self.times.items()}
        self.cells = {st: [0] * len(ts) for st, ts in self.times.items()}
        for st in self.cells:
            if self.cells[st]:
                self.cells[st][0] = inst.fleet(st)
        self.satisfied = set()

    def _apply(self, cid, sign):
        c = self.inst.customer(cid)
        for d in (c.outbound, c.ret):
            self.cells[d.origin][self.pos[d.origin][d.start]] -= sign
            dest = d.destination
            self.cells[dest][self.pos[dest][d.end]] += sign

    def _feasible(self):
        for arr in self.cells.values():
            acc = 0
            for v in arr:
                acc += v
                if acc < 0:
                    return False
        return True

    def can_insert(self, cid):
        self._apply(cid, +1)
        ok = self._feasible()
        self._apply(cid, -1)
        return ok

    def can_remove(self, cid):
        self._apply(cid, -1)
        ok = self._feasible()
        self._apply(cid, +1)
        return ok

    def insert(self, cid):
        self._apply(cid, +1)
        self.satisfied.add(cid)

    def remove(self, cid):
        self._apply(cid, -1)
        self.satisfied.discard(cid)


# ---------------------------------------------------------------- segment tree

def test_segment_tree_matches_lists():
    rng = random.Random(5)
    for size in (1, 2, 3, 7, 16, 33):
        tree = SegmentTree(size)
        arr = [0] * size
        for _ in range(200):
            i = rng.randrange(size)
            d = rng.randint(-3, 3)
            tree.add(i, d)
            arr[i] += d
            assert tree.to_list() == arr
            j = rng.randrange(size)
            assert tree.prefix_sum(j) == sum(arr[:j + 1])
            lo = rng.randrange(size)
            hi = rng.randrange(lo, size)
            prefixes = [sum(arr[:k + 1]) for k in range(lo, hi + 1)]
            assert tree.min_prefix(lo, hi) == min(prefixes)


def test_segment_tree_visit_bound():
    rng = random.Random(6)
    for size in (1, 5, 16, 100, 1000):
        tree = SegmentTree(size)
        bound = tree.query_visit_bound()
        assert bound == (2 if size <= 1 else 2 * math.ceil(math.log2(size)) + 2)
        for _ in range(100):
            tree.add(rng.randrange(size), rng.randint(-2, 2))
            lo = rng.randrange(size)
            tree.min_prefix(lo, rng.randrange(lo, size))
            assert tree.last_visits <= bound
        assert tree.max_visits <= bound


def test_empty_range_min_prefix():
    tree = SegmentTree(8)
    assert tree.range_min_prefix(5, 4) == float("inf")


# ------------------------------------------------------------- displacement

def test_arrays_after_two_insertions(reduction_example):
    idx = DisplacementIndex(reduction_example)
    idx.insert(1)
    idx.insert(2)
    assert idx.arrays() == {
        "A": [1, 0, 1, -1, 0, 1],
        "B": [3, -1, 0, 0, 0, 0],
    }


def test_not_downward_closed(counterexample):
    assert is_feasible_set(counterexample, {1, 2, 3, 4})
    for sub in combinations(range(1, 5), 3):
        assert not is_feasible_set(counterexample, sub)


def test_greedy_insertion_order(counterexample):
    idx = DisplacementIndex(counterexample)
    taken = []
    for cid in (3, 4, 2, 1):
        if idx.can_insert(cid):
            idx.insert(cid)
            taken.append(cid)
    assert sorted(taken) == [3, 4]


def test_insert_guard(counterexample):
    idx = DisplacementIndex(counterexample)
    idx.insert(3)
    idx.insert(4)
    with pytest.raises(ValueError):
        idx.insert(1)
    with pytest.raises(ValueError):
        idx.insert(3)
    with pytest.raises(ValueError):
        idx.remove(1)
    with pytest.raises(ValueError):
        idx.can_insert(3)
    with pytest.raises(ValueError):
        idx.can_remove(1)


def test_clone_is_independent(counterexample):
    idx = DisplacementIndex(counterexample)
    idx.insert(3)
    other = idx.clone()
    other.insert(4)
    assert idx.solution().satisfied == frozenset({3})
    assert other.solution().satisfied == frozenset({3, 4})


def test_force_insert_roundtrip(counterexample):
    idx = DisplacementIndex(counterexample)
    for cid in (1, 2, 3, 4):
        idx.insert(cid, force=True)
    assert idx.is_feasible()
    idx.remove(1)
    assert not idx.is_feasible()
    idx.insert(1, force=True)
    assert idx.is_feasible()


def test_random_stream_matches_naive():
    rng = random.Random(77)
    for inst in micro_corpus(20, 41):
        fast = DisplacementIndex(inst)
        slow = NaiveIndex(inst)
        ids = [c.id for c in inst.customers]
        for _ in range(2000):
            cid = rng.choice(ids)
            if cid in fast.satisfied:
                assert fast.can_remove(cid) == slow.can_remove(cid)
                if rng.random() < 0.6:
                    fast.remove(cid)
                    slow.remove(cid)
            else:
                ok = fast.can_insert(cid)
                assert ok == slow.can_insert(cid)
                if ok and rng.random() < 0.8:
                    fast.insert(cid)
                    slow.insert(cid)
            for st in (STATION_A, STATION_B):
                assert fast.tree(st).max_visits <= fast.tree(st).query_visit_bound()
        assert fast.solution().satisfied == frozenset(slow.satisfied)
