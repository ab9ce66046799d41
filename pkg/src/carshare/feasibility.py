"""Incremental feasibility checking through per-station displacement vectors.

Each station keeps an array indexed by its sorted distinct time points.
Cell 0 starts at the station's fleet size and every other cell at 0.
Inserting a customer subtracts one at each demand's start point and adds
one at each end point; removal is the inverse.  A tracked set of customers
is simultaneously satisfiable exactly when every prefix sum of both arrays
is nonnegative.

The arrays live in segment trees supporting point update, prefix sum and
minimum-prefix-sum over a range, all in logarithmic time, so candidate
moves can be evaluated without replaying the whole solution.
"""

from __future__ import annotations

import math

from .instance import Customer, Instance, Solution, STATION_A, STATION_B

_INF = float("inf")


class SegmentTree:
    """Fixed-size array with point updates, range sums and range minimum
    prefix sums.

    Internal nodes store ``(sum, minpref)`` where ``minpref`` is the minimum
    over nonempty prefixes of the node's segment; segments combine as
    ``(s1 + s2, min(m1, s1 + m2))``.  Range queries decompose bottom-up into
    at most 2*ceil(log2 size) canonical nodes; ``last_visits`` records how
    many were read by the most recent query.
    """

    def __init__(self, size: int):
        self.size = size
        self._cap = 1 if size == 0 else 1 << max(0, (size - 1).bit_length())
        self._sum = [0] * (2 * self._cap)
        self._minp = [0.0] * (2 * self._cap)
        # padding leaves hold the monoid identity (0, +inf)
        for i in range(2 * self._cap):
            self._minp[i] = _INF
        for i in range(size):
            self._minp[self._cap + i] = 0
        for node in range(self._cap - 1, 0, -1):
            self._pull(node)
        self.last_visits = 0
        self.max_visits = 0

    def _pull(self, node: int) -> None:
        l, r = 2 * node, 2 * node + 1
        self._sum[node] = self._sum[l] + self._sum[r]
        self._minp[node] = min(self._minp[l], self._sum[l] + self._minp[r])

    def add(self, index: int, delta: int) -> None:
        node = self._cap + index
        self._sum[node] += delta
        self._minp[node] = self._sum[node]
        node >>= 1
        while node:
            self._pull(node)
            node >>= 1

    def value(self, index: int) -> int:
        return self._sum[self._cap + index]

    def _canonical(self, lo: int, hi: int) -> list[int]:
        """Canonical node cover of [lo, hi], in left-to-right order."""
        left: list[int] = []
        right: list[int] = []
        l = lo + self._cap
        r = hi + self._cap + 1
        while l < r:
            if l & 1:
                left.append(l)
                l += 1
            if r & 1:
                r -= 1
                right.append(r)
            l >>= 1
            r >>= 1
        right.reverse()
        return left + right

    def prefix_sum(self, index: int) -> int:
        """Sum of cells [0, index]."""
        if index < 0:
            self.last_visits = 0
            return 0
        nodes = self._canonical(0, index)
        self.last_visits = len(nodes)
        self.max_visits = max(self.max_visits, self.last_visits)
        return sum(self._sum[n] for n in nodes)

    def range_min_prefix(self, lo: int, hi: int) -> float:
        """Minimum over k in [lo, hi] of sum(cells[lo..k]), relative to lo.

        Returns +inf for an empty range.  The absolute minimum prefix over
        [lo, hi] is ``prefix_sum(lo - 1) + range_min_prefix(lo, hi)``.
        """
        if hi < lo:
            self.last_visits = 0
            return _INF
        nodes = self._canonical(lo, hi)
        self.last_visits = len(nodes)
        self.max_visits = max(self.max_visits, self.last_visits)
        acc_sum = 0
        acc_min = _INF
        for n in nodes:
            acc_min = min(acc_min, acc_sum + self._minp[n])
            acc_sum += self._sum[n]
        return acc_min

    def min_prefix(self, lo: int, hi: int) -> float:
        """Minimum over k in [lo, hi] of sum(cells[0..k])."""
        if hi < lo:
            return _INF
        return self.prefix_sum(lo - 1) + self.range_min_prefix(lo, hi)

    def query_visit_bound(self) -> int:
        """Guaranteed ceiling on ``last_visits`` for any single query."""
        if self.size <= 1:
            return 2
        return 2 * math.ceil(math.log2(self.size)) + 2

    def to_list(self) -> list[int]:
        return [self._sum[self._cap + i] for i in range(self.size)]


class DisplacementIndex:
    """Tracks a solution set and answers feasibility queries incrementally.

    Intermediate infeasible states are representable (``insert`` with
    ``force=True``); ``is_feasible()`` reports the validity of the current
    state.  ``can_insert``/``can_remove`` are pure and exact even when the
    current state is infeasible.
    """

    def __init__(self, inst: Instance):
        self.instance = inst
        self._times = {
            STATION_A: inst.station_times(STATION_A),
            STATION_B: inst.station_times(STATION_B),
        }
        self._pos = {
            st: {t: i for i, t in enumerate(ts)} for st, ts in self._times.items()
        }
        self._trees = {st: SegmentTree(len(ts)) for st, ts in self._times.items()}
        for st in (STATION_A, STATION_B):
            if self._trees[st].size > 0:
                self._trees[st].add(0, inst.fleet(st))
        self.satisfied: set[int] = set()

    def clone(self) -> "DisplacementIndex":
        other = DisplacementIndex.__new__(DisplacementIndex)
        other.instance = self.instance
        other._times = self._times
        other._pos = self._pos
        other._trees = {}
        for st, tree in self._trees.items():
            t = SegmentTree.__new__(SegmentTree)
            t.size = tree.size
            t._cap = tree._cap
            t._sum = tree._sum.copy()
            t._minp = tree._minp.copy()
            t.last_visits = 0
            t.max_visits = 0
            other._trees[st] = t
        other.satisfied = set(self.satisfied)
        return other

    def tree(self, station: str) -> SegmentTree:
        return self._trees[station]

    def arrays(self) -> dict[str, list[int]]:
        return {st: tree.to_list() for st, tree in self._trees.items()}

    def solution(self) -> Solution:
        return Solution.of(self.satisfied)

    # Effects of inserting customer c, per station:
    #   outbound-origin station X: -1 at idx(o.start), +1 at idx(r.end);
    #     prefix sums drop by one on [idx(o.start), idx(r.end) - 1].
    #   other station Y: +1 at idx(o.end), -1 at idx(r.start);
    #     prefix sums rise by one on [idx(o.end), idx(r.start) - 1].
    # Removal negates both.

    def _ranges(self, c: Customer) -> tuple[tuple[str, int, int], tuple[str, int, int]]:
        x = c.outbound.origin
        y = c.outbound.destination
        pos_x, pos_y = self._pos[x], self._pos[y]
        x_lo = pos_x[c.outbound.start]
        x_hi = pos_x[c.ret.end] - 1
        y_lo = pos_y[c.outbound.end]
        y_hi = pos_y[c.ret.start] - 1
        return (x, x_lo, x_hi), (y, y_lo, y_hi)

    def _min_after(self, station: str, lo: int, hi: int, delta: int) -> float:
        """Global minimum prefix sum of ``station`` if all prefixes in
        [lo, hi] were shifted by ``delta``."""
        tree = self._trees[station]
        last = tree.size - 1
        if last < 0:
            return _INF
        if hi < lo:
            return tree.min_prefix(0, last)
        out = min(tree.min_prefix(0, lo - 1), tree.min_prefix(lo, hi) + delta)
        return min(out, tree.min_prefix(hi + 1, last))

    def is_feasible(self) -> bool:
        for st, tree in self._trees.items():
            if tree.size and tree.min_prefix(0, tree.size - 1) < 0:
                return False
        return True

    def can_insert(self, cid: int) -> bool:
        if cid in self.satisfied:
            raise ValueError(f"customer {cid} already in solution")
        c = self.instance.customer(cid)
        (x, x_lo, x_hi), (y, y_lo, y_hi) = self._ranges(c)
        if self._min_after(x, x_lo, x_hi, -1) < 0:
            return False
        return self._min_after(y, y_lo, y_hi, +1) >= 0

    def can_remove(self, cid: int) -> bool:
        if cid not in self.satisfied:
            raise ValueError(f"customer {cid} not in solution")
        c = self.instance.customer(cid)
        (x, x_lo, x_hi), (y, y_lo, y_hi) = self._ranges(c)
        if self._min_after(x, x_lo, x_hi, +1) < 0:
            return False
        return self._min_after(y, y_lo, y_hi, -1) >= 0

    def _apply(self, c: Customer, sign: int) -> None:
        for d in (c.outbound, c.ret):
            self._trees[d.origin].add(self._pos[d.origin][d.start], -sign)
            dest = d.destination
            self._trees[dest].add(self._pos[dest][d.end], +sign)

    def insert(self, cid: int, force: bool = False) -> None:
        if cid in self.satisfied:
            raise ValueError(f"customer {cid} already in solution")
        if not force and not self.can_insert(cid):
            raise ValueError(f"inserting customer {cid} breaks feasibility")
        self._apply(self.instance.customer(cid), +1)
        self.satisfied.add(cid)

    def remove(self, cid: int) -> None:
        if cid not in self.satisfied:
            raise ValueError(f"customer {cid} not in solution")
        self._apply(self.instance.customer(cid), -1)
        self.satisfied.discard(cid)


def is_feasible_set(inst: Instance, ids) -> bool:
    """From-scratch check that ``ids`` are simultaneously satisfiable."""
    times = {st: inst.station_times(st) for st in (STATION_A, STATION_B)}
    pos = {st: {t: i for i, t in enumerate(ts)} for st, ts in times.items()}
    cells = {st: [0] * len(ts) for st, ts in times.items()}
    for st in cells:
        if cells[st]:
            cells[st][0] = inst.fleet(st)
    for cid in ids:
        c = inst.customer(cid)
        for d in (c.outbound, c.ret):
            cells[d.origin][pos[d.origin][d.start]] -= 1
            dest = d.destination
            cells[dest][pos[dest][d.end]] += 1
    for arr in cells.values():
        acc = 0
        for v in arr:
            acc += v
            if acc < 0:
                return False
    return True
