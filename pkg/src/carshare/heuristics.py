"""Neighborhood search heuristics.

Eight neighborhoods over feasible customer sets, a local search that
drives them, and three metaheuristics on top: GRASP (relaxation-guided
randomized construction plus local search restarts), VNS (shaking through
exchange and decrease neighborhoods), and a tabu search over an
aggregated neighborhood.

Neighborhood generators come in two modes.  ``exhaust`` enumerates every
candidate tuple in random order, so a ``None`` result is a proof of
emptiness; it is only practical on small instances.  ``sample`` draws
candidate tuples by rejection with a cap of ``SAMPLE_CAP_FACTOR * n``
attempts before giving up, which is how the large benchmark runs operate.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from itertools import combinations

from .feasibility import DisplacementIndex, is_feasible_set
from .instance import Instance, Solution
from .lp import INFEASIBLE, RelaxationSolver
from .model import Model

SAMPLE_CAP_FACTOR = 50
EXHAUST_MAX_N = 20    # instances up to this size default to exhaust mode
DEFAULT_ALPHA = 0.8
DEFAULT_TENURE = 0.046


class SearchState:
    """A feasible solution under modification plus its displacement index.

    The state is feasible between public operations; neighborhood
    generators restore it whenever a candidate move is rejected.
    """

    def __init__(self, instance: Instance, rng: random.Random | None = None,
                 deadline: float | None = None,
                 index: DisplacementIndex | None = None):
        self.instance = instance
        self.rng = rng if rng is not None else random.Random(0)
        self.deadline = deadline
        self.index = index if index is not None else DisplacementIndex(instance)
        self.interrupted = False

    @classmethod
    def from_solution(cls, instance: Instance, solution,
                      rng: random.Random | None = None,
                      deadline: float | None = None) -> "SearchState":
        state = cls(instance, rng, deadline)
        ids = solution.satisfied if isinstance(solution, Solution) else solution
        for cid in sorted(ids):
            state.index.insert(cid, force=True)
        if not state.index.is_feasible():
            raise ValueError("initial solution is infeasible")
        return state

    def clone(self) -> "SearchState":
        return SearchState(self.instance, self.rng, self.deadline,
                           self.index.clone())

    @property
    def value(self) -> int:
        return len(self.index.satisfied)

    def solution(self) -> Solution:
        return self.index.solution()

    def members(self) -> list[int]:
        return sorted(self.index.satisfied)

    def outsiders(self) -> list[int]:
        inside = self.index.satisfied
        return [c.id for c in self.instance.customers if c.id not in inside]

    def out_of_time(self) -> bool:
        return self.deadline is not None and time.monotonic() >= self.deadline


def _mode(state: SearchState, mode: str | None) -> str:
    if mode is not None:
        if mode not in ("sample", "exhaust"):
            raise ValueError(f"unknown mode: {mode}")
        return mode
    return "exhaust" if state.instance.n <= EXHAUST_MAX_N else "sample"


def _try_insert_tuple(state: SearchState, ids: tuple[int, ...]) -> bool:
    """Insert ``ids`` if the joint result is feasible, else leave the
    state untouched."""
    idx = state.index
    for cid in ids[:-1]:
        idx.insert(cid, force=True)
    last = ids[-1]
    if idx.can_insert(last):
        idx.insert(last, force=True)
        return True
    for cid in ids[:-1]:
        idx.remove(cid)
    return False


def _try_remove_tuple(state: SearchState, ids: tuple[int, ...]) -> bool:
    idx = state.index
    for cid in ids[:-1]:
        idx.remove(cid)
    last = ids[-1]
    if idx.can_remove(last):
        idx.remove(last)
        return True
    for cid in ids[:-1]:
        idx.insert(cid, force=True)
    return False


def _pair_insertable(state: SearchState, a: int, b: int) -> bool:
    idx = state.index
    idx.insert(a, force=True)
    ok = idx.can_insert(b)
    idx.remove(a)
    return ok


def _pair_removable(state: SearchState, a: int, b: int) -> bool:
    idx = state.index
    idx.remove(a)
    ok = idx.can_remove(b)
    idx.insert(a, force=True)
    return ok


def _increase_filter_ok(state: SearchState, ids: tuple[int, ...]) -> bool:
    # minimality: no member addable alone, and for triples no sub-pair
    if len(ids) >= 3:
        for a, b in combinations(ids, 2):
            if _pair_insertable(state, a, b):
                return False
    return True


def _decrease_filter_ok(state: SearchState, ids: tuple[int, ...]) -> bool:
    if len(ids) >= 3:
        for a, b in combinations(ids, 2):
            if _pair_removable(state, a, b):
                return False
    return True


def neighbor_increase(state: SearchState, k: int, mode: str | None = None) -> Solution | None:
    """Add ``k`` currently unsatisfied customers (applied in place).

    For k >= 2 only minimal tuples count: no single customer of the tuple
    (and, for k = 3, no pair) may be addable on its own.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"unsupported increase size: {k}")
    mode = _mode(state, mode)
    rng = state.rng
    idx = state.index
    outsiders = state.outsiders()
    if k == 1:
        addable = [cid for cid in outsiders if idx.can_insert(cid)]
        if not addable:
            return None
        cid = rng.choice(addable)
        idx.insert(cid)
        return state.solution()
    # pool for minimal tuples: customers not addable on their own
    pool = [cid for cid in outsiders if not idx.can_insert(cid)]
    if len(pool) < k:
        return None
    if mode == "exhaust":
        tuples = list(combinations(pool, k))
        rng.shuffle(tuples)
        for ids in tuples:
            if _increase_filter_ok(state, ids) and _try_insert_tuple(state, ids):
                return state.solution()
        return None
    cap = SAMPLE_CAP_FACTOR * state.instance.n
    for _ in range(cap):
        ids = tuple(rng.sample(pool, k))
        if _increase_filter_ok(state, ids) and _try_insert_tuple(state, ids):
            return state.solution()
    return None


def neighbor_decrease(state: SearchState, k: int, mode: str | None = None) -> Solution | None:
    """Remove ``k`` satisfied customers (applied in place); minimality
    filters mirror the increase case."""
    if k not in (1, 2, 3):
        raise ValueError(f"unsupported decrease size: {k}")
    mode = _mode(state, mode)
    rng = state.rng
    idx = state.index
    members = state.members()
    if k == 1:
        removable = [cid for cid in members if idx.can_remove(cid)]
        if not removable:
            return None
        idx.remove(rng.choice(removable))
        return state.solution()
    pool = [cid for cid in members if not idx.can_remove(cid)]
    if len(pool) < k:
        return None
    if mode == "exhaust":
        tuples = list(combinations(pool, k))
        rng.shuffle(tuples)
        for ids in tuples:
            if _decrease_filter_ok(state, ids) and _try_remove_tuple(state, ids):
                return state.solution()
        return None
    cap = SAMPLE_CAP_FACTOR * state.instance.n
    for _ in range(cap):
        ids = tuple(rng.sample(pool, k))
        if _decrease_filter_ok(state, ids) and _try_remove_tuple(state, ids):
            return state.solution()
    return None


def neighbor_exchange(state: SearchState, give: int = 1, take: int = 1,
                      mode: str | None = None) -> Solution | None:
    """Swap one satisfied customer for ``take`` unsatisfied ones."""
    if give != 1 or take not in (1, 2):
        raise ValueError(f"unsupported exchange shape: give={give} take={take}")
    mode = _mode(state, mode)
    rng = state.rng
    idx = state.index
    members = state.members()
    outsiders = state.outsiders()
    if not members or len(outsiders) < take:
        return None

    def attempt(out_cid: int, in_ids: tuple[int, ...]) -> bool:
        idx.remove(out_cid)
        if _try_insert_tuple(state, in_ids):
            return True
        idx.insert(out_cid, force=True)
        return False

    if mode == "exhaust":
        moves = [(m, ins) for m in members
                 for ins in combinations(outsiders, take)]
        rng.shuffle(moves)
        for m, ins in moves:
            if attempt(m, ins):
                return state.solution()
        return None
    cap = SAMPLE_CAP_FACTOR * state.instance.n
    for _ in range(cap):
        m = rng.choice(members)
        ins = tuple(rng.sample(outsiders, take))
        if attempt(m, ins):
            return state.solution()
    return None


def local_search(state: SearchState, mode: str | None = None) -> SearchState:
    """Improve until the single-add, double-add and one-for-two exchange
    neighborhoods are all empty; deadline-aware."""
    while True:
        while not state.out_of_time():
            if neighbor_increase(state, 2, mode) is None:
                break
        if state.out_of_time():
            state.interrupted = True
            return state
        if neighbor_increase(state, 1, mode) is not None:
            continue
        if neighbor_exchange(state, 1, 2, mode) is None:
            return state


@dataclass
class HeuristicResult:
    method: str
    solution: Solution
    value: int
    construction_value: int
    iterations: int
    improvements: int
    elapsed_s: float
    interrupted: bool = False

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "construction_value": self.construction_value,
            "iterations": self.iterations,
            "improvements": self.improvements,
            "elapsed_s": self.elapsed_s,
            "satisfied": sorted(self.solution.satisfied),
        }


def grasp_construct(model: Model, alpha: float, rng: random.Random,
                    deadline: float | None = None,
                    solver: RelaxationSolver | None = None) -> Solution:
    """Relaxation-guided randomized construction.

    Starts from the customers at relaxation value >= 1/2 and repeatedly
    drops one, chosen at random among those whose removal keeps the
    restricted relaxation value within an ``alpha`` slice of the best,
    until the remaining candidates are simultaneously satisfiable.  Each
    round also drops every candidate falling below 1/2 in the re-solved
    relaxation of the chosen drop, which shortens the loop considerably.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha out of range: {alpha}")
    inst = model.instance
    if solver is None:
        solver = RelaxationSolver(model)
    sol = solver.solve()
    if sol.status == INFEASIBLE:
        return Solution.of(())
    cl = {c.id for c in inst.customers if sol.customer_value(model, c.id) >= 0.5}
    all_ids = {c.id for c in inst.customers}
    while cl and not is_feasible_set(inst, cl):
        if deadline is not None and time.monotonic() >= deadline:
            # out of time: fall back to the candidates at relaxation
            # value one, which are usually (not always: a dropped
            # fractional customer may have been supplying a car) a
            # satisfiable block; greedy insertion repairs the rest
            ones = sorted(cid for cid in cl
                          if sol.customer_value(model, cid) >= 1.0 - 1e-6)
            index = DisplacementIndex(inst)
            for cid in ones:
                index.insert(cid, force=True)
            if not index.is_feasible():
                for cid in ones:
                    index.remove(cid)
                for cid in ones:
                    if index.can_insert(cid):
                        index.insert(cid)
            return index.solution()
        evals = {}
        sols = {}
        base_fix = {cid: 0 for cid in all_ids - cl}
        for cid in sorted(cl):
            res = solver.solve({**base_fix, cid: 0})
            evals[cid] = res.objective
            sols[cid] = res
        dmin = min(evals.values())
        dmax = max(evals.values())
        cut = dmin + alpha * (dmax - dmin) - 1e-9
        rcl = [cid for cid in sorted(cl) if evals[cid] >= cut]
        chosen = rng.choice(rcl)
        cl.discard(chosen)
        if sols[chosen].values is not None:
            sol = sols[chosen]
            cl = {cid for cid in cl if sol.customer_value(model, cid) >= 0.5}
    return Solution.of(cl)


def grasp(model: Model, alpha: float = DEFAULT_ALPHA, time_limit: float = 600.0,
          rng: random.Random | None = None) -> HeuristicResult:
    """Multi-start construction plus local search until the time limit."""
    rng = rng if rng is not None else random.Random(0)
    inst = model.instance
    solver = RelaxationSolver(model)
    start = time.monotonic()
    deadline = start + time_limit
    best: Solution | None = None
    iterations = 0
    improvements = 0
    construction_sum = 0
    interrupted = False
    while best is None or time.monotonic() < deadline:
        constructed = grasp_construct(model, alpha, rng, solver=solver)
        iterations += 1
        construction_sum += constructed.value
        state = SearchState.from_solution(inst, constructed, rng, deadline)
        local_search(state)
        interrupted = interrupted or state.interrupted
        candidate = state.solution()
        if best is None or candidate.value > best.value:
            best = candidate
            improvements += 1
    return HeuristicResult(
        "grasp", best, best.value,
        round(construction_sum / max(iterations, 1)), iterations,
        improvements, time.monotonic() - start, interrupted)


_SHAKE_ORDER = (7, 4, 5, 6)


def _shake(state: SearchState, k: int) -> Solution | None:
    if k == 7:
        return neighbor_exchange(state, 1, 1)
    if k == 4:
        return neighbor_decrease(state, 1)
    if k == 5:
        return neighbor_decrease(state, 2)
    if k == 6:
        return neighbor_decrease(state, 3)
    raise ValueError(f"unsupported shake neighborhood: {k}")


def vns(model: Model, time_limit: float = 600.0,
        rng: random.Random | None = None) -> HeuristicResult:
    """Shake through exchange/decrease neighborhoods, then local search;
    an improvement resets the shake sequence."""
    rng = rng if rng is not None else random.Random(0)
    inst = model.instance
    start = time.monotonic()
    deadline = start + time_limit
    constructed = grasp_construct(model, 1.0, rng)
    state = SearchState.from_solution(inst, constructed, rng, deadline)
    iterations = 0
    improvements = 0
    while not state.out_of_time():
        order = list(_SHAKE_ORDER)
        while order and not state.out_of_time():
            iterations += 1
            k = order[0]
            trial = state.clone()
            if _shake(trial, k) is None:
                order.pop(0)
                continue
            local_search(trial)
            if trial.value > state.value:
                state = trial
                improvements += 1
                order = list(_SHAKE_ORDER)
            else:
                order.pop(0)
    sol = state.solution()
    return HeuristicResult("vns", sol, sol.value, constructed.value,
                           iterations, improvements,
                           time.monotonic() - start, state.interrupted)


class TabuList:
    """FIFO memory of recently visited solutions, keyed by the frozen set
    of satisfied customer ids."""

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError(f"negative tabu capacity: {capacity}")
        self.capacity = capacity
        self._queue: list[frozenset[int]] = []
        self._held: set[frozenset[int]] = set()

    def __len__(self) -> int:
        return len(self._queue)

    def __contains__(self, solution) -> bool:
        return self._fingerprint(solution) in self._held

    @staticmethod
    def _fingerprint(solution) -> frozenset[int]:
        if isinstance(solution, Solution):
            return frozenset(solution.satisfied)
        return frozenset(solution)

    def add(self, solution) -> None:
        if self.capacity == 0:
            return
        fp = self._fingerprint(solution)
        if len(self._queue) >= self.capacity:
            self._held.discard(self._queue.pop(0))
        self._queue.append(fp)
        self._held.add(fp)


_AGGREGATE_ORDER = (1, 2, 3, 4, 7, 8)


def _aggregate_move(state: SearchState) -> Solution | None:
    """One move from the aggregated neighborhood: a uniformly chosen
    structure, falling through the listed order while empty."""
    pick = state.rng.randrange(len(_AGGREGATE_ORDER))
    for step in range(len(_AGGREGATE_ORDER)):
        k = _AGGREGATE_ORDER[(pick + step) % len(_AGGREGATE_ORDER)]
        if k in (1, 2, 3):
            neighbor = neighbor_increase(state, k)
        elif k == 4:
            neighbor = neighbor_decrease(state, 1)
        elif k == 7:
            neighbor = neighbor_exchange(state, 1, 1)
        else:
            neighbor = neighbor_exchange(state, 1, 2)
        if neighbor is not None:
            return neighbor
    return None


def tabu_search(model: Model, tenure: float = DEFAULT_TENURE,
                time_limit: float = 600.0,
                rng: random.Random | None = None) -> HeuristicResult:
    """Random-neighbor walk with a FIFO prohibition on revisiting recent
    solutions; the best solution seen is returned."""
    if not 0.0 <= tenure <= 1.0:
        raise ValueError(f"tenure out of range: {tenure}")
    rng = rng if rng is not None else random.Random(0)
    inst = model.instance
    start = time.monotonic()
    deadline = start + time_limit
    constructed = grasp_construct(model, 1.0, rng)
    state = SearchState.from_solution(inst, constructed, rng, deadline)
    incumbent = state.solution()
    tabu = TabuList(math.floor(tenure * inst.n))
    iterations = 0
    improvements = 0
    while not state.out_of_time():
        iterations += 1
        trial = state.clone()
        neighbor = _aggregate_move(trial)
        if neighbor is None:
            break
        if neighbor not in tabu:
            state = trial
            tabu.add(neighbor)
        if neighbor.value > incumbent.value:
            incumbent = neighbor
            improvements += 1
    return HeuristicResult("ts", incumbent, incumbent.value,
                           constructed.value, iterations, improvements,
                           time.monotonic() - start)
