"""Exact branch-and-bound search on top of the LP relaxation.

Nodes carry customer fixings only; the LP bound of a node is inherited
lazily from its parent and refreshed when the node is expanded.  Because
the objective counts customers, every LP bound is floored to an integer
before pruning, which closes the tree much earlier than the raw
fractional bound would.
"""

from __future__ import annotations

import heapq
import json
import math
import random
import time
from dataclasses import dataclass, field

from .feasibility import DisplacementIndex
from .instance import Instance, Solution
from .lp import INFEASIBLE, LpSolution, RelaxationSolver
from .model import Model
from .priority import work_schedule

STATUS_OPTIMAL = "optimal"
STATUS_TIME_LIMIT = "time-limit"

INT_TOL = 1e-6


@dataclass
class SolveReport:
    solution: Solution
    value: int
    upper_bound: float
    root_bound: float
    nodes: int
    elapsed_s: float
    status: str
    satisfied: tuple[int, ...] = field(default=())

    @property
    def gap_pct(self) -> float:
        if self.upper_bound <= 0:
            return 0.0
        return 100.0 * (self.upper_bound - self.value) / self.upper_bound

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "ub": self.upper_bound,
            "gap_pct": self.gap_pct,
            "root_bound": self.root_bound,
            "nodes": self.nodes,
            "elapsed_s": self.elapsed_s,
            "status": self.status,
            "satisfied": list(self.satisfied),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def round_heuristic(model: Model, lp_solution: LpSolution,
                    index: DisplacementIndex | None = None) -> Solution:
    """Integral solution from a fractional point.

    Customers at value one are kept (verified against the displacement
    index as a safeguard), then remaining customers are tried greedily in
    decreasing fractional value.
    """
    inst = model.instance
    if index is None:
        index = DisplacementIndex(inst)
    else:
        index = index.clone()
    vals = {c.id: lp_solution.customer_value(model, c.id) for c in inst.customers}
    # customers at value one form a feasible set: dropping the fractional
    # ones only frees cars relative to the LP point, so they go in as a
    # block (one-at-a-time insertion would trip over non-downward-closed
    # intermediate subsets)
    ones = [cid for cid in vals
            if cid not in index.satisfied and vals[cid] >= 1.0 - INT_TOL]
    for cid in ones:
        index.insert(cid, force=True)
    if not index.is_feasible():
        for cid in ones:
            index.remove(cid)
    order = sorted(
        (cid for cid in vals if cid not in index.satisfied),
        key=lambda cid: (-vals[cid], cid),
    )
    for cid in order:
        if vals[cid] <= INT_TOL:
            break
        if index.can_insert(cid):
            index.insert(cid)
    return index.solution()


def dive(model: Model, solver: RelaxationSolver,
         deadline: float | None = None,
         rng: random.Random | None = None) -> Solution:
    """LP diving: repeatedly fix the most one-like fractional customers
    to 1 and re-solve, backing a fixing off to 0 when it turns the
    relaxation infeasible.  Terminates with an integral LP point, whose
    customer set is feasible, and typically lands within one percent of
    the relaxation bound."""
    inst = model.instance
    fixings: dict[int, int] = {}
    values: dict[int, float] = {}
    while True:
        sol = solver.solve(fixings)
        if sol.status == INFEASIBLE:
            break
        values = {c.id: sol.customer_value(model, c.id)
                  for c in inst.customers}
        fractional = sorted(
            ((v, cid) for cid, v in values.items()
             if INT_TOL < v < 1 - INT_TOL and cid not in fixings),
            reverse=True)
        if not fractional:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
        # fix a whole batch of near-one variables per re-solve; retreat
        # to a single variable (possibly at 0) when the batch conflicts.
        # With an rng the batch threshold and the single-variable pick
        # are perturbed so repeated dives explore different plunges.
        threshold = 0.9 if rng is None else rng.uniform(0.75, 0.95)
        top = fractional[0]
        if rng is not None:
            near_top = [f for f in fractional if f[0] >= top[0] - 0.05]
            top = rng.choice(near_top)
        batch = [cid for v, cid in fractional if v >= threshold] \
            or [top[1]]
        for cid in batch:
            fixings[cid] = 1
        if solver.solve(fixings).status == INFEASIBLE:
            for cid in batch:
                del fixings[cid]
            fixings[top[1]] = 1
            if solver.solve(fixings).status == INFEASIBLE:
                fixings[top[1]] = 0
    chosen = {cid for cid, v in values.items() if v >= 1 - INT_TOL}
    chosen |= {cid for cid, v in fixings.items() if v == 1}
    # a completed dive ends at an integral LP point, so the whole set
    # goes in as a block; an interrupted dive may leave a stale set, in
    # which case fall back to greedy one-at-a-time insertion
    index = DisplacementIndex(inst)
    for cid in chosen:
        index.insert(cid, force=True)
    if not index.is_feasible():
        for cid in chosen:
            index.remove(cid)
        for cid in sorted(chosen):
            if index.can_insert(cid):
                index.insert(cid)
    return index.solution()


def _branch_column(model: Model, lp_solution: LpSolution) -> int | None:
    """Most fractional customer column; ties go to the customer group
    with the larger work schedule, then the lower id."""
    inst = model.instance
    best = None
    best_key = None
    for col_idx in sorted(set(model.customer_col.values())):
        col = model.columns[col_idx]
        v = float(lp_solution.values[col_idx])
        frac = min(v - math.floor(v), math.ceil(v) - v)
        if frac <= INT_TOL:
            continue
        ws = max(work_schedule(inst.customer(cid)) for cid in col.customers)
        key = (abs(v - 0.5), -ws, min(col.customers))
        if best_key is None or key < best_key:
            best_key = key
            best = min(col.customers)
    return best


def solve_exact(model: Model, time_limit: float = 600.0,
                node_strategy: str = "best-bound") -> SolveReport:
    """Branch and bound over the relaxation of ``model``.

    ``node_strategy`` is ``best-bound`` (default) or ``depth-first``.
    """
    if node_strategy not in ("best-bound", "depth-first"):
        raise ValueError(f"unknown node strategy: {node_strategy}")
    inst = model.instance
    solver = RelaxationSolver(model)
    start = time.monotonic()
    deadline = start + time_limit

    root = solver.solve()
    if root.status == INFEASIBLE:
        empty = Solution.of(())
        return SolveReport(empty, 0, 0.0, 0.0, 1, time.monotonic() - start,
                           STATUS_OPTIMAL)
    root_bound = root.objective

    incumbent = round_heuristic(model, root)
    lb = incumbent.value

    # on larger instances the naive rounding lags far behind the LP
    # bound; spend most of the budget on construction plus local search
    # restarts so the tree starts from a tight incumbent
    if inst.n > 50 and time_limit >= 60 and math.floor(root_bound + INT_TOL) > lb:
        from . import heuristics  # local import: heuristics builds on lp only

        budget = start + 0.7 * time_limit
        rng = random.Random(0)
        dived = dive(model, solver, deadline=budget)
        if dived.value > lb:
            incumbent = dived
            lb = incumbent.value
        state = heuristics.SearchState.from_solution(
            inst, incumbent.satisfied, rng, deadline=budget)
        heuristics.local_search(state)
        if state.value > lb:
            incumbent = state.solution()
            lb = incumbent.value
        # randomized dive restarts explore different plunges; each is
        # polished with local search and the best incumbent is kept
        while time.monotonic() < budget \
                and math.floor(root_bound + INT_TOL) > lb:
            restarted = dive(model, solver, deadline=budget, rng=rng)
            state = heuristics.SearchState.from_solution(
                inst, restarted.satisfied, rng, deadline=budget)
            heuristics.local_search(state)
            if state.value > lb:
                incumbent = state.solution()
                lb = incumbent.value

    counter = 0
    # heap entries: (-inherited bound, tiebreak, depth, fixings, cached lp)
    heap: list[tuple[float, int, int, dict[int, int], LpSolution | None]] = []

    def push(bound: float, depth: int, fixings: dict[int, int],
             cached: LpSolution | None) -> None:
        nonlocal counter
        counter += 1
        if node_strategy == "depth-first":
            key = (-depth, counter)
        else:
            key = (-bound, counter)
        heapq.heappush(heap, (key[0], key[1], depth, fixings, cached))

    push(root_bound, 0, {}, root)
    nodes = 0
    open_bound = root_bound
    status = STATUS_OPTIMAL

    while heap:
        key0, _, depth, fixings, cached = heapq.heappop(heap)
        inherited = -key0 if node_strategy == "best-bound" else open_bound
        if node_strategy == "best-bound":
            open_bound = inherited
            if math.floor(inherited + INT_TOL) <= lb:
                heap.clear()
                break
        if time.monotonic() >= deadline:
            status = STATUS_TIME_LIMIT
            push(inherited, depth, fixings, cached)
            break
        nodes += 1
        lp = cached if cached is not None else solver.solve(fixings)
        if lp.status == INFEASIBLE:
            continue
        bound = math.floor(lp.objective + INT_TOL)
        if bound <= lb:
            continue
        candidate = round_heuristic(model, lp)
        if candidate.value > lb:
            incumbent = candidate
            lb = incumbent.value
            if node_strategy == "best-bound" and math.floor(open_bound + INT_TOL) <= lb:
                heap.clear()
                break
        cid = _branch_column(model, lp)
        if cid is None:
            # integral optimum of this subtree; incumbent already covers it
            continue
        push(lp.objective, depth + 1, {**fixings, cid: 1}, None)
        push(lp.objective, depth + 1, {**fixings, cid: 0}, None)

    elapsed = time.monotonic() - start
    if status == STATUS_OPTIMAL and not heap:
        ub = float(lb)
    else:
        best_open = max((-e[0] for e in heap), default=float(lb)) \
            if node_strategy == "best-bound" else open_bound
        ub = max(float(lb), math.floor(best_open + INT_TOL))
        if heap or status == STATUS_TIME_LIMIT:
            status = STATUS_TIME_LIMIT
    return SolveReport(incumbent, incumbent.value, ub, root_bound, nodes,
                       elapsed, status, tuple(sorted(incumbent.satisfied)))
