"""Exhaustive reference solver for small instances."""

from __future__ import annotations

from itertools import combinations

from .feasibility import is_feasible_set
from .instance import Instance, Solution

MAX_ORACLE_N = 24


def brute_force_optimum(inst: Instance) -> tuple[int, Solution]:
    """Optimum value and a best satisfiable customer set.

    Subsets are scanned by decreasing cardinality and, within a
    cardinality, in lexicographic id order, so the witness is
    deterministic.  Guarded to small n: the scan is exponential.
    """
    if inst.n > MAX_ORACLE_N:
        raise ValueError(f"instance too large for brute force: n={inst.n}")
    ids = [c.id for c in inst.customers]
    for k in range(len(ids), 0, -1):
        for subset in combinations(ids, k):
            if is_feasible_set(inst, subset):
                return k, Solution.of(subset)
    return 0, Solution.of(())
