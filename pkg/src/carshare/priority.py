"""Priority (dominance) relations between customers.

When one customer's two demands nest inside another's, any feasible
solution satisfying the wide customer can swap it for the nested one, so
the wide customer need only be satisfied if the nested one is.  Those
pairs form a DAG over customer ids; its transitive reduction, pruned to an
arborescence forest by the smallest-work-schedule parent rule, yields the
precedence rows added to the strengthened model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import Customer, Instance


@dataclass
class PriorityDag:
    """Arcs ``c -> c'`` meaning "c satisfied only if c' satisfied"."""

    nodes: list[int]
    arcs: set[tuple[int, int]] = field(default_factory=set)

    def successors(self, c: int) -> list[int]:
        return sorted(h for t, h in self.arcs if t == c)

    def in_degree(self, c: int) -> int:
        return sum(1 for _, h in self.arcs if h == c)


def work_schedule(customer: Customer) -> int:
    """Minutes from the outbound departure to the return arrival."""
    return customer.work_schedule()


def dominates(c: Customer, cp: Customer) -> bool:
    """True when ``cp`` is nested within ``c``: cp departs no earlier,
    arrives no later, starts its return no earlier and finishes no later.

    Only defined for customers whose outbound legs share the origin
    station; different directions never dominate.
    """
    if c.outbound.origin != cp.outbound.origin:
        return False
    return (c.outbound.start <= cp.outbound.start
            and cp.outbound.end <= c.outbound.end
            and c.ret.start <= cp.ret.start
            and cp.ret.end <= c.ret.end)


def build_dag(inst: Instance) -> PriorityDag:
    """All dominance arcs, ties on identical time tuples broken toward the
    lower id (the arc's head) so the result is acyclic."""
    dag = PriorityDag([c.id for c in inst.customers])
    customers = inst.customers
    for c in customers:
        for cp in customers:
            if c.id == cp.id or not dominates(c, cp):
                continue
            if dominates(cp, c) and c.id < cp.id:
                continue  # mutual (identical tuples): keep higher -> lower only
            dag.arcs.add((c.id, cp.id))
    return dag


def transitive_reduction(dag: PriorityDag) -> PriorityDag:
    """Unique minimum DAG with the same reachability relation.

    Closure-based: an arc (u, v) is redundant iff some other successor of u
    reaches v.  Fine for the benchmark scale (sparse after same-direction
    partitioning).
    """
    nodes = sorted(dag.nodes)
    index = {c: i for i, c in enumerate(nodes)}
    n = len(nodes)
    adj = np.zeros((n, n), dtype=bool)
    for t, h in dag.arcs:
        adj[index[t], index[h]] = True
    reach = adj.copy()
    order = _topological(nodes, dag.arcs)
    for u in reversed(order):
        ui = index[u]
        for vi in np.flatnonzero(adj[ui]):
            reach[ui] |= reach[vi]
    kept = set()
    for t, h in dag.arcs:
        ti, hi = index[t], index[h]
        via = adj[ti].copy()
        via[hi] = False
        if not np.any(via & reach[:, hi]):
            kept.add((t, h))
    return PriorityDag(list(dag.nodes), kept)


def _topological(nodes: list[int], arcs: set[tuple[int, int]]) -> list[int]:
    indeg = {c: 0 for c in nodes}
    succ: dict[int, list[int]] = {c: [] for c in nodes}
    for t, h in arcs:
        indeg[h] += 1
        succ[t].append(h)
    stack = sorted((c for c in nodes if indeg[c] == 0), reverse=True)
    order = []
    while stack:
        u = stack.pop()
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    if len(order) != len(nodes):
        raise ValueError("priority graph contains a cycle")
    return order


def arborescence_forest(dag: PriorityDag, inst: Instance) -> PriorityDag:
    """Keep at most one incoming arc per node: the parent with the smallest
    work schedule, ties toward the lower parent id."""
    kept = set()
    by_head: dict[int, list[int]] = {}
    for t, h in dag.arcs:
        by_head.setdefault(h, []).append(t)
    for h, tails in by_head.items():
        parent = min(tails, key=lambda t: (work_schedule(inst.customer(t)), t))
        kept.add((parent, h))
    return PriorityDag(list(dag.nodes), kept)


def forest_constraints(inst: Instance) -> PriorityDag:
    """Dominance DAG -> transitive reduction -> arborescence forest."""
    return arborescence_forest(transitive_reduction(build_dag(inst)), inst)


def priority_stats(inst: Instance) -> dict[str, int]:
    dag = build_dag(inst)
    reduced = transitive_reduction(dag)
    forest = arborescence_forest(reduced, inst)
    return {
        "raw_pairs": len(dag.arcs),
        "reduced_arcs": len(reduced.arcs),
        "forest_arcs": len(forest.arcs),
    }
