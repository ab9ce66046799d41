"""Network reduction to an equivalent minimal network.

Three operations shrink the network while preserving the family of feasible
customer sets:

* arc contraction — fuse the endpoints of a connecting arc (x, y) when
  out-degree(x) = 1 or in-degree(y) = 1 (never touching s or t);
* arc merge — replace a customer's outbound and return arcs by a single
  capacity-1 arc when the outbound ends where the return starts;
* vertex removal — drop a vertex with in-degree = out-degree = 1, fusing
  its two incident arcs into one carrying the tighter capacity.

``minimize`` applies contractions to exhaustion, then merges, then
removals, looping until a fixed point.  Every applied operation is recorded
in a trace that can be replayed on the original network.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .network import Arc, CONNECTING, DEMAND, Network, OUTBOUND, RETURN


@dataclass(frozen=True)
class Contraction:
    x: int
    y: int


@dataclass(frozen=True)
class Merge:
    customer: int


@dataclass(frozen=True)
class Removal:
    vertex: int


@dataclass
class ReductionTrace:
    operations: list = field(default_factory=list)

    def replay(self, net: Network) -> Network:
        out = net.copy()
        for op in self.operations:
            if isinstance(op, Contraction):
                out = contract_arc(out, _find_connecting(out, op.x, op.y))
            elif isinstance(op, Merge):
                out = merge_demand_arcs(out, op.customer)
            elif isinstance(op, Removal):
                out = remove_vertex(out, op.vertex)
            else:
                raise TypeError(f"unknown trace entry {op!r}")
        return out


class OperationRejected(ValueError):
    """Precondition of a reduction operation does not hold."""


def _find_connecting(net: Network, x: int, y: int) -> Arc:
    for a in net.sorted_arcs():
        if a.kind == CONNECTING and a.tail == x and a.head == y:
            return a
    raise OperationRejected(f"no connecting arc {x} -> {y}")


def contract_arc(net: Network, arc: Arc) -> Network:
    """Fuse the endpoints of connecting arc ``arc`` into a new vertex."""
    if arc.kind != CONNECTING:
        raise OperationRejected(f"arc {arc.id} is not a connecting arc")
    x, y = arc.tail, arc.head
    if x in (net.s, net.t) or y in (net.s, net.t):
        raise OperationRejected("s and t are never contracted")
    if net.out_degree(x) != 1 and net.in_degree(y) != 1:
        raise OperationRejected(
            f"contraction needs out-degree({x}) = 1 or in-degree({y}) = 1")
    out = net.copy()
    lx, ly = out.vertices[x].label, out.vertices[y].label
    z = out.add_vertex(f"({lx}+{ly})")
    del out.vertices[x]
    del out.vertices[y]
    del out.arcs[arc.id]
    for aid, a in list(out.arcs.items()):
        tail = z if a.tail in (x, y) else a.tail
        head = z if a.head in (x, y) else a.head
        if (tail, head) != (a.tail, a.head):
            out.arcs[aid] = Arc(a.id, tail, head, a.capacity, a.kind, a.owners)
    return out


def merge_demand_arcs(net: Network, customer: int) -> Network:
    """Fuse the customer's outbound and return arcs into one arc."""
    legs = {}
    for a in net.arcs.values():
        for cid, leg in a.owners:
            if cid == customer:
                legs[leg] = a
    if OUTBOUND not in legs or RETURN not in legs:
        raise OperationRejected(f"customer {customer} has no separate leg arcs")
    o, r = legs[OUTBOUND], legs[RETURN]
    if o.id == r.id:
        raise OperationRejected(f"customer {customer} legs already merged")
    if o.head != r.tail:
        raise OperationRejected(
            f"customer {customer}: outbound ends at {o.head}, return starts at {r.tail}")
    out = net.copy()
    del out.arcs[o.id]
    del out.arcs[r.id]
    owners = tuple(sorted(set(o.owners) | set(r.owners)))
    out.add_arc(o.tail, r.head, 1, DEMAND, owners)
    return out


def remove_vertex(net: Network, vertex: int) -> Network:
    """Remove an expendable vertex, fusing its two incident arcs."""
    if vertex in (net.s, net.t):
        raise OperationRejected("s and t are never removed")
    in_arcs = net.in_arcs(vertex)
    out_arcs = net.out_arcs(vertex)
    if len(in_arcs) != 1 or len(out_arcs) != 1:
        raise OperationRejected(
            f"vertex {vertex} has in-degree {len(in_arcs)}, out-degree {len(out_arcs)}")
    a_in, a_out = in_arcs[0], out_arcs[0]
    out = net.copy()
    del out.arcs[a_in.id]
    del out.arcs[a_out.id]
    del out.vertices[vertex]
    kind = DEMAND if DEMAND in (a_in.kind, a_out.kind) else a_in.kind
    capacity = min(a_in.capacity, a_out.capacity)
    owners = tuple(sorted(set(a_in.owners) | set(a_out.owners)))
    out.add_arc(a_in.tail, a_out.head, capacity, kind, owners)
    return out


class _Reducer:
    """Applies the reduction loop in place with incremental adjacency."""

    def __init__(self, net: Network):
        self.net = net.copy()
        self.trace = ReductionTrace()
        self.out_ids: dict[int, set[int]] = {v: set() for v in self.net.vertices}
        self.in_ids: dict[int, set[int]] = {v: set() for v in self.net.vertices}
        for a in self.net.arcs.values():
            self.out_ids[a.tail].add(a.id)
            self.in_ids[a.head].add(a.id)

    def _drop_arc(self, aid: int) -> None:
        a = self.net.arcs.pop(aid)
        self.out_ids[a.tail].discard(aid)
        self.in_ids[a.head].discard(aid)

    def _put_arc(self, tail: int, head: int, capacity: int, kind: str,
                 owners=()) -> int:
        aid = self.net.add_arc(tail, head, capacity, kind, owners)
        self.out_ids[tail].add(aid)
        self.in_ids[head].add(aid)
        return aid

    def contract_pass(self) -> bool:
        changed = False
        again = True
        while again:
            again = False
            for aid in sorted(self.net.arcs):
                a = self.net.arcs.get(aid)
                if a is None or a.kind != CONNECTING:
                    continue
                x, y = a.tail, a.head
                if x in (self.net.s, self.net.t) or y in (self.net.s, self.net.t):
                    continue
                if len(self.out_ids[x]) != 1 and len(self.in_ids[y]) != 1:
                    continue
                self.trace.operations.append(Contraction(x, y))
                lx, ly = self.net.vertices[x].label, self.net.vertices[y].label
                z = self.net.add_vertex(f"({lx}+{ly})")
                self.out_ids[z] = set()
                self.in_ids[z] = set()
                self._drop_arc(aid)
                moved = list(self.out_ids[x] | self.in_ids[x]
                             | self.out_ids[y] | self.in_ids[y])
                for mid in moved:
                    m = self.net.arcs[mid]
                    tail = z if m.tail in (x, y) else m.tail
                    head = z if m.head in (x, y) else m.head
                    self._drop_arc(mid)
                    self.net.arcs[mid] = Arc(m.id, tail, head, m.capacity,
                                             m.kind, m.owners)
                    self.out_ids[tail].add(mid)
                    self.in_ids[head].add(mid)
                del self.net.vertices[x]
                del self.net.vertices[y]
                del self.out_ids[x], self.in_ids[x]
                del self.out_ids[y], self.in_ids[y]
                changed = True
                again = True
        return changed

    def merge_pass(self) -> bool:
        changed = False
        legs: dict[int, dict[str, Arc]] = {}
        for a in self.net.arcs.values():
            for cid, leg in a.owners:
                legs.setdefault(cid, {})[leg] = a
        for cid in sorted(legs):
            pair = legs[cid]
            o, r = pair.get(OUTBOUND), pair.get(RETURN)
            if o is None or r is None or o.id == r.id or o.head != r.tail:
                continue
            if o.id not in self.net.arcs or r.id not in self.net.arcs:
                continue  # consumed by an earlier merge of a co-owner
            self.trace.operations.append(Merge(cid))
            owners = tuple(sorted(set(o.owners) | set(r.owners)))
            self._drop_arc(o.id)
            self._drop_arc(r.id)
            self._put_arc(o.tail, r.head, 1, DEMAND, owners)
            changed = True
        return changed

    def removal_pass(self) -> bool:
        changed = False
        for v in sorted(self.net.vertices):
            if v in (self.net.s, self.net.t):
                continue
            if len(self.in_ids.get(v, ())) != 1 or len(self.out_ids.get(v, ())) != 1:
                continue
            a_in = self.net.arcs[next(iter(self.in_ids[v]))]
            a_out = self.net.arcs[next(iter(self.out_ids[v]))]
            self.trace.operations.append(Removal(v))
            kind = DEMAND if DEMAND in (a_in.kind, a_out.kind) else a_in.kind
            capacity = min(a_in.capacity, a_out.capacity)
            owners = tuple(sorted(set(a_in.owners) | set(a_out.owners)))
            self._drop_arc(a_in.id)
            self._drop_arc(a_out.id)
            del self.net.vertices[v]
            del self.out_ids[v], self.in_ids[v]
            self._put_arc(a_in.tail, a_out.head, capacity, kind, owners)
            changed = True
        return changed

    def run(self) -> tuple[Network, ReductionTrace]:
        changed = True
        while changed:
            changed = self.contract_pass()
            changed = self.merge_pass() or changed
            changed = self.removal_pass() or changed
        return self.net, self.trace


def minimize(net: Network) -> tuple[Network, ReductionTrace]:
    """Reduce ``net`` to a fixed point of the three operations."""
    return _Reducer(net).run()
