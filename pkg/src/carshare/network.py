"""Capacitated DAG representation of a car-sharing instance.

Vertices are the source ``s``, the sink ``t`` and one vertex per distinct
station time point.  Demand arcs carry capacity 1 and are tagged with their
owning customer leg; connecting arcs chain each station's time points and
run from the last point to ``t`` with capacity ``m_A + m_B``; two source
arcs carry the station fleet sizes.  Parallel arcs are allowed (the
structure is a multigraph), which matters after preprocessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .instance import Instance, STATION_A, STATION_B, validate

DEMAND = "demand"
CONNECTING = "connecting"
SOURCE = "source"

OUTBOUND = "out"
RETURN = "ret"


@dataclass(frozen=True)
class Vertex:
    id: int
    label: str
    station: str | None = None  # None for s, t and fused vertices
    time: int | None = None


@dataclass(frozen=True)
class Arc:
    id: int
    tail: int
    head: int
    capacity: int
    kind: str
    owners: tuple[tuple[int, str], ...] = ()  # (customer id, leg) for demand arcs


@dataclass
class Network:
    instance: Instance
    vertices: dict[int, Vertex]
    arcs: dict[int, Arc]
    s: int
    t: int
    next_vertex_id: int = 0
    next_arc_id: int = 0

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    def arcs_by_kind(self, kind: str) -> list[Arc]:
        return [a for a in self.sorted_arcs() if a.kind == kind]

    def sorted_arcs(self) -> list[Arc]:
        return [self.arcs[k] for k in sorted(self.arcs)]

    def out_arcs(self, v: int) -> list[Arc]:
        return [a for a in self.sorted_arcs() if a.tail == v]

    def in_arcs(self, v: int) -> list[Arc]:
        return [a for a in self.sorted_arcs() if a.head == v]

    def out_degree(self, v: int) -> int:
        return sum(1 for a in self.arcs.values() if a.tail == v)

    def in_degree(self, v: int) -> int:
        return sum(1 for a in self.arcs.values() if a.head == v)

    def copy(self) -> "Network":
        return Network(self.instance, dict(self.vertices), dict(self.arcs),
                       self.s, self.t, self.next_vertex_id, self.next_arc_id)

    def add_vertex(self, label: str, station: str | None = None,
                   time: int | None = None) -> int:
        vid = self.next_vertex_id
        self.next_vertex_id += 1
        self.vertices[vid] = Vertex(vid, label, station, time)
        return vid

    def add_arc(self, tail: int, head: int, capacity: int, kind: str,
                owners: tuple[tuple[int, str], ...] = ()) -> int:
        aid = self.next_arc_id
        self.next_arc_id += 1
        self.arcs[aid] = Arc(aid, tail, head, capacity, kind, owners)
        return aid

    def dump(self) -> str:
        """Text edge list ``kind tail head cap owner`` for golden files."""
        lines = []
        for a in self.sorted_arcs():
            owner = ",".join(f"{leg}{cid}" for cid, leg in a.owners) or "-"
            lines.append(f"{a.kind} {self.vertices[a.tail].label} "
                         f"{self.vertices[a.head].label} {a.capacity} {owner}")
        return "\n".join(lines)


def build_network(inst: Instance) -> Network:
    """Build the flow network of an instance.

    Canonical vertex order: s, then station time points merged by
    (timestamp, station A before B), then t.
    """
    issues = validate(inst)
    if issues:
        raise ValueError("invalid instance: " + "; ".join(issues))

    net = Network(inst, {}, {}, s=-1, t=-1)
    net.s = net.add_vertex("s")
    points = []
    for st in (STATION_A, STATION_B):
        for time in inst.station_times(st):
            points.append((time, st))
    points.sort(key=lambda p: (p[0], p[1]))
    vertex_of: dict[tuple[str, int], int] = {}
    for time, st in points:
        vertex_of[(st, time)] = net.add_vertex(f"{st}@{time}", st, time)
    net.t = net.add_vertex("t")

    inf_cap = inst.fleet_a + inst.fleet_b
    for c in inst.customers:
        for leg, d in ((OUTBOUND, c.outbound), (RETURN, c.ret)):
            net.add_arc(vertex_of[(d.origin, d.start)],
                        vertex_of[(d.destination, d.end)],
                        1, DEMAND, ((c.id, leg),))
    for st in (STATION_A, STATION_B):
        times = inst.station_times(st)
        for prev, cur in zip(times, times[1:]):
            net.add_arc(vertex_of[(st, prev)], vertex_of[(st, cur)],
                        inf_cap, CONNECTING)
        if times:
            net.add_arc(vertex_of[(st, times[-1])], net.t, inf_cap, CONNECTING)
            net.add_arc(net.s, vertex_of[(st, times[0])], inst.fleet(st), SOURCE)
    net._vertex_of = vertex_of  # type: ignore[attr-defined]
    return net


def vertex_for(net: Network, station: str, timestamp: int) -> int:
    """Stable vertex id for a (station, timestamp) pair of a built network."""
    lookup = getattr(net, "_vertex_of", None)
    if lookup is None:
        raise ValueError("vertex lookup only available on freshly built networks")
    key = (station, timestamp)
    if key not in lookup:
        raise KeyError(f"no time point {timestamp} at station {station}")
    return lookup[key]
