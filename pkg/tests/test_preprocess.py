import pytest

from carshare.network import CONNECTING, DEMAND, SOURCE, build_network
from carshare.oracle import brute_force_optimum
from carshare.preprocess import (Contraction, Merge, OperationRejected,
                                 Removal, contract_arc, merge_demand_arcs,
                                 minimize, remove_vertex)
from conftest import build_reduction_example, micro_corpus


def kind_counts(net):
    counts = {DEMAND: 0, CONNECTING: 0, SOURCE: 0}
    for arc in net.arcs.values():
        counts[arc.kind] += 1
    return counts


def test_minimize_reduction_example(reduction_example):
    net = build_network(reduction_example)
    reduced, trace = minimize(net)
    assert (net.n_vertices, net.n_arcs) == (14, 22)
    assert (reduced.n_vertices, reduced.n_arcs) == (6, 11)
    assert kind_counts(reduced) == {DEMAND: 5, CONNECTING: 4, SOURCE: 2}
    assert trace.operations


def test_trace_replay(reduction_example):
    net = build_network(reduction_example)
    reduced, trace = minimize(net)
    replayed = trace.replay(net)
    assert replayed.n_vertices == reduced.n_vertices
    assert replayed.n_arcs == reduced.n_arcs
    assert sorted(a.kind for a in replayed.arcs.values()) == \
        sorted(a.kind for a in reduced.arcs.values())


def test_minimize_is_fixed_point(reduction_example):
    reduced, _ = minimize(build_network(reduction_example))
    again, trace = minimize(reduced)
    assert not trace.operations
    assert (again.n_vertices, again.n_arcs) == (reduced.n_vertices, reduced.n_arcs)


def test_contract_requires_degree_condition(reduction_example):
    net = build_network(reduction_example)
    for arc in net.sorted_arcs():
        if arc.kind != CONNECTING:
            with pytest.raises(OperationRejected):
                contract_arc(net, arc)


def test_contract_never_touches_terminals(reduction_example):
    net = build_network(reduction_example)
    reduced, trace = minimize(net)
    for op in trace.operations:
        if isinstance(op, Contraction):
            assert op.x != net.s and op.x != net.t
            assert op.y != net.s and op.y != net.t
        elif isinstance(op, Removal):
            assert op.vertex not in (net.s, net.t)
    assert net.s in reduced.vertices and net.t in reduced.vertices


def test_merge_rejected_when_arcs_differ(reduction_example):
    net = build_network(reduction_example)
    # no customer's two demand arcs are initially mergeable (parallel)
    for c in reduction_example.customers:
        with pytest.raises(OperationRejected):
            merge_demand_arcs(net, c.id)


def test_remove_vertex_rejected_on_terminals(reduction_example):
    net = build_network(reduction_example)
    with pytest.raises(OperationRejected):
        remove_vertex(net, net.s)


def test_optimum_preserved_on_corpus():
    for inst in micro_corpus(25, 17):
        value, _ = brute_force_optimum(inst)
        net = build_network(inst)
        reduced, _ = minimize(net)
        assert reduced.n_vertices <= net.n_vertices
        assert reduced.n_arcs <= net.n_arcs
        from carshare.model import build_cs1
        from carshare.bnb import solve_exact
        rep = solve_exact(build_cs1(reduced), time_limit=60)
        assert rep.status == "optimal"
        assert rep.value == value


def test_reduced_demand_arcs_cover_all_customers():
    for inst in micro_corpus(10, 23):
        reduced, _ = minimize(build_network(inst))
        owners = set()
        for arc in reduced.arcs.values():
            owners.update(cid for cid, _ in arc.owners)
        assert owners == {c.id for c in inst.customers}
