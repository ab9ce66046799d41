import random

from carshare.feasibility import is_feasible_set
from carshare.priority import (arborescence_forest, build_dag, dominates,
                               forest_constraints, priority_stats,
                               transitive_reduction, work_schedule)
from conftest import cust, make_instance, micro_corpus, nested_corpus


def reachable(dag, src):
    seen = set()
    stack = list(dag.successors(src))
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(dag.successors(v))
    return seen


def test_dominates_definition():
    a = cust(1, ("A", 0, 100), ("B", 200, 300))
    b = cust(2, ("A", 10, 90), ("B", 210, 290))
    assert dominates(a, b)
    assert not dominates(b, a)
    # different outbound origins never compare
    c = cust(3, ("B", 10, 90), ("A", 210, 290))
    assert not dominates(a, c) and not dominates(c, a)


def test_dag_and_reduction_on_nested_chain(nested_chain):
    dag = build_dag(nested_chain)
    assert dag.arcs == {(1, 2), (1, 3), (1, 4), (1, 5),
                        (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)}
    reduced = transitive_reduction(dag)
    assert reduced.arcs == {(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)}
    forest = arborescence_forest(reduced, nested_chain)
    # node 4 keeps the parent with the smaller work schedule: customer 3
    assert forest.arcs == {(1, 2), (1, 3), (3, 4), (4, 5)}
    for node in forest.nodes:
        assert forest.in_degree(node) <= 1


def test_mutual_dominance_keeps_one_arc():
    inst = make_instance([
        cust(1, ("A", 0, 10), ("B", 20, 30)),
        cust(2, ("A", 0, 10), ("B", 20, 30)),
    ], 2, 2)
    dag = build_dag(inst)
    assert dag.arcs == {(2, 1)}


def test_reduction_preserves_reachability():
    for inst in micro_corpus(20, 31):
        dag = build_dag(inst)
        reduced = transitive_reduction(dag)
        assert reduced.arcs <= dag.arcs
        for node in dag.nodes:
            assert reachable(dag, node) == reachable(reduced, node)


def test_reduction_is_minimal():
    for inst in micro_corpus(10, 32):
        dag = build_dag(inst)
        reduced = transitive_reduction(dag)
        for arc in sorted(reduced.arcs):
            pruned = type(reduced)(reduced.nodes, reduced.arcs - {arc})
            assert reachable(pruned, arc[0]) != reachable(reduced, arc[0])


def test_quadratic_oracle_matches_build_dag():
    for inst in micro_corpus(20, 33):
        dag = build_dag(inst)
        expect = set()
        for a in inst.customers:
            for b in inst.customers:
                if a.id == b.id:
                    continue
                if dominates(a, b):
                    if dominates(b, a) and a.id < b.id:
                        continue
                    expect.add((a.id, b.id))
        assert dag.arcs == expect


def test_exchange_property():
    # a dominance arc goes from the wider customer to the one nested
    # inside it; swapping the wider one out for the nested one keeps any
    # feasible set feasible
    rng = random.Random(8)
    checked = 0
    corpus = micro_corpus(100, 34) + nested_corpus(250, 35)
    for inst in corpus:
        dag = build_dag(inst)
        if not dag.arcs:
            continue
        ids = [c.id for c in inst.customers]
        for wide, nested in sorted(dag.arcs):
            for _ in range(3):
                others = [i for i in ids if i not in (wide, nested)]
                subset = {wide} | set(
                    rng.sample(others, rng.randint(0, len(others))))
                if not is_feasible_set(inst, subset):
                    continue
                swapped = (subset - {wide}) | {nested}
                assert is_feasible_set(inst, swapped)
                checked += 1
    assert checked >= 1000


def test_work_schedule():
    c = cust(1, ("A", 10, 25), ("B", 85, 115))
    assert work_schedule(c) == 105


def test_forest_constraints_and_stats(nested_chain):
    forest = forest_constraints(nested_chain)
    assert len(forest.arcs) == 4
    stats = priority_stats(nested_chain)
    assert stats == {"raw_pairs": 9, "reduced_arcs": 5, "forest_arcs": 4}
