import pytest

from carshare.feasibility import is_feasible_set
from carshare.instance import generate_st, make_instance
from carshare.oracle import MAX_ORACLE_N, brute_force_optimum
from conftest import micro_corpus


def test_empty_instance():
    inst = make_instance([], 1, 1)
    value, witness = brute_force_optimum(inst)
    assert value == 0 and witness.value == 0


def test_counterexample_optimum(counterexample):
    value, witness = brute_force_optimum(counterexample)
    assert value == 4
    assert witness.satisfied == frozenset({1, 2, 3, 4})


def test_size_guard():
    inst = generate_st(MAX_ORACLE_N + 1, 1)
    with pytest.raises(ValueError):
        brute_force_optimum(inst)


def test_witness_is_feasible_and_deterministic():
    for inst in micro_corpus(15, 71):
        v1, w1 = brute_force_optimum(inst)
        v2, w2 = brute_force_optimum(inst)
        assert (v1, w1) == (v2, w2)
        assert w1.value == v1
        assert is_feasible_set(inst, w1.satisfied)


def test_monotone_in_fleet():
    for inst in micro_corpus(10, 72):
        v0, _ = brute_force_optimum(inst)
        bigger = make_instance(inst.customers, inst.fleet_a + 1,
                               inst.fleet_b + 1, inst.horizon)
        v1, _ = brute_force_optimum(bigger)
        assert v1 >= v0
