import random

import pytest

from carshare.instance import Customer, Demand, make_instance


def cust(cid, outbound, ret):
    return Customer(cid, Demand(*outbound), Demand(*ret))


def build_counterexample():
    """Four customers on unit fleets where all four are satisfiable
    together but no three are."""
    return make_instance([
        cust(1, ("B", 20, 50), ("A", 70, 80)),
        cust(2, ("A", 30, 40), ("B", 60, 70)),
        cust(3, ("A", 10, 20), ("B", 40, 70)),
        cust(4, ("B", 20, 30), ("A", 50, 60)),
    ], 1, 1)


def build_reduction_example(fleet_a=2, fleet_b=2):
    """Four customers whose flow network reduces 14->6 vertices and
    22->11 arcs."""
    return make_instance([
        cust(1, ("B", 40, 55), ("A", 85, 130)),
        cust(2, ("A", 10, 25), ("B", 130, 145)),
        cust(3, ("A", 10, 25), ("B", 85, 115)),
        cust(4, ("A", 40, 70), ("B", 100, 115)),
    ], fleet_a, fleet_b)


def build_nested_chain():
    """Five same-direction customers with a diamond dominance pattern:
    1 above {2,3}, both above 4, 4 above 5."""
    return make_instance([
        cust(1, ("A", 0, 100), ("B", 200, 300)),
        cust(2, ("A", 10, 90), ("B", 210, 290)),
        cust(3, ("A", 20, 80), ("B", 205, 295)),
        cust(4, ("A", 30, 70), ("B", 215, 285)),
        cust(5, ("A", 40, 60), ("B", 220, 280)),
    ], 3, 3)


MICRO_HORIZON = 200


def make_micro(rng: random.Random):
    """Small random instance: n in [4,12], fleets in [1,3], horizon 200,
    built in one of three shapes mirroring the benchmark groups with
    durations scaled to the short horizon."""
    n = rng.randint(4, 12)
    group = rng.choice(("st", "ft", "fc"))
    h = MICRO_HORIZON
    customers = []
    for cid in range(1, n + 1):
        if group == "st":
            d1 = rng.randint(5, 20)
            d2 = rng.randint(5, 20)
            t1 = rng.randint(0, h - 1 - d1 - d2)
            t2 = rng.randint(t1 + d1 + 1, h - d2)
        elif group == "ft":
            d1 = d2 = rng.randint(5, 15)
            t1 = rng.randint(0, h - 1 - 2 * d1)
            t2 = rng.randint(t1 + d1 + 1, h - d1)
        else:
            d1 = d2 = rng.randint(5, 15)
            w = rng.randint(10, 40)
            t1 = rng.randint(0, h - 2 * d1 - w)
            t2 = t1 + d1 + w
        from_a = rng.getrandbits(1) == 0
        x, y = ("A", "B") if from_a else ("B", "A")
        customers.append(cust(cid, (x, t1, t1 + d1), (y, t2, t2 + d2)))
    return make_instance(customers, rng.randint(1, 3), rng.randint(1, 3), h)


def micro_corpus(count, seed):
    rng = random.Random(seed)
    return [make_micro(rng) for _ in range(count)]


def make_nested_micro(rng: random.Random):
    """Small instance built from families of nested customers, so the
    dominance relation is dense."""
    customers = []
    cid = 1
    for _ in range(rng.randint(2, 4)):
        from_a = rng.getrandbits(1) == 0
        x, y = ("A", "B") if from_a else ("B", "A")
        o_s = rng.randint(0, 60)
        o_e = o_s + rng.randint(20, 40)
        r_s = o_e + rng.randint(10, 40)
        r_e = r_s + rng.randint(20, 40)
        for _ in range(rng.randint(1, 3)):
            customers.append(cust(cid, (x, o_s, o_e), (y, r_s, r_e)))
            cid += 1
            if o_e - o_s < 6 or r_e - r_s < 6:
                break
            o_s += rng.randint(1, 2)
            o_e -= rng.randint(1, 2)
            r_s += rng.randint(1, 2)
            r_e -= rng.randint(1, 2)
    return make_instance(customers, rng.randint(1, 3), rng.randint(1, 3),
                         MICRO_HORIZON)


def nested_corpus(count, seed):
    rng = random.Random(seed)
    return [make_nested_micro(rng) for _ in range(count)]


@pytest.fixture
def counterexample():
    return build_counterexample()


@pytest.fixture
def reduction_example():
    return build_reduction_example()


@pytest.fixture
def nested_chain():
    return build_nested_chain()
