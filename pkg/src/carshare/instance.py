"""Problem data model, validation, serialization and benchmark generators.

An instance of the two-station car-sharing problem is a list of customers,
each holding an outbound and a return demand in opposite directions, plus
the initial fleet sizes at stations A and B.

The three benchmark generators (``generate_st``, ``generate_ft``,
``generate_fc``) are driven by a SplitMix64 stream so that the same
``(n, seed)`` pair yields a bit-identical instance on any platform.  The
draw order per customer is fixed: driving durations (and working time for
the fc group) first, then t1, then t2, then the direction coin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

STATION_A = "A"
STATION_B = "B"
DEFAULT_HORIZON = 1440
DEFAULT_FLEET = 10

_MASK64 = (1 << 64) - 1


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed or violates invariants."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SplitMix64:
    """Deterministic 64-bit recurrence used by the instance generators.

    state += 0x9E3779B97F4A7C15; z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB; output z ^ (z >> 31).

    ``randint(lo, hi)`` maps the output into [lo, hi] by modular reduction.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (inclusive)."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def coin(self) -> bool:
        return self.next_u64() & 1 == 1


def other_station(station: str) -> str:
    return STATION_B if station == STATION_A else STATION_A


@dataclass(frozen=True)
class Demand:
    """A single timed trip leaving ``origin`` at ``start`` and arriving at
    the opposite station at ``end`` (integer minutes)."""

    origin: str
    start: int
    end: int

    @property
    def destination(self) -> str:
        return other_station(self.origin)

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Customer:
    id: int
    outbound: Demand
    ret: Demand

    def work_schedule(self) -> int:
        """Span between the outbound departure and the return arrival."""
        return self.ret.end - self.outbound.start


@dataclass(frozen=True)
class Instance:
    customers: tuple[Customer, ...]
    fleet_a: int = DEFAULT_FLEET
    fleet_b: int = DEFAULT_FLEET
    horizon: int = DEFAULT_HORIZON

    @property
    def n(self) -> int:
        return len(self.customers)

    def fleet(self, station: str) -> int:
        return self.fleet_a if station == STATION_A else self.fleet_b

    def customer(self, cid: int) -> Customer:
        return self.customers[cid - 1]

    def station_times(self, station: str) -> list[int]:
        """Sorted distinct time points touched at ``station``."""
        times = set()
        for c in self.customers:
            for d in (c.outbound, c.ret):
                if d.origin == station:
                    times.add(d.start)
                else:
                    times.add(d.end)
        return sorted(times)


@dataclass(frozen=True)
class Solution:
    """A set of customer ids claimed simultaneously satisfiable.

    Feasibility is not an invariant of this type; assert it through the
    ``feasibility`` module.
    """

    satisfied: frozenset[int]

    @property
    def value(self) -> int:
        return len(self.satisfied)

    @staticmethod
    def of(ids: Iterable[int]) -> "Solution":
        return Solution(frozenset(ids))


def make_instance(customers: Iterable[Customer], fleet_a: int, fleet_b: int,
                  horizon: int = DEFAULT_HORIZON) -> Instance:
    return Instance(tuple(customers), fleet_a, fleet_b, horizon)


# ---------------------------------------------------------------------------
# Validation

def validate(inst: Instance) -> list[str]:
    """Return a list of invariant violations; empty means the instance is ok.

    Diagnostics, not exceptions: every violation is reported with the
    offending customer id.
    """
    issues: list[str] = []
    if inst.fleet_a < 0:
        issues.append("negative fleet: fleet_a")
    if inst.fleet_b < 0:
        issues.append("negative fleet: fleet_b")
    if inst.horizon < 0:
        issues.append("negative horizon")
    seen_ids = set()
    for pos, c in enumerate(inst.customers, start=1):
        if c.id != pos:
            issues.append(f"customer {c.id}: id not contiguous (expected {pos})")
        if c.id in seen_ids:
            issues.append(f"customer {c.id}: duplicate id")
        seen_ids.add(c.id)
        for leg_name, d in (("outbound", c.outbound), ("return", c.ret)):
            if d.origin not in (STATION_A, STATION_B):
                issues.append(f"customer {c.id}: {leg_name} origin {d.origin!r} invalid")
            if not d.start < d.end:
                issues.append(f"customer {c.id}: {leg_name} start >= end")
            if d.start < 0 or d.end > inst.horizon:
                issues.append(f"customer {c.id}: {leg_name} outside [0, horizon]")
        if c.outbound.origin == c.ret.origin:
            issues.append(f"customer {c.id}: same-direction pair")
        if c.ret.start < c.outbound.end:
            issues.append(f"customer {c.id}: overlapping demands")
    return issues


# ---------------------------------------------------------------------------
# Benchmark generators

def _customer(cid: int, t1: int, d1: int, t2: int, d2: int, from_a: bool) -> Customer:
    origin = STATION_A if from_a else STATION_B
    outbound = Demand(origin, t1, t1 + d1)
    ret = Demand(other_station(origin), t2, t2 + d2)
    return Customer(cid, outbound, ret)


def _start_pair(rng: SplitMix64, d1: int, d2: int) -> tuple[int, int]:
    """Start times drawn jointly uniform over the valid region: both
    uniform over the horizon, resampled until the outbound finishes
    strictly before the return starts and the return finishes within the
    horizon.  Joint uniformity (rather than sampling t2 conditionally on
    t1) keeps the two trips' positions unbiased across the day."""
    while True:
        t1 = rng.randint(0, DEFAULT_HORIZON)
        t2 = rng.randint(0, DEFAULT_HORIZON)
        if t1 + d1 < t2 and t2 + d2 <= DEFAULT_HORIZON:
            return t1, t2


def generate_st(n: int, seed: int) -> Instance:
    """Group st: independent driving durations in [15, 60] minutes."""
    rng = SplitMix64(seed)
    customers = []
    for cid in range(1, n + 1):
        d1 = rng.randint(15, 60)
        d2 = rng.randint(15, 60)
        t1, t2 = _start_pair(rng, d1, d2)
        customers.append(_customer(cid, t1, d1, t2, d2, rng.coin()))
    return make_instance(customers, DEFAULT_FLEET, DEFAULT_FLEET)


def generate_ft(n: int, seed: int) -> Instance:
    """Group ft: one shared driving duration in [15, 45] per customer."""
    rng = SplitMix64(seed)
    customers = []
    for cid in range(1, n + 1):
        d = rng.randint(15, 45)
        t1, t2 = _start_pair(rng, d, d)
        customers.append(_customer(cid, t1, d, t2, d, rng.coin()))
    return make_instance(customers, DEFAULT_FLEET, DEFAULT_FLEET)


def generate_fc(n: int, seed: int) -> Instance:
    """Group fc: shared duration in [15, 45] plus a working time in [60, 240]
    between the two trips; t2 = t1 + d + w."""
    rng = SplitMix64(seed)
    customers = []
    for cid in range(1, n + 1):
        d = rng.randint(15, 45)
        w = rng.randint(60, 240)
        t1 = rng.randint(0, DEFAULT_HORIZON - 2 * d - w)
        t2 = t1 + d + w
        customers.append(_customer(cid, t1, d, t2, d, rng.coin()))
    return make_instance(customers, DEFAULT_FLEET, DEFAULT_FLEET)


GENERATORS = {"st": generate_st, "ft": generate_ft, "fc": generate_fc}


# ---------------------------------------------------------------------------
# Canonical file format
#
#   # seed=<u64> group=<st|ft|fc>          (optional manifest comment)
#   carshare v1 n=<n> mA=<int> mB=<int> horizon=<int>
#   <id> <dir:AB|BA> <o_start> <o_end> <r_start> <r_end>
#
# UTF-8, LF line endings, space-separated fields, integer minutes.

def write_instance(inst: Instance, path: str | Path, *,
                   seed: int | None = None, group: str | None = None) -> None:
    lines = []
    if seed is not None or group is not None:
        parts = ["#"]
        if seed is not None:
            parts.append(f"seed={seed}")
        if group is not None:
            parts.append(f"group={group}")
        lines.append(" ".join(parts))
    lines.append(f"carshare v1 n={inst.n} mA={inst.fleet_a} mB={inst.fleet_b} "
                 f"horizon={inst.horizon}")
    for c in inst.customers:
        direction = "AB" if c.outbound.origin == STATION_A else "BA"
        lines.append(f"{c.id} {direction} {c.outbound.start} {c.outbound.end} "
                     f"{c.ret.start} {c.ret.end}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceFormatError(f"{what}: not an integer: {token!r}", lineno) from None


def read_instance(path: str | Path) -> Instance:
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    lines: list[tuple[int, str]] = [
        (i, line) for i, line in enumerate(raw, start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise InstanceFormatError("empty file")
    lineno, header = lines[0]
    fields = header.split()
    if len(fields) != 6 or fields[0] != "carshare" or fields[1] != "v1":
        raise InstanceFormatError(f"bad header: {header!r}", lineno)
    kv = {}
    for tok in fields[2:]:
        key, _, val = tok.partition("=")
        kv[key] = _parse_int(val, key, lineno)
    for key in ("n", "mA", "mB", "horizon"):
        if key not in kv:
            raise InstanceFormatError(f"header missing {key}", lineno)
    if kv["mA"] < 0 or kv["mB"] < 0:
        raise InstanceFormatError("negative fleet", lineno)
    customers = []
    for lineno, line in lines[1:]:
        toks = line.split()
        if len(toks) != 6:
            raise InstanceFormatError(f"expected 6 fields, got {len(toks)}", lineno)
        cid = _parse_int(toks[0], "id", lineno)
        if toks[1] not in ("AB", "BA"):
            raise InstanceFormatError(f"direction must be AB or BA: {toks[1]!r}", lineno)
        origin = STATION_A if toks[1] == "AB" else STATION_B
        o_start = _parse_int(toks[2], "o_start", lineno)
        o_end = _parse_int(toks[3], "o_end", lineno)
        r_start = _parse_int(toks[4], "r_start", lineno)
        r_end = _parse_int(toks[5], "r_end", lineno)
        customers.append(Customer(cid, Demand(origin, o_start, o_end),
                                  Demand(other_station(origin), r_start, r_end)))
    if len(customers) != kv["n"]:
        raise InstanceFormatError(f"header says n={kv['n']} but {len(customers)} "
                                  "customer lines found")
    inst = make_instance(customers, kv["mA"], kv["mB"], kv["horizon"])
    issues = validate(inst)
    if issues:
        raise InstanceFormatError("; ".join(issues))
    return inst
