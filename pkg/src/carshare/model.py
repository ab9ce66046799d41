"""Explicit variable/constraint systems for the CS1 and CS2 formulations.

One binary variable per customer (outbound and return legs share it); one
continuous variable per connecting or source arc with the arc capacity as
its upper bound.  Rows are flow conservation at every vertex other than s
and t, plus, for CS2, one precedence row per arborescence-forest arc.

Preprocessing can fuse demand arcs of different customers into one arc; the
customers sharing an arc are then forced equal, so they collapse into a
single column whose objective coefficient is the group size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .network import CONNECTING, DEMAND, Network, SOURCE
from .priority import PriorityDag


@dataclass
class Column:
    name: str
    lower: float
    upper: float
    objective: float
    integer: bool
    customers: tuple[int, ...] = ()  # customer ids represented, if a demand column


@dataclass
class Row:
    name: str
    coeffs: dict[int, float]  # column index -> coefficient
    sense: str  # "E" or "L"
    rhs: float


@dataclass
class Model:
    network: Network
    columns: list[Column] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    customer_col: dict[int, int] = field(default_factory=dict)
    name: str = "CS1"

    @property
    def instance(self):
        return self.network.instance

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def customer_value(self, cid: int, values) -> float:
        return values[self.customer_col[cid]]


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def build_cs1(net: Network) -> Model:
    """Flow model maximizing the number of satisfied customers."""
    inst = net.instance
    model = Model(net, name="CS1")
    uf = _UnionFind([c.id for c in inst.customers])
    for arc in net.arcs.values():
        cids = sorted({cid for cid, _ in arc.owners})
        for other in cids[1:]:
            uf.union(cids[0], other)
    groups: dict[int, list[int]] = {}
    for c in inst.customers:
        groups.setdefault(uf.find(c.id), []).append(c.id)

    for rep in sorted(groups):
        members = tuple(sorted(groups[rep]))
        idx = len(model.columns)
        model.columns.append(Column(f"xd_{rep}", 0.0, 1.0, float(len(members)),
                                    True, members))
        for cid in members:
            model.customer_col[cid] = idx

    arc_col: dict[int, int] = {}
    conn_seen: dict[tuple[int, int], int] = {}
    for arc in net.sorted_arcs():
        if arc.kind == DEMAND:
            arc_col[arc.id] = model.customer_col[arc.owners[0][0]]
        elif arc.kind == CONNECTING:
            key = (arc.tail, arc.head)
            conn_seen[key] = conn_seen.get(key, 0) + 1
            name = f"conn_{arc.tail}_{arc.head}"
            if conn_seen[key] > 1:
                name += f"_{conn_seen[key]}"
            arc_col[arc.id] = len(model.columns)
            model.columns.append(Column(name, 0.0, float(arc.capacity), 0.0, False))
        else:  # source
            head = net.vertices[arc.head]
            station = head.station or head.label
            arc_col[arc.id] = len(model.columns)
            model.columns.append(Column(f"src_{station}", 0.0,
                                        float(arc.capacity), 0.0, False))

    incidence: dict[int, dict[int, float]] = {
        vid: {} for vid in net.vertices if vid not in (net.s, net.t)}
    for arc in net.arcs.values():
        col = arc_col[arc.id]
        if arc.tail in incidence:
            row = incidence[arc.tail]
            row[col] = row.get(col, 0.0) + 1.0
        if arc.head in incidence:
            row = incidence[arc.head]
            row[col] = row.get(col, 0.0) - 1.0
    for vid in sorted(incidence):
        coeffs = {c: v for c, v in incidence[vid].items() if v != 0.0}
        model.rows.append(Row(f"flow_{vid}", coeffs, "E", 0.0))
    return model


def build_cs2(net: Network, forest: PriorityDag) -> Model:
    """CS1 plus one precedence row per forest arc (x_c <= x_c')."""
    model = build_cs1(net)
    model.name = "CS2"
    for c, cp in sorted(forest.arcs):
        col_c = model.customer_col[c]
        col_cp = model.customer_col[cp]
        if col_c == col_cp:
            continue  # same merged variable; the row would be trivial
        model.rows.append(Row(f"prec_{c}_{cp}", {col_c: 1.0, col_cp: -1.0},
                              "L", 0.0))
    return model


# ---------------------------------------------------------------------------
# Solver file export

def export(model: Model, fmt: str, path: str | Path) -> None:
    if fmt == "mps":
        text = to_mps(model)
    elif fmt == "lp":
        text = to_lp(model)
    else:
        raise ValueError(f"unknown format {fmt!r} (expected 'mps' or 'lp')")
    Path(path).write_text(text, encoding="utf-8")


def _mps_line(f1: str, f2: str, f3: str = "", f4: str = "", f5: str = "",
              f6: str = "") -> str:
    return f" {f1:<2} {f2:<10}{f3:<12}{f4:<14}{f5:<12}{f6}".rstrip()


def to_mps(model: Model) -> str:
    """Fixed-format MPS with OBJSENSE MAX and integer markers."""
    out = [f"NAME          {model.name}", "OBJSENSE", "    MAX", "ROWS",
           _mps_line("N", "obj")]
    for row in model.rows:
        out.append(_mps_line(row.sense, row.name))
    out.append("COLUMNS")
    in_int = False
    marker = 0
    for j, col in enumerate(model.columns):
        if col.integer != in_int:
            marker += 1
            flag = "'INTORG'" if col.integer else "'INTEND'"
            out.append(_mps_line("", f"MARK{marker:04d}", "'MARKER'", "", flag))
            in_int = col.integer
        entries = []
        if col.objective:
            entries.append(("obj", col.objective))
        for row in model.rows:
            if j in row.coeffs:
                entries.append((row.name, row.coeffs[j]))
        for k in range(0, len(entries), 2):
            pair = entries[k:k + 2]
            fields = []
            for rname, coef in pair:
                fields += [rname, f"{coef:.10g}"]
            out.append(_mps_line("", col.name, *fields))
    if in_int:
        marker += 1
        out.append(_mps_line("", f"MARK{marker:04d}", "'MARKER'", "", "'INTEND'"))
    out.append("RHS")
    for row in model.rows:
        if row.rhs:
            out.append(_mps_line("", "rhs", row.name, f"{row.rhs:.10g}"))
    out.append("BOUNDS")
    for col in model.columns:
        if col.lower != 0.0:
            out.append(_mps_line("LO", "bnd", col.name, f"{col.lower:.10g}"))
        out.append(_mps_line("UP", "bnd", col.name, f"{col.upper:.10g}"))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def to_lp(model: Model) -> str:
    """CPLEX-style LP text."""
    obj = {j: c.objective for j, c in enumerate(model.columns) if c.objective}
    out = ["Maximize", " obj: " + _lp_expr(obj, model)]
    out.append("Subject To")
    for row in model.rows:
        op = "=" if row.sense == "E" else "<="
        out.append(f" {row.name}: {_lp_expr(row.coeffs, model)} {op} {row.rhs:.10g}")
    out.append("Bounds")
    for col in model.columns:
        out.append(f" {col.lower:.10g} <= {col.name} <= {col.upper:.10g}")
    integers = [c.name for c in model.columns if c.integer]
    if integers:
        out.append("Generals")
        out.append(" " + " ".join(integers))
    out.append("End")
    return "\n".join(out) + "\n"


def _lp_expr(coeffs: dict[int, float], model: Model) -> str:
    terms = []
    for j in sorted(coeffs):
        coef = coeffs[j]
        name = model.columns[j].name
        sign = "+" if coef >= 0 else "-"
        mag = abs(coef)
        term = name if mag == 1 else f"{mag:.10g} {name}"
        terms.append((sign, term))
    if not terms:
        return "0 " + model.columns[0].name if model.columns else "0"
    first_sign, first_term = terms[0]
    text = ("- " if first_sign == "-" else "") + first_term
    for sign, term in terms[1:]:
        text += f" {sign} {term}"
    return text


def read_mps_summary(path: str | Path) -> dict[str, int]:
    """Parse one of our own MPS files; reports row/column/integer counts."""
    rows = 0
    cols: set[str] = set()
    integers: set[str] = set()
    section = None
    in_int = False
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" "):
            section = raw.split()[0]
            continue
        toks = raw.split()
        if section == "ROWS":
            if toks[0] != "N":
                rows += 1
        elif section == "COLUMNS":
            if len(toks) >= 3 and toks[1] == "'MARKER'":
                in_int = toks[-1] == "'INTORG'"
                continue
            cols.add(toks[0])
            if in_int:
                integers.add(toks[0])
    return {"rows": rows, "columns": len(cols), "integer_columns": len(integers)}
