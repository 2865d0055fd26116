"""Mixed-integer model of the bisection problem, LP-file exchange and witness checks.

Model (``w`` in milli-units, every coefficient stored as a milli-unit integer)::

    maximize  U
    dim{l}:   U - sum_e w_el y_e            <= 0      for each coordinate l
    lb{u}_{v}: x_u + x_v - y_e              >= 0      for each edge e = (u, v)
    ub{u}_{v}: x_u + x_v + y_e              <= 2      for each edge
    bal:      sum_i x_i                      = n/2
    x, y binary; U >= 0
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from typing import Iterable

from .graph import SCALE, Bisection, Instance, cut_weight, format_weight

_WRAP = 8
_COEF_RE = re.compile(r"^\d+\.\d{3}$")
_INT_RE = re.compile(r"^\d+$")
_X_RE = re.compile(r"^x([1-9]\d*)$")
_Y_RE = re.compile(r"^y([1-9]\d*)_([1-9]\d*)$")
_SENSES = ("<=", ">=", "=")


class LPFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[int, str], ...]  # (milli-unit coefficient, variable)
    sense: str
    rhs: int  # milli-units


@dataclass(frozen=True)
class MilpModel:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    dim_constraints: tuple[Constraint, ...]
    cut_lb_constraints: tuple[Constraint, ...]
    cut_ub_constraints: tuple[Constraint, ...]
    balance_constraint: Constraint
    objective: str = "U"

    @property
    def dim(self) -> int:
        return len(self.dim_constraints)

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return (
            self.dim_constraints
            + self.cut_lb_constraints
            + self.cut_ub_constraints
            + (self.balance_constraint,)
        )

    @property
    def binaries(self) -> tuple[str, ...]:
        xs = tuple(f"x{i}" for i in range(1, self.vertex_count + 1))
        return xs + tuple(_y(u, v) for u, v in self.edges)

    @property
    def continuous(self) -> tuple[str, ...]:
        return ("U",)

    def edge_weights(self) -> list[tuple[int, ...]]:
        """Per-edge weight tuples read back from the ``dim`` rows."""
        per_row = [dict((var, -c) for c, var in row.terms if var != "U") for row in self.dim_constraints]
        return [tuple(row.get(_y(u, v), 0) for row in per_row) for u, v in self.edges]


def _y(u: int, v: int) -> str:
    return f"y{u}_{v}"


def build_model(instance: Instance) -> MilpModel:
    one = SCALE
    edges = tuple((e.u, e.v) for e in instance.edges)
    dim_rows = tuple(
        Constraint(
            f"dim{l + 1}",
            ((one, "U"), *((-e.weights[l], _y(e.u, e.v)) for e in instance.edges)),
            "<=",
            0,
        )
        for l in range(instance.dim)
    )
    lb = tuple(
        Constraint(f"lb{u}_{v}", ((one, f"x{u}"), (one, f"x{v}"), (-one, _y(u, v))), ">=", 0)
        for u, v in edges
    )
    ub = tuple(
        Constraint(f"ub{u}_{v}", ((one, f"x{u}"), (one, f"x{v}"), (one, _y(u, v))), "<=", 2 * one)
        for u, v in edges
    )
    bal = Constraint(
        "bal",
        tuple((one, f"x{i}") for i in range(1, instance.vertex_count + 1)),
        "=",
        instance.half * one,
    )
    return MilpModel(instance.vertex_count, edges, dim_rows, lb, ub, bal)


# -- LP text ------------------------------------------------------------------


def _term_text(coef: int, var: str, first: bool, explicit: bool) -> str:
    sign = "-" if coef < 0 else "+"
    mag = abs(coef)
    body = f"{format_weight(mag)} {var}" if explicit or mag != SCALE else var
    if first:
        return body if sign == "+" else f"- {body}"
    return f"{sign} {body}"


def _rhs_text(value: int) -> str:
    return str(value // SCALE) if value % SCALE == 0 else format_weight(value)


def _wrap(head: str, parts: list[str], tail: str) -> list[str]:
    lines = []
    for i in range(0, max(len(parts), 1), _WRAP):
        chunk = " ".join(parts[i : i + _WRAP])
        lines.append(f" {head} {chunk}" if i == 0 else f"   {chunk}")
    lines[-1] += f" {tail}"
    return lines


def emit_lp(model: MilpModel) -> str:
    out = [
        f"\\ multidimensional max bisection: n={model.vertex_count} m={len(model.edges)} k={model.dim}",
        "Maximize",
        f" obj: {model.objective}",
        "Subject To",
    ]
    for row in model.constraints:
        explicit = row.name.startswith("dim")
        parts = [
            _term_text(c, var, i == 0, explicit and var != "U")
            for i, (c, var) in enumerate(row.terms)
        ]
        out += _wrap(f"{row.name}:", parts, f"{row.sense} {_rhs_text(row.rhs)}")
    out += ["Bounds", " U >= 0", "Binary"]
    binaries = list(model.binaries)
    out += ["   " + " ".join(binaries[i : i + _WRAP]) for i in range(0, len(binaries), _WRAP)]
    out.append("End")
    return "\n".join(out) + "\n"


def _parse_coef(token: str) -> int:
    if not _COEF_RE.match(token):
        raise LPFormatError(f"coefficient {token!r} must have exactly 3 fraction digits")
    whole, frac = token.split(".")
    return int(whole) * SCALE + int(frac)


def _parse_rhs(token: str) -> int:
    if _INT_RE.match(token):
        return int(token) * SCALE
    return _parse_coef(token)


def _parse_row(text: str) -> Constraint:
    name, sep, body = text.partition(":")
    if not sep or not name.strip():
        raise LPFormatError(f"constraint without name: {text.strip()!r}")
    tokens = body.split()
    if len(tokens) < 3 or tokens[-2] not in _SENSES:
        raise LPFormatError(f"constraint {name.strip()!r} lacks 'sense rhs' ending")
    sense, rhs = tokens[-2], _parse_rhs(tokens[-1])
    tokens = tokens[:-2]
    terms = []
    i = 0
    while i < len(tokens):
        sign = 1
        if tokens[i] in ("+", "-"):
            sign = -1 if tokens[i] == "-" else 1
            i += 1
        elif terms:
            raise LPFormatError(f"missing operator before {tokens[i]!r}")
        if i >= len(tokens):
            raise LPFormatError(f"dangling operator in {name.strip()!r}")
        coef = SCALE
        if tokens[i][0].isdigit():
            coef = _parse_coef(tokens[i])
            i += 1
            if i >= len(tokens):
                raise LPFormatError(f"coefficient without variable in {name.strip()!r}")
        terms.append((sign * coef, tokens[i]))
        i += 1
    return Constraint(name.strip(), tuple(terms), sense, rhs)


def parse_lp(text: str) -> MilpModel:
    """Read back a model written by :func:`emit_lp` (only that dialect)."""
    sections: dict[str, list[str]] = {}
    current = None
    ended = False
    headers = {"maximize": "max", "subject to": "st", "bounds": "bounds", "binary": "bin", "end": "end"}
    expected = ["max", "st", "bounds", "bin", "end"]
    for raw in text.splitlines():
        if not raw.strip() or raw.lstrip().startswith("\\"):
            continue
        if ended:
            raise LPFormatError("content after End")
        key = headers.get(raw.strip().lower())
        if key is not None and not raw[0].isspace():
            if not expected or key != expected[0]:
                raise LPFormatError(f"unexpected section {raw.strip()!r}")
            expected.pop(0)
            current = key
            ended = key == "end"
            sections[key] = []
            continue
        if current is None:
            raise LPFormatError(f"text before first section: {raw.strip()!r}")
        if not raw[0].isspace():
            raise LPFormatError(f"unknown section {raw.strip()!r}")
        sections[current].append(raw)
    if not ended:
        raise LPFormatError("missing End section")

    objective = " ".join(line.strip() for line in sections["max"])
    if objective.replace(" ", "") != "obj:U":
        raise LPFormatError(f"objective must be 'obj: U', got {objective!r}")
    if [line.split() for line in sections["bounds"]] not in ([], [["U", ">=", "0"]]):
        raise LPFormatError("only 'U >= 0' is accepted in Bounds")

    binaries = [tok for line in sections["bin"] for tok in line.split()]
    xs = [int(_X_RE.match(b).group(1)) for b in binaries if _X_RE.match(b)]
    edges = []
    for b in binaries:
        if _X_RE.match(b):
            continue
        ym = _Y_RE.match(b)
        if ym is None:
            raise LPFormatError(f"unknown variable name {b!r}")
        edges.append((int(ym.group(1)), int(ym.group(2))))
    n = len(xs)
    if xs != list(range(1, n + 1)):
        raise LPFormatError("binary x variables must be x1..xn in order")
    known = set(binaries) | {"U"}

    rows: list[list[str]] = []
    for line in sections["st"]:
        if line.startswith("   "):
            if not rows:
                raise LPFormatError("continuation line before any constraint")
            rows[-1].append(line)
        else:
            rows.append([line])
    families: dict[str, list[Constraint]] = {"dim": [], "lb": [], "ub": [], "bal": []}
    for parts in rows:
        row = _parse_row(" ".join(p.strip() for p in parts))
        for _, var in row.terms:
            if var not in known:
                raise LPFormatError(f"unknown variable {var!r} in {row.name}")
        family = re.match(r"^(dim|lb|ub|bal)", row.name)
        if family is None:
            raise LPFormatError(f"unknown constraint family {row.name!r}")
        families[family.group(1)].append(row)
    if len(families["bal"]) != 1:
        raise LPFormatError("expected exactly one balance row")
    return MilpModel(
        n,
        tuple(edges),
        tuple(families["dim"]),
        tuple(families["lb"]),
        tuple(families["ub"]),
        families["bal"][0],
    )


# -- witnesses ----------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    x: tuple[int, ...]
    y: tuple[int, ...]
    u_value: int  # milli-units


@dataclass
class CheckReport:
    families: dict[str, bool]
    violated: list[str] = field(default_factory=list)
    tight: bool = False

    @property
    def feasible(self) -> bool:
        return all(self.families.values())


def witness_from_bisection(instance: Instance, s: Bisection | Iterable[int]) -> Witness:
    members = set(s.members) if isinstance(s, Bisection) else set(s)
    report = cut_weight(instance, members)
    cut = set(report.cut_edges)
    x = tuple(int(i in members) for i in range(1, instance.vertex_count + 1))
    y = tuple(int(i in cut) for i in range(instance.edge_count))
    return Witness(x, y, report.weight)


def check_solution(model: MilpModel, w: Witness) -> CheckReport:
    """Check every constraint family exactly; ``tight`` also needs y and U to match S's cut."""
    if len(w.x) != model.vertex_count or len(w.y) != len(model.edges):
        raise ValueError(
            f"witness sized ({len(w.x)}, {len(w.y)}), model needs "
            f"({model.vertex_count}, {len(model.edges)})"
        )
    # every variable in milli-units so that coef * value is on one scale
    value = {"U": w.u_value}
    value.update((f"x{i + 1}", xi * SCALE) for i, xi in enumerate(w.x))
    value.update((_y(u, v), ye * SCALE) for (u, v), ye in zip(model.edges, w.y))

    def holds(row: Constraint) -> bool:
        lhs = sum(c * value[var] for c, var in row.terms)
        rhs = row.rhs * SCALE
        return lhs <= rhs if row.sense == "<=" else lhs >= rhs if row.sense == ">=" else lhs == rhs

    report = CheckReport(families={})
    named = {
        "dim": model.dim_constraints,
        "cut_lb": model.cut_lb_constraints,
        "cut_ub": model.cut_ub_constraints,
        "balance": (model.balance_constraint,),
    }
    for family, rows in named.items():
        bad = [row.name for row in rows if not holds(row)]
        report.families[family] = not bad
        report.violated += bad
    domain_ok = all(v in (0, 1) for v in (*w.x, *w.y)) and w.u_value >= 0
    report.families["domain"] = domain_ok
    if not domain_ok:
        report.violated.append("domain")

    if report.feasible:
        side = dict(enumerate(w.x, start=1))
        crossing = [int(side[u] != side[v]) for u, v in model.edges]
        sums = [0] * model.dim
        for cut, ws in zip(crossing, model.edge_weights()):
            if cut:
                sums = [a + b for a, b in zip(sums, ws)]
        report.tight = list(w.y) == crossing and w.u_value == min(sums)
    return report


def parse_solution(text: str) -> dict[str, Decimal]:
    """Read ``<name> <value>`` lines; blank lines and ``#`` comments are skipped."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<name> <value>'")
        try:
            values[parts[0]] = Decimal(parts[1])
        except InvalidOperation:
            raise ValueError(f"line {lineno}: bad number {parts[1]!r}") from None
    return values


def witness_from_values(model: MilpModel, values: dict[str, Decimal], tol: Decimal = Decimal("1e-6")) -> Witness:
    """Map solver values to a witness: binaries snap to 0/1 within ``tol``, U rounds to 3 decimals.

    Variables absent from ``values`` are taken as zero.
    """
    unknown = set(values) - set(model.binaries) - {"U"}
    if unknown:
        raise ValueError(f"unknown variables in solution: {sorted(unknown)[:5]}")

    def binary(name: str) -> int:
        v = values.get(name, Decimal(0))
        r = v.to_integral_value()
        if abs(v - r) > tol or r not in (0, 1):
            raise ValueError(f"{name} = {v} is not binary")
        return int(r)

    x = tuple(binary(f"x{i}") for i in range(1, model.vertex_count + 1))
    y = tuple(binary(_y(u, v)) for u, v in model.edges)
    u = values.get("U", Decimal(0)).quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN)
    return Witness(x, y, int(u * SCALE))


def format_solution(w: Witness, model: MilpModel) -> str:
    lines = [f"U {format_weight(w.u_value)}"]
    lines += [f"x{i} {xi}" for i, xi in enumerate(w.x, start=1)]
    lines += [f"{_y(u, v)} {ye}" for (u, v), ye in zip(model.edges, w.y)]
    return "\n".join(lines) + "\n"
