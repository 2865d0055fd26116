"""Dimension-sweep benchmark: every (instance, k, method) solved on the k-prefix."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .bnb import solve_bnb
from .enumeration import solve_enumeration
from .external import solve_external
from .graph import Instance, cut_weight, format_weight, parse_instance, prefix_instance
from .result import ABORTED, SolveResult

PAPER_K_VALUES = (1, 2, 3, 4, 5, 10, 15, 20)
PAPER_TIME_LIMIT = 7200.0
CSV_HEADER = ("instance", "k", "method", "value", "status", "t", "t_tot")

SOLVERS: dict[str, Callable[..., SolveResult]] = {
    "enum": solve_enumeration,
    "bnb": solve_bnb,
    "ext": solve_external,
}


@dataclass(frozen=True)
class BenchRow:
    instance_name: str
    k: int
    method: str
    value: int
    status: str
    time_to_best: float | None
    time_total: float
    bisection: tuple[int, ...] | None = None

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.instance_name, self.k, self.method)


def _solve_one(name: str, instance: Instance, k: int, method: str, time_limit: float | None) -> BenchRow:
    sub = prefix_instance(instance, k)
    try:
        res = SOLVERS[method](sub, time_limit)
    except MemoryError:
        return BenchRow(name, k, method, 0, ABORTED, None, 0.0)
    members = res.best_bisection.members if res.best_bisection is not None else None
    if members is not None and cut_weight(sub, members).weight != res.best_value:
        raise RuntimeError(f"{method} on {name}/k={k} reported an inconsistent value")
    t = res.time_to_best
    if t is not None:
        t = min(t, res.time_total)
    return BenchRow(name, k, method, res.best_value, res.status, t, res.time_total, members)


def run_protocol(
    instances: Sequence[tuple[str, Instance]],
    methods: Sequence[str] = ("enum", "bnb"),
    k_values: Sequence[int] = PAPER_K_VALUES,
    time_limit: float | None = PAPER_TIME_LIMIT,
    jobs: int = 1,
) -> list[BenchRow]:
    """Solve each named instance's k-prefix with each method.

    A row is produced for every combination, including timeouts. With
    ``jobs > 1`` combinations run in separate processes; a single solve is
    never split.
    """
    for method in methods:
        if method not in SOLVERS:
            raise ValueError(f"unknown method {method!r}; choose from {sorted(SOLVERS)}")
    tasks = []
    for name, inst in instances:
        for k in k_values:
            if not 1 <= k <= inst.dim:
                raise ValueError(f"k={k} exceeds dimension {inst.dim} of {name}")
            tasks.extend((name, inst, k, method, time_limit) for method in methods)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_solve_one, *zip(*tasks))) if tasks else []
    else:
        rows = [_solve_one(*t) for t in tasks]
    return sorted(rows, key=lambda r: r.key)


def _ordered(rows: Sequence[BenchRow]) -> list[BenchRow]:
    ordered = sorted(rows, key=lambda r: r.key)
    for a, b in zip(ordered, ordered[1:]):
        if a.key == b.key:
            raise ValueError(f"duplicate row key {a.key}")
    return ordered


def _seconds(t: float | None) -> str:
    return "" if t is None else f"{t:.3f}"


def write_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in _ordered(rows):
        writer.writerow(
            [r.instance_name, r.k, r.method, format_weight(r.value), r.status,
             _seconds(r.time_to_best), _seconds(r.time_total)]
        )
    return buf.getvalue()


def write_json(rows: Sequence[BenchRow], timings: bool = True) -> str:
    out = []
    for r in _ordered(rows):
        d = {
            "instance": r.instance_name,
            "k": r.k,
            "method": r.method,
            "value": format_weight(r.value),
            "status": r.status,
            "bisection": list(r.bisection) if r.bisection is not None else None,
        }
        if timings:
            d["t"] = r.time_to_best
            d["t_tot"] = r.time_total
        out.append(d)
    return json.dumps(out, indent=2) + "\n"


def load_suite(directory: str | Path) -> list[tuple[str, Instance]]:
    """All ``*.mmbp`` files of a directory, named by file stem, sorted by name."""
    paths = sorted(Path(directory).glob("*.mmbp"))
    return [(p.stem, parse_instance(p.read_text())) for p in paths]
