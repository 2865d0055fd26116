"""Run an external MILP solver on emitted LP files.

Only file exchange is used: the model is written with :func:`emit_lp`, the
solver binary is invoked as a subprocess and its solution file is converted to
``<name> <value>`` pairs. CBC's command line and solution layout are supported.

The binary is located through ``$MMBP_LP_SOLVER``, then ``cbc`` on ``PATH``,
then the CBC build bundled with the ``pulp`` package if that is installed.
"""

from __future__ import annotations

import importlib.util
import os
import platform
import shutil
import subprocess
import tempfile
import time
from decimal import Decimal
from pathlib import Path

from .graph import Bisection, Instance, cut_weight
from .milp import build_model, emit_lp, witness_from_values
from .result import ABORTED, OPTIMAL, TIME_LIMIT, SolveResult

ENV_VAR = "MMBP_LP_SOLVER"


class SolverError(RuntimeError):
    pass


def find_solver() -> str | None:
    configured = os.environ.get(ENV_VAR)
    if configured:
        return configured
    found = shutil.which("cbc")
    if found:
        return found
    spec = importlib.util.find_spec("pulp")
    if spec is None or spec.origin is None:
        return None
    arch = {"x86_64": "i64", "aarch64": "arm64", "arm64": "arm64"}.get(platform.machine())
    if platform.system() != "Linux" or arch is None:
        return None
    bundled = Path(spec.origin).parent / "solverdir" / "cbc" / "linux" / arch / "cbc"
    return str(bundled) if bundled.is_file() and os.access(bundled, os.X_OK) else None


def parse_cbc_solution(text: str) -> tuple[str, Decimal | None, dict[str, Decimal]]:
    """Return (status, objective, values) from a CBC ``solu`` file."""
    lines = text.splitlines()
    if not lines:
        raise SolverError("empty CBC solution file")
    head = lines[0]
    status_text, _, tail = head.partition(" - objective value ")
    objective = Decimal(tail.split()[0]) if tail else None
    if status_text.startswith("Optimal"):
        status = OPTIMAL
    elif status_text.startswith("Stopped on time"):
        status = TIME_LIMIT
    else:
        status = ABORTED
    values = {}
    for line in lines[1:]:
        parts = line.replace("**", " ").split()
        if len(parts) >= 3:
            values[parts[1]] = Decimal(parts[2])
    return status, objective, values


def run_lp_file(lp_path: str | Path, solver: str, time_limit: float | None = None) -> tuple[str, Decimal | None, dict[str, Decimal]]:
    with tempfile.TemporaryDirectory() as tmp:
        sol = Path(tmp) / "solution.txt"
        cmd = [solver, str(lp_path)]
        if time_limit is not None:
            cmd += ["sec", str(time_limit)]
        cmd += ["solve", "solu", str(sol)]
        proc = subprocess.run(cmd, stdin=subprocess.DEVNULL, capture_output=True, text=True)
        if proc.returncode != 0 or not sol.exists():
            raise SolverError(f"solver failed ({proc.returncode}): {proc.stderr.strip()[:200]}")
        return parse_cbc_solution(sol.read_text())


def solve_external(instance: Instance, time_limit: float | None = None, solver: str | None = None) -> SolveResult:
    """Solve through the LP file route; the reported value is recomputed from x."""
    solver = solver or find_solver()
    if solver is None:
        raise SolverError(f"no LP solver configured (set ${ENV_VAR})")
    start = time.monotonic()
    model = build_model(instance)
    with tempfile.TemporaryDirectory() as tmp:
        lp = Path(tmp) / "model.lp"
        lp.write_text(emit_lp(model))
        status, _, values = run_lp_file(lp, solver, time_limit)
    bisection = None
    value = 0
    if values:
        w = witness_from_values(model, values)
        members = [i for i, xi in enumerate(w.x, start=1) if xi]
        bisection = Bisection.canonical(members, instance.vertex_count)
        value = cut_weight(instance, bisection).weight
    elapsed = time.monotonic() - start
    return SolveResult(
        method="ext",
        status=status,
        best_value=value,
        best_bisection=bisection,
        explored=0,
        time_to_best=None,
        time_total=elapsed,
    )
