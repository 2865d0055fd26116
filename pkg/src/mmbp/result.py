from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .graph import Bisection, format_weight

OPTIMAL = "Optimal"
TIME_LIMIT = "TimeLimit"
ABORTED = "Aborted"


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one exact solve.

    ``explored`` counts candidate bisections for enumeration and search-tree
    nodes for branch-and-bound; ``stats`` carries method-specific counters.
    """

    method: str
    status: str
    best_value: int
    best_bisection: Bisection | None
    explored: int
    time_to_best: float | None
    time_total: float
    stats: dict[str, int] = field(default_factory=dict)

    def to_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        d["best_value"] = format_weight(self.best_value)
        d["best_bisection"] = (
            list(self.best_bisection.members) if self.best_bisection is not None else None
        )
        if not timings:
            d.pop("time_to_best")
            d.pop("time_total")
        return d
