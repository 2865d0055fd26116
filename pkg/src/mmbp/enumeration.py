"""Total enumeration of balanced bipartitions.

Only subsets containing vertex 1 are visited (one per complementary pair), in
lexicographic order of the member tuple. Candidates are scored in batches with
a single matrix product; because weights are integers well below 2**53 the
float64 product is exact, and an int64 path is used otherwise.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator

import numpy as np

from .graph import Bisection, Instance
from .result import OPTIMAL, TIME_LIMIT, SolveResult

# bound on batch_size * edge_count, keeps each batch small in memory and time
_CELL_BUDGET = 1 << 21
_MAX_BATCH = 8192


def candidate_count(n: int) -> int:
    return math.comb(n - 1, n // 2 - 1)


def _batches(n: int, size: int) -> Iterator[np.ndarray]:
    r = n // 2 - 1
    combos = itertools.combinations(range(2, n + 1), r)
    while True:
        chunk = list(itertools.islice(combos, size))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(len(chunk), r)


class _Scorer:
    def __init__(self, instance: Instance):
        self.n = instance.vertex_count
        self.u = instance.endpoints[:, 0] - 1
        self.v = instance.endpoints[:, 1] - 1
        w = instance.weight_matrix
        exact_float = int(w.sum(axis=0).max(initial=0)) < 2**53
        self.w = w.astype(np.float64) if exact_float else w

    def __call__(self, rest: np.ndarray) -> tuple[int, int]:
        """Best (value, row) in the batch; the first row wins ties."""
        rows = rest.shape[0]
        side = np.zeros((rows, self.n), dtype=bool)
        side[:, 0] = True
        side[np.arange(rows)[:, None], rest - 1] = True
        crossing = side[:, self.u] != side[:, self.v]
        sums = crossing.astype(self.w.dtype) @ self.w
        values = sums.min(axis=1)
        best = int(np.argmax(values))
        return int(round(float(values[best]))), best


def solve_enumeration(
    instance: Instance, time_limit: float | None = None, jobs: int = 1
) -> SolveResult:
    """Exact optimum by scanning all C(n-1, n/2-1) anchored bisections.

    Ties resolve to the lexicographically smallest member tuple. With
    ``jobs > 1`` batches are scored on a thread pool and merged in scan order,
    so the result does not depend on the worker count.
    """
    start = time.monotonic()
    n = instance.vertex_count
    m = max(instance.edge_count, 1)
    size = max(1, min(_MAX_BATCH, _CELL_BUDGET // m))
    score = _Scorer(instance)

    best_value = -1
    best_members: tuple[int, ...] | None = None
    time_to_best = 0.0
    explored = 0
    status = OPTIMAL

    def expired() -> bool:
        return time_limit is not None and time.monotonic() - start >= time_limit

    def merge(batch: np.ndarray, outcome: tuple[int, int]) -> None:
        nonlocal best_value, best_members, time_to_best, explored
        value, row = outcome
        explored += batch.shape[0]
        if value > best_value:
            best_value = value
            best_members = (1, *batch[row].tolist())
            time_to_best = time.monotonic() - start

    batches = _batches(n, size)
    if jobs <= 1:
        for batch in batches:
            if expired():
                status = TIME_LIMIT
                break
            merge(batch, score(batch))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pending: list[tuple[np.ndarray, object]] = []
            exhausted = stopped = False
            while True:
                while not (exhausted or stopped) and len(pending) < 2 * jobs:
                    batch = next(batches, None)
                    if batch is None:
                        exhausted = True
                    elif expired():
                        stopped = True
                    else:
                        pending.append((batch, pool.submit(score, batch)))
                if not pending:
                    break
                batch, fut = pending.pop(0)
                merge(batch, fut.result())
            if stopped:
                status = TIME_LIMIT

    bisection = Bisection(best_members, n) if best_members is not None else None
    return SolveResult(
        method="enum",
        status=status,
        best_value=max(best_value, 0),
        best_bisection=bisection,
        explored=explored,
        time_to_best=time_to_best,
        time_total=time.monotonic() - start,
    )
