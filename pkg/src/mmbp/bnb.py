"""Depth-first branch-and-bound with a combinatorial min-over-coordinates bound.

A node fixes the side of a prefix of the branching order. Its bound is, per
coordinate, the weight already cut plus every edge that still has a free
endpoint; the minimum over coordinates can only shrink as vertices get fixed.

Pruning discards a node when its bound is below the incumbent, or equal to it
and no completion is lexicographically smaller than the incumbent set. That
keeps the reported bisection identical to the enumeration tie-break.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graph import Bisection, Instance, cut_weight
from .result import OPTIMAL, TIME_LIMIT, SolveResult

_CLOCK_EVERY = 1024
_LOCAL_SEARCH_CELLS = 4_000_000


class Side(enum.Enum):
    FREE = 0
    IN = 1
    OUT = 2


@dataclass(frozen=True)
class PartialAssignment:
    sides: tuple[Side, ...]
    count_in: int
    count_out: int
    fixed_cut_sums: tuple[int, ...]

    @classmethod
    def from_sides(cls, instance: Instance, assigned: Mapping[int, Side]) -> PartialAssignment:
        """Build from ``{vertex: Side}``; unlisted vertices are free."""
        n, half = instance.vertex_count, instance.half
        sides = [Side.FREE] * n
        for v, s in assigned.items():
            if not 1 <= v <= n:
                raise ValueError(f"vertex {v} outside 1..{n}")
            sides[v - 1] = s
        count_in = sides.count(Side.IN)
        count_out = sides.count(Side.OUT)
        if count_in > half or count_out > half:
            raise ValueError("partial assignment already violates balance")
        fixed = [0] * instance.dim
        for e in instance.edges:
            a, b = sides[e.u - 1], sides[e.v - 1]
            if Side.FREE not in (a, b) and a != b:
                for l, w in enumerate(e.weights):
                    fixed[l] += w
        return cls(tuple(sides), count_in, count_out, tuple(fixed))


def upper_bound(instance: Instance, pa: PartialAssignment) -> int:
    """Optimistic cut weight over all balanced completions of ``pa``.

    Fixed cut weight plus every edge that still touches a free vertex, minimised
    over coordinates. Once one side holds n/2 vertices the free vertices are
    forced to the other side and the bound is the exact completion value.
    """
    half = instance.half
    sides = pa.sides
    if Side.FREE in sides and (pa.count_in == half or pa.count_out == half):
        forced = Side.OUT if pa.count_in == half else Side.IN
        sides = tuple(forced if s is Side.FREE else s for s in sides)
    sums = [0] * instance.dim
    for e in instance.edges:
        a, b = sides[e.u - 1], sides[e.v - 1]
        if Side.FREE in (a, b) or a != b:
            for l, w in enumerate(e.weights):
                sums[l] += w
    return min(sums)


def branching_order(instance: Instance) -> list[int]:
    """Vertex 1 first, then by descending total incident weight (ties by id)."""
    load = [0] * (instance.vertex_count + 1)
    for e in instance.edges:
        t = sum(e.weights)
        load[e.u] += t
        load[e.v] += t
    rest = sorted(range(2, instance.vertex_count + 1), key=lambda v: (-load[v], v))
    return [1, *rest]


def swap_local_search(instance: Instance, members: tuple[int, ...], max_passes: int = 100) -> tuple[int, ...]:
    """Best-improvement pair swaps from ``members``; returns a canonical member tuple.

    Skipped (returns the input) on graphs too large for a dense n*n*k table.
    """
    n, k = instance.vertex_count, instance.dim
    if instance.edge_count == 0 or n * n * k > _LOCAL_SEARCH_CELLS:
        return members
    u = instance.endpoints[:, 0] - 1
    v = instance.endpoints[:, 1] - 1
    adj = np.zeros((n, n, k), dtype=np.int64)
    adj[u, v] = instance.weight_matrix
    adj[v, u] = instance.weight_matrix
    inside = np.zeros(n, dtype=bool)
    inside[np.array(members) - 1] = True
    current = None
    for _ in range(max_passes):
        crossing = inside[:, None] != inside[None, :]
        sums = (adj * crossing[:, :, None]).sum(axis=(0, 1)) // 2
        if current is None:
            current = int(sums.min())
        flip = (adj * np.where(crossing, -1, 1)[:, :, None]).sum(axis=1)
        ins, outs = np.flatnonzero(inside), np.flatnonzero(~inside)
        delta = flip[ins][:, None, :] + flip[outs][None, :, :] + 2 * adj[np.ix_(ins, outs)]
        values = (sums + delta).min(axis=2)
        a, b = np.unravel_index(int(np.argmax(values)), values.shape)
        if values[a, b] <= current:
            break
        current = int(values[a, b])
        inside[ins[a]] = False
        inside[outs[b]] = True
    return Bisection.canonical((np.flatnonzero(inside) + 1).tolist(), n).members


class _Timeout(Exception):
    pass


def solve_bnb(
    instance: Instance, time_limit: float | None = None, local_search: bool = True
) -> SolveResult:
    start = time.monotonic()
    n, half, k = instance.vertex_count, instance.half, instance.dim
    order = branching_order(instance)
    pos = {v: i for i, v in enumerate(order)}

    back_pos: list[list[int]] = [[] for _ in range(n)]
    back_w: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for e in instance.edges:
        a, b = sorted((pos[e.u], pos[e.v]))
        back_pos[b].append(a)
        back_w[b].append(e.weights)
    back_idx = [np.array(p, dtype=np.int64) for p in back_pos]
    back_mat = [np.array(w, dtype=np.int64).reshape(-1, k) for w in back_w]
    back_total = [m.sum(axis=0) for m in back_mat]

    seed_members = tuple(range(1, half + 1))
    if local_search:
        seed_members = swap_local_search(instance, seed_members)
    best_value = cut_weight(instance, seed_members).weight
    best_members = seed_members
    time_to_best = time.monotonic() - start

    sides = np.zeros(n, dtype=np.int8)  # by branching position; 1 = IN, 2 = OUT
    eu = instance.endpoints[:, 0] - 1
    ev = instance.endpoints[:, 1] - 1
    weights = instance.weight_matrix
    sides[0] = 1
    nodes = pruned_bound = pruned_balance = 0
    status = OPTIMAL

    def forced_completion(d: int, count_in: int) -> tuple[int, tuple[int, ...]]:
        inside = np.zeros(n, dtype=bool)
        for a in range(d):
            if sides[a] == 1:
                inside[order[a] - 1] = True
        if count_in < half:
            inside[[v - 1 for v in order[d:]]] = True
        value = int(((inside[eu] != inside[ev]).astype(np.int64) @ weights).min())
        return value, tuple((np.flatnonzero(inside) + 1).tolist())

    def lexmin_completion(d: int, count_in: int) -> tuple[int, ...]:
        fixed_in = [order[a] for a in range(d) if sides[a] == 1]
        free = sorted(order[d:])[: half - count_in]
        return tuple(sorted(fixed_in + free))

    # frame: (depth, count_in, fixed sums, undecided sums, side given to depth-1)
    root = (1, 1, np.zeros(k, dtype=np.int64), np.array(instance.coordinate_totals, dtype=np.int64), 1)
    stack = [root]
    try:
        while stack:
            d, count_in, fixed, undecided, last = stack.pop()
            sides[d - 1] = last
            nodes += 1
            if nodes % _CLOCK_EVERY == 0 and time_limit is not None:
                if time.monotonic() - start >= time_limit:
                    raise _Timeout
            bound = int((fixed + undecided).min())
            if bound < best_value or (
                bound == best_value and lexmin_completion(d, count_in) >= best_members
            ):
                pruned_bound += 1
                continue
            if d == n:
                best_value = bound
                best_members = tuple(sorted(order[a] for a in range(n) if sides[a] == 1))
                time_to_best = time.monotonic() - start
                continue
            if count_in == half or d - count_in == half:
                # one side is full: the subtree has a single completion
                pruned_balance += 1
                value, members = forced_completion(d, count_in)
                if value > best_value or (value == best_value and members < best_members):
                    best_value, best_members = value, members
                    time_to_best = time.monotonic() - start
                continue
            remaining = undecided - back_total[d]
            neighbours = sides[back_idx[d]]
            # push OUT first so IN is explored first
            inc = (neighbours == 1).astype(np.int64) @ back_mat[d]
            stack.append((d + 1, count_in, fixed + inc, remaining, 2))
            inc = (neighbours == 2).astype(np.int64) @ back_mat[d]
            stack.append((d + 1, count_in + 1, fixed + inc, remaining, 1))
    except _Timeout:
        status = TIME_LIMIT

    return SolveResult(
        method="bnb",
        status=status,
        best_value=best_value,
        best_bisection=Bisection(best_members, n),
        explored=nodes,
        time_to_best=time_to_best,
        time_total=time.monotonic() - start,
        stats={"pruned_by_bound": pruned_bound, "pruned_by_balance": pruned_balance},
    )
