"""Instances, bisections and cut evaluation.

Edge weights are stored as integers in milli-units (``3.141`` is ``3141``), so
every sum and comparison in the package is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

SCALE = 1000

_WEIGHT_RE = re.compile(r"^(\d+)(?:\.(\d{1,3}))?$")


class InstanceError(ValueError):
    """Raised for malformed instance text or an invalid instance."""


def parse_weight(token: str) -> int:
    """Parse a non-negative decimal with at most 3 fraction digits into milli-units."""
    match = _WEIGHT_RE.match(token)
    if match is None:
        raise InstanceError(f"malformed weight {token!r}")
    whole, frac = match.groups()
    return int(whole) * SCALE + int((frac or "").ljust(3, "0"))


def format_weight(value: int) -> str:
    sign = "-" if value < 0 else ""
    q, r = divmod(abs(value), SCALE)
    return f"{sign}{q}.{r:03d}"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    weights: tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    """Undirected graph on vertices ``1..vertex_count`` with k-dimensional edge weights.

    Edges are kept sorted by ``(u, v)`` with ``u < v``; construction validates
    every structural rule and rejects odd vertex counts.
    """

    vertex_count: int
    dim: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        n, k = self.vertex_count, self.dim
        if n <= 0 or n % 2:
            raise InstanceError(f"vertex count must be positive and even, got {n}")
        if k <= 0:
            raise InstanceError(f"weight dimension must be positive, got {k}")
        prev = None
        for e in self.edges:
            if not (1 <= e.u < e.v <= n):
                raise InstanceError(f"edge ({e.u},{e.v}) needs 1 <= u < v <= {n}")
            if len(e.weights) != k:
                raise InstanceError(
                    f"edge ({e.u},{e.v}) has {len(e.weights)} weights, expected {k}"
                )
            if any(w <= 0 for w in e.weights):
                raise InstanceError(f"edge ({e.u},{e.v}) has a non-positive weight")
            key = (e.u, e.v)
            if prev is not None:
                if key == prev:
                    raise InstanceError(f"duplicate edge {key}")
                if key < prev:
                    raise InstanceError("edges must be sorted by (u, v)")
            prev = key

    @classmethod
    def from_edges(
        cls, vertex_count: int, dim: int, edges: Iterable[tuple[int, int, Sequence[int]]]
    ) -> Instance:
        """Build an instance from ``(u, v, weights)`` triples in any order."""
        items = []
        for u, v, ws in edges:
            if u > v:
                raise InstanceError(f"edge ({u},{v}) must be written with u < v")
            items.append(Edge(int(u), int(v), tuple(int(w) for w in ws)))
        items.sort(key=lambda e: (e.u, e.v))
        return cls(vertex_count, dim, tuple(items))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def half(self) -> int:
        return self.vertex_count // 2

    @cached_property
    def endpoints(self) -> np.ndarray:
        """``(m, 2)`` array of 1-based endpoints."""
        return np.array([(e.u, e.v) for e in self.edges], dtype=np.int64).reshape(-1, 2)

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """``(m, k)`` int64 array of milli-unit weights."""
        return np.array([e.weights for e in self.edges], dtype=np.int64).reshape(
            -1, self.dim
        )

    @cached_property
    def coordinate_totals(self) -> tuple[int, ...]:
        """Per-coordinate sum of all edge weights."""
        return tuple(int(t) for t in self.weight_matrix.sum(axis=0))


@dataclass(frozen=True)
class Bisection:
    """Balanced vertex set S in canonical form: sorted, size n/2, contains vertex 1."""

    members: tuple[int, ...]
    vertex_count: int

    def __post_init__(self) -> None:
        n = self.vertex_count
        if len(self.members) != n // 2 or n % 2:
            raise ValueError(f"bisection of {n} vertices needs {n // 2} members")
        if list(self.members) != sorted(set(self.members)):
            raise ValueError("members must be strictly increasing")
        if self.members and (self.members[0] != 1 or self.members[-1] > n):
            raise ValueError("canonical bisection contains vertex 1 and ids <= n")

    @classmethod
    def canonical(cls, members: Iterable[int], vertex_count: int) -> Bisection:
        """Return S or its complement, whichever contains vertex 1."""
        s = set(members)
        if len(s) != vertex_count // 2:
            raise ValueError(f"bisection of {vertex_count} vertices needs {vertex_count // 2} members")
        if 1 not in s:
            s = set(range(1, vertex_count + 1)) - s
        return cls(tuple(sorted(s)), vertex_count)

    def complement(self) -> tuple[int, ...]:
        s = set(self.members)
        return tuple(v for v in range(1, self.vertex_count + 1) if v not in s)


@dataclass(frozen=True)
class CutReport:
    cut_edges: tuple[int, ...]
    coordinate_sums: tuple[int, ...]
    weight: int


def _member_set(s: Bisection | Iterable[int]) -> set[int]:
    return set(s.members) if isinstance(s, Bisection) else set(s)


def cut_edges(instance: Instance, s: Bisection | Iterable[int]) -> tuple[int, ...]:
    """Indices of the edges with exactly one endpoint in ``s``.

    ``s`` may be a :class:`Bisection` or any raw vertex subset.
    """
    inside = _member_set(s)
    return tuple(
        i for i, e in enumerate(instance.edges) if (e.u in inside) != (e.v in inside)
    )


def cut_weight(instance: Instance, s: Bisection | Iterable[int]) -> CutReport:
    idx = cut_edges(instance, s)
    sums = [0] * instance.dim
    for i in idx:
        for l, w in enumerate(instance.edges[i].weights):
            sums[l] += w
    return CutReport(idx, tuple(sums), min(sums))


def prefix_instance(instance: Instance, k_prime: int) -> Instance:
    """Same graph, each weight tuple truncated to its first ``k_prime`` coordinates."""
    if not 1 <= k_prime <= instance.dim:
        raise InstanceError(f"prefix dimension {k_prime} outside 1..{instance.dim}")
    if k_prime == instance.dim:
        return instance
    edges = tuple(Edge(e.u, e.v, e.weights[:k_prime]) for e in instance.edges)
    return Instance(instance.vertex_count, k_prime, edges)


def parse_instance(text: str) -> Instance:
    """Parse the native text format: header ``n m k``, then ``u v w_1 .. w_k`` per edge."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InstanceError("empty instance text")
    header = lines[0].split()
    if len(header) != 3 or not all(t.isdigit() for t in header):
        raise InstanceError(f"header must be 'n m k', got {lines[0]!r}")
    n, m, k = map(int, header)
    if n % 2:
        raise InstanceError(f"vertex count must be even, got {n}")
    if len(lines) - 1 != m:
        raise InstanceError(f"header announces {m} edges, found {len(lines) - 1}")
    triples = []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if len(tokens) != k + 2:
            raise InstanceError(
                f"line {lineno}: expected 2 endpoints and {k} weights, got {len(tokens)} fields"
            )
        if not (tokens[0].isdigit() and tokens[1].isdigit()):
            raise InstanceError(f"line {lineno}: malformed vertex id")
        u, v = int(tokens[0]), int(tokens[1])
        if u >= v:
            raise InstanceError(f"line {lineno}: edge ({u},{v}) needs u < v")
        triples.append((u, v, [parse_weight(t) for t in tokens[2:]]))
    return Instance.from_edges(n, k, triples)


def format_instance(instance: Instance) -> str:
    out = [f"{instance.vertex_count} {instance.edge_count} {instance.dim}"]
    for e in instance.edges:
        out.append(" ".join([str(e.u), str(e.v), *map(format_weight, e.weights)]))
    return "\n".join(out) + "\n"
