"""Seeded random instances in the G(n, m) model with uniform 3-decimal weights.

Randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence(seed)``. Only raw 64-bit outputs are consumed and bounded draws
use plain rejection sampling, so the stream of instances depends on nothing but
the seed (no reliance on ``Generator`` method internals that may change between
numpy releases).

Draw order: m pair indices (partial Fisher-Yates over the lexicographic pair
space), then ``m * k`` weights, edge-major in sorted edge order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Edge, Instance, parse_weight

_TWO64 = 1 << 64

PAPER_SHAPES: tuple[tuple[int, tuple[int, ...]], ...] = (
    (10, (15, 25, 40)),
    (20, (30, 70, 150)),
    (30, (50, 150, 400)),
    (50, (80, 300, 1000)),
    (100, (150, 500, 3000)),
    (300, (500, 2000, 10000, 30000)),
    (500, (1000, 3000, 10000, 60000)),
    (1000, (1500, 10000, 100000, 350000)),
)
PAPER_DIM = 20
PAPER_WEIGHT_MIN = parse_weight("1.000")
PAPER_WEIGHT_MAX = parse_weight("9.999")


@dataclass(frozen=True)
class GenConfig:
    vertex_count: int
    edge_count: int
    dim: int
    weight_min: int = PAPER_WEIGHT_MIN
    weight_max: int = PAPER_WEIGHT_MAX
    seed: int = 0

    def __post_init__(self) -> None:
        n = self.vertex_count
        if n <= 0 or n % 2:
            raise ValueError(f"vertex count must be positive and even, got {n}")
        pairs = n * (n - 1) // 2
        if not 0 <= self.edge_count <= pairs:
            raise ValueError(f"edge count {self.edge_count} outside 0..{pairs} for n={n}")
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if not 0 < self.weight_min <= self.weight_max:
            raise ValueError("need 0 < weight_min <= weight_max")
        if not 0 <= self.seed < _TWO64:
            raise ValueError("seed must be a 64-bit unsigned integer")


class _RawStream:
    """Sequential reader of PCG64 raw outputs with unbiased bounded draws."""

    def __init__(self, seed: int, block: int = 4096):
        self._bitgen = np.random.PCG64(np.random.SeedSequence(seed))
        self._block = block
        self._buf: list[int] = []
        self._pos = 0

    def _next(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._bitgen.random_raw(self._block).tolist()
            self._pos = 0
        r = self._buf[self._pos]
        self._pos += 1
        return r

    def below(self, bound: int) -> int:
        limit = _TWO64 - _TWO64 % bound
        while True:
            r = self._next()
            if r < limit:
                return r % bound

    def below_many(self, bound: int, count: int) -> np.ndarray:
        """``count`` draws from ``[0, bound)``; identical to ``count`` calls of :meth:`below`."""
        out = np.empty(count, dtype=np.int64)
        limit = _TWO64 - _TWO64 % bound
        filled = 0
        while filled < count:
            # drain the local buffer first so the stream order matches below()
            if self._pos == len(self._buf):
                self._buf = self._bitgen.random_raw(max(self._block, count - filled)).tolist()
                self._pos = 0
            chunk = np.array(self._buf[self._pos :], dtype=np.uint64)
            ok = chunk < np.uint64(limit)
            accepted = np.flatnonzero(ok)
            take = min(len(accepted), count - filled)
            if take < len(accepted):
                used = int(accepted[take - 1]) + 1 if take else 0
            else:
                used = len(chunk)
            vals = chunk[accepted[:take]] % np.uint64(bound)
            out[filled : filled + take] = vals.astype(np.int64)
            filled += take
            self._pos += used
        return out


def _sample_pairs(stream: _RawStream, n: int, m: int) -> np.ndarray:
    total = n * (n - 1) // 2
    swapped: dict[int, int] = {}
    picked = np.empty(m, dtype=np.int64)
    for i in range(m):
        j = i + stream.below(total - i)
        picked[i] = swapped.get(j, j)
        swapped[j] = swapped.get(i, i)
    return np.sort(picked)


def _unrank_pairs(index: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row i (0-based) holds pairs (i, i+1..n-1) and starts at i*(2n-i-1)/2
    rows = np.arange(n, dtype=np.int64)
    starts = rows * (2 * n - rows - 1) // 2
    i = np.searchsorted(starts, index, side="right") - 1
    j = index - starts[i] + i + 1
    return i + 1, j + 1


def generate(config: GenConfig) -> Instance:
    n, m, k = config.vertex_count, config.edge_count, config.dim
    stream = _RawStream(config.seed)
    us, vs = _unrank_pairs(_sample_pairs(stream, n, m), n)
    span = config.weight_max - config.weight_min + 1
    weights = (stream.below_many(span, m * k) + config.weight_min).reshape(m, k)
    edges = tuple(
        Edge(int(u), int(v), tuple(row))
        for u, v, row in zip(us.tolist(), vs.tolist(), weights.tolist())
    )
    return Instance(n, k, edges)


def instance_name(vertex_count: int, edge_count: int) -> str:
    return f"{vertex_count:03d}_{edge_count:03d}"


def paper_suite(base_seed: int = 0) -> list[tuple[str, GenConfig]]:
    """The 27 benchmark shapes, each with its own seed derived from ``base_seed``."""
    suite = []
    for n, ms in PAPER_SHAPES:
        for m in ms:
            seed = int(np.random.SeedSequence([base_seed, n, m]).generate_state(1, np.uint64)[0])
            suite.append((instance_name(n, m), GenConfig(n, m, PAPER_DIM, seed=seed)))
    return suite
