"""n-times persymmetric 2n x k matrices over F2 and their rank census.

A parameter tuple holds n blocks of k+1 bits.  Block i contributes two rows:
the first k bits of the block, and the same window shifted by one place.
Tuples are identified with integers in [0, 2^((k+1)n)), block i occupying
bits i*(k+1) .. i*(k+1)+k, so a census shard is a contiguous integer range.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, StructuralError
from .gf2 import BitMatrix, rank, rank_batch

log = logging.getLogger(__name__)

DEFAULT_CENSUS_BUDGET = 1 << 32
CHUNK = 1 << 20


@dataclass(frozen=True)
class ParameterTuple:
    n: int
    k: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1 or self.n < 0:
            raise StructuralError(f"need k >= 1 and n >= 0, got n={self.n}, k={self.k}")
        if len(self.bits) != self.n * (self.k + 1):
            raise StructuralError(
                f"expected {self.n * (self.k + 1)} bits for n={self.n}, k={self.k}, "
                f"got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise StructuralError("tuple entries must be 0 or 1")

    @classmethod
    def from_int(cls, value: int, n: int, k: int) -> ParameterTuple:
        width = n * (k + 1)
        if not 0 <= value < (1 << width):
            raise StructuralError(f"{value} is outside [0, 2^{width})")
        return cls(n, k, tuple((value >> p) & 1 for p in range(width)))

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], k: int) -> ParameterTuple:
        """``blocks[i]`` lists alpha_1 .. alpha_{k+1} of block i+1."""
        bits = [b for block in blocks for b in block]
        return cls(len(blocks), k, tuple(bits))

    def to_int(self) -> int:
        return sum(b << p for p, b in enumerate(self.bits))

    def block(self, i: int) -> int:
        """Block i (0-based) as a (k+1)-bit integer, bit j = alpha_{j+1}."""
        w = self.k + 1
        return sum(self.bits[i * w + j] << j for j in range(w))


def block_rows(block: int, k: int) -> tuple[int, int]:
    mask = (1 << k) - 1
    return block & mask, (block >> 1) & mask


def build_matrix(t: ParameterTuple) -> BitMatrix:
    rows: list[int] = []
    for i in range(t.n):
        rows.extend(block_rows(t.block(i), t.k))
    return BitMatrix(2 * t.n, t.k, tuple(rows))


def exp_sum_value(t: ParameterTuple) -> int:
    """2^(2n + k - rank) for the matrix of ``t``."""
    return 1 << (2 * t.n + t.k - rank(build_matrix(t)))


@dataclass
class RankDistribution:
    n: int
    k: int
    gamma: list[int]
    tuples_scanned: int = 0
    shards: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.gamma) != max_rank(self.n, self.k) + 1:
            raise StructuralError(
                f"gamma for n={self.n}, k={self.k} needs {max_rank(self.n, self.k) + 1} "
                f"entries, got {len(self.gamma)}"
            )

    @property
    def total(self) -> int:
        return 1 << ((self.k + 1) * self.n)

    @property
    def complete(self) -> bool:
        """Every tuple was scanned; whether the counts add up is a separate check."""
        return self.tuples_scanned == self.total

    def require_complete(self) -> None:
        if not self.complete:
            raise StructuralError(
                f"census for n={self.n}, k={self.k} is partial: "
                f"{self.tuples_scanned} of {self.total} tuples"
            )

    def __add__(self, other: RankDistribution) -> RankDistribution:
        if (self.n, self.k) != (other.n, other.k):
            raise StructuralError("cannot merge distributions for different (n, k)")
        return RankDistribution(
            self.n,
            self.k,
            [a + b for a, b in zip(self.gamma, other.gamma)],
            self.tuples_scanned + other.tuples_scanned,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankDistribution):
            return NotImplemented
        return (self.n, self.k, self.gamma, self.tuples_scanned) == (
            other.n, other.k, other.gamma, other.tuples_scanned,
        )


def max_rank(n: int, k: int) -> int:
    return min(2 * n, k)


def shard_range(total: int, shard_count: int, shard_index: int) -> tuple[int, int]:
    """Contiguous [lo, hi) slice of range(total) owned by one shard."""
    if shard_count < 1 or not 0 <= shard_index < shard_count:
        raise StructuralError(f"bad shard {shard_index} of {shard_count}")
    lo = total * shard_index // shard_count
    hi = total * (shard_index + 1) // shard_count
    return lo, hi


def merge(parts: Sequence[RankDistribution]) -> RankDistribution:
    if not parts:
        raise StructuralError("nothing to merge")
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def census(
    n: int,
    k: int,
    shard_count: int = 1,
    shard_index: int = 0,
    *,
    budget: int = DEFAULT_CENSUS_BUDGET,
    strategy: str = "vectorized",
) -> RankDistribution:
    """Rank histogram over one shard of the tuple space for (n, k).

    ``strategy`` is "vectorized" (numpy batches) or "scalar" (one BitMatrix per
    tuple, the reference path).  Both rebuild every matrix from its tuple.
    """
    if k < 1 or n < 0:
        raise StructuralError(f"need k >= 1 and n >= 0, got n={n}, k={k}")
    total = 1 << ((k + 1) * n)
    lo, hi = shard_range(total, shard_count, shard_index)
    if hi - lo > budget:
        raise BudgetExceeded(f"census n={n} k={k}", hi - lo, budget, strategy)
    gamma = [0] * (max_rank(n, k) + 1)
    if strategy == "scalar":
        for value in range(lo, hi):
            gamma[rank(build_matrix(ParameterTuple.from_int(value, n, k)))] += 1
    elif strategy == "vectorized":
        _census_vectorized(n, k, lo, hi, gamma)
    else:
        raise ValueError(f"unknown census strategy {strategy!r}")
    dist = RankDistribution(n, k, gamma, hi - lo)
    dist.shards = {"count": shard_count, "index": shard_index, "lo": lo, "hi": hi}
    return dist


def _census_vectorized(n: int, k: int, lo: int, hi: int, gamma: list[int]) -> None:
    width = k + 1
    dtype = np.uint32 if k <= 31 else np.uint64
    # tuple integers up to 2^(n(k+1)); uint64 holds every budget-feasible case
    block_mask = np.uint64((1 << width) - 1)
    row_mask = dtype((1 << k) - 1)
    for start in range(lo, hi, CHUNK):
        stop = min(hi, start + CHUNK)
        t = np.arange(start, stop, dtype=np.uint64)
        rows = np.empty((2 * n, stop - start), dtype=dtype)
        for i in range(n):
            blk = ((t >> np.uint64(i * width)) & block_mask).astype(dtype)
            rows[2 * i] = blk & row_mask
            rows[2 * i + 1] = (blk >> dtype(1)) & row_mask
        counts = np.bincount(rank_batch(rows, k), minlength=len(gamma))
        for r, c in enumerate(counts[: len(gamma)]):
            gamma[r] += int(c)
        if (stop - lo) % (CHUNK * 64) == 0:
            log.info("census n=%d k=%d: %d/%d tuples", n, k, stop - lo, hi - lo)


def census_sharded(
    n: int, k: int, shard_count: int, *, workers: int = 1, **kwargs
) -> RankDistribution:
    """Run every shard and merge.

    With ``workers > 1`` the shards run in a process pool; the merge is a plain
    sum so the result does not depend on completion order.
    """
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(census, n, k, shard_count, s, **kwargs) for s in range(shard_count)
            ]
            parts = [f.result() for f in futures]
    else:
        parts = [census(n, k, shard_count, s, **kwargs) for s in range(shard_count)]
    dist = merge(parts)
    dist.shards = {"count": shard_count}
    return dist
