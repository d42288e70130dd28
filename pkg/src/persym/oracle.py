"""Brute-force counts of solutions of U Y = 0 over F2[T].

U is an n x q matrix of polynomials of degree <= 1 and Y a column of q
polynomials of degree <= k-1.  Two counters, written independently:

* ``count_naive`` walks every (Y, U) assignment and multiplies polynomials;
* ``count_kernel`` fixes U, writes U Y = 0 as a linear system in the q*k
  coefficients of Y, and adds 2^(kernel dimension).

Encoding of an assignment (both counters): U_j^(i) (row j, column i, both
0-based) occupies the two bits at 2*(j*q + i), low bit = constant term.  In
the naive walk, Y_i occupies bits i*k .. i*k+k-1 above the 2nq U bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import shard_range
from .errors import BudgetExceeded, StructuralError
from .gf2 import BitMatrix, clmul, kernel_dim, poly_mul_array, rank_batch

NAIVE_BUDGET = 1 << 22
KERNEL_BUDGET_EXPONENT = 24
CHUNK = 1 << 18


@dataclass(frozen=True)
class SystemInstance:
    q: int
    n: int
    k: int

    def __post_init__(self):
        if self.q < 1 or self.n < 1 or self.k < 1:
            raise StructuralError(f"need q, n, k >= 1, got {self}")

    @property
    def u_bits(self) -> int:
        return 2 * self.n * self.q

    @property
    def y_bits(self) -> int:
        return self.q * self.k


@dataclass(frozen=True)
class CostEstimate:
    assignment_count: int
    strategy: str


def naive_cost(inst: SystemInstance) -> CostEstimate:
    return CostEstimate(1 << (inst.y_bits + inst.u_bits), "naive")


def kernel_cost(inst: SystemInstance) -> CostEstimate:
    return CostEstimate(1 << inst.u_bits, "kernel")


def u_entry(u: int, inst: SystemInstance, j: int, i: int) -> int:
    return (u >> (2 * (j * inst.q + i))) & 3


def count_naive(inst: SystemInstance, budget: int = NAIVE_BUDGET) -> int:
    cost = naive_cost(inst)
    if cost.assignment_count > budget:
        raise BudgetExceeded(f"naive count {inst}", cost.assignment_count, budget, "naive")
    q, n, k = inst.q, inst.n, inst.k
    total = 0
    y_mask = np.uint64((1 << k) - 1)
    for start in range(0, cost.assignment_count, CHUNK):
        a = np.arange(start, min(start + CHUNK, cost.assignment_count), dtype=np.uint64)
        ys = [(a >> np.uint64(inst.u_bits + i * k)) & y_mask for i in range(q)]
        ok = np.ones(a.shape, dtype=bool)
        for j in range(n):
            acc = np.zeros(a.shape, dtype=np.uint64)
            for i in range(q):
                u = (a >> np.uint64(2 * (j * q + i))) & np.uint64(3)
                acc ^= poly_mul_array(ys[i], u, 1)
            ok &= acc == 0
        total += int(np.count_nonzero(ok))
    return total


def count_naive_scalar(inst: SystemInstance, budget: int = NAIVE_BUDGET) -> int:
    """Same walk as ``count_naive`` one assignment at a time; tiny instances only."""
    cost = naive_cost(inst)
    if cost.assignment_count > budget:
        raise BudgetExceeded(f"naive count {inst}", cost.assignment_count, budget, "naive")
    q, n, k = inst.q, inst.n, inst.k
    total = 0
    for a in range(cost.assignment_count):
        ys = [(a >> (inst.u_bits + i * k)) & ((1 << k) - 1) for i in range(q)]
        good = True
        for j in range(n):
            acc = 0
            for i in range(q):
                acc ^= clmul(ys[i], u_entry(a, inst, j, i))
            if acc:
                good = False
                break
        total += good
    return total


def assemble_system(inst: SystemInstance, u: int) -> BitMatrix:
    """Coefficient equations of U Y = 0 for one choice of U.

    Row j*(k+1)+d is the T^d coefficient of equation j; column i*k+e is the
    T^e coefficient of Y_i.  U_j^(i) * T^e contributes u0 at degree e and u1
    at degree e+1.
    """
    q, n, k = inst.q, inst.n, inst.k
    rows = [0] * (n * (k + 1))
    for j in range(n):
        for i in range(q):
            uji = u_entry(u, inst, j, i)
            for e in range(k):
                col = 1 << (i * k + e)
                if uji & 1:
                    rows[j * (k + 1) + e] |= col
                if uji & 2:
                    rows[j * (k + 1) + e + 1] |= col
    return BitMatrix(len(rows), q * k, tuple(rows))


def _assemble_batch(inst: SystemInstance, u: np.ndarray) -> np.ndarray:
    q, n, k = inst.q, inst.n, inst.k
    rows = np.zeros((n * (k + 1), u.size), dtype=np.uint64)
    for j in range(n):
        for i in range(q):
            uji = (u >> np.uint64(2 * (j * q + i))) & np.uint64(3)
            lo = (uji & np.uint64(1)).astype(bool)
            hi = (uji >> np.uint64(1)).astype(bool)
            for e in range(k):
                col = np.uint64(1 << (i * k + e))
                rows[j * (k + 1) + e][lo] |= col
                rows[j * (k + 1) + e + 1][hi] |= col
    return rows


def count_kernel(
    inst: SystemInstance,
    budget_exponent: int = KERNEL_BUDGET_EXPONENT,
    shard_count: int = 1,
    shard_index: int = 0,
    *,
    strategy: str = "vectorized",
) -> int:
    """Sum of 2^(kernel dim) over the U choices in one shard."""
    if inst.u_bits > budget_exponent:
        cost = kernel_cost(inst)
        raise BudgetExceeded(f"kernel count {inst}", cost.assignment_count,
                             1 << budget_exponent, "kernel")
    if inst.y_bits > 64:
        raise StructuralError("q*k > 64 does not fit the packed row width")
    lo, hi = shard_range(1 << inst.u_bits, shard_count, shard_index)
    if strategy == "scalar":
        return sum(1 << kernel_dim(assemble_system(inst, u)) for u in range(lo, hi))
    if strategy != "vectorized":
        raise ValueError(f"unknown kernel strategy {strategy!r}")
    hist = [0] * (inst.y_bits + 1)
    for start in range(lo, hi, CHUNK):
        u = np.arange(start, min(hi, start + CHUNK), dtype=np.uint64)
        ranks = rank_batch(_assemble_batch(inst, u), inst.y_bits)
        for r, c in enumerate(np.bincount(ranks, minlength=len(hist))):
            hist[r] += int(c)
    return sum(c << (inst.y_bits - r) for r, c in enumerate(hist))


def lower_bounds_hold(inst: SystemInstance, count: int) -> bool:
    """Y = 0 with U free, and U = 0 with Y free, are always solutions."""
    return count >= 1 << inst.u_bits and count >= 1 << inst.y_bits
