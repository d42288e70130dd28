"""GF(2) matrices with bit-packed rows and polynomials over F2[T].

Rows and polynomials are plain Python ints: bit j of a row is the entry in
column j, bit d of a polynomial is the coefficient of T^d.  The ``*_batch`` /
``*_array`` variants run the same algorithms over numpy arrays so that
millions of small matrices can be reduced at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# degree of the zero polynomial
NEG_INF = float("-inf")


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    row_bits: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.row_bits) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.row_bits)}")
        limit = 1 << self.cols
        for r in self.row_bits:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} has bits outside {self.cols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> BitMatrix:
        """Build from a list of 0/1 rows; entry (r, j) goes to bit j."""
        if cols is None:
            cols = len(rows[0]) if rows else 0
        packed = []
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged rows")
            packed.append(sum((v & 1) << j for j, v in enumerate(row)))
        return cls(len(packed), cols, tuple(packed))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, (0,) * rows)

    def entry(self, r: int, j: int) -> int:
        return (self.row_bits[r] >> j) & 1

    def to_rows(self) -> list[list[int]]:
        return [[(b >> j) & 1 for j in range(self.cols)] for b in self.row_bits]

    def transpose(self) -> BitMatrix:
        out = []
        for j in range(self.cols):
            out.append(sum(((b >> j) & 1) << r for r, b in enumerate(self.row_bits)))
        return BitMatrix(self.cols, self.rows, tuple(out))


def rank_rows(rows: Iterable[int], cols: int) -> int:
    """GF(2) rank of a list of row bitmasks over ``cols`` columns."""
    work = list(rows)
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        p = work[rank]
        for r in range(rank + 1, len(work)):
            if (work[r] >> col) & 1:
                work[r] ^= p
        rank += 1
        if rank == len(work):
            break
    return rank


def rank(m: BitMatrix) -> int:
    return rank_rows(m.row_bits, m.cols)


def kernel_dim(m: BitMatrix) -> int:
    """Dimension of {x : m x = 0}; the solution count is 2 ** kernel_dim(m)."""
    return m.cols - rank(m)


def rank_batch(rows: np.ndarray, cols: int) -> np.ndarray:
    """Ranks of many matrices at once.

    ``rows`` has shape (m, batch): rows[r, s] is row r of matrix s, packed as
    an unsigned integer.  Returns an int8 array of ``batch`` ranks.  Rows are
    inserted one at a time into a per-matrix basis indexed by leading bit.
    """
    rows = np.asarray(rows)
    if rows.ndim != 2:
        raise ValueError("rows must be 2-D (rows, batch)")
    m, batch = rows.shape
    dtype = rows.dtype
    basis = np.zeros((cols, batch), dtype=dtype)
    result = np.zeros(batch, dtype=np.int8)
    one = dtype.type(1)
    for r in range(m):
        v = rows[r].copy()
        for b in range(cols - 1, -1, -1):
            bit = ((v >> dtype.type(b)) & one).astype(bool)
            if not bit.any():
                continue
            piv = basis[b]
            has = piv != 0
            reduce = bit & has
            np.bitwise_xor(v, piv, out=v, where=reduce)
            new = bit & ~has
            if new.any():
                piv[new] = v[new]
                v[new] = 0
                result += new
    return result


@dataclass(frozen=True)
class Poly2:
    """Polynomial over F2 in T; bit d of ``bits`` is the coefficient of T^d."""

    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("coefficient bits must be nonnegative")

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int]) -> Poly2:
        """Coefficients listed from T^0 upward."""
        return cls(sum((c & 1) << d for d, c in enumerate(coeffs)))

    @property
    def degree(self) -> int | float:
        return self.bits.bit_length() - 1 if self.bits else NEG_INF

    def __add__(self, other: Poly2) -> Poly2:
        return Poly2(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: Poly2) -> Poly2:
        return Poly2(clmul(self.bits, other.bits))

    def __bool__(self) -> bool:
        return self.bits != 0

    def __repr__(self) -> str:
        if not self.bits:
            return "Poly2(0)"
        terms = []
        for d in range(self.bits.bit_length() - 1, -1, -1):
            if (self.bits >> d) & 1:
                terms.append("1" if d == 0 else "T" if d == 1 else f"T^{d}")
        return f"Poly2({' + '.join(terms)})"


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit-packed polynomials."""
    if a < b:
        a, b = b, a
    out = 0
    shift = 0
    while b:
        if b & 1:
            out ^= a << shift
        b >>= 1
        shift += 1
    return out


def poly_mul(a: Poly2, b: Poly2) -> Poly2:
    return a * b


def poly_mul_array(a: np.ndarray, b: np.ndarray, b_degree_bound: int) -> np.ndarray:
    """Elementwise carry-less product of two integer arrays.

    Bits of ``b`` above ``b_degree_bound`` are ignored; the caller sizes the
    dtype so the product fits.
    """
    a = np.asarray(a)
    b = np.asarray(b, dtype=a.dtype)
    one = a.dtype.type(1)
    out = np.zeros(np.broadcast(a, b).shape, dtype=a.dtype)
    for d in range(b_degree_bound + 1):
        sel = ((b >> a.dtype.type(d)) & one).astype(bool)
        np.bitwise_xor(out, a << a.dtype.type(d), out=out, where=sel)
    return out
