import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from persym.gf2 import (
    NEG_INF,
    BitMatrix,
    Poly2,
    clmul,
    kernel_dim,
    poly_mul,
    poly_mul_array,
    rank,
    rank_batch,
)


def span_size(rows):
    """Brute force: number of distinct F2 combinations of the rows."""
    seen = set()
    for picks in itertools.product((0, 1), repeat=len(rows)):
        v = 0
        for p, r in zip(picks, rows):
            if p:
                v ^= r
        seen.add(v)
    return len(seen)


def all_matrices(r, c):
    for bits in range(1 << (r * c)):
        rows = tuple((bits >> (i * c)) & ((1 << c) - 1) for i in range(r))
        yield BitMatrix(r, c, rows)


def test_rank_examples():
    assert rank(BitMatrix.zeros(2, 2)) == 0
    assert rank(BitMatrix.from_rows([[1, 0], [0, 1]])) == 2
    assert rank(BitMatrix.from_rows([[1, 1], [1, 1]])) == 1


def test_kernel_dim_examples():
    assert kernel_dim(BitMatrix.zeros(2, 3)) == 3
    assert kernel_dim(BitMatrix.from_rows([[1, 0], [0, 1]])) == 0
    assert kernel_dim(BitMatrix.from_rows([[1, 1], [1, 1]])) == 1


def test_empty_matrices_have_rank_zero():
    assert rank(BitMatrix.zeros(0, 5)) == 0
    assert rank(BitMatrix.zeros(4, 0)) == 0
    assert kernel_dim(BitMatrix.zeros(0, 5)) == 5


def test_bits_outside_columns_rejected():
    with pytest.raises(ValueError):
        BitMatrix(1, 2, (0b100,))
    with pytest.raises(ValueError):
        BitMatrix(2, 2, (1,))


def test_rank_does_not_modify_input():
    m = BitMatrix.from_rows([[1, 1, 0], [1, 1, 0], [0, 1, 1]])
    before = m.row_bits
    rank(m)
    assert m.row_bits == before


@pytest.mark.parametrize("shape", [(2, 3), (3, 2), (3, 3)])
def test_rank_exhaustive_small(shape):
    r, c = shape
    for m in all_matrices(r, c):
        rk = rank(m)
        assert rk <= min(r, c)
        assert 1 << rk == span_size(m.row_bits)
        assert rk == rank(m.transpose())
        assert kernel_dim(m) + rk == c


def test_rank_batch_matches_scalar_exhaustive_3x3():
    mats = list(all_matrices(3, 3))
    rows = np.array([m.row_bits for m in mats], dtype=np.uint16).T
    got = rank_batch(rows, 3)
    assert [int(x) for x in got] == [rank(m) for m in mats]


@given(st.integers(1, 8), st.integers(1, 12), st.randoms(use_true_random=False))
def test_rank_batch_matches_scalar_random(r, c, rnd):
    mats = [
        BitMatrix(r, c, tuple(rnd.getrandbits(c) for _ in range(r))) for _ in range(64)
    ]
    rows = np.array([m.row_bits for m in mats], dtype=np.uint64).T
    assert [int(x) for x in rank_batch(rows, c)] == [rank(m) for m in mats]


def schoolbook(a: int, b: int) -> int:
    """Multiply via explicit coefficient lists, reducing mod 2 at the end."""
    ca = [(a >> i) & 1 for i in range(max(a.bit_length(), 1))]
    cb = [(b >> i) & 1 for i in range(max(b.bit_length(), 1))]
    out = [0] * (len(ca) + len(cb))
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            out[i + j] += x * y
    return sum((c % 2) << d for d, c in enumerate(out))


def test_poly_mul_examples():
    t1 = Poly2.from_coeffs([1, 1])
    assert poly_mul(t1, t1) == Poly2.from_coeffs([1, 0, 1])
    assert poly_mul(Poly2.from_coeffs([1, 1, 1]), t1) == Poly2.from_coeffs([1, 0, 0, 1])
    assert schoolbook(0b111, 0b11) == 0b1001
    assert poly_mul(Poly2(0b1011), Poly2(0)) == Poly2(0)
    assert poly_mul(Poly2(0), Poly2(0b1)) == Poly2(0)


def test_zero_degree_is_sentinel():
    assert Poly2(0).degree == NEG_INF
    assert Poly2(0).degree + 3 == NEG_INF
    assert Poly2(1).degree == 0
    assert Poly2(0b1000).degree == 3


polys = st.integers(0, (1 << 9) - 1).map(Poly2)


@given(polys, polys)
def test_poly_mul_commutes_and_matches_schoolbook(a, b):
    assert a * b == b * a
    assert (a * b).bits == schoolbook(a.bits, b.bits)
    if a and b:
        assert (a * b).degree == a.degree + b.degree


@given(polys, polys, polys)
def test_poly_mul_associative_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_poly_mul_array_matches_clmul():
    rnd = random.Random(7)
    a = np.array([rnd.getrandbits(12) for _ in range(500)], dtype=np.uint64)
    b = np.array([rnd.getrandbits(4) for _ in range(500)], dtype=np.uint64)
    got = poly_mul_array(a, b, 3)
    assert [int(x) for x in got] == [clmul(int(x), int(y)) for x, y in zip(a, b)]
