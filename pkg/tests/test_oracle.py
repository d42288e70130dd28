import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persym.errors import BudgetExceeded, StructuralError
from persym.gf2 import Poly2, rank
from persym.oracle import (
    SystemInstance,
    assemble_system,
    count_kernel,
    count_naive,
    count_naive_scalar,
    kernel_cost,
    lower_bounds_hold,
    naive_cost,
    u_entry,
)


def brute_force(q, n, k):
    """Walk (Y, U) with Poly2 arithmetic, nothing shared with the counters."""
    ys_all = [Poly2(b) for b in range(1 << k)]
    us_all = [Poly2(b) for b in range(4)]
    count = 0
    for ys in itertools.product(ys_all, repeat=q):
        for us in itertools.product(us_all, repeat=n * q):
            ok = True
            for j in range(n):
                acc = Poly2(0)
                for i in range(q):
                    acc = acc + ys[i] * us[j * q + i]
                if acc:
                    ok = False
                    break
            count += ok
    return count


def test_brute_force_reference_values():
    assert brute_force(1, 1, 1) == 5
    assert brute_force(1, 2, 1) == 17
    assert brute_force(2, 1, 1) == 28


@pytest.mark.parametrize("q,n,k,want", [(1, 1, 1, 5), (1, 2, 1, 17), (2, 1, 1, 28)])
def test_naive_examples(q, n, k, want):
    inst = SystemInstance(q, n, k)
    assert count_naive(inst) == want
    assert count_naive_scalar(inst) == want
    assert count_kernel(inst) == want


def test_kernel_worked_example():
    assert count_kernel(SystemInstance(3, 1, 9)) == 145227776
    assert count_kernel(SystemInstance(3, 2, 9)) == 179462144


GRID = [(q, n, k) for q in (1, 2) for n in (1, 2) for k in (1, 2, 3)]


@pytest.mark.parametrize("q,n,k", GRID)
def test_oracles_agree(q, n, k):
    inst = SystemInstance(q, n, k)
    want = count_naive(inst)
    assert count_kernel(inst) == want
    assert count_kernel(inst, strategy="scalar") == want
    assert lower_bounds_hold(inst, want)
    if naive_cost(inst).assignment_count <= 2**12:
        assert brute_force(q, n, k) == want


def test_q1_closed_form():
    for n in (1, 2, 3):
        for k in (1, 2, 3, 4):
            assert count_kernel(SystemInstance(1, n, k)) == 2 ** (2 * n) + 2**k - 1


def test_assembly_layout():
    # q=1, n=1, k=2, U = 1 + T: rows are T^0, T^1, T^2 coefficients of (1+T)Y
    inst = SystemInstance(1, 1, 2)
    m = assemble_system(inst, 0b11)
    assert m.to_rows() == [[1, 0], [1, 1], [0, 1]]
    # q=2, n=1, k=1: U_1^(1) = T, U_1^(2) = 1
    inst = SystemInstance(2, 1, 1)
    m = assemble_system(inst, 0b0110)
    assert (m.rows, m.cols) == (2, 2)
    assert m.to_rows() == [[0, 1], [1, 0]]


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 5), st.data())
def test_assembled_system_matches_polynomial_products(q, n, k, data):
    inst = SystemInstance(q, n, k)
    u = data.draw(st.integers(0, (1 << inst.u_bits) - 1))
    y = data.draw(st.integers(0, (1 << inst.y_bits) - 1))
    m = assemble_system(inst, u)
    image = [bin(row & y).count("1") & 1 for row in m.row_bits]
    for j in range(n):
        acc = Poly2(0)
        for i in range(q):
            acc = acc + Poly2((y >> (i * k)) & ((1 << k) - 1)) * Poly2(u_entry(u, inst, j, i))
        assert [(acc.bits >> d) & 1 for d in range(k + 1)] == image[j * (k + 1):(j + 1) * (k + 1)]
    assert rank(m) <= min(m.rows, m.cols)


def test_kernel_shards_add_up():
    inst = SystemInstance(2, 2, 4)
    whole = count_kernel(inst)
    for shards in (2, 3, 8):
        assert sum(count_kernel(inst, shard_count=shards, shard_index=s) for s in range(shards)) == whole


def test_budgets():
    big = SystemInstance(3, 3, 9)
    assert naive_cost(big).assignment_count == 2 ** (27 + 18)
    assert kernel_cost(big).assignment_count == 2**18
    with pytest.raises(BudgetExceeded) as info:
        count_naive(big)
    assert info.value.cost == 2**45
    with pytest.raises(BudgetExceeded):
        count_kernel(SystemInstance(3, 5, 2))
    with pytest.raises(StructuralError):
        SystemInstance(0, 1, 1)
