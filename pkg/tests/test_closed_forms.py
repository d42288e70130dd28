from fractions import Fraction

import pytest

from persym.closed_forms import (
    TABLES,
    Check,
    check_closed_forms,
    check_moment_identities,
    covered,
    first_moment_rhs,
    gamma_closed,
    gamma_poly,
    general_poly,
    moment,
    moment_rhs_poly,
    K9_MOMENT_RHS,
    r1_value,
    r_closed,
    r_formula,
    table_poly,
)
from persym.engine import RankDistribution, census
from persym.errors import NoClosedForm, StructuralError
from persym.exact_fit import rank6_value

CENSUS_GRID = [(n, k) for n in range(1, 13) for k in range(1, 24) if (k + 1) * n <= 24]


def test_gamma_poly_examples():
    assert gamma_poly(1, 5).coeffs == {1: 3, 0: -3}
    assert gamma_poly(2, 9).coeffs == {2: 7, 1: 999, 0: -1006}
    sextic = gamma_poly(6, 7)
    assert sextic.coeffs == {6: 127, 5: -189, 4: -7378, 3: 24240, 2: 35168, 1: -166656, 0: 114688}


def test_uncovered_raises():
    with pytest.raises(NoClosedForm):
        gamma_poly(7, 12)
    with pytest.raises(NoClosedForm):
        gamma_poly(5, 3)
    assert not covered(7, 10)
    assert covered(6, 16)


def test_gamma_closed_examples():
    assert gamma_closed(6, 2, 9).value == 0
    assert gamma_closed(0, 5, 4).value == 1
    # sextic at n = 3 and the k-formula for n = 3 at k = 7
    y = 8
    assert 127 * y**6 - 189 * y**5 - 7378 * y**4 + 24240 * y**3 + 35168 * y**2 - 166656 * y + 114688 == 10321920
    assert 2 ** 24 - 7 * 2 ** 20 + 7 * 2 ** 17 - 32768 == 10321920
    assert rank6_value(3, 7) == 10321920
    assert gamma_closed(6, 3, 7).value == 10321920


@pytest.mark.parametrize("k", range(3, 10))
def test_tables_match_general_formulas(k):
    for i in range(0, min(k - 1, 6) + 1):
        assert table_poly(i, k).same_polynomial(general_poly(i, k)), (i, k)


@pytest.mark.parametrize("k", range(1, 10))
def test_table_rows_sum_to_full_space(k):
    total = {}
    for i in range(k + 1):
        for e, c in table_poly(i, k).coeffs.items():
            total[e] = total.get(e, 0) + c
    assert {e: c for e, c in total.items() if c} == {k + 1: 1}


def test_counts_vanish_above_twice_n():
    for k in range(1, 17):
        for i in range(0, 10):
            if not covered(i, k):
                continue
            for n in range(0, (i + 1) // 2):
                assert gamma_closed(i, n, k).value == 0, (i, n, k)


def test_integrality_sweep():
    for k in range(1, 17):
        for i in range(0, k + 1):
            if not covered(i, k):
                continue
            p = gamma_poly(i, k)
            for n in range(0, 13):
                v = p.evaluate(n)
                assert v.denominator == 1 and v >= 0, (i, n, k, v)


@pytest.mark.slow
@pytest.mark.parametrize("n,k", CENSUS_GRID)
def test_formula_matches_census(n, k, census_of):
    dist = census_of(n, k)
    for i, g in enumerate(dist.gamma):
        if covered(i, k):
            assert gamma_closed(i, n, k).value == g, (i, n, k)


def test_moment_examples():
    assert moment(census(1, 1), 1) == Fraction(5, 2)
    assert moment(census(1, 2), 1) == Fraction(7, 2)
    for n, k in [(1, 1), (2, 3), (3, 2)]:
        assert moment(census(n, k), 0) == 2 ** ((k + 1) * n)


def test_r_formula_examples():
    assert r_formula(1, 2, 3, census(2, 3)).value == 23
    assert r_formula(3, 1, 9, census(1, 9)).value == 145227776
    assert r_closed(3, 3, 9).value == 307835648


def test_r_formula_needs_complete_matching_dist():
    with pytest.raises(StructuralError):
        r_formula(1, 2, 3, census(2, 3, 2, 0))
    with pytest.raises(StructuralError):
        r_formula(1, 2, 4, census(2, 3))


@pytest.mark.parametrize("n,k", [(n, k) for n, k in CENSUS_GRID if (k + 1) * n <= 20])
def test_r1_and_identities(n, k, census_of):
    dist = census_of(n, k)
    assert r_formula(1, n, k, dist).value == 2 ** (2 * n) + 2**k - 1
    assert all(c.ok for c in check_moment_identities(dist))


def test_eq34_equivalent_to_first_moment_identity():
    for n in range(0, 13):
        for k in range(1, 17):
            assert Fraction(2) ** (k - (k - 1) * n) * first_moment_rhs(n, k) == r1_value(n, k)


def test_k9_identities_match_general_form():
    for q in (0, 1, 2):
        assert moment_rhs_poly(9, q).coeffs == K9_MOMENT_RHS[q]


def test_identity_report_examples():
    checks = check_moment_identities(census(1, 1))
    assert checks and all(c.ok for c in checks)
    k9 = [c for c in check_moment_identities(census(2, 9)) if c.anchor == "Eq 3.13"]
    assert len(k9) == 3 and all(c.ok for c in k9)


def test_corrupted_distribution_detected():
    dist = census(2, 3)
    bad = RankDistribution(2, 3, list(dist.gamma), dist.tuples_scanned)
    bad.gamma[1] += 1
    report = {c.anchor + c.label: c for c in check_moment_identities(bad)}
    assert not report["Eq 3.5sum Gamma_i = 2^((k+1)n)"].ok
    assert report["Eq 3.5sum Gamma_i = 2^((k+1)n)"].lhs == 2**8 + 1


def test_check_closed_forms_flags_wrong_entry():
    dist = census(2, 4)
    assert all(c.ok for c in check_closed_forms(dist))
    dist.gamma[2] -= 1
    dist.gamma[3] += 1
    bad = [c for c in check_closed_forms(dist) if not c.ok]
    assert {c.label for c in bad} == {"Gamma_2", "Gamma_3"}


def test_check_serializes_as_strings():
    d = Check("Eq 3.11", Fraction(5, 2), Fraction(5, 2), label="x").as_dict()
    assert d == {"anchor": "Eq 3.11", "label": "x", "lhs": "5/2", "rhs": "5/2", "ok": True}


def test_table_keys_cover_every_rank():
    for k, rows in TABLES.items():
        assert sorted(rows) == list(range(k + 1))
