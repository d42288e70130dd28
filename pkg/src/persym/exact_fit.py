"""Exact rational linear algebra for fitting and re-deriving rank polynomials.

Three jobs:

* ``solve_exact``: Gauss-Jordan elimination over ``Fraction`` that reports a
  unique solution, a solution family, or a certificate of inconsistency;
* ``fit_rank_polynomial``: fit a polynomial in Y = 2^n through sampled counts,
  optionally with prescribed roots and a prescribed leading coefficient;
* ``solve_moment_system``: recover the unknown high-rank polynomials at fixed
  k from the known low-rank ones and the three moment identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .closed_forms import RankPolynomial, gamma_poly, moment_rhs_poly

Number = int | Fraction


@dataclass
class RationalMatrix:
    rows: int
    cols: int
    entries: list[list[Fraction]]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not form a {self.rows}x{self.cols} matrix")
        self.entries = [[Fraction(x) for x in r] for r in self.entries]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Number]], cols: int | None = None) -> RationalMatrix:
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, [list(r) for r in rows])

    def matvec(self, x: Sequence[Number]) -> list[Fraction]:
        return [sum((a * Fraction(v) for a, v in zip(r, x)), Fraction(0)) for r in self.entries]


@dataclass
class SolveReport:
    """Outcome of an exact solve.

    status is "unique", "family" (free parameters remain) or "inconsistent".
    For "family", ``solution`` is the particular solution with all free
    variables at zero and ``null_basis`` spans the homogeneous solutions.  For
    "inconsistent", ``certificate`` is y with y^T A = 0 and y^T b != 0.
    """

    status: str
    rank: int
    rows: int
    cols: int
    solution: list[Fraction] | None = None
    null_basis: list[list[Fraction]] = field(default_factory=list)
    free_columns: list[int] = field(default_factory=list)
    certificate: list[Fraction] | None = None

    @property
    def unique(self) -> bool:
        return self.status == "unique"

    @property
    def nullity(self) -> int:
        return self.cols - self.rank

    def summary(self) -> dict:
        return {
            "status": self.status,
            "rows": self.rows,
            "cols": self.cols,
            "rank": self.rank,
            "nullity": self.nullity,
        }


def solve_exact(A: RationalMatrix, b: Sequence[Number]) -> SolveReport:
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has {len(b)} entries, matrix has {A.rows} rows")
    m, n = A.rows, A.cols
    # augmented [A | b | I] so the row operations applied are recorded
    work = [
        list(A.entries[r]) + [Fraction(b[r])] + [Fraction(int(r == c)) for c in range(m)]
        for r in range(m)
    ]
    pivots: list[int] = []
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, m) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[row], work[pivot] = work[pivot], work[row]
        p = work[row][col]
        work[row] = [x / p for x in work[row]]
        for r in range(m):
            if r != row and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    rank = len(pivots)
    for r in range(rank, m):
        if work[r][n] != 0:
            return SolveReport("inconsistent", rank, m, n, certificate=work[r][n + 1:])
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = work[r][n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, col in enumerate(pivots):
            v[col] = -work[r][fc]
        basis.append(v)
    status = "unique" if not free else "family"
    return SolveReport(status, rank, m, n, x, basis, free)


class FitError(ValueError):
    def __init__(self, message: str, report: SolveReport):
        super().__init__(message)
        self.report = report


def _poly_from_roots(roots: Sequence[Number]) -> list[Fraction]:
    """Coefficients (constant first) of prod (Y - r)."""
    out = [Fraction(1)]
    for r in roots:
        nxt = [Fraction(0)] * (len(out) + 1)
        for e, c in enumerate(out):
            nxt[e + 1] += c
            nxt[e] -= c * r
        out = nxt
    return out


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def fit_rank_polynomial(
    samples: Sequence[tuple[int, Number]],
    degree_bound: int,
    forced_roots: Sequence[Number] = (),
    *,
    leading: Number | None = None,
    k: int | None = None,
    i: int | None = None,
) -> RankPolynomial:
    """Exact polynomial in Y = 2^n of degree <= ``degree_bound`` through ``samples``.

    ``samples`` are (n, value) pairs.  The polynomial is written as
    prod(Y - r for r in forced_roots) * Q(Y) and the coefficients of Q are
    solved for; with ``leading`` given, Q's top coefficient is pinned so the
    result has that coefficient at Y^degree_bound.  Extra samples are kept as
    consistency equations.  Raises ``FitError`` (carrying the ``SolveReport``)
    when the samples underdetermine Q or contradict each other.
    """
    roots = [Fraction(r) for r in forced_roots]
    qdeg = degree_bound - len(roots)
    if qdeg < 0:
        raise ValueError("more forced roots than the degree bound allows")
    unknowns = list(range(qdeg + 1))
    if leading is not None:
        unknowns = unknowns[:-1]
    rows, rhs = [], []
    for n, value in samples:
        y = Fraction(2) ** n
        scale = Fraction(1)
        for r in roots:
            scale *= y - r
        target = Fraction(value)
        if leading is not None:
            target -= scale * Fraction(leading) * y**qdeg
        rows.append([scale * y**e for e in unknowns])
        rhs.append(target)
    report = solve_exact(RationalMatrix.from_rows(rows, len(unknowns)), rhs)
    if report.status == "inconsistent":
        raise FitError("samples are inconsistent with the requested form", report)
    if report.status == "family":
        raise FitError(
            f"samples leave {report.nullity} coefficient(s) undetermined", report
        )
    q = list(report.solution)
    if leading is not None:
        q.append(Fraction(leading))
    full = _poly_mul(_poly_from_roots(roots), q) if q else []
    coeffs = {e: c for e, c in enumerate(full)}
    return RankPolynomial(k, i, coeffs, source="fit")


# ---------------------------------------------------------------------------
# rank-6 derivation from the values at n = 3, 4, 5
# ---------------------------------------------------------------------------

# Gamma_6 at n = 3, 4, 5 as polynomials in K = 2^k: {power of K: coefficient}
RANK6_SMALL_N = {
    3: {3: 8, 2: -448, 1: 7168, 0: -32768},
    # linear term is 2^k: it is the only reading that matches the fixed-k
    # tables at Y = 16
    4: {3: 120, 2: 123480, 1: -6142080, 0: 66170880},
    5: {3: 1240, 2: 1240 * 3199, 1: 1240 * 2**7 * 3913, 0: -1240 * 18883 * 2**10},
}

RANK6_LEAD = 127


def rank6_value(n: int, k: int) -> int:
    """Gamma_6 at n in {0, ..., 5} for general k; zero below n = 3."""
    if n < 3:
        return 0
    K = 1 << k
    return sum(c * K**p for p, c in RANK6_SMALL_N[n].items())


def rank6_system(k: int) -> tuple[RationalMatrix, list[Fraction]]:
    """The 3x3 system for (alpha, beta, gamma) at one k.

    Gamma_6 = (Y-1)(Y-2)(Y-4)(127 Y^3 + alpha Y^2 + beta Y + gamma), evaluated
    at n = 3, 4, 5.
    """
    rows, rhs = [], []
    for n in (3, 4, 5):
        y = 1 << n
        scale = (y - 1) * (y - 2) * (y - 4)
        rows.append([y * y, y, 1])
        rhs.append(Fraction(rank6_value(n, k), scale) - RANK6_LEAD * y**3)
    return RationalMatrix.from_rows(rows), rhs


def rank6_quotient_closed(k: int) -> tuple[Fraction, Fraction, Fraction]:
    """alpha(k), beta(k), gamma(k) as printed in closed form."""
    K = Fraction(1 << k)
    alpha = Fraction(651, 8) * K - 2429 * 4
    beta = Fraction(155, 24) * K * K - 2263 * K + Fraction(538784, 3)
    gamma = K**3 / 21 - Fraction(163, 3) * K * K + Fraction(38816, 3) * K - Fraction(18483200, 21)
    return alpha, beta, gamma


def rank6_expand(alpha: Fraction, beta: Fraction, gamma: Fraction) -> dict[int, Fraction]:
    """Coefficients a..f (Y^5 .. Y^0) of (Y-1)(Y-2)(Y-4)(127Y^3 + alpha Y^2 + beta Y + gamma)."""
    full = _poly_mul(_poly_from_roots([1, 2, 4]), [gamma, beta, alpha, Fraction(RANK6_LEAD)])
    return {e: full[e] for e in range(6)}


def derive_rank6(k: int) -> RankPolynomial:
    report = solve_exact(*rank6_system(k))
    if not report.unique:
        raise FitError(f"rank-6 system at k={k} is not uniquely solvable", report)
    alpha, beta, gamma = report.solution
    coeffs = rank6_expand(alpha, beta, gamma)
    coeffs[6] = Fraction(RANK6_LEAD)
    return RankPolynomial(k, 6, coeffs, validity=7, source="derived from n=3,4,5")


# ---------------------------------------------------------------------------
# moment system for the high ranks at fixed k
# ---------------------------------------------------------------------------


@dataclass
class MomentSystemSolution:
    k: int
    coefficients: dict[tuple[int, int], Fraction]
    report: SolveReport
    polynomials: dict[int, RankPolynomial]
    equations: int
    unknowns: list[tuple[int, int]]

    @property
    def uniqueness(self) -> bool:
        return self.report.unique

    @property
    def residual_rank_report(self) -> dict:
        return self.report.summary()


def moment_ansatz(k: int, first_unknown: int = 7) -> dict[int, tuple[dict[int, Fraction], list[int]]]:
    """For each rank j >= first_unknown: (fixed leading terms, unknown exponents).

    Rank j < k leads with (2^(j+1) - 1) Y^j; rank k leads with Y^(k+1) and every
    lower power, Y^k included, is left unknown.
    """
    out = {}
    for j in range(first_unknown, k + 1):
        if j < k:
            out[j] = ({j: Fraction(2 ** (j + 1) - 1)}, list(range(j)))
        else:
            out[j] = ({k + 1: Fraction(1)}, list(range(k + 1)))
    return out


def solve_moment_system(k: int = 9, first_unknown: int = 7) -> MomentSystemSolution:
    """Solve for the unknown coefficients of ranks first_unknown..k.

    Ranks below ``first_unknown`` come from ``gamma_poly``.  The three
    identities sum_i Gamma_i 2^(q(k-i)) = RHS_q(Y), q = 0, 1, 2, are imposed
    coefficient by coefficient in Y; every equation is kept, so surplus
    equations act as consistency checks.
    """
    if k < first_unknown or k < 3:
        raise ValueError(f"need k >= max({first_unknown}, 3)")
    known = {i: gamma_poly(i, k) for i in range(first_unknown)}
    ansatz = moment_ansatz(k, first_unknown)
    unknowns = [(j, e) for j, (_, exps) in ansatz.items() for e in exps]
    col = {u: c for c, u in enumerate(unknowns)}
    top = k + 1
    rows, rhs = [], []
    for q in (0, 1, 2):
        target = moment_rhs_poly(k, q)
        for e in range(top + 1):
            row = [Fraction(0)] * len(unknowns)
            value = target.coeff(e)
            for i, p in known.items():
                value -= p.coeff(e) * 2 ** (q * (k - i))
            for j, (fixed, exps) in ansatz.items():
                weight = 2 ** (q * (k - j))
                value -= fixed.get(e, Fraction(0)) * weight
                if e in exps:
                    row[col[(j, e)]] = Fraction(weight)
            rows.append(row)
            rhs.append(value)
    report = solve_exact(RationalMatrix.from_rows(rows, len(unknowns)), rhs)
    coefficients: dict[tuple[int, int], Fraction] = {}
    polys: dict[int, RankPolynomial] = dict(known)
    if report.solution is not None:
        for u, c in zip(unknowns, report.solution):
            coefficients[u] = c
        for j, (fixed, exps) in ansatz.items():
            coeffs = dict(fixed)
            for e in exps:
                coeffs[e] = coefficients[(j, e)]
            polys[j] = RankPolynomial(k, j, coeffs, source="moment solve")
    return MomentSystemSolution(k, coefficients, report, polys, len(rows), unknowns)
