"""Exact rational simplex (two-phase, Bland's rule) with dual certificates.

Solves  min c^T x  s.t.  A x = b, x >= 0  entirely over `fractions.Fraction`.
Instances here are tiny (tens of rows, a few hundred columns), so a dense
tableau is fine; Bland's rule guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class SimplexError(RuntimeError):
    pass


class Infeasible(SimplexError):
    pass


class Unbounded(SimplexError):
    pass


@dataclass
class SimplexResult:
    value: Fraction
    x: list          # primal solution, length n
    y: list          # dual values, one per constraint row
    basis: list      # final basic column indices (original numbering)


def _pivot(rows, zrow, r, s):
    piv = rows[r][s]
    inv = 1 / piv
    rows[r] = [v * inv for v in rows[r]]
    prow = rows[r]
    for i in range(len(rows)):
        if i != r and rows[i][s]:
            f = rows[i][s]
            rows[i] = [a - f * p for a, p in zip(rows[i], prow)]
    if zrow[s]:
        f = zrow[s]
        zrow[:] = [a - f * p for a, p in zip(zrow, prow)]


def _reduced_costs(rows, basis, costs, ncols):
    z = list(costs[:ncols]) + [Fraction(0)]
    for i, bi in enumerate(basis):
        cb = costs[bi]
        if cb:
            z = [a - cb * v for a, v in zip(z, rows[i])]
    return z


_BLAND_AFTER = 40  # degenerate pivots tolerated before switching to Bland's rule


def _optimize(rows, zrow, basis, allowed):
    """Pivot loop: Dantzig rule, falling back to Bland's rule on stalls.

    Dantzig's most-negative-coefficient rule keeps iteration counts low;
    after a run of degenerate pivots we switch to Bland's rule, which cannot
    cycle, so termination is guaranteed either way.
    """
    ncols = len(zrow) - 1
    stalled = 0
    while True:
        enter = -1
        if stalled < _BLAND_AFTER:
            best_z = 0
            for j in range(ncols):
                if allowed[j] and zrow[j] < best_z:
                    best_z = zrow[j]
                    enter = j
        else:
            for j in range(ncols):
                if allowed[j] and zrow[j] < 0:
                    enter = j
                    break
        if enter < 0:
            return
        leave, best = -1, None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    leave, best = i, ratio
        if leave < 0:
            raise Unbounded("objective unbounded below")
        stalled = stalled + 1 if best == 0 else 0
        basis[leave] = enter
        _pivot(rows, zrow, leave, enter)


def simplex_min(A, b, c) -> SimplexResult:
    """Solve min c.x s.t. A x = b, x >= 0 exactly.

    A is a list of m rows (each a sequence of n Fractions); b has length m,
    c length n.  Returns optimal value, a primal solution, and dual values
    that certify optimality (redundant rows get dual value 0).
    """
    m, n = len(A), len(c)
    rows = []
    bs = []
    rowmap = list(range(m))
    for i in range(m):
        bi = Fraction(b[i])
        row = [Fraction(v) for v in A[i]]
        if bi < 0:
            bi = -bi
            row = [-v for v in row]
        rows.append(row)
        bs.append(bi)

    # phase 1: artificial columns n..n+m-1
    total = n + m
    for i in range(m):
        rows[i] = rows[i] + [Fraction(1) if k == i else Fraction(0) for k in range(m)]
        rows[i].append(bs[i])
    basis = list(range(n, n + m))
    costs1 = [Fraction(0)] * n + [Fraction(1)] * m
    zrow = _reduced_costs(rows, basis, costs1, total)
    allowed = [True] * n + [False] * m
    _optimize(rows, zrow, basis, allowed)
    if -zrow[-1] != 0:
        raise Infeasible("phase-1 optimum positive")

    # drive remaining artificial variables out of the basis
    drop = []
    for i in range(m):
        if basis[i] >= n:
            s = next((j for j in range(n) if rows[i][j] != 0), None)
            if s is None:
                drop.append(i)          # redundant constraint
            else:
                basis[i] = s
                _pivot(rows, zrow, i, s)
    if drop:
        keep = [i for i in range(m) if i not in set(drop)]
        rows = [rows[i] for i in keep]
        basis = [basis[i] for i in keep]
        rowmap = [rowmap[i] for i in keep]

    # phase 2
    costs2 = [Fraction(v) for v in c] + [Fraction(0)] * m
    zrow = _reduced_costs(rows, basis, costs2, total)
    _optimize(rows, zrow, basis, allowed)

    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        x[bi] = rows[i][-1]
    value = sum((costs2[j] * x[j] for j in range(n)), Fraction(0))
    # duals read off the artificial columns: reduced cost there is -y_i
    y = [Fraction(0)] * m
    for i_orig in rowmap:
        y[i_orig] = -zrow[n + i_orig]
    # account for the row sign flips done for b >= 0
    for i in range(m):
        if Fraction(b[i]) < 0:
            y[i] = -y[i]
    return SimplexResult(value=value, x=x, y=y, basis=list(basis))


def verify_certificate(A, b, c, res: SimplexResult) -> bool:
    """Exact primal/dual optimality check, independent of the solve path."""
    m, n = len(A), len(c)
    for j in range(n):
        if res.x[j] < 0:
            return False
    for i in range(m):
        lhs = sum((Fraction(A[i][j]) * res.x[j] for j in range(n)), Fraction(0))
        if lhs != Fraction(b[i]):
            return False
    for j in range(n):
        red = Fraction(c[j]) - sum(
            (res.y[i] * Fraction(A[i][j]) for i in range(m)), Fraction(0)
        )
        if red < 0:
            return False
    primal = sum((Fraction(c[j]) * res.x[j] for j in range(n)), Fraction(0))
    dual = sum((res.y[i] * Fraction(b[i]) for i in range(m)), Fraction(0))
    return primal == dual == res.value
