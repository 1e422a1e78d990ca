"""Exact two-phase simplex over the rationals (Bland's rule, free variables).

The tableau is kept fraction-free: every row is a list of Python ints scaled by
an arbitrary positive factor, so only signs and cross-multiplied ratios are ever
compared.  Rationals appear again only when the final point is read off.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

ZERO = Fraction(0)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None


def _shrink(row: list[int]) -> list[int]:
    g = reduce(gcd, row, 0)
    return [x // g for x in row] if g > 1 else row


def _integral(values: Sequence[Fraction]) -> list[int]:
    fracs = [Fraction(v) for v in values]
    den = reduce(lcm, (v.denominator for v in fracs), 1)
    return [int(v * den) for v in fracs]


def _pivot(rows: list[list[int]], r: int, c: int) -> None:
    """Eliminate column ``c`` from all rows but ``r``; the last entry of a row is its rhs."""
    prow = rows[r]
    if prow[c] < 0:
        prow = rows[r] = [-x for x in prow]
    p = prow[c]
    for i, row in enumerate(rows):
        if i != r:
            f = row[c]
            if f:
                rows[i] = _shrink([p * x - f * y for x, y in zip(row, prow)])


def _run(rows: list[list[int]], basis: list[int], cost: list[int], allowed: list[bool]) -> str:
    """Maximize ``cost · z`` from a feasible basis with Bland's rule."""
    ncols = len(cost)
    red = list(cost) + [0]
    for i, b in enumerate(basis):
        cb = red[b]
        if cb:
            row = rows[i]
            red = _shrink([row[b] * x - cb * y for x, y in zip(red, row)])
    while True:
        enter = next((j for j in range(ncols) if allowed[j] and red[j] > 0), None)
        if enter is None:
            return "optimal"
        leave = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                if leave is None:
                    leave = i
                    continue
                lrow = rows[leave]
                lhs, rhs = row[-1] * lrow[enter], lrow[-1] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                    leave = i
        if leave is None:
            return "unbounded"
        _pivot(rows, leave, enter)
        basis[leave] = enter
        prow = rows[leave]
        f, p = red[enter], prow[enter]
        red = _shrink([p * x - f * y for x, y in zip(red, prow)])


def maximize(
    objective: Sequence[Fraction],
    a_ub: Sequence[Sequence[Fraction]],
    b_ub: Sequence[Fraction],
    a_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> LPResult:
    """Maximize ``objective · x`` subject to ``a_ub x <= b_ub`` and ``a_eq x = b_eq``;
    ``x`` is unrestricted in sign."""
    n = len(objective)
    m_ub, m_eq = len(a_ub), len(a_eq)
    m = m_ub + m_eq
    # columns: x+ (n), x- (n), slacks (m_ub), artificials (m); then the rhs
    n_struct = 2 * n + m_ub
    ncols = n_struct + m
    rows: list[list[int]] = []
    basis: list[int] = []
    for i in range(m):
        coeffs = list(a_ub[i]) if i < m_ub else list(a_eq[i - m_ub])
        b = b_ub[i] if i < m_ub else b_eq[i - m_ub]
        ints = _integral(coeffs + [b])
        coeffs, b = ints[:-1], ints[-1]
        row = coeffs + [-x for x in coeffs] + [0] * (m_ub + m) + [b]
        if i < m_ub:
            row[2 * n + i] = 1
        if b < 0:
            row = [-x for x in row]
        if i < m_ub and b >= 0:
            basis.append(2 * n + i)
        else:
            row[n_struct + i] = 1
            basis.append(n_struct + i)
        rows.append(row)
    allowed = [True] * ncols
    if any(b >= n_struct for b in basis):
        _run(rows, basis, [0] * n_struct + [-1] * m, allowed)
        if any(rows[i][-1] != 0 for i in range(len(rows)) if basis[i] >= n_struct):
            return LPResult("infeasible")
        keep = []
        for i in range(len(rows)):
            if basis[i] >= n_struct:
                col = next((j for j in range(n_struct) if rows[i][j] and j not in basis), None)
                if col is None:
                    continue  # redundant equation
                _pivot(rows, i, col)
                basis[i] = col
            keep.append(i)
        rows = [rows[i] for i in keep]
        basis = [basis[i] for i in keep]
    for j in range(n_struct, ncols):
        allowed[j] = False
    obj = _integral(list(objective))
    if _run(rows, basis, obj + [-c for c in obj] + [0] * (m_ub + m), allowed) == "unbounded":
        return LPResult("unbounded")
    z = [ZERO] * ncols
    for row, b in zip(rows, basis):
        z[b] = Fraction(row[-1], row[b])
    x = tuple(z[j] - z[n + j] for j in range(n))
    value = sum((Fraction(c) * v for c, v in zip(objective, x)), ZERO)
    return LPResult("optimal", value, x)


def feasible_point(
    a_ub: Sequence[Sequence[Fraction]],
    b_ub: Sequence[Fraction],
    strict: Sequence[bool],
    a_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> tuple[Fraction, ...] | None:
    """A point satisfying a mixed strict/weak system, or None when empty.

    Strict rows get a shared slack ``t`` that is maximized (capped at 1); the
    system is solvable iff the optimum is positive.
    """
    dim = len(a_ub[0]) if a_ub else (len(a_eq[0]) if a_eq else 0)
    if not any(strict):
        res = maximize([ZERO] * dim, a_ub, b_ub, a_eq, b_eq)
        return res.point if res.status == "optimal" else None
    rows = [list(r) + [Fraction(1) if s else ZERO] for r, s in zip(a_ub, strict)]
    rows.append([ZERO] * dim + [Fraction(1)])
    rhs = list(b_ub) + [Fraction(1)]
    eq = [list(r) + [ZERO] for r in a_eq]
    res = maximize([ZERO] * dim + [Fraction(1)], rows, rhs, eq, b_eq)
    if res.status != "optimal" or res.value <= 0:
        return None
    return res.point[:dim]
