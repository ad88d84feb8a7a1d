"""Exact two-phase simplex over fractions, Bland's rule.

Small and dense on purpose: the programs solved here have a handful of rows
(one per payoff coordinate) and one column per simple cycle.
"""

from __future__ import annotations

from fractions import Fraction

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


def _pivot(rows, obj, basis, r, c):
    piv = rows[r][c]
    rows[r] = [v / piv for v in rows[r]]
    pr = rows[r]
    for i, row in enumerate(rows):
        if i != r and row[c] != 0:
            f = row[c]
            rows[i] = [a - f * b for a, b in zip(row, pr)]
    for o in obj:
        f = o[c]
        if f != 0:
            o[:] = [a - f * b for a, b in zip(o, pr)]
    basis[r] = c


def _run(rows, obj, basis, allowed, extra=()):
    """Maximise ``obj`` (stored as reduced costs, rhs in the last slot)."""
    while True:
        enter = None
        for j in range(len(obj) - 1):
            if j in allowed and obj[j] > 0:
                enter = j
                break
        if enter is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(rows):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(rows, [obj, *extra], basis, best[1], enter)


def maximise(c, a_ub=(), b_ub=(), a_eq=(), b_eq=()):
    """Maximise ``c·x`` subject to ``a_ub x <= b_ub``, ``a_eq x = b_eq``, ``x >= 0``.

    Returns ``(status, value, x)`` with exact fractions.
    """
    n = len(c)
    cons = [([Fraction(v) for v in row], Fraction(b), True) for row, b in zip(a_ub, b_ub)]
    cons += [([Fraction(v) for v in row], Fraction(b), False) for row, b in zip(a_eq, b_eq)]
    n_slack = sum(1 for _, _, ub in cons if ub)
    m = len(cons)
    width = n + n_slack + m + 1
    rows, basis = [], []
    slack = n
    for k, (row, b, ub) in enumerate(cons):
        full = row + [Fraction(0)] * (width - n)
        if ub:
            full[slack] = Fraction(1)
            slack += 1
        if b < 0:
            full = [-v for v in full]
            b = -b
        art = n + n_slack + k
        full[art] = Fraction(1)
        full[-1] = b
        rows.append(full)
        basis.append(art)

    # phase 1: maximise minus the sum of artificials
    phase1 = [Fraction(0)] * width
    for row in rows:
        phase1 = [p + v for p, v in zip(phase1, row)]
    for j in range(n + n_slack, n + n_slack + m):
        phase1[j] = Fraction(0)
    obj2 = [Fraction(v) for v in c] + [Fraction(0)] * (width - n)
    everything = set(range(width - 1))
    _run(rows, phase1, basis, everything, extra=(obj2,))
    if phase1[-1] != 0:
        return INFEASIBLE, None, None
    real = set(range(n + n_slack))
    # drive remaining artificials out of the basis where possible
    for i, bvar in enumerate(basis):
        if bvar >= n + n_slack:
            for j in sorted(real):
                if rows[i][j] != 0:
                    _pivot(rows, [phase1, obj2], basis, i, j)
                    break
    status = _run(rows, obj2, basis, real)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    x = [Fraction(0)] * n
    for i, bvar in enumerate(basis):
        if bvar < n:
            x[bvar] = rows[i][-1]
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), Fraction(0))
    return OPTIMAL, value, x
