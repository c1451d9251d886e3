"""Dense two-phase simplex over exact rationals.

Small problems only (a few dozen rows); Bland's rule guarantees termination.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


def _pivot(rows: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    prow = rows[r]
    piv = prow[c]
    if piv != 1:
        rows[r] = prow = [x / piv if x else x for x in prow]
    nz = [k for k, x in enumerate(prow) if x]
    for i, row in enumerate(rows):
        if i != r:
            f = row[c]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
    if basis is not None:
        basis[r] = c


def _optimize(rows: list[list[Fraction]], basis: list[int], ncols: int) -> None:
    """Maximize; ``rows[-1]`` holds reduced costs (positive = improving)."""
    cost = rows[-1]
    body = rows[:-1]
    while True:
        enter = next((j for j in range(ncols) if cost[j] > 0), -1)
        if enter < 0:
            return
        leave, best = -1, None
        for i, row in enumerate(body):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave < 0:
            raise Unbounded
        _pivot(rows, None, leave, enter)
        basis[leave] = enter
        cost = rows[-1]
        body = rows[:-1]


def _cost_row(obj: Sequence[Fraction], rows, basis, width: int) -> list[Fraction]:
    cost = list(obj) + [_ZERO] * (width - len(obj))
    for i, j in enumerate(basis):
        cj = obj[j] if j < len(obj) else _ZERO
        if cj:
            cost = [c - cj * x for c, x in zip(cost, rows[i])]
    return cost


def linprog_max(c: Sequence[Fraction], A: Sequence[Sequence[Fraction]],
                b: Sequence[Fraction]) -> tuple[Fraction, list[Fraction]]:
    """Solve ``max c.y  s.t.  A y <= b, y >= 0`` exactly.

    Returns ``(optimum, y)``. Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    m, n = len(A), len(c)
    n_art = sum(1 for x in b if x < 0)
    ncol = n + m + n_art
    rows: list[list[Fraction]] = []
    basis: list[int] = []
    art = n + m
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [_ZERO] * (ncol + 1)
        for j in range(n):
            row[j] = Fraction(sign * A[i][j])
        row[n + i] = Fraction(sign)
        row[-1] = Fraction(sign * b[i])
        if sign < 0:
            row[art] = _ONE
            basis.append(art)
            art += 1
        else:
            basis.append(n + i)
        rows.append(row)

    if n_art:
        obj1 = [_ZERO] * (n + m) + [-_ONE] * n_art
        rows.append(_cost_row(obj1, rows, basis, ncol + 1))
        _optimize(rows, basis, ncol)
        rows.pop()
        if any(rows[i][-1] != 0 for i in range(len(rows)) if basis[i] >= n + m):
            raise Infeasible
        for i in range(len(rows) - 1, -1, -1):
            if basis[i] >= n + m:
                j = next((j for j in range(n + m) if rows[i][j] != 0 and j not in basis), None)
                if j is None:
                    del rows[i]
                    del basis[i]
                else:
                    _pivot(rows, basis, i, j)
        rows = [row[:n + m] + [row[-1]] for row in rows]

    obj = [Fraction(x) for x in c] + [_ZERO] * m
    rows.append(_cost_row(obj, rows, basis, n + m + 1))
    _optimize(rows, basis, n + m)
    rows.pop()
    y = [_ZERO] * n
    for i, j in enumerate(basis):
        if j < n:
            y[j] = rows[i][-1]
    return sum(ci * yi for ci, yi in zip(c, y)), y


def max_slack(halfspaces: Sequence[tuple[Sequence[Fraction], Fraction]], dim: int,
              cap: Fraction = _ONE) -> Fraction | None:
    """Largest ``t <= cap`` with ``a.x + t <= b`` for every halfspace ``(a, b)``.

    ``None`` when even the closed polyhedron is empty. The open interior is
    nonempty exactly when the result is positive.
    """
    if not halfspaces:
        return cap
    # variables: x+ (dim), x- (dim), t
    A = []
    bvec = []
    for a, bound in halfspaces:
        A.append(list(a) + [-v for v in a] + [_ONE])
        bvec.append(bound)
    A.append([_ZERO] * (2 * dim) + [_ONE])
    bvec.append(cap)
    c = [_ZERO] * (2 * dim) + [_ONE]
    try:
        value, _ = linprog_max(c, A, bvec)
    except Infeasible:
        return None
    return value
