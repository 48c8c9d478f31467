"""Exact linear programming over the rationals.

A small dense two-phase tableau simplex in which every entry is a
fractions.Fraction. Pivoting uses Bland's rule, so the method terminates
without cycling and optimal values are exact. Intended for the tiny LPs
that arise from polytopal norm balls (a few dozen rows and columns), not
for anything large.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_MAX_PIVOTS = 50_000

_ZERO = Fraction(0)
_ONE = Fraction(1)


class SimplexError(Exception):
    """Pivot limit exceeded; with Bland's rule this indicates a bug."""


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None
    value: Fraction | None


def _to_fraction_rows(rows: Sequence[Sequence], width: int) -> list[list[Fraction]]:
    out = []
    for row in rows:
        frow = [Fraction(v) for v in row]
        if len(frow) != width:
            raise ValueError(f"LP row of length {len(frow)}, expected {width}")
        out.append(frow)
    return out


def solve_lp(
    objective: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    *,
    maximize: bool = False,
) -> LPResult:
    """Optimize objective . x over {a_ub x <= b_ub, a_eq x = b_eq, x >= 0}.

    Returns an LPResult whose value is for the stated sense (max or min).
    All inputs are coerced to Fraction; passing binary floats is legal but
    they are taken at exact binary value.
    """
    c = [Fraction(v) for v in objective]
    n = len(c)
    if maximize:
        c = [-v for v in c]

    a_ub = _to_fraction_rows(a_ub, n)
    a_eq = _to_fraction_rows(a_eq, n)
    b_ub = [Fraction(v) for v in b_ub]
    b_eq = [Fraction(v) for v in b_eq]
    if len(b_ub) != len(a_ub) or len(b_eq) != len(a_eq):
        raise ValueError("constraint matrix / rhs length mismatch")

    # Assemble rows in standard form with nonnegative rhs. Each row gets
    # either a slack (ub with b >= 0) or an artificial variable.
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    kinds: list[str] = []  # "slack" | "surplus" | "eq"
    for row, b in zip(a_ub, b_ub):
        if b >= 0:
            rows.append(list(row))
            rhs.append(b)
            kinds.append("slack")
        else:
            rows.append([-v for v in row])
            rhs.append(-b)
            kinds.append("surplus")
    for row, b in zip(a_eq, b_eq):
        if b >= 0:
            rows.append(list(row))
            rhs.append(b)
        else:
            rows.append([-v for v in row])
            rhs.append(-b)
        kinds.append("eq")

    m = len(rows)
    n_slack = sum(1 for k in kinds if k == "slack")
    n_surplus = sum(1 for k in kinds if k == "surplus")
    n_art = sum(1 for k in kinds if k in ("surplus", "eq"))
    ncols = n + n_slack + n_surplus + n_art

    tableau = [row + [_ZERO] * (n_slack + n_surplus + n_art) + [rhs[i]] for i, row in enumerate(rows)]
    basis = [0] * m
    art_cols: set[int] = set()
    slack_at = n
    surplus_at = n + n_slack
    art_at = n + n_slack + n_surplus
    for i, kind in enumerate(kinds):
        if kind == "slack":
            tableau[i][slack_at] = _ONE
            basis[i] = slack_at
            slack_at += 1
        elif kind == "surplus":
            tableau[i][surplus_at] = -_ONE
            tableau[i][art_at] = _ONE
            basis[i] = art_at
            art_cols.add(art_at)
            surplus_at += 1
            art_at += 1
        else:
            tableau[i][art_at] = _ONE
            basis[i] = art_at
            art_cols.add(art_at)
            art_at += 1

    if art_cols:
        phase1 = [_ZERO] * ncols
        for j in art_cols:
            phase1[j] = _ONE
        status = _simplex(tableau, basis, phase1, ncols, banned=frozenset())
        if status == UNBOUNDED:  # phase-1 objective is bounded below by 0
            raise SimplexError("phase 1 reported unbounded")
        infeas = sum(tableau[i][ncols] for i in range(m) if basis[i] in art_cols)
        if infeas > 0:
            return LPResult(INFEASIBLE, None, None)
        _pivot_out_artificials(tableau, basis, art_cols, ncols)

    cost = c + [_ZERO] * (ncols - n)
    status = _simplex(tableau, basis, cost, ncols, banned=frozenset(art_cols))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None)

    x = [_ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i][ncols]
    value = sum(ci * xi for ci, xi in zip(c, x))
    if maximize:
        value = -value
    return LPResult(OPTIMAL, tuple(x), value)


def _simplex(tableau, basis, cost, ncols, banned: frozenset[int]) -> str:
    """Minimize cost over the current tableau in place (Bland's rule)."""
    m = len(tableau)
    for _ in range(_MAX_PIVOTS):
        cb = [cost[b] for b in basis]
        enter = -1
        for j in range(ncols):
            if j in banned:
                continue
            red = cost[j] - sum(cb[i] * tableau[i][j] for i in range(m))
            if red < 0:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        leave = -1
        best = None
        for i in range(m):
            t = tableau[i][enter]
            if t > 0:
                ratio = tableau[i][ncols] / t
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED
        _pivot(tableau, basis, leave, enter, ncols)
    raise SimplexError("pivot limit exceeded")


def _pivot(tableau, basis, r, e, ncols):
    piv = tableau[r][e]
    row = tableau[r]
    inv = _ONE / piv
    for j in range(ncols + 1):
        row[j] *= inv
    for i, other in enumerate(tableau):
        if i == r:
            continue
        factor = other[e]
        if factor != 0:
            for j in range(ncols + 1):
                other[j] -= factor * row[j]
    basis[r] = e


def _pivot_out_artificials(tableau, basis, art_cols, ncols):
    """Drive basic artificials (at value 0) out, dropping redundant rows."""
    i = 0
    while i < len(tableau):
        if basis[i] in art_cols:
            enter = next(
                (j for j in range(ncols) if j not in art_cols and tableau[i][j] != 0),
                -1,
            )
            if enter >= 0:
                _pivot(tableau, basis, i, enter, ncols)
            else:
                del tableau[i]
                del basis[i]
                continue
        i += 1
