"""Dense two-phase tableau simplex over Fractions with Bland's rule.

Small and exact by design: no tolerances, guaranteed termination. Problems are
given as rows ``(coeffs, sense, rhs)`` over non-negative variables, where
``coeffs`` maps variable index to coefficient and ``sense`` is one of
``"=="``, ``"<="``, ``">="``.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

ZERO = Fraction(0)

Row = tuple[Mapping[int, Fraction], str, Fraction]


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    objective: Fraction | None = None
    # Standard-form system (after slacks and sign normalisation) and a Farkas
    # vector y with y.A <= 0 column-wise and y.b > 0, present when infeasible.
    farkas: list[Fraction] | None = None
    std_matrix: list[list[Fraction]] | None = None
    std_rhs: list[Fraction] | None = None


def _standard_form(rows: Sequence[Row], num_vars: int) -> tuple[list[list[Fraction]], list[Fraction]]:
    n_slack = sum(1 for _, sense, _ in rows if sense != "==")
    width = num_vars + n_slack
    a: list[list[Fraction]] = []
    b: list[Fraction] = []
    s = num_vars
    for coeffs, sense, rhs in rows:
        line = [ZERO] * width
        for k, v in coeffs.items():
            line[k] += Fraction(v)
        if sense == "<=":
            line[s] = Fraction(1)
            s += 1
        elif sense == ">=":
            line[s] = Fraction(-1)
            s += 1
        elif sense != "==":
            raise ValueError(f"unknown constraint sense {sense!r}")
        rhs = Fraction(rhs)
        if rhs < 0:
            line = [-v for v in line]
            rhs = -rhs
        a.append(line)
        b.append(rhs)
    return a, b


class _Tableau:
    def __init__(self, a: list[list[Fraction]], b: list[Fraction]):
        self.rows = [line + [rhs] for line, rhs in zip(a, b)]
        self.basis: list[int] = []

    def pivot(self, r: int, c: int, cost: list[Fraction]) -> None:
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            prow[:] = [v / piv for v in prow]
        nz = [k for k, v in enumerate(prow) if v]
        for k, row in enumerate(self.rows):
            if k != r:
                f = row[c]
                if f:
                    for t in nz:
                        row[t] -= f * prow[t]
        f = cost[c]
        if f:
            for t in nz:
                cost[t] -= f * prow[t]
        self.basis[r] = c

    def optimize(self, cost: list[Fraction], allowed: int) -> str:
        """Minimise; ``cost`` holds reduced costs with the negated objective value last."""
        while True:
            enter = next((j for j in range(allowed) if cost[j] < 0), None)
            if enter is None:
                return "optimal"
            best = None
            for r, row in enumerate(self.rows):
                coef = row[enter]
                if coef > 0:
                    ratio = row[-1] / coef
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return "unbounded"
            self.pivot(best[1], enter, cost)


def solve(
    rows: Sequence[Row],
    num_vars: int,
    objective: Mapping[int, Fraction] | None = None,
    maximize: bool = True,
) -> LPResult:
    """Find a feasible point, then optimise ``objective`` if one is given."""
    a, b = _standard_form(rows, num_vars)
    m = len(a)
    width = len(a[0]) if a else num_vars
    if m == 0:
        return LPResult("optimal", [ZERO] * num_vars, ZERO)

    tab = _Tableau([line + [Fraction(int(r == k)) for k in range(m)] for r, line in enumerate(a)], b)
    tab.basis = [width + r for r in range(m)]
    total = width + m
    # phase 1: minimise the sum of artificials
    cost = [ZERO] * (total + 1)
    for row in tab.rows:
        for k in range(width):
            cost[k] -= row[k]
        cost[-1] -= row[-1]
    for k in range(width, total):
        cost[k] = ZERO
    tab.optimize(cost, width)
    infeasibility = -cost[-1]
    if infeasibility > 0:
        # y_r = 1 - reduced cost of artificial r
        y = [1 - cost[width + r] for r in range(m)]
        return LPResult("infeasible", farkas=y, std_matrix=a, std_rhs=b)

    # drive zero-valued artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= width:
            col = next((k for k in range(width) if tab.rows[r][k]), None)
            if col is None:
                del tab.rows[r]
                del tab.basis[r]
                continue
            tab.pivot(r, col, [ZERO] * (total + 1))
        r += 1
    for row in tab.rows:
        del row[width:total]

    if objective:
        sign = -1 if maximize else 1
        cost = [ZERO] * (width + 1)
        for k, v in objective.items():
            cost[k] = sign * Fraction(v)
        for r, row in enumerate(tab.rows):
            cb = cost[tab.basis[r]]
            if cb:
                for k in range(width + 1):
                    cost[k] -= cb * row[k]
        status = tab.optimize(cost, width)
        if status == "unbounded":
            return LPResult("unbounded")
        value = sign * -cost[-1]
    else:
        value = ZERO

    x = [ZERO] * width
    for r, row in enumerate(tab.rows):
        x[tab.basis[r]] = row[-1]
    return LPResult("optimal", x[:num_vars], value)


def verify_farkas(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction], y: Sequence[Fraction]) -> bool:
    """Check y.A <= 0 for every column and y.b > 0, proving Ax = b, x >= 0 infeasible."""
    width = len(a[0]) if a else 0
    for k in range(width):
        if sum((y[r] * a[r][k] for r in range(len(a))), ZERO) > 0:
            return False
    return sum((yr * br for yr, br in zip(y, b)), ZERO) > 0
