"""Small dense linear programs solved by a two-phase tableau simplex.

Bland's rule (lowest-index entering and leaving variables) prevents cycling.
With ``exact=True`` every coefficient is converted to ``Fraction`` and the
pivots are exact; otherwise floats with a 1e-9 tolerance are used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

TOL = 1e-9


@dataclass
class LinearProgram:
    """minimise ``c.y`` s.t. ``A_ub y <= b_ub``, ``A_eq y == b_eq``, ``y >= 0``."""

    c: list
    A_ub: list = field(default_factory=list)
    b_ub: list = field(default_factory=list)
    A_eq: list = field(default_factory=list)
    b_eq: list = field(default_factory=list)
    names: Optional[list] = None
    row_names: Optional[list] = None  # inequality rows first, then equalities

    def __post_init__(self):
        n = len(self.c)
        for label, A, b in (("inequality", self.A_ub, self.b_ub), ("equality", self.A_eq, self.b_eq)):
            if len(A) != len(b):
                raise ValueError(f"{label} rows: {len(A)} rows but {len(b)} right-hand sides")
            for row in A:
                if len(row) != n:
                    raise ValueError(f"{label} row has {len(row)} coefficients, expected {n}")

    @property
    def num_vars(self) -> int:
        return len(self.c)

    def to_text(self) -> str:
        """Plain row listing, one constraint per line."""
        names = self.names or [f"y{j}" for j in range(self.num_vars)]
        row_names = self.row_names or (
            [f"ic{k}" for k in range(len(self.A_ub))] + [f"eq{k}" for k in range(len(self.A_eq))])

        def expr(coefs):
            terms = [f"{_fmt(a)}*{nm}" for a, nm in zip(coefs, names) if a != 0]
            return " + ".join(terms) if terms else "0"

        lines = [f"minimize: {expr(self.c)}"]
        for nm, row, b in zip(row_names, self.A_ub, self.b_ub):
            lines.append(f"{nm}: {expr(row)} <= {_fmt(b)}")
        for nm, row, b in zip(row_names[len(self.A_ub):], self.A_eq, self.b_eq):
            lines.append(f"{nm}: {expr(row)} = {_fmt(b)}")
        lines.append("bounds: " + ", ".join(f"{nm} >= 0" for nm in names))
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    return str(x) if isinstance(x, (int, Fraction)) else repr(float(x))


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    x: Optional[list] = None
    objective: object = None
    iterations: int = 0


class _Tableau:
    def __init__(self, rows, rhs, basis, tol, zero):
        self.rows, self.rhs, self.basis, self.tol, self.zero = rows, rhs, basis, tol, zero
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        row, p = self.rows[r], self.rows[r][j]
        self.rows[r] = [a / p for a in row]
        self.rhs[r] = self.rhs[r] / p
        prow, prhs = self.rows[r], self.rhs[r]
        for k, other in enumerate(self.rows):
            f = other[j]
            if k == r or f == 0:
                continue
            self.rows[k] = [a - f * b for a, b in zip(other, prow)]
            self.rhs[k] = self.rhs[k] - f * prhs
        self.basis[r] = j
        self.iterations += 1

    def reduced_costs(self, cost, allowed):
        m = len(self.rows)
        cb = [cost[self.basis[r]] for r in range(m)]
        out = {}
        for j in allowed:
            out[j] = cost[j] - sum((cb[r] * self.rows[r][j] for r in range(m)), self.zero)
        return out

    def optimise(self, cost, allowed) -> str:
        """Minimise ``cost`` over the columns in ``allowed``; Bland's rule."""
        allowed = sorted(allowed)
        while True:
            rc = self.reduced_costs(cost, allowed)
            entering = next((j for j in allowed if rc[j] < -self.tol and j not in self.basis), None)
            if entering is None:
                return "optimal"
            best, leave = None, None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > self.tol:
                    ratio = self.rhs[r] / a
                    if (best is None or ratio < best - self.tol
                            or (abs(ratio - best) <= self.tol and self.basis[r] < self.basis[leave])):
                        best, leave = ratio, r
            if leave is None:
                return "unbounded"
            self.pivot(leave, entering)


def solve_lp(lp: LinearProgram, exact: bool = False) -> LPResult:
    conv = Fraction if exact else float
    tol = 0 if exact else TOL
    zero = conv(0)
    n = lp.num_vars
    n_ub, n_eq = len(lp.A_ub), len(lp.A_eq)
    m = n_ub + n_eq
    n_cols = n + n_ub + m  # structural, slack, artificial
    rows, rhs = [], []
    for k, (row, b) in enumerate(list(zip(lp.A_ub, lp.b_ub)) + list(zip(lp.A_eq, lp.b_eq))):
        full = [conv(a) for a in row] + [zero] * (n_ub + m)
        if k < n_ub:
            full[n + k] = conv(1)
        b = conv(b)
        if b < 0:
            full = [-a for a in full]
            b = -b
        full[n + n_ub + k] = conv(1)
        rows.append(full)
        rhs.append(b)
    basis = [n + n_ub + k for k in range(m)]
    tab = _Tableau(rows, rhs, basis, tol, zero)

    artificial = set(range(n + n_ub, n_cols))
    phase1 = [zero] * (n + n_ub) + [conv(1)] * m
    tab.optimise(phase1, range(n_cols))
    infeas = sum((tab.rhs[r] for r in range(m) if tab.basis[r] in artificial), zero)
    if infeas > (tol * max(1, m) if not exact else 0):
        return LPResult("infeasible", iterations=tab.iterations)

    # drive remaining artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] in artificial:
            j = next((j for j in range(n + n_ub) if abs(tab.rows[r][j]) > tol), None)
            if j is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
                continue
            tab.pivot(r, j)
        r += 1

    cost = [conv(a) for a in lp.c] + [zero] * (n_ub + m)
    status = tab.optimise(cost, range(n + n_ub))
    if status == "unbounded":
        return LPResult("unbounded", iterations=tab.iterations)
    x = [zero] * (n + n_ub)
    for r, j in enumerate(tab.basis):
        x[j] = tab.rhs[r]
    x = x[:n]
    if not exact:
        x = [0.0 if abs(v) < tol else v for v in x]
    objective = sum((conv(a) * v for a, v in zip(lp.c, x)), zero)
    return LPResult("optimal", x, objective, tab.iterations)
