"""Dense bounded-variable primal simplex.

Every LP in the package is small (at most N*T boxed variables), so the
solver favours determinism and vertex output over speed: Bland's rule for
both entering and leaving choices, a full tableau, no presolve. Upper bounds
are handled implicitly by complementing a variable (y -> u - y) whenever it
moves to its upper bound, so every nonbasic variable sits at zero in its
current orientation.

The float path uses absolute tolerances of 1e-9. If it stalls, meets a tiny
pivot, or returns a point whose residual exceeds the tolerance, the same
algorithm is rerun on ``Fraction`` data with zero tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import NumericalFailure

log = logging.getLogger(__name__)

LE, GE, EQ = "<=", ">=", "=="
OPTIMAL, INFEASIBLE = "optimal", "infeasible"

TAU_FEAS = 1e-9
TAU_OPT = 1e-9
_PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class LinearProgram:
    """maximize c.x  s.t.  A x (senses) b,  lo <= x <= hi  (all bounds finite)."""

    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        n = len(self.c)
        if self.A.shape != (len(self.senses), n) and not (len(self.senses) == 0 and self.A.size == 0):
            raise ValueError(f"A has shape {self.A.shape}, expected ({len(self.senses)}, {n})")
        if len(self.b) != len(self.senses) or len(self.lo) != n or len(self.hi) != n:
            raise ValueError("inconsistent LP dimensions")
        if any(s not in (LE, GE, EQ) for s in self.senses):
            raise ValueError(f"unknown relation in {set(self.senses)}")
        if np.any(np.asarray(self.lo, dtype=float) > np.asarray(self.hi, dtype=float)):
            raise ValueError("lo > hi for some variable")

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.senses)


class LpBuilder:
    """Incremental construction of a :class:`LinearProgram` with sparse rows."""

    def __init__(self, n: int):
        self.n = n
        self.c = np.zeros(n)
        self.lo = np.zeros(n)
        self.hi = np.ones(n)
        self._rows: list[tuple[Mapping[int, float], str, float]] = []

    def add_row(self, coeffs: Mapping[int, float], sense: str, rhs: float) -> int:
        self._rows.append((dict(coeffs), sense, float(rhs)))
        return len(self._rows) - 1

    def fix(self, j: int, value: float) -> None:
        self.lo[j] = self.hi[j] = value

    def build(self) -> LinearProgram:
        A = np.zeros((len(self._rows), self.n))
        for r, (coeffs, _, _) in enumerate(self._rows):
            for j, a in coeffs.items():
                A[r, j] += a
        return LinearProgram(
            self.c.copy(), A, tuple(s for _, s, _ in self._rows),
            np.array([rhs for _, _, rhs in self._rows], dtype=float),
            self.lo.copy(), self.hi.copy(),
        )


@dataclass(frozen=True)
class LpOutcome:
    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    exact: bool = False

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass(frozen=True)
class Residuals:
    row_violation: float
    bound_violation: float

    @property
    def max_violation(self) -> float:
        return max(self.row_violation, self.bound_violation)

    def ok(self, tau: float = TAU_FEAS) -> bool:
        return self.max_violation <= tau


def check_solution(lp: LinearProgram, x: Sequence[float], tau: float = TAU_FEAS) -> Residuals:
    """Largest constraint and bound violation of ``x``; ``tau`` only feeds ``ok``."""
    x = np.asarray(x, dtype=float)
    if len(x) != lp.n:
        raise ValueError(f"|x| = {len(x)} but LP has {lp.n} variables")
    row = 0.0
    if lp.m:
        ax = np.asarray(lp.A, dtype=float) @ x
        b = np.asarray(lp.b, dtype=float)
        for r, s in enumerate(lp.senses):
            if s == LE:
                v = ax[r] - b[r]
            elif s == GE:
                v = b[r] - ax[r]
            else:
                v = abs(ax[r] - b[r])
            row = max(row, v)
    lo = np.asarray(lp.lo, dtype=float)
    hi = np.asarray(lp.hi, dtype=float)
    bound = float(max(np.max(lo - x, initial=0.0), np.max(x - hi, initial=0.0)))
    return Residuals(max(row, 0.0), max(bound, 0.0))


def is_vertex(lp: LinearProgram, x: Sequence[float], tol: float = 1e-7) -> bool:
    """True iff the variables strictly inside their bounds are determined by active rows."""
    x = np.asarray(x, dtype=float)
    lo = np.asarray(lp.lo, dtype=float)
    hi = np.asarray(lp.hi, dtype=float)
    free = np.where((x > lo + tol) & (x < hi - tol))[0]
    if len(free) == 0:
        return True
    A = np.asarray(lp.A, dtype=float)
    b = np.asarray(lp.b, dtype=float)
    active = [r for r in range(lp.m) if abs(A[r] @ x - b[r]) <= tol]
    if len(active) < len(free):
        return False
    return np.linalg.matrix_rank(A[np.ix_(active, free)], tol=1e-9) == len(free)


class _Tableau:
    """Simplex state over columns [structural | slack | artificial]."""

    def __init__(self, lp: LinearProgram, exact: bool):
        self.exact = exact
        if exact:
            conv = np.vectorize(lambda v: Fraction(v) if not isinstance(v, Fraction) else v,
                                otypes=[object])
            A = conv(lp.A) if lp.A.size else np.zeros((0, lp.n), dtype=object)
            b, c, lo, hi = conv(lp.b) if lp.m else np.zeros(0, dtype=object), conv(lp.c), conv(lp.lo), conv(lp.hi)
            zero, one = Fraction(0), Fraction(1)
            self.tol = zero
            self.dtype = object
        else:
            A = np.asarray(lp.A, dtype=float).reshape(lp.m, lp.n)
            b, c = np.asarray(lp.b, dtype=float), np.asarray(lp.c, dtype=float)
            lo, hi = np.asarray(lp.lo, dtype=float), np.asarray(lp.hi, dtype=float)
            zero, one = 0.0, 1.0
            self.tol = _PIVOT_TOL
            self.dtype = float
        m, n = A.shape
        self.n, self.lo, self.c = n, lo, c
        rhs = b - A.dot(lo) if m else b

        n_slack = sum(1 for s in lp.senses if s != EQ)
        slack_sign = np.zeros(m, dtype=self.dtype)
        slack_col = [-1] * m
        k = 0
        for r, s in enumerate(lp.senses):
            if s != EQ:
                slack_col[r] = n + k
                slack_sign[r] = one if s == LE else -one
                k += 1
        flip_row = [rhs[r] < 0 for r in range(m)]
        needs_art = [
            slack_col[r] < 0 or (slack_sign[r] > 0) == flip_row[r] for r in range(m)
        ]
        n_art = sum(needs_art)
        width = n + n_slack + n_art
        M = np.zeros((m, width), dtype=self.dtype)
        if self.exact:
            M[:, :] = zero
        M[:, :n] = A
        basis = [0] * m
        a = n + n_slack
        for r in range(m):
            if slack_col[r] >= 0:
                M[r, slack_col[r]] = slack_sign[r]
            if flip_row[r]:
                M[r] = -M[r]
                rhs[r] = -rhs[r]
            if needs_art[r]:
                M[r, a] = one
                basis[r] = a
                a += 1
            else:
                basis[r] = slack_col[r]
        inf = float("inf")
        self.u = np.empty(width, dtype=object if exact else float)
        self.u[:n] = hi - lo
        self.u[n:] = inf
        self.M = M
        self.beta = rhs.astype(self.dtype) if not exact else rhs
        self.basis = basis
        self.flipped = np.zeros(width, dtype=bool)
        self.n_struct_slack = n + n_slack
        self.width = width
        self.zero = zero

    # -- pivoting -----------------------------------------------------------

    def _pivot(self, r: int, j: int) -> None:
        M, beta = self.M, self.beta
        p = M[r, j]
        if not self.exact and abs(p) < 1e-11:
            raise NumericalFailure(f"pivot element {p:.3e} too small")
        M[r] = M[r] / p
        beta[r] = beta[r] / p
        col = M[:, j].copy()
        col[r] = self.zero
        if self.exact:
            for i in np.nonzero(col)[0]:
                M[i] = M[i] - col[i] * M[r]
                beta[i] = beta[i] - col[i] * beta[r]
        else:
            M -= np.outer(col, M[r])
            beta -= col * beta[r]
        dj = self.d[j]
        self.d = self.d - dj * M[r]
        self.z = self.z + dj * beta[r]
        self.basis[r] = j

    def _complement_nonbasic(self, j: int) -> None:
        uj = self.u[j]
        self.beta = self.beta - uj * self.M[:, j]
        self.M[:, j] = -self.M[:, j]
        self.z = self.z + self.d[j] * uj
        self.d[j] = -self.d[j]
        self.flipped[j] = not self.flipped[j]

    def _complement_basic(self, r: int) -> None:
        jb = self.basis[r]
        self.M[r] = -self.M[r]
        self.M[r, jb] = -self.M[r, jb]
        self.beta[r] = self.u[jb] - self.beta[r]
        self.flipped[jb] = not self.flipped[jb]

    def run(self, allowed: int, max_iter: int) -> None:
        """Optimize the current reduced-cost row over columns ``< allowed``."""
        tol = self.tol
        inf = float("inf")
        for _ in range(max_iter):
            in_basis = np.zeros(self.width, dtype=bool)
            in_basis[self.basis] = True
            j = -1
            for k in range(allowed):
                if not in_basis[k] and self.u[k] != 0 and self.d[k] > tol:
                    j = k
                    break
            if j < 0:
                return
            col = self.M[:, j]
            # bound flip of the entering variable competes with every row;
            # ties go to the row, and among rows to the smallest basic index
            best, leave, to_upper = self.u[j], -1, False
            for r in range(len(self.basis)):
                a = col[r]
                if a > tol:
                    lim, up = self.beta[r] / a, False
                elif a < -tol and self.u[self.basis[r]] != inf:
                    lim, up = (self.u[self.basis[r]] - self.beta[r]) / (-a), True
                else:
                    continue
                if lim < 0:
                    lim = self.zero
                if leave < 0:
                    take = lim <= best
                else:
                    take = lim < best - tol or (
                        lim <= best + tol and self.basis[r] < self.basis[leave])
                if take:
                    best, leave, to_upper = min(best, lim), r, up
            if best == inf:
                raise NumericalFailure("unbounded direction in a boxed LP")
            if leave < 0:
                self._complement_nonbasic(j)
                continue
            if to_upper:
                self._complement_basic(leave)
            self._pivot(leave, j)
        raise NumericalFailure(f"simplex did not converge in {max_iter} iterations")

    # -- phases -------------------------------------------------------------

    def solve(self) -> LpOutcome:
        m = len(self.basis)
        max_iter = 200 * (self.width + m + 1)
        art_start = self.n_struct_slack
        if art_start < self.width:
            cost = np.zeros(self.width, dtype=self.dtype)
            if self.exact:
                cost[:] = self.zero
            cost[art_start:] = -1
            self._set_costs(cost, self.zero)
            self.run(self.width, max_iter)
            if self.z < -(TAU_FEAS if not self.exact else 0):
                return LpOutcome(INFEASIBLE, exact=self.exact)
            self._drive_out_artificials(art_start)
            self.M = self.M[:, :art_start]
            self.u = self.u[:art_start]
            self.flipped = self.flipped[:art_start]
            self.width = art_start
        cost = np.zeros(self.width, dtype=self.dtype)
        if self.exact:
            cost[:] = self.zero
        cost[:self.n] = self.c
        const = self.zero
        for j in np.nonzero(self.flipped)[0]:
            const = const + cost[j] * self.u[j]
            cost[j] = -cost[j]
        self._set_costs(cost, const)
        self.run(self.width, max_iter)
        return LpOutcome(OPTIMAL, self._primal(), None, self.exact)

    def _set_costs(self, cost: np.ndarray, const) -> None:
        cb = cost[self.basis] if self.basis else np.zeros(0, dtype=self.dtype)
        self.d = cost - (cb.dot(self.M) if len(self.basis) else 0)
        self.z = const + (cb.dot(self.beta) if len(self.basis) else self.zero)

    def _drive_out_artificials(self, art_start: int) -> None:
        r = 0
        while r < len(self.basis):
            if self.basis[r] < art_start:
                r += 1
                continue
            row = self.M[r, :art_start]
            cands = [k for k in range(art_start)
                     if k not in self.basis and abs(row[k]) > self.tol]
            if cands:
                self._pivot(r, cands[0])
                r += 1
            else:
                keep = [i for i in range(len(self.basis)) if i != r]
                self.M = self.M[keep]
                self.beta = self.beta[keep]
                del self.basis[r]

    def _primal(self) -> np.ndarray:
        y = np.zeros(self.width, dtype=self.dtype)
        if self.exact:
            y[:] = self.zero
        for r, j in enumerate(self.basis):
            y[j] = self.beta[r]
        for j in np.nonzero(self.flipped)[0]:
            y[j] = self.u[j] - y[j]
        x = self.lo + y[:self.n]
        return x


def _finish(lp: LinearProgram, out: LpOutcome) -> LpOutcome:
    if not out.optimal:
        return out
    x = np.asarray([float(v) for v in out.x])
    lo = np.asarray(lp.lo, dtype=float)
    hi = np.asarray(lp.hi, dtype=float)
    x = np.minimum(np.maximum(x, lo), hi)
    obj = float(np.dot(np.asarray(lp.c, dtype=float), x))
    if out.exact:
        obj = float(sum(Fraction(ci) * xi for ci, xi in zip(lp.c, out.x)))
    return LpOutcome(OPTIMAL, x, obj, out.exact)


def solve_lp(lp: LinearProgram, exact: bool = False) -> LpOutcome:
    """Optimal basic solution or ``infeasible``.

    The float pass falls back to exact rational pivoting on numerical
    trouble; :class:`NumericalFailure` escapes only if both fail.
    """
    if not exact:
        try:
            out = _finish(lp, _Tableau(lp, exact=False).solve())
            if not out.optimal or check_solution(lp, out.x).ok(TAU_FEAS):
                return out
            log.info("float simplex residual too large; rerunning exactly")
        except NumericalFailure as e:
            log.info("float simplex failed (%s); rerunning exactly", e)
    return _finish(lp, _Tableau(lp, exact=True).solve())
