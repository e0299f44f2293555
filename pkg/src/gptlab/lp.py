"""Dense linear algebra and a two-phase simplex solver.

Problems here are tiny (a few hundred variables at most), so everything is
dense.  The pivoting loop lives in :mod:`gptlab.kernels`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels

PIVOT_TOL = 1e-10


class LpError(ValueError):
    """Structurally malformed LP (dimension mismatch, bad bounds)."""


@dataclass(frozen=True)
class Tolerances:
    eps_feas: float = 1e-9
    eps_eq: float = 1e-7

    def __post_init__(self):
        if not 0 < self.eps_feas <= self.eps_eq < 1:
            raise ValueError(f"need 0 < eps_feas <= eps_eq < 1, got {self.eps_feas}, {self.eps_eq}")


def default_tolerances() -> Tolerances:
    """Defaults, with ``GPTLAB_TOL`` overriding eps_eq when set."""
    raw = os.environ.get("GPTLAB_TOL")
    if not raw:
        return Tolerances()
    eps_eq = float(raw)
    return Tolerances(eps_feas=min(1e-9, eps_eq), eps_eq=eps_eq)


TOL = default_tolerances()


@dataclass
class LpProblem:
    """minimise (or maximise) ``c @ x`` subject to equality/inequality rows.

    ``bounds`` is a list of ``(lo, hi)`` pairs with ``None`` for an infinite
    side; omitted bounds mean ``x >= 0``.
    """

    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    bounds: Optional[Sequence[tuple]] = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "eq")
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "ub")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        elif len(self.bounds) != n:
            raise LpError(f"{len(self.bounds)} bounds for {n} variables")
        for lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise LpError(f"empty bound interval ({lo}, {hi})")

    @property
    def n(self) -> int:
        return self.c.size

    def violation(self, x: np.ndarray) -> float:
        """Largest constraint violation of ``x``."""
        worst = 0.0
        if self.A_eq.shape[0]:
            worst = max(worst, np.abs(self.A_eq @ x - self.b_eq).max())
        if self.A_ub.shape[0]:
            worst = max(worst, (self.A_ub @ x - self.b_ub).max())
        for xi, (lo, hi) in zip(x, self.bounds):
            if lo is not None:
                worst = max(worst, lo - xi)
            if hi is not None:
                worst = max(worst, xi - hi)
        return float(worst)


def _rows(A, b, n, tag):
    if A is None:
        if b is not None and np.size(b):
            raise LpError(f"b_{tag} given without A_{tag}")
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[0] == 0:
        return np.zeros((0, n)), np.zeros(0)
    if A.shape[1] != n:
        raise LpError(f"A_{tag} has {A.shape[1]} columns, objective has {n}")
    if A.shape[0] != b.size:
        raise LpError(f"A_{tag} has {A.shape[0]} rows, b_{tag} has {b.size}")
    return A, b


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[float] = None
    x: Optional[np.ndarray] = None
    # Farkas vector for infeasible problems, indexed like the stacked rows
    # [A_eq; A_ub; finite upper bounds]
    certificate: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def feasible(self) -> bool:
        return self.status in ("optimal", "unbounded")


def _standard_form(p: LpProblem):
    """Rewrite as ``A y = b, y >= 0`` with ``x = S y + s0``."""
    n = p.n
    cols = []  # (var index, sign) per y column
    s0 = np.zeros(n)
    extra_rows = []  # (y column, cap) for finite intervals
    for j, (lo, hi) in enumerate(p.bounds):
        if lo is not None:
            s0[j] = lo
            cols.append((j, 1.0))
            if hi is not None:
                extra_rows.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            s0[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    ny = len(cols)
    S = np.zeros((n, ny))
    for k, (j, sgn) in enumerate(cols):
        S[j, k] = sgn

    m_eq, m_ub, m_bd = p.A_eq.shape[0], p.A_ub.shape[0], len(extra_rows)
    m = m_eq + m_ub + m_bd
    n_slack = m_ub + m_bd
    A = np.zeros((m, ny + n_slack))
    b = np.zeros(m)
    A[:m_eq, :ny] = p.A_eq @ S
    b[:m_eq] = p.b_eq - p.A_eq @ s0
    A[m_eq:m_eq + m_ub, :ny] = p.A_ub @ S
    b[m_eq:m_eq + m_ub] = p.b_ub - p.A_ub @ s0
    for r, (k, cap) in enumerate(extra_rows):
        A[m_eq + m_ub + r, k] = 1.0
        b[m_eq + m_ub + r] = cap
    A[m_eq:, ny:] = np.eye(n_slack)
    c = np.zeros(ny + n_slack)
    c[:ny] = p.c @ S
    if p.maximize:
        c = -c
    return A, b, c, S, s0


def lp_solve(problem: LpProblem, tol: Tolerances = None, max_iter: int = 50_000) -> LpResult:
    """Two-phase dense simplex.

    Dantzig pricing switches to Bland's rule after a run of degenerate
    pivots, so the loop always terminates.
    """
    tol = tol or TOL
    A, b, c, S, s0 = _standard_form(problem)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    scale = max(1.0, np.abs(b).max(initial=0.0))

    # phase 1: artificials occupy columns n..n+m-1
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(n, n + m, dtype=np.int64)
    status = kernels.simplex_loop(T, basis, n, PIVOT_TOL, max_iter, 50)
    if status == kernels.ITERATION_LIMIT:
        raise RuntimeError("simplex iteration limit reached in phase 1")
    if -T[m, -1] > tol.eps_feas * scale:
        y = 1.0 - T[m, n:n + m]  # phase-1 duals
        y[flip] *= -1
        return LpResult("infeasible", certificate=y)

    # drive zero-level artificials out of the basis, dropping redundant rows
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= n:
            row = T[i, :n]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-9:
                _pivot(T, i, j)
                basis[i] = j
            else:
                keep[i] = False
    rows = np.flatnonzero(keep)
    T2 = np.zeros((rows.size + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis = basis[rows].copy()
    T2[-1, :n] = c
    for i, j in enumerate(basis):
        T2[-1] -= c[j] * T2[i]
    status = kernels.simplex_loop(T2, basis, n, PIVOT_TOL, max_iter, 50)
    if status == kernels.UNBOUNDED:
        return LpResult("unbounded")
    if status == kernels.ITERATION_LIMIT:
        raise RuntimeError("simplex iteration limit reached in phase 2")

    y = np.zeros(n)
    y[basis] = np.maximum(T2[:-1, -1], 0.0)
    y = _refine(A[rows], b[rows], basis, y)
    x = S @ y[:S.shape[1]] + s0
    value = float(problem.c @ x)
    return LpResult("optimal", value=value, x=x)


def _refine(A, b, basis, y):
    # Recompute the basic solution from the untouched matrix; accumulated
    # tableau error would otherwise eat into eps_feas on larger problems.
    B = A[:, basis]
    ok, yb = kernels.gauss_solve(np.ascontiguousarray(B), b.copy(), 1e-12)
    if not ok or (yb < -1e-9).any():
        return y
    out = np.zeros_like(y)
    out[basis] = np.maximum(yb, 0.0)
    if np.abs(A @ out - b).max() <= np.abs(A @ y - b).max():
        return out
    return y


def _pivot(T, row, col):
    T[row] /= T[row, col]
    f = T[:, col].copy()
    f[row] = 0.0
    T -= np.outer(f, T[row])


# --------------------------------------------------------------------------
# small linear-algebra helpers


def solve_linear(A, b, tol: float = 1e-12) -> np.ndarray:
    """Solve a square system by partial-pivoting elimination."""
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise LpError(f"cannot solve system with shapes {A.shape}, {b.shape}")
    ok, x = kernels.gauss_solve(A, b, tol)
    if not ok:
        raise np.linalg.LinAlgError("singular matrix")
    return x


def rank(A, tol: float = None) -> int:
    """Rank by elimination; pivots below ``tol * max|A|`` count as zero."""
    tol = TOL.eps_feas if tol is None else tol
    M = np.array(A, dtype=float)
    if M.size == 0:
        return 0
    scale = np.abs(M).max()
    if scale == 0:
        return 0
    r = 0
    for k in range(M.shape[1]):
        if r == M.shape[0]:
            break
        p = r + int(np.argmax(np.abs(M[r:, k])))
        if abs(M[p, k]) <= tol * scale:
            continue
        M[[r, p]] = M[[p, r]]
        M[r + 1:] -= np.outer(M[r + 1:, k] / M[r, k], M[r])
        r += 1
    return r


def independent_rows(A, tol: float = None) -> list:
    """Indices of a maximal linearly independent subset of rows, greedy in order."""
    chosen = []
    for i in range(len(A)):
        if rank(np.asarray(A)[chosen + [i]], tol) == len(chosen) + 1:
            chosen.append(i)
    return chosen


def nullspace(A, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as columns) of the null space."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    _, s, vt = np.linalg.svd(A)
    thresh = tol * max(s.max(initial=0.0), 1.0)
    r = int((s > thresh).sum())
    return vt[r:].T.copy()
