"""Fidelity between states of a polytope theory.

F(w, s) = inf over observables of sum_x sqrt(<A_x, w> <A_x, s>).

The summand sqrt(a b) is concave and positively homogeneous, hence
superadditive: splitting an effect into pieces never raises the sum.  Every
effect is a nonnegative combination of extreme rays of the effect cone, so
the infimum is attained by an observable whose effects are multiples of
distinct extreme rays.  Writing such an observable as sum_r lam_r r = u
turns the objective linear in lam, and the infimum becomes a finite LP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Observable, StateSpace, as_state, convex_weights, perfectly_distinguishable_pair
from .lp import TOL, LpProblem, Tolerances, lp_solve


@dataclass(frozen=True)
class FidelityResult:
    value: float
    witness_observable: Optional[Observable]
    certified_zero: bool
    # set when the value only bounds the infimum from above; the LP over
    # extreme rays is exact, so this stays False for every supported space
    upper_bound: bool = False

    def __float__(self):
        return self.value


def fidelity_is_zero(space: StateSpace, a, b, tol: Tolerances = None) -> bool:
    """Exact zero test: some effect equals 1 on ``a`` and 0 on ``b``."""
    return perfectly_distinguishable_pair(space, a, b, tol)


def bhattacharyya(p, q) -> float:
    p = np.clip(np.asarray(p, dtype=float), 0, None)
    q = np.clip(np.asarray(q, dtype=float), 0, None)
    return float(np.sqrt(p * q).sum())


def fidelity(space: StateSpace, a, b, tol: Tolerances = None) -> FidelityResult:
    tol = tol or TOL
    a = as_state(space, a, tol)
    b = as_state(space, b, tol)
    if np.abs(a - b).max() <= tol.eps_eq:
        return FidelityResult(1.0, Observable(space.unit.reshape(1, -1).copy()), False)
    if fidelity_is_zero(space, a, b, tol):
        obs = _ray_lp(space, a, b, tol)[1]
        return FidelityResult(0.0, obs, True)
    if space.is_simplex:
        # barycentric coordinates are unique on a simplex
        p = convex_weights(space, a, tol)
        q = convex_weights(space, b, tol)
        obs = Observable(np.linalg.inv(space.extreme_points).T.copy())
        return FidelityResult(min(1.0, bhattacharyya(p, q)), obs, False)
    value, obs = _ray_lp(space, a, b, tol)
    return FidelityResult(float(np.clip(value, 0.0, 1.0)), obs, False)


def _ray_lp(space: StateSpace, a, b, tol: Tolerances):
    R = space.effect_rays
    cost = np.sqrt(np.clip(R @ a, 0, None) * np.clip(R @ b, 0, None))
    res = lp_solve(LpProblem(c=cost, A_eq=R.T, b_eq=space.unit), tol)
    if not res.optimal:  # pragma: no cover - the unit effect is interior to the cone
        raise RuntimeError(f"fidelity LP ended {res.status}")
    keep = np.flatnonzero(res.x > 1e-12)
    return res.value, Observable(res.x[keep, None] * R[keep])


def observable_overlap(obs: Observable, a, b) -> float:
    """sum_x sqrt(<A_x, a> <A_x, b>) for a given observable."""
    return bhattacharyya(obs.effects @ np.asarray(a, dtype=float), obs.effects @ np.asarray(b, dtype=float))
