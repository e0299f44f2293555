"""Regular polygon theories and the approximate-programming game.

Pure states are indexed 0..M-1.  The extreme effect ``e_i`` is indexed the
same way (``e_0`` coincides with ``e_M``), so the success functional pairs
effect ``i`` with state ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .channels import Channel, make_channel, min_tensor
from .core import (Observable, StateSpace, make_state_space, simplex, validate_observable)
from .lp import TOL, LpProblem, Tolerances, lp_solve


class GameError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PolygonTheory:
    sides: int
    space: StateSpace
    effects: np.ndarray  # e_i, one per row
    r_squared: float

    @property
    def extreme_effects(self) -> np.ndarray:
        """e_i, plus u - e_i for odd M."""
        if self.sides % 2 == 0:
            return self.effects
        return np.vstack([self.effects, self.space.unit - self.effects])

    @property
    def states(self) -> np.ndarray:
        return self.space.extreme_points


def polygon_theory(M: int) -> PolygonTheory:
    if M < 3:
        raise ValueError(f"a polygon needs at least 3 sides, got {M}")
    r2 = 1.0 / np.cos(np.pi / M)
    ang = 2 * np.pi * np.arange(M) / M
    pts = np.column_stack([r2 * np.cos(ang), r2 * np.sin(ang), np.ones(M)])
    if M % 2 == 0:
        a = (2 * np.arange(M) - 1) * np.pi / M
        eff = 0.5 * np.column_stack([np.cos(a), np.sin(a), np.ones(M)])
    else:
        eff = np.column_stack([np.cos(ang), np.sin(ang), np.ones(M)]) / (1 + r2)
    # the vertex formula is exact up to rounding, so the LP extremality check is skipped
    space = make_state_space(pts, [0.0, 0.0, 1.0], name=f"polygon{M}", validate=False)
    eff.setflags(write=False)
    return PolygonTheory(M, space, eff, float(r2))


@dataclass(frozen=True)
class HelstromFamily:
    conjugates: np.ndarray  # t_i, one per row
    weight: float
    mixture: np.ndarray  # the common point weight*w_i + (1-weight)*t_i

    def bound(self, M: int) -> float:
        return 1.0 / (M * self.weight)


def helstrom_family(pt: PolygonTheory, tol: Tolerances = None) -> HelstromFamily:
    """Conjugate states and common weight for the uniform-prior discrimination bound."""
    tol = tol or TOL
    M, W = pt.sides, pt.states
    idx = np.arange(M)
    if M % 2 == 0:
        t = W[(idx + M // 2) % M]
        p = 0.5
    else:
        t = 0.5 * (W[(idx + (M - 1) // 2) % M] + W[(idx + (M + 1) // 2) % M])
        # edge midpoints sit at distance 1 from the centre, vertices at r^2
        p = 1.0 / (1.0 + pt.r_squared)
    mixtures = p * W + (1 - p) * t
    if p < 1.0 / M - tol.eps_eq:
        raise AssertionError(f"weight {p} below 1/M")
    spread = np.abs(mixtures - mixtures[0]).max()
    if spread > tol.eps_eq:
        raise AssertionError(f"Helstrom mixtures differ by {spread:.3g}")
    return HelstromFamily(t, p, mixtures[0])


def polygon_optimal_observable(pt: PolygonTheory, tol: Tolerances = None) -> Observable:
    tol = tol or TOL
    M = pt.sides
    coef = 2.0 / M if M % 2 == 0 else (1 + pt.r_squared) / M
    obs = validate_observable(pt.space, coef * pt.effects, tol=tol)
    fam = helstrom_family(pt, tol)
    vals = np.einsum("ij,ij->i", obs.effects, fam.conjugates)
    if np.abs(vals).max() > tol.eps_eq:
        raise AssertionError(f"optimal effects do not vanish on conjugates: {vals}")
    return obs


def success_probability(states, obs: Observable) -> float:
    """Uniform-prior probability of guessing the index of the prepared state."""
    S = np.atleast_2d(np.asarray(states, dtype=float))
    if len(S) != len(obs):
        raise ValueError(f"{len(S)} states but {len(obs)} outcomes")
    return float(np.einsum("ij,ij->", obs.effects, S) / len(S))


def max_success_lp(pt: PolygonTheory, tol: Tolerances = None, states=None):
    """LP optimum of the uniform discrimination problem and an optimiser.

    ``states`` overrides the order of the targets (used for relabelling
    checks).
    """
    tol = tol or TOL
    W = pt.states if states is None else np.asarray(states, dtype=float)
    M, d = W.shape
    V = pt.space.extreme_points
    n = len(V)
    c = W.ravel() / M  # maximise sum_i <A_i, w_i> / M
    A_eq = np.tile(np.eye(d), M)
    A_ub = np.zeros((M * n, M * d))
    for i in range(M):
        A_ub[i * n:(i + 1) * n, i * d:(i + 1) * d] = -V
    res = lp_solve(LpProblem(c=c, A_eq=A_eq, b_eq=pt.space.unit, A_ub=A_ub, b_ub=np.zeros(M * n),
                             bounds=[(None, None)] * (M * d), maximize=True), tol)
    if not res.optimal:  # pragma: no cover
        raise RuntimeError(f"discrimination LP ended {res.status}")
    obs = validate_observable(pt.space, res.x.reshape(M, d), tol=tol)
    return res.value, obs


def closed_form_optimum(M: int) -> float:
    if M % 2 == 0:
        return 2.0 / M
    return (1 + 1 / np.cos(np.pi / M)) / M


def classical_bit_baseline(M: int) -> float:
    return 2.0 / M


# --------------------------------------------------------------------------
# the game


def cyclic_permutations(N: int, M: int) -> List[np.ndarray]:
    """pi_i(n) = (n + i) mod N, 0-based, for i = 0..M-1."""
    return [(np.arange(N) + i) % N for i in range(M)]


def game_channel(N: int, pt: PolygonTheory, obs: Observable, perms, validate: bool = True) -> Channel:
    """Channel on simplex(N) (x) polygon whose block maps are
    Theta_k^n(xi) = <A_k^n, xi> xi_k^n, with A^n_{pi_i(n)} = A_i.

    The re-prepared state xi_k^n is the pure state k mod M.
    """
    M = pt.sides
    d = pt.space.dim
    comp = min_tensor(simplex(N), pt.space)
    mat = np.zeros((N * d, N * d))
    for n in range(N):
        effects = np.zeros((N, d))
        for i in range(M):
            effects[perms[i][n]] = obs.effects[i]
        # outcomes no permutation reaches get zero effects
        for k in range(N):
            prep = pt.states[k % M]
            mat[k * d:(k + 1) * d, n * d:(n + 1) * d] = np.outer(prep, effects[k])
    if validate:
        return make_channel(mat, comp.space, comp.space)
    return Channel(mat, comp.space, comp.space)


def block_map(channel: Channel, k: int, n: int, d: int) -> np.ndarray:
    """Theta_k^n read off a channel on simplex(N) (x) apparatus."""
    return channel.matrix[k * d:(k + 1) * d, n * d:(n + 1) * d]


def game_success(channel: Channel, pt: PolygonTheory, perms) -> float:
    """Average success over the M dynamics and the N classical inputs."""
    M = pt.sides
    d = pt.space.dim
    N = channel.matrix.shape[0] // d
    u = pt.space.unit
    total = 0.0
    for i in range(M):
        for n in range(N):
            A = block_map(channel, perms[i][n], n, d).T @ u
            total += A @ pt.states[i]
    return total / (M * N)


def aggregate_tail(effects, M: int) -> np.ndarray:
    """Identify an N-outcome family with an M-outcome one by merging outcomes M-1..N-1."""
    E = np.atleast_2d(np.asarray(effects, dtype=float))
    if len(E) < M:
        raise GameError(f"{len(E)} outcomes cannot be identified with {M}")
    return np.vstack([E[:M - 1], E[M - 1:].sum(axis=0, keepdims=True)])


def reduced_observable(channel: Channel, pt: PolygonTheory, perms, n: int) -> Observable:
    """The observable the channel applies to the apparatus on classical input n.

    Outcomes are reordered so that outcome i is the one dynamics i expects;
    outcomes no dynamics expects are merged into the last.
    """
    d = pt.space.dim
    N = channel.matrix.shape[0] // d
    u = pt.space.unit
    raw = np.array([block_map(channel, k, n, d).T @ u for k in range(N)])
    hit = [int(perms[i][n]) for i in range(pt.sides)]
    order = hit + [k for k in range(N) if k not in hit]
    return validate_observable(pt.space, aggregate_tail(raw[order], pt.sides))


@dataclass
class GameReport:
    sides: int
    system: int
    permutations: list
    achieved: float
    lp_value: float
    closed_form: float
    baseline: float
    observable: Observable = field(repr=False)
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def row(self) -> dict:
        return {"M": self.sides, "N": self.system, "lp_value": self.lp_value,
                "closed_form": self.closed_form, "baseline": self.baseline,
                "achieved": self.achieved, "verdict": "PASS" if self.passed else "FAIL"}


def run_game(N: int, M: int, tol: Tolerances = None, validate: bool = True) -> GameReport:
    tol = tol or TOL
    if N < M:
        raise GameError(f"system size {N} smaller than the number of dynamics {M}")
    pt = polygon_theory(M)
    value, obs = max_success_lp(pt, tol)
    perms = cyclic_permutations(N, M)
    ch = game_channel(N, pt, obs, perms, validate=validate)
    achieved = game_success(ch, pt, perms)
    closed = closed_form_optimum(M)
    base = classical_bit_baseline(M)
    reduced = [success_probability(pt.states, reduced_observable(ch, pt, perms, n)) for n in range(N)]
    verdicts = {
        "channel_matches_lp": abs(achieved - value) <= tol.eps_eq,
        "reduced_observables_match": max(abs(r - value) for r in reduced) <= tol.eps_eq,
        "lp_matches_closed_form": abs(value - closed) <= tol.eps_eq,
        "at_least_baseline": value >= base - tol.eps_eq,
    }
    return GameReport(M, N, [p.tolist() for p in perms], achieved, value, closed, base, obs, verdicts)
