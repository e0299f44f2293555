"""State spaces, effects, observables and distinguishability.

States and effects are plain float vectors living in the same carrier
space; an effect acts on a state through the dot product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

from . import kernels
from .lp import TOL, LpProblem, Tolerances, independent_rows, lp_solve, nullspace, rank, solve_linear

# brute-force facet search is used below this many candidate subsets
BRUTE_FORCE_LIMIT = 50_000
MAX_EFFECT_DIM = 6


class StateSpaceError(ValueError):
    pass


class ObservableError(ValueError):
    pass


class UnsupportedError(NotImplementedError):
    pass


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Polytope of states given by its extreme points (one per row)."""

    extreme_points: np.ndarray
    unit: np.ndarray
    name: str = ""
    # carrier slices of direct-sum summands, if built by direct_sum
    blocks: Optional[tuple] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.unit.size

    @property
    def n_pure(self) -> int:
        return self.extreme_points.shape[0]

    def pure(self, i: int) -> np.ndarray:
        return self.extreme_points[i]

    @cached_property
    def barycenter(self) -> np.ndarray:
        return self.extreme_points.mean(axis=0)

    @cached_property
    def is_simplex(self) -> bool:
        return self.n_pure == self.dim

    @cached_property
    def effect_rays(self) -> np.ndarray:
        """Extreme rays of the effect cone, normalised to 1 on the barycenter."""
        return _effect_rays(self)

    @cached_property
    def effect_vertices(self) -> np.ndarray:
        """Vertices of the effect polytope {e : 0 <= e(w) <= 1 on all pure w}."""
        return _effect_vertices(self)

    def __repr__(self):
        return f"StateSpace({self.name!r}, dim={self.dim}, n_pure={self.n_pure})"


def make_state_space(points, unit, name: str = "", validate: bool = True,
                     tol: Tolerances = None, blocks=None) -> StateSpace:
    """Validate a list of extreme points and a unit effect."""
    tol = tol or TOL
    P = np.atleast_2d(np.asarray(points, dtype=float))
    u = np.asarray(unit, dtype=float).ravel()
    if P.size == 0:
        raise StateSpaceError("no extreme points given")
    if P.shape[1] != u.size:
        raise StateSpaceError(f"points have dimension {P.shape[1]}, unit effect {u.size}")
    norms = P @ u
    bad = np.flatnonzero(np.abs(norms - 1) > tol.eps_eq)
    if bad.size:
        raise StateSpaceError(f"unit effect is not 1 on points {bad.tolist()}")
    if validate:
        r = rank(P, tol.eps_feas)
        if r < u.size:
            raise StateSpaceError(f"points span a {r}-dimensional subspace of R^{u.size}")
        redundant = [i for i in range(P.shape[0])
                     if P.shape[0] > 1 and _in_hull(np.delete(P, i, axis=0), P[i], tol)]
        if redundant:
            raise StateSpaceError(f"points {redundant} are not extreme (convex combinations of the others)")
    P.setflags(write=False)
    u.setflags(write=False)
    return StateSpace(P, u, name, blocks)


def simplex(n: int) -> StateSpace:
    if n < 1:
        raise StateSpaceError("a simplex needs at least one pure state")
    return make_state_space(np.eye(n), np.ones(n), name=f"simplex{n}", validate=False)


def direct_sum(spaces: Sequence[StateSpace], name: str = "") -> StateSpace:
    if len(spaces) < 2:
        raise StateSpaceError("direct sum needs at least two summands")
    d = sum(s.dim for s in spaces)
    rows, units, blocks = [], [], []
    off = 0
    for s in spaces:
        emb = np.zeros((s.n_pure, d))
        emb[:, off:off + s.dim] = s.extreme_points
        rows.append(emb)
        units.append(s.unit)
        blocks.append((off, off + s.dim))
        off += s.dim
    name = name or "+".join(s.name for s in spaces)
    return make_state_space(np.vstack(rows), np.concatenate(units), name=name,
                            validate=False, blocks=tuple(blocks))


def _in_hull(P, v, tol: Tolerances) -> bool:
    n = P.shape[0]
    res = lp_solve(LpProblem(c=np.zeros(n), A_eq=np.vstack([P.T, np.ones(n)]),
                             b_eq=np.append(v, 1.0)), tol)
    return res.optimal and np.abs(res.x @ P - v).max() <= tol.eps_feas * 10


def convex_weights(space: StateSpace, v, tol: Tolerances = None) -> Optional[np.ndarray]:
    """Some convex weights over the pure states reproducing ``v``, or None."""
    tol = tol or TOL
    v = np.asarray(v, dtype=float)
    P = space.extreme_points
    n = space.n_pure
    res = lp_solve(LpProblem(c=np.zeros(n), A_eq=np.vstack([P.T, np.ones(n)]),
                             b_eq=np.append(v, 1.0)), tol)
    if not res.optimal:
        return None
    if np.abs(res.x @ P - v).max() > tol.eps_feas * 10:
        return None
    return res.x


def contains_state(space: StateSpace, v, tol: Tolerances = None) -> bool:
    tol = tol or TOL
    v = np.asarray(v, dtype=float).ravel()
    if v.size != space.dim:
        raise StateSpaceError(f"vector of dimension {v.size} in a {space.dim}-dimensional space")
    if abs(space.unit @ v - 1) > tol.eps_eq:
        return False
    return convex_weights(space, v, tol) is not None


def as_state(space: StateSpace, v, tol: Tolerances = None) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if not contains_state(space, v, tol):
        raise StateSpaceError(f"{v} is not a state of {space.name}")
    return v


def random_state(space: StateSpace, rng: np.random.Generator, concentration: float = 1.0) -> np.ndarray:
    w = rng.dirichlet(np.full(space.n_pure, concentration))
    return w @ space.extreme_points


# --------------------------------------------------------------------------
# effect-cone geometry


def _dedupe(rows: np.ndarray, decimals: int = 7) -> np.ndarray:
    rows = np.asarray(rows, dtype=float).reshape(-1, np.shape(rows)[-1])
    if len(rows) == 0:
        return rows
    # +0.0 folds negative zeros into positive ones before comparison
    keys = np.round(rows, decimals) + 0.0
    _, first = np.unique(keys, axis=0, return_index=True)
    return rows[np.sort(first)]


def _effect_rays(space: StateSpace) -> np.ndarray:
    P = space.extreme_points
    n, d = P.shape
    if d == 1:
        return space.unit.reshape(1, 1) / (space.unit @ space.barycenter)
    if space.is_simplex:
        # dual basis of the pure states
        R = np.linalg.inv(P).T
        return R / (R @ space.barycenter)[:, None]
    if math.comb(n, d - 1) <= BRUTE_FORCE_LIMIT:
        return facet_rays_bruteforce(space)
    return facet_rays_qhull(space)


def facet_rays_bruteforce(space: StateSpace) -> np.ndarray:
    P = space.extreme_points
    G = -np.ascontiguousarray(P)
    h = np.zeros(P.shape[0])
    E = space.barycenter.reshape(1, -1).copy()
    raw = kernels.enumerate_vertices(G, h, E, np.ones(1), 1e-9)
    return _dedupe(raw)


def facet_rays_qhull(space: StateSpace) -> np.ndarray:
    P = space.extreme_points
    x0 = space.barycenter
    B = nullspace(space.unit.reshape(1, -1))
    Y = (P - x0) @ B
    hull = ConvexHull(Y)
    rays = []
    for eq in hull.equations:
        normal, off = eq[:-1], eq[-1]
        r = -B @ normal + (normal @ (B.T @ x0) - off) * space.unit
        rays.append(r / (r @ x0))
    return _dedupe(np.array(rays))


def _effect_vertices(space: StateSpace) -> np.ndarray:
    if space.dim > MAX_EFFECT_DIM:
        raise UnsupportedError(
            f"effect-polytope vertex enumeration is limited to dimension {MAX_EFFECT_DIM}, got {space.dim}")
    P = np.ascontiguousarray(space.extreme_points)
    G = np.vstack([P, -P])
    h = np.concatenate([np.ones(space.n_pure), np.zeros(space.n_pure)])
    raw = kernels.enumerate_vertices(G, h, np.zeros((0, space.dim)), np.zeros(0), 1e-9)
    return _dedupe(raw)


def is_effect(space: StateSpace, e, tol: Tolerances = None) -> bool:
    tol = tol or TOL
    vals = space.extreme_points @ np.asarray(e, dtype=float)
    return bool(vals.min() >= -tol.eps_eq and vals.max() <= 1 + tol.eps_eq)


# --------------------------------------------------------------------------
# observables


@dataclass(frozen=True, eq=False)
class Observable:
    effects: np.ndarray  # (outcomes, dim)
    labels: tuple = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(self.effects))))

    def __len__(self):
        return len(self.effects)

    def __getitem__(self, k):
        return self.effects[k]

    def probabilities(self, state) -> np.ndarray:
        return self.effects @ np.asarray(state, dtype=float)


def validate_observable(space: StateSpace, effects, labels=(), tol: Tolerances = None) -> Observable:
    tol = tol or TOL
    E = np.atleast_2d(np.asarray(effects, dtype=float))
    if E.shape[0] == 0:
        raise ObservableError("an observable needs at least one effect")
    if E.shape[1] != space.dim:
        raise ObservableError(f"effects of dimension {E.shape[1]} on a {space.dim}-dimensional space")
    gap = np.abs(E.sum(axis=0) - space.unit).max()
    if gap > tol.eps_feas * max(1, E.shape[0]) * 10:
        raise ObservableError(f"effects sum to the unit effect only up to {gap:.3g}")
    vals = E @ space.extreme_points.T
    for x, row in enumerate(vals):
        if row.min() < -tol.eps_eq or row.max() > 1 + tol.eps_eq:
            worst = int(np.argmin(row)) if row.min() < -tol.eps_eq else int(np.argmax(row))
            raise ObservableError(f"effect {x} takes value {row[worst]:.6g} on pure state {worst}")
    return Observable(E, tuple(labels))


def random_observable(space: StateSpace, rng: np.random.Generator, outcomes: int = None) -> Observable:
    """A random extremal (ray-supported) observable, optionally coarse-grained."""
    R = space.effect_rays
    cost = rng.normal(size=len(R))
    res = lp_solve(LpProblem(c=cost, A_eq=R.T, b_eq=space.unit))
    if not res.optimal:  # pragma: no cover - u is interior to the cone
        raise RuntimeError("could not decompose the unit effect")
    support = np.flatnonzero(res.x > 1e-12)
    effects = res.x[support, None] * R[support]
    if outcomes is not None and outcomes < len(effects):
        groups = rng.integers(0, outcomes, size=len(effects))
        effects = np.array([effects[groups == g].sum(axis=0) for g in range(outcomes)])
    return Observable(effects)


# --------------------------------------------------------------------------
# distinguishability


@dataclass(frozen=True)
class NotDistinguishable:
    """Negative answer carrying the Farkas vector of the infeasible LP."""

    certificate: Optional[np.ndarray] = None

    def __bool__(self):
        return False


def _check_distinct(states, tol):
    for i, j in combinations(range(len(states)), 2):
        if np.abs(states[i] - states[j]).max() <= tol.eps_eq:
            raise ObservableError(f"states {i} and {j} coincide")


def find_distinguishing_observable(space: StateSpace, states, tol: Tolerances = None):
    """Observable with e_x(w_y) = delta_xy, or NotDistinguishable."""
    tol = tol or TOL
    S = np.atleast_2d(np.asarray(states, dtype=float))
    k, d = S.shape
    if k < 2:
        raise ObservableError("need at least two states")
    _check_distinct(S, tol)
    P = space.extreme_points
    n = space.n_pure
    nv = k * d
    # sum of effects equals the unit effect
    A_eq = [np.tile(np.eye(d), k)]
    b_eq = [space.unit]
    # e_x(w_y) = delta_xy
    blk = np.zeros((k * k, nv))
    for x in range(k):
        blk[x * k:(x + 1) * k, x * d:(x + 1) * d] = S
    A_eq.append(blk)
    b_eq.append(np.eye(k).ravel())
    # e_x >= 0 on every pure state
    A_ub = np.zeros((k * n, nv))
    for x in range(k):
        A_ub[x * n:(x + 1) * n, x * d:(x + 1) * d] = -P
    res = lp_solve(LpProblem(c=np.zeros(nv), A_eq=np.vstack(A_eq), b_eq=np.concatenate(b_eq),
                             A_ub=A_ub, b_ub=np.zeros(k * n), bounds=[(None, None)] * nv), tol)
    if not res.optimal:
        return NotDistinguishable(res.certificate)
    effects = res.x.reshape(k, d)
    return validate_observable(space, effects, tol=tol)


def perfectly_distinguishable_pair(space: StateSpace, a, b, tol: Tolerances = None) -> bool:
    """Whether some effect is 1 on ``a`` and 0 on ``b``."""
    tol = tol or TOL
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.abs(a - b).max() <= tol.eps_eq:
        return False
    P = space.extreme_points
    d = space.dim
    res = lp_solve(LpProblem(c=np.zeros(d), A_eq=np.vstack([a, b]), b_eq=[1.0, 0.0],
                             A_ub=np.vstack([P, -P]), b_ub=np.concatenate([np.ones(len(P)), np.zeros(len(P))]),
                             bounds=[(None, None)] * d), tol)
    return res.optimal


def distinguishability_graph(space: StateSpace, candidates=None, tol: Tolerances = None) -> np.ndarray:
    C = space.extreme_points if candidates is None else np.atleast_2d(np.asarray(candidates, dtype=float))
    n = len(C)
    adj = np.zeros((n, n), dtype=bool)
    for i, j in combinations(range(n), 2):
        adj[i, j] = adj[j, i] = perfectly_distinguishable_pair(space, C[i], C[j], tol)
    return adj


def max_clique(adj: np.ndarray) -> list:
    """Exact maximum clique by branch and bound with a greedy-colouring bound."""
    n = len(adj)
    nbrs = [set(np.flatnonzero(adj[v]).tolist()) for v in range(n)]
    best: list = []

    def colour_bound(cands):
        # greedy colouring; colour count bounds the clique size in cands
        order, bounds = [], []
        uncoloured = sorted(cands, key=lambda v: -len(nbrs[v] & cands))
        colour = 0
        while uncoloured:
            colour += 1
            klass: list = []
            rest = []
            for v in uncoloured:
                if all(v not in nbrs[w] for w in klass):
                    klass.append(v)
                else:
                    rest.append(v)
            for v in klass:
                order.append(v)
                bounds.append(colour)
            uncoloured = rest
        return order, bounds

    def expand(clique, cands):
        nonlocal best
        order, bounds = colour_bound(cands)
        for v, b in zip(reversed(order), reversed(bounds)):
            if len(clique) + b <= len(best):
                return
            new = clique + [v]
            sub = cands & nbrs[v]
            if sub:
                expand(new, sub)
            elif len(new) > len(best):
                best = new
            cands = cands - {v}

    if n:
        best = [0]
        expand([], set(range(n)))
    return sorted(best)


def max_pairwise_clique(space: StateSpace, candidates=None, tol: Tolerances = None) -> list:
    """Indices (into ``candidates``, default the pure states) of a largest pairwise distinguishable subset."""
    return max_clique(distinguishability_graph(space, candidates, tol))


# --------------------------------------------------------------------------
# informationally complete observable


def informationally_complete_observable(space: StateSpace, targets, tol: Tolerances = None,
                                        rng: np.random.Generator = None) -> Observable:
    """N-outcome observable whose statistics separate N distinct states.

    Independent targets are completed to a basis with other states of the
    space, the dual basis is read off, all coordinates beyond the targets'
    span are merged into the last outcome, then the family is shifted by a
    multiple of the unit effect and rescaled so it sums to the unit.
    """
    tol = tol or TOL
    T = np.atleast_2d(np.asarray(targets, dtype=float))
    N = len(T)
    if N < 2:
        raise ObservableError("need at least two targets")
    _check_distinct(T, tol)
    d = space.dim
    base = independent_rows(T, tol.eps_feas)
    M = len(base)

    pool = [space.pure(i) for i in range(space.n_pure)]
    pool += [(a + b) / 2 for a, b in combinations(pool[:space.n_pure], 2)]
    pool = [p for p in pool if np.abs(T - p).max(axis=1).min() > tol.eps_eq]
    rng = rng or np.random.default_rng(0)

    for attempt in range(20):
        order = list(range(len(pool))) if attempt == 0 else list(rng.permutation(len(pool)))
        rows = [T[i] for i in base]
        for i in order:
            if len(rows) == d:
                break
            if rank(np.vstack(rows + [pool[i]]), tol.eps_feas) == len(rows) + 1:
                rows.append(pool[i])
        if len(rows) < d:
            continue
        basis = np.array(rows)  # row k is the k-th basis state
        W = np.array([solve_linear(basis, np.eye(d)[:, k]) for k in range(d)])  # row k is w_k
        b = np.vstack([W[:M - 1], W[M - 1:].sum(axis=0, keepdims=True)])
        c = (b @ space.extreme_points.T).min()
        effects = (b - c * space.unit) / (1 - M * c)
        effects = np.vstack([effects, np.zeros((N - M, d))])
        obs = validate_observable(space, effects, tol=tol)
        stats = T @ obs.effects.T
        gaps = [np.abs(stats[i] - stats[j]).max() for i, j in combinations(range(N), 2)]
        if min(gaps) > tol.eps_eq:
            return obs
    raise ObservableError("could not build a separating observable")
