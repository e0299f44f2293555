"""Channels, reversible dynamics and bipartite composites.

Composite vectors use the Kronecker ordering ``kron(first, second)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import (Observable, StateSpace, StateSpaceError, contains_state, convex_weights,
                   make_state_space, random_observable, random_state)
from .lp import TOL, LpProblem, Tolerances, lp_solve


class ChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Channel:
    matrix: np.ndarray
    source: StateSpace
    target: StateSpace

    def __call__(self, state) -> np.ndarray:
        return self.matrix @ np.asarray(state, dtype=float)

    @property
    def dual(self) -> np.ndarray:
        """Matrix of the Heisenberg-picture map on effects."""
        return self.matrix.T

    def __repr__(self):
        return f"Channel({self.source.name} -> {self.target.name})"


def same_space(a: StateSpace, b: StateSpace, tol: Tolerances = None) -> bool:
    if a is b:
        return True
    tol = tol or TOL
    if a.dim != b.dim or a.n_pure != b.n_pure:
        return False
    if np.abs(a.unit - b.unit).max() > tol.eps_eq:
        return False
    # same point set, any order
    dist = np.abs(a.extreme_points[:, None, :] - b.extreme_points[None, :, :]).max(axis=2)
    return bool((dist.min(axis=1) <= tol.eps_eq).all() and (dist.min(axis=0) <= tol.eps_eq).all())


def _membership_certificate(space: StateSpace, v):
    # Farkas vector of the failed convex-combination LP
    P = space.extreme_points
    n = space.n_pure
    res = lp_solve(LpProblem(c=np.zeros(n), A_eq=np.vstack([P.T, np.ones(n)]), b_eq=np.append(v, 1.0)))
    return res.certificate


def make_channel(matrix, source: StateSpace, target: StateSpace, tol: Tolerances = None) -> Channel:
    """Validate that ``matrix`` sends every pure state of ``source`` into ``target``."""
    tol = tol or TOL
    L = np.array(matrix, dtype=float)
    if L.shape != (target.dim, source.dim):
        raise ChannelError(f"matrix of shape {L.shape} between spaces of dimension "
                           f"{source.dim} and {target.dim}")
    images = source.extreme_points @ L.T
    norm = images @ target.unit
    bad = np.flatnonzero(np.abs(norm - 1) > tol.eps_eq)
    if bad.size:
        raise ChannelError(f"pure state {bad[0]} is mapped to a vector of unit value {norm[bad[0]]:.6g}")
    for i, v in enumerate(images):
        if not contains_state(target, v, tol):
            cert = _membership_certificate(target, v)
            raise ChannelError(f"pure state {i} of {source.name} is mapped outside {target.name} "
                               f"(image {np.round(v, 6).tolist()}, certificate {cert})")
    L.setflags(write=False)
    return Channel(L, source, target)


def identity_channel(space: StateSpace) -> Channel:
    return Channel(np.eye(space.dim), space, space)


def compose_channels(a: Channel, b: Channel, tol: Tolerances = None) -> Channel:
    """``b`` after ``a``."""
    if not same_space(a.target, b.source, tol):
        raise ChannelError(f"cannot feed {a.target.name} into a channel on {b.source.name}")
    return make_channel(b.matrix @ a.matrix, a.source, b.target, tol)


def is_reversible(c: Channel, tol: Tolerances = None) -> bool:
    tol = tol or TOL
    if not same_space(c.source, c.target, tol):
        return False
    if np.linalg.matrix_rank(c.matrix, tol=1e-9) < c.matrix.shape[0]:
        return False
    try:
        make_channel(np.linalg.inv(c.matrix), c.target, c.source, tol)
    except ChannelError:
        return False
    return True


def inverse(c: Channel, tol: Tolerances = None) -> Channel:
    if not is_reversible(c, tol):
        raise ChannelError("channel is not reversible")
    return make_channel(np.linalg.inv(c.matrix), c.target, c.source, tol)


def permutation_channel(space: StateSpace, perm) -> Channel:
    """Linear map sending pure state i to pure state perm[i]."""
    perm = np.asarray(perm)
    P = space.extreme_points
    if sorted(perm.tolist()) != list(range(space.n_pure)):
        raise ChannelError(f"{perm.tolist()} is not a permutation of the pure states")
    # solve L P^T = P[perm]^T on a spanning subset of pure states
    L, *_ = np.linalg.lstsq(P, P[perm], rcond=None)
    return make_channel(L.T, space, space)


def measure_and_prepare(obs: Observable, prepared, source: StateSpace, target: StateSpace,
                        tol: Tolerances = None) -> Channel:
    """w -> sum_n <A_n, w> prepared_n."""
    S = np.atleast_2d(np.asarray(prepared, dtype=float))
    if len(S) != len(obs):
        raise ChannelError(f"{len(obs)} outcomes but {len(S)} prepared states")
    return make_channel(S.T @ obs.effects, source, target, tol)


def random_channel(source: StateSpace, target: StateSpace, rng: np.random.Generator,
                   reversible: Optional[Channel] = None) -> Channel:
    """Random measure-and-prepare channel, optionally mixed with a given one."""
    obs = random_observable(source, rng)
    prepared = np.array([random_state(target, rng, 0.3) for _ in range(len(obs))])
    L = prepared.T @ obs.effects
    if reversible is not None:
        t = rng.uniform()
        L = t * reversible.matrix + (1 - t) * L
    return Channel(L, source, target)


# --------------------------------------------------------------------------
# composites


@dataclass(frozen=True, eq=False)
class TensorSpace:
    first: StateSpace
    second: StateSpace
    rule: str  # "min" | "max"
    space: Optional[StateSpace] = None  # materialised for the min rule

    @property
    def unit(self) -> np.ndarray:
        return np.kron(self.first.unit, self.second.unit)

    @property
    def dim(self) -> int:
        return self.first.dim * self.second.dim

    def contains(self, mu, tol: Tolerances = None) -> bool:
        if self.rule == "min":
            return contains_state(self.space, mu, tol)
        return max_tensor_contains(self.first, self.second, mu, tol)


@lru_cache(maxsize=64)
def min_tensor(a: StateSpace, b: StateSpace) -> TensorSpace:
    """Minimal composite: mixtures of products of pure states."""
    pts = np.array([np.kron(p, q) for p in a.extreme_points for q in b.extreme_points])
    space = make_state_space(pts, np.kron(a.unit, b.unit), name=f"{a.name}(x){b.name}", validate=False)
    return TensorSpace(a, b, "min", space)


def max_tensor(a: StateSpace, b: StateSpace) -> TensorSpace:
    return TensorSpace(a, b, "max")


def max_tensor_contains(a: StateSpace, b: StateSpace, mu, tol: Tolerances = None) -> bool:
    """Normalised and nonnegative on every product of extreme effects."""
    tol = tol or TOL
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.size != a.dim * b.dim:
        raise StateSpaceError(f"vector of dimension {mu.size} for a {a.dim}x{b.dim} composite")
    if abs(np.kron(a.unit, b.unit) @ mu - 1) > tol.eps_eq:
        return False
    vals = a.effect_vertices @ mu.reshape(a.dim, b.dim) @ b.effect_vertices.T
    return bool(vals.min() >= -tol.eps_feas)


def marginal(ts: TensorSpace, mu, keep: str = "first", tol: Tolerances = None) -> np.ndarray:
    """Contract the discarded factor with its unit effect."""
    tol = tol or TOL
    m = np.asarray(mu, dtype=float).reshape(ts.first.dim, ts.second.dim)
    if keep == "first":
        out, space = m @ ts.second.unit, ts.first
    elif keep == "second":
        out, space = ts.first.unit @ m, ts.second
    else:
        raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")
    if not contains_state(space, out, tol):
        raise StateSpaceError("marginal is not a state; the composite vector is invalid")
    return out


def extend_with_identity(c: Channel, ancilla: StateSpace, side: str = "left",
                         tol: Tolerances = None) -> Channel:
    """c (x) id on source (x) ancilla (side='left') or id (x) c on ancilla (x) source."""
    eye = np.eye(ancilla.dim)
    if side == "left":
        L = np.kron(c.matrix, eye)
        src, dst = min_tensor(c.source, ancilla), min_tensor(c.target, ancilla)
    elif side == "right":
        L = np.kron(eye, c.matrix)
        src, dst = min_tensor(ancilla, c.source), min_tensor(ancilla, c.target)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    try:
        return make_channel(L, src.space, dst.space, tol)
    except ChannelError as exc:  # pragma: no cover - impossible for a valid channel
        raise AssertionError(f"extension of a valid channel failed validation: {exc}")


def product_state(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def is_product(ts: TensorSpace, mu, tol: Tolerances = None) -> bool:
    """Whether ``mu`` equals the product of its marginals."""
    tol = tol or TOL
    m = np.asarray(mu, dtype=float).reshape(ts.first.dim, ts.second.dim)
    a = m @ ts.second.unit
    b = ts.first.unit @ m
    return bool(np.abs(np.outer(a, b) - m).max() <= tol.eps_eq)


def min_weights(ts: TensorSpace, mu, tol: Tolerances = None):
    return convex_weights(ts.space, mu, tol)
