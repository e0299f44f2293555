"""Equivalence classes of pure states and quasi-classical decompositions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .core import Observable, StateSpace, validate_observable
from .fidelity import fidelity_is_zero
from .lp import TOL, LpProblem, Tolerances, lp_solve

MAX_CLASSES = 12


class StructureError(ValueError):
    pass


class AmbiguousVerdict(UserWarning):
    """An LP optimum landed between eps_feas and eps_eq."""


@dataclass(frozen=True, eq=False)
class Partition:
    space: StateSpace
    blocks: tuple  # tuple of sorted index tuples

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise StructureError("partition blocks must be nonempty")
        flat = [i for b in blocks for i in b]
        if sorted(flat) != list(range(self.space.n_pure)):
            raise StructureError(f"blocks {blocks} do not partition the {self.space.n_pure} pure states")
        object.__setattr__(self, "blocks", blocks)

    @property
    def degree(self) -> int:
        return len(self.blocks)

    def labels(self) -> np.ndarray:
        out = np.empty(self.space.n_pure, dtype=int)
        for z, b in enumerate(self.blocks):
            out[list(b)] = z
        return out

    def canonical(self) -> tuple:
        return tuple(sorted(self.blocks))

    def same_as(self, other: "Partition") -> bool:
        return self.canonical() == other.canonical()

    def __repr__(self):
        return f"Partition({self.space.name}, {list(map(list, self.blocks))})"


@dataclass(frozen=True, eq=False)
class QuasiClassicalStructure:
    partition: Partition
    witness: Observable

    @property
    def degree(self) -> int:
        return self.partition.degree

    def check(self, tol: Tolerances = None) -> bool:
        tol = tol or TOL
        vals = self.witness.effects @ self.partition.space.extreme_points.T
        target = np.zeros_like(vals)
        for z, b in enumerate(self.partition.blocks):
            target[z, list(b)] = 1.0
        return bool(np.abs(vals - target).max() <= tol.eps_eq)


def equivalence_decomposition(space: StateSpace, tol: Tolerances = None) -> Partition:
    """Components of the 'not perfectly distinguishable' graph on pure states."""
    n = space.n_pure
    adj = np.zeros((n, n), dtype=bool)
    P = space.extreme_points
    for i in range(n):
        for j in range(i + 1, n):
            adj[i, j] = adj[j, i] = not fidelity_is_zero(space, P[i], P[j], tol)
    count, labels = connected_components(adj, directed=False)
    blocks = [tuple(np.flatnonzero(labels == c)) for c in range(count)]
    blocks.sort(key=min)
    return Partition(space, tuple(blocks))


def _indicator_effect(space: StateSpace, block, tol: Tolerances):
    """Effect equal to 1 on ``block`` and 0 on the other pure states."""
    P = space.extreme_points
    target = np.zeros(space.n_pure)
    target[list(block)] = 1.0
    d = space.dim
    res = lp_solve(LpProblem(c=np.zeros(d), A_eq=P, b_eq=target, bounds=[(None, None)] * d), tol)
    return res


def quasiclassical_witness(partition: Partition, tol: Tolerances = None) -> Optional[Observable]:
    """Observable with <A_z, w> = 1 on block z and 0 elsewhere, or None.

    The values on every pure state are prescribed, so 0 <= A_z <= 1 holds
    automatically once the linear system is solvable.
    """
    tol = tol or TOL
    if partition.degree < 2:
        raise StructureError("a quasi-classical decomposition needs at least two blocks")
    space = partition.space
    effects = []
    for block in partition.blocks[:-1]:
        res = _indicator_effect(space, block, tol)
        if not res.optimal:
            return None
        effects.append(res.x)
    effects.append(space.unit - np.sum(effects, axis=0))
    obs = validate_observable(space, np.array(effects), tol=tol)
    if not QuasiClassicalStructure(partition, obs).check(tol):
        return None
    return obs


def witness_certificates(partition: Partition, tol: Tolerances = None) -> dict:
    """Farkas vectors for the blocks whose indicator is not linear."""
    tol = tol or TOL
    out = {}
    for z, block in enumerate(partition.blocks):
        res = _indicator_effect(partition.space, block, tol)
        if not res.optimal:
            out[z] = res.certificate
    return out


def check_condition_star(partition: Partition, tol: Tolerances = None) -> bool:
    """Whether block weights of convex decompositions are unique.

    For each block z0 the LP maximises p_z0 - q_z0 over pairs of convex
    weights (p from lam, q from kap) describing the same state.
    """
    tol = tol or TOL
    if partition.degree < 2:
        raise StructureError("condition needs at least two blocks")
    space = partition.space
    P = space.extreme_points
    n, d = P.shape
    A_eq = np.vstack([np.hstack([P.T, -P.T]),
                      np.concatenate([np.ones(n), np.zeros(n)])])
    b_eq = np.concatenate([np.zeros(d), [1.0]])
    holds = True
    for block in partition.blocks:
        mask = np.zeros(n)
        mask[list(block)] = 1.0
        res = lp_solve(LpProblem(c=np.concatenate([mask, -mask]), A_eq=A_eq, b_eq=b_eq,
                                 maximize=True), tol)
        gap = res.value
        if gap > tol.eps_eq:
            holds = False
        elif gap > tol.eps_feas:
            warnings.warn(f"block {block}: weight gap {gap:.3g} below eps_eq", AmbiguousVerdict)
    return holds


def set_partitions(items: Sequence, max_blocks: int = None) -> Iterator[List[list]]:
    """All set partitions of ``items`` with at most ``max_blocks`` blocks."""
    items = list(items)
    limit = len(items) if max_blocks is None else max_blocks

    def rec(i, blocks):
        if i == len(items):
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(items[i])
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < limit:
            blocks.append([items[i]])
            yield from rec(i + 1, blocks)
            blocks.pop()

    if items:
        yield from rec(0, [])


def enumerate_quasiclassical_decompositions(space: StateSpace, max_degree: int, tol: Tolerances = None,
                                            max_classes: int = MAX_CLASSES) -> List[QuasiClassicalStructure]:
    """All quasi-classical decompositions of degree 2..max_degree.

    Two equivalent pure states can never be split by a witness, so blocks
    are searched among unions of equivalence classes.
    """
    tol = tol or TOL
    if max_degree < 2:
        raise StructureError("max_degree must be at least 2")
    classes = equivalence_decomposition(space, tol).blocks
    if len(classes) > max_classes:
        raise StructureError(f"{len(classes)} equivalence classes exceed the enumeration cap of {max_classes}")
    found = []
    for grouping in set_partitions(range(len(classes)), max_degree):
        if len(grouping) < 2:
            continue
        blocks = tuple(tuple(sorted(i for c in g for i in classes[c])) for g in grouping)
        part = Partition(space, blocks)
        obs = quasiclassical_witness(part, tol)
        if obs is None:
            continue
        if part.degree > space.dim or (part.degree == space.dim and not space.is_simplex):
            raise AssertionError(f"degree {part.degree} decomposition violates the dimension bound")
        found.append(QuasiClassicalStructure(part, obs))
    found.sort(key=lambda s: (s.degree, s.partition.canonical()))
    return found


def random_partition(space: StateSpace, rng: np.random.Generator, degree: int = None) -> Partition:
    n = space.n_pure
    k = degree or int(rng.integers(2, min(n, 4) + 1))
    while True:
        labels = rng.integers(0, k, size=n)
        if len(np.unique(labels)) == k:
            return Partition(space, tuple(tuple(np.flatnonzero(labels == z)) for z in range(k)))
