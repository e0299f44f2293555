"""Programming dynamics on a system through an apparatus state.

A total channel L on system (x) apparatus (minimal composite, system
first) programs the dynamics a with apparatus state x when

    <e (x) u_app, L(w (x) x)> = <e, a w>

for every system state w and effect e.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence

import numpy as np

from .channels import (Channel, ChannelError, TensorSpace, is_reversible, make_channel,
                       min_tensor, permutation_channel, same_space)
from .core import (Observable, StateSpace, contains_state, find_distinguishing_observable, simplex,
                   validate_observable)
from .fidelity import fidelity_is_zero
from .lp import TOL, Tolerances
from .structure import Partition, QuasiClassicalStructure


class ProgrammingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Program:
    state: np.ndarray
    dynamics: Channel
    apparatus_index: Optional[int] = None  # pure-state index, None for mixed programs
    mixed: bool = False


@dataclass(frozen=True, eq=False)
class ProgrammingInstance:
    system: StateSpace
    apparatus: StateSpace
    composite: TensorSpace
    total_channel: Channel
    programs: tuple

    @property
    def n_programs(self) -> int:
        return len(self.programs)


def _pure_index(space: StateSpace, v, tol: Tolerances) -> Optional[int]:
    dist = np.abs(space.extreme_points - v).max(axis=1)
    i = int(np.argmin(dist))
    return i if dist[i] <= tol.eps_eq else None


def make_instance(system: StateSpace, apparatus: StateSpace, total_channel: Channel, programs,
                  tol: Tolerances = None, allow_mixed: bool = False) -> ProgrammingInstance:
    """Bundle a total channel with (state, dynamics) pairs.

    Mixed program states are rejected unless ``allow_mixed`` is set.
    """
    tol = tol or TOL
    comp = min_tensor(system, apparatus)
    if not (same_space(total_channel.source, comp.space, tol) and same_space(total_channel.target, comp.space, tol)):
        raise ProgrammingError("total channel does not act on system (x) apparatus")
    progs = []
    for k, (state, dyn) in enumerate(programs):
        state = np.asarray(state, dtype=float)
        if not contains_state(apparatus, state, tol):
            raise ProgrammingError(f"program {k} is not an apparatus state")
        if not (same_space(dyn.source, system, tol) and same_space(dyn.target, system, tol)):
            raise ProgrammingError(f"dynamics of program {k} does not act on the system")
        idx = _pure_index(apparatus, state, tol)
        if idx is None and not allow_mixed:
            raise ProgrammingError(f"program {k} is a mixed state")
        progs.append(Program(state, dyn, idx, idx is None))
    return ProgrammingInstance(system, apparatus, comp, total_channel, tuple(progs))


def system_marginal(inst: ProgrammingInstance, out) -> np.ndarray:
    return np.asarray(out).reshape(inst.system.dim, inst.apparatus.dim) @ inst.apparatus.unit


def apparatus_marginal(inst: ProgrammingInstance, out) -> np.ndarray:
    return inst.system.unit @ np.asarray(out).reshape(inst.system.dim, inst.apparatus.dim)


def verify_program(inst: ProgrammingInstance, k: int, tol: Tolerances = None) -> bool:
    """Check the programming identity on all pure system states and extreme effects."""
    tol = tol or TOL
    prog = inst.programs[k]
    E = inst.system.effect_vertices
    for w in inst.system.extreme_points:
        out = inst.total_channel(np.kron(w, prog.state))
        diff = system_marginal(inst, out) - prog.dynamics(w)
        if np.abs(E @ diff).max() > tol.eps_eq:
            return False
    return True


@dataclass(frozen=True, eq=False)
class ProgramResidue:
    program: np.ndarray
    residues: dict  # system pure-state index -> apparatus state
    K_xi: list
    system_blocks: Partition


def compute_residues(inst: ProgrammingInstance, k: int, tol: Tolerances = None) -> ProgramResidue:
    """Apparatus states left behind by program ``k`` on each pure system state."""
    tol = tol or TOL
    if not verify_program(inst, k, tol):
        raise ProgrammingError(f"program {k} does not implement its dynamics")
    prog = inst.programs[k]
    ds, da = inst.system.dim, inst.apparatus.dim
    residues = {}
    for i, w in enumerate(inst.system.extreme_points):
        out = inst.total_channel(np.kron(w, prog.state))
        a = system_marginal(inst, out)
        b = apparatus_marginal(inst, out)
        if np.abs(out.reshape(ds, da) - np.outer(a, b)).max() > tol.eps_eq:
            raise ProgrammingError(f"output on pure system state {i} is correlated")
        if not contains_state(inst.apparatus, b, tol):
            raise ProgrammingError(f"residue on pure system state {i} is not an apparatus state")
        residues[i] = b
    K: list = []
    labels = []
    for i in range(inst.system.n_pure):
        for j, r in enumerate(K):
            if np.abs(r - residues[i]).max() <= tol.eps_eq:
                labels.append(j)
                break
        else:
            labels.append(len(K))
            K.append(residues[i])
    blocks = tuple(tuple(i for i in range(len(labels)) if labels[i] == j) for j in range(len(K)))
    return ProgramResidue(prog.state, residues, K, Partition(inst.system, blocks))


def same_dynamics(a: Channel, b: Channel, tol: Tolerances = None) -> bool:
    tol = tol or TOL
    return bool(np.abs(a.matrix - b.matrix).max() <= tol.eps_eq)


@dataclass
class AuditReport:
    pairs: list = field(default_factory=list)  # (i, j, dynamics_differ, distinguishable)

    @property
    def violations(self) -> list:
        return [p for p in self.pairs if p[2] and not p[3]]

    @property
    def passed(self) -> bool:
        return not self.violations


def no_programming_audit(inst: ProgrammingInstance, tol: Tolerances = None) -> AuditReport:
    """Programs of distinct dynamics must be perfectly distinguishable."""
    tol = tol or TOL
    for k in range(inst.n_programs):
        if not verify_program(inst, k, tol):
            raise ProgrammingError(f"program {k} does not implement its dynamics")
    report = AuditReport()
    for i, j in combinations(range(inst.n_programs), 2):
        pi, pj = inst.programs[i], inst.programs[j]
        differ = not same_dynamics(pi.dynamics, pj.dynamics, tol)
        dist = fidelity_is_zero(inst.apparatus, pi.state, pj.state, tol) if differ else True
        report.pairs.append((i, j, differ, dist))
    return report


def program_partition(inst: ProgrammingInstance, tol: Tolerances = None) -> Partition:
    """Group pure apparatus programs by the dynamics they implement."""
    tol = tol or TOL
    idx = [p.apparatus_index for p in inst.programs]
    if None in idx or sorted(idx) != list(range(inst.apparatus.n_pure)):
        raise ProgrammingError("programs are not exactly the pure apparatus states")
    groups: List[list] = []
    reps: List[Channel] = []
    for p in inst.programs:
        for g, r in zip(groups, reps):
            if same_dynamics(p.dynamics, r, tol):
                g.append(p.apparatus_index)
                break
        else:
            groups.append([p.apparatus_index])
            reps.append(p.dynamics)
    return Partition(inst.apparatus, tuple(map(tuple, groups)))


# --------------------------------------------------------------------------
# constructions


def build_reversible_programmer(system: StateSpace, qc: QuasiClassicalStructure, dynamics: Sequence[Channel],
                                assignment: Sequence[int] = None, tol: Tolerances = None) -> ProgrammingInstance:
    """Total channel with L(w (x) s) = (a_n w) (x) s for s in block n.

    The rule is prescribed on the pure product states only; it extends to a
    linear map exactly when it respects every linear relation among them.
    That holds when the blocks span independent subspaces (direct sums),
    and fails as soon as a relation mixes two blocks with different
    dynamics, in which case ProgrammingError is raised.
    """
    tol = tol or TOL
    apparatus = qc.partition.space
    blocks = qc.partition.blocks
    assignment = list(range(len(blocks))) if assignment is None else list(assignment)
    if len(assignment) != len(blocks) or not set(assignment) <= set(range(len(dynamics))):
        raise ProgrammingError("assignment must map every block to one of the dynamics")
    for n, a in enumerate(dynamics):
        if not same_space(a.source, system, tol) or not is_reversible(a, tol):
            raise ProgrammingError(f"dynamics {n} is not a reversible dynamics of the system")
    if not qc.check(tol):
        raise ProgrammingError("witness does not certify the decomposition")

    comp = min_tensor(system, apparatus)
    labels = qc.partition.labels()
    X, Y = [], []
    for w in system.extreme_points:
        for j, s in enumerate(apparatus.extreme_points):
            X.append(np.kron(w, s))
            Y.append(np.kron(dynamics[assignment[labels[j]]](w), s))
    X, Y = np.array(X), np.array(Y)
    L = np.linalg.lstsq(X, Y, rcond=None)[0].T
    err = np.abs(X @ L.T - Y).max()
    if err > tol.eps_eq:
        raise ProgrammingError(
            f"the blockwise rule is not linear on {system.name}(x){apparatus.name} (mismatch {err:.3g}); "
            "a linear relation among apparatus pure states couples blocks carrying different dynamics")
    try:
        total = make_channel(L, comp.space, comp.space, tol)
    except ChannelError as exc:
        raise ProgrammingError(f"blockwise rule does not give a channel: {exc}")
    if not is_reversible(total, tol):
        raise ProgrammingError("blockwise rule is not reversible")
    programs = [(apparatus.pure(j), dynamics[assignment[labels[j]]]) for j in range(apparatus.n_pure)]
    inst = make_instance(system, apparatus, total, programs, tol)
    for k in range(inst.n_programs):
        if not verify_program(inst, k, tol):  # pragma: no cover - holds by construction
            raise AssertionError(f"constructed program {k} failed verification")
    return inst


@dataclass(frozen=True, eq=False)
class ChannelProgrammerStages:
    """The factors of the channel programmer on system (x) apparatus (x) ancilla."""

    append: Channel
    measure: Channel
    conditional: Channel
    trace: np.ndarray


def channel_programmer_stages(system: StateSpace, apparatus: StateSpace, obs: Observable,
                              dynamics: Sequence[Channel], reprepared, tol: Tolerances = None):
    tol = tol or TOL
    N = len(dynamics)
    anc = simplex(N)
    ds, da = system.dim, apparatus.dim
    sa = min_tensor(system, apparatus).space
    tri = min_tensor(sa, anc).space
    app_anc = min_tensor(apparatus, anc).space
    delta = np.eye(N)

    # append the ancilla in its first pure state
    app = np.kron(np.eye(ds * da), delta[:, [0]])
    theta1 = make_channel(app, sa, tri, tol)
    # measure the apparatus, write the outcome into the ancilla, re-prepare
    m2 = sum(np.outer(np.kron(reprepared[n], delta[n]), np.kron(obs.effects[n], anc.unit)) for n in range(N))
    make_channel(m2, app_anc, app_anc, tol)
    theta2 = make_channel(np.kron(np.eye(ds), m2), tri, tri, tol)
    # apply tau_n to the system conditioned on the ancilla
    g = sum(np.kron(np.kron(dynamics[n].matrix, np.eye(da)), np.outer(delta[n], delta[n])) for n in range(N))
    theta3 = make_channel(g, tri, tri, tol)
    trace = np.kron(np.eye(ds * da), anc.unit.reshape(1, -1))
    return ChannelProgrammerStages(theta1, theta2, theta3, trace)


def build_channel_programmer(system: StateSpace, apparatus: StateSpace, programs, obs: Optional[Observable],
                             dynamics: Sequence[Channel], reprepared=None,
                             tol: Tolerances = None) -> ProgrammingInstance:
    """Measure the apparatus, apply the channel selected by the outcome, re-prepare."""
    tol = tol or TOL
    S = np.atleast_2d(np.asarray(programs, dtype=float))
    N = len(S)
    if len(dynamics) != N:
        raise ProgrammingError(f"{N} programs but {len(dynamics)} dynamics")
    if obs is None and N == 1:
        obs = Observable(apparatus.unit.reshape(1, -1).copy())
    elif obs is None:
        obs = find_distinguishing_observable(apparatus, S, tol)
        if not obs:
            raise ProgrammingError("programs are not perfectly distinguishable")
    obs = validate_observable(apparatus, obs.effects, tol=tol)
    if len(obs) != N:
        raise ProgrammingError(f"observable has {len(obs)} outcomes for {N} programs")
    if np.abs(obs.effects @ S.T - np.eye(N)).max() > tol.eps_eq:
        raise ProgrammingError("observable does not perfectly distinguish the programs")
    for n, t in enumerate(dynamics):
        if not (same_space(t.source, system, tol) and same_space(t.target, system, tol)):
            raise ProgrammingError(f"channel {n} does not act on the system")
    R = S if reprepared is None else np.atleast_2d(np.asarray(reprepared, dtype=float))

    st = channel_programmer_stages(system, apparatus, obs, dynamics, R, tol)
    mat = st.trace @ st.conditional.matrix @ st.measure.matrix @ st.append.matrix
    comp = min_tensor(system, apparatus)
    total = make_channel(mat, comp.space, comp.space, tol)
    inst = make_instance(system, apparatus, total, list(zip(S, dynamics)), tol, allow_mixed=True)
    for k in range(N):
        if not verify_program(inst, k, tol):  # pragma: no cover - holds by construction
            raise AssertionError(f"constructed program {k} failed verification")
    return inst


def cyclic_shift_channels(N: int) -> List[Channel]:
    """Permutations of simplex(N) with pi_n(0) = n."""
    s = simplex(N)
    return [permutation_channel(s, (np.arange(N) + n) % N) for n in range(N)]


def extract_program_observable(total: Channel, apparatus: StateSpace, programs, permutations: Sequence[Channel],
                               tol: Tolerances = None) -> Observable:
    """Read A_k = (block map from input 0 to output k)^T u_app off the total channel."""
    tol = tol or TOL
    S = np.atleast_2d(np.asarray(programs, dtype=float))
    N = len(S)
    system = simplex(N)
    inst = make_instance(system, apparatus, total, list(zip(S, permutations)), tol, allow_mixed=True)
    for n, p in enumerate(permutations):
        if np.abs(p.matrix[:, 0] - np.eye(N)[n]).max() > tol.eps_eq:
            raise ProgrammingError(f"permutation {n} does not send pure state 0 to pure state {n}")
        if not verify_program(inst, n, tol):
            raise ProgrammingError(f"program {n} does not implement its permutation")
    da = apparatus.dim
    effects = np.array([total.matrix[k * da:(k + 1) * da, 0:da].T @ apparatus.unit for k in range(N)])
    obs = validate_observable(apparatus, effects, tol=tol)
    if np.abs(obs.effects @ S.T - np.eye(N)).max() > tol.eps_eq:
        raise AssertionError("extracted observable does not distinguish the programs")
    return obs


def cnot_instance() -> ProgrammingInstance:
    """Classical controlled flip: d_i (x) d_j -> d_i (x) d_(i xor j).

    Both apparatus pure states program the identity, and the residue depends
    on the system input.
    """
    s = simplex(2)
    comp = min_tensor(s, s)
    L = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            L[2 * i + (i ^ j), 2 * i + j] = 1.0
    total = make_channel(L, comp.space, comp.space)
    ident = permutation_channel(s, [0, 1])
    return make_instance(s, s, total, [(s.pure(0), ident), (s.pure(1), ident)])


def product_instance(system: StateSpace, apparatus: StateSpace, dynamics: Channel) -> ProgrammingInstance:
    """L = a (x) id: every apparatus pure state programs ``a``."""
    comp = min_tensor(system, apparatus)
    total = make_channel(np.kron(dynamics.matrix, np.eye(apparatus.dim)), comp.space, comp.space)
    return make_instance(system, apparatus, total,
                         [(apparatus.pure(j), dynamics) for j in range(apparatus.n_pure)])
