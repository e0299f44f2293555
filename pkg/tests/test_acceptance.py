"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line; the lines are echoed in the
pytest terminal summary and printed directly when this file is run as a
script.
"""

import time
from itertools import combinations

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from fidelity_props import PROPERTIES, run_property
from programming_props import random_instance
from gptlab.channels import permutation_channel
from gptlab.core import (informationally_complete_observable, max_pairwise_clique, perfectly_distinguishable_pair,
                         random_state, simplex)
from gptlab.fixtures import fixtures, pentagon, prism, square
from gptlab.polygon import (classical_bit_baseline, closed_form_optimum, helstrom_family, max_success_lp,
                            polygon_theory)
from gptlab.programming import (ProgrammingError, build_channel_programmer, build_reversible_programmer,
                                cyclic_shift_channels, extract_program_observable, no_programming_audit,
                                verify_program)
from gptlab.structure import (Partition, check_condition_star, enumerate_quasiclassical_decompositions,
                              quasiclassical_witness, random_partition)

SIDES = range(3, 13)


def record(key, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {key} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_polygon_optimum():
    max_success_lp(polygon_theory(5))  # compile the kernels before timing
    start = time.perf_counter()
    worst = 0.0
    for M in SIDES:
        value, _ = max_success_lp(polygon_theory(M))
        worst = max(worst, abs(value - closed_form_optimum(M)))
    elapsed = time.perf_counter() - start
    p3, _ = max_success_lp(polygon_theory(3))
    p4, _ = max_success_lp(polygon_theory(4))
    ok = worst <= 1e-7 and abs(p3 - 1) <= 1e-7 and abs(p4 - 0.5) <= 1e-7 and elapsed < 5
    record("1", ok, f"polygon optimum M=3..12: max error {worst:.2e}, P_3={p3:.9g}, P_4={p4:.9g}, {elapsed:.2f}s")


def test_2_helstrom_saturation():
    worst = 0.0
    for M in SIDES:
        pt = polygon_theory(M)
        fam = helstrom_family(pt)
        value, _ = max_success_lp(pt)
        assert value <= fam.bound(M) + 1e-7
        worst = max(worst, abs(value - fam.bound(M)))
    record("2", worst <= 1e-7, f"Helstrom bound saturated: max gap {worst:.2e}")


def test_3_baseline():
    ok = True
    for M in SIDES:
        value, _ = max_success_lp(polygon_theory(M))
        base = classical_bit_baseline(M)
        ok &= value >= base - 1e-7
        ok &= (abs(value - base) <= 1e-7) == (M % 2 == 0)
    record("3", ok, "polygon value >= 2/M, equality exactly at even M")


def test_4_census():
    start = time.perf_counter()
    sq = {s.partition.canonical() for s in enumerate_quasiclassical_decompositions(square(), 2)}
    diag_rejected = quasiclassical_witness(Partition(square(), ((0, 2), (1, 3)))) is None
    pr = {s.partition.canonical() for s in enumerate_quasiclassical_decompositions(prism(), 3)}
    pent = enumerate_quasiclassical_decompositions(pentagon(), 5)
    elapsed = time.perf_counter() - start
    ok = (sq == {((0, 1), (2, 3)), ((0, 3), (1, 2))} and diag_rejected
          and ((0, 1, 2), (3, 4, 5)) in pr and ((0, 3), (1, 4), (2, 5)) in pr
          and pent == [] and elapsed < 10)
    record("4", ok, f"census: square {len(sq)}, prism {len(pr)} (both named ones present), "
                    f"pentagon {len(pent)}, {elapsed:.2f}s")


def test_5_prop4_equivalence():
    rng = np.random.default_rng(5)
    spaces = list(fixtures().values())
    bad = 0
    trials = 60
    for _ in range(trials):
        part = random_partition(spaces[rng.integers(len(spaces))], rng)
        bad += (quasiclassical_witness(part) is not None) != check_condition_star(part)
    record("5", bad == 0, f"witness vs condition star on {trials} random partitions: {bad} discrepancies")


def test_6_fidelity_properties():
    parts = []
    ok = True
    for k, name in enumerate(PROPERTIES):
        failures, worst = run_property(name, 200, seed=600 + k)
        ok &= failures == 0
        parts.append(f"{name} {failures}/200")
    record("6", ok, "fidelity failures: " + ", ".join(parts))


def test_7a_reversible_programmer_square():
    s3 = simplex(3)
    sq = square()
    qc = enumerate_quasiclassical_decompositions(sq, 2)[0]
    dyn = [permutation_channel(s3, [0, 1, 2]), permutation_channel(s3, [1, 2, 0])]
    try:
        inst = build_reversible_programmer(s3, qc, dyn)
    except ProgrammingError as exc:
        record("7a", False, f"reversible programmer, square apparatus: construction impossible ({exc})")
        return
    ok = all(verify_program(inst, k) for k in range(inst.n_programs))
    record("7a", ok, "reversible programmer, square apparatus: all programs verified")


def test_7b_channel_programmer_round_trip():
    s3 = simplex(3)
    sh = cyclic_shift_channels(3)
    progs = np.eye(3)
    inst = build_channel_programmer(s3, s3, progs, None, sh)
    verified = all(verify_program(inst, k) for k in range(3))
    obs = extract_program_observable(inst.total_channel, s3, progs, sh)
    gap = np.abs(obs.effects @ progs.T - np.eye(3)).max()
    record("7b", verified and gap <= 1e-7,
           f"channel programmer, simplex3 apparatus: verified={verified}, extracted observable error {gap:.2e}")


def test_8_no_programming_audit():
    rng = np.random.default_rng(8)
    instances = 120
    violations = pairs = 0
    for _ in range(instances):
        rep = no_programming_audit(random_instance(rng))
        violations += len(rep.violations)
        pairs += sum(1 for p in rep.pairs if p[2])
    record("8", violations == 0, f"audit over {instances} instances, {pairs} distinct-dynamics pairs, "
                                 f"{violations} violations")


def test_9_informationally_complete():
    rng = np.random.default_rng(9)
    worst = np.inf
    runs = 0
    for space in fixtures().values():
        for _ in range(10):
            k = int(rng.integers(2, 6))
            T = np.array([random_state(space, rng, 0.5) for _ in range(k)])
            obs = informationally_complete_observable(space, T, rng=rng)
            stats = T @ obs.effects.T
            worst = min(worst, min(np.abs(stats[i] - stats[j]).max() for i, j in combinations(range(k), 2)))
            runs += 1
    record("9", worst > 1e-7, f"separating observable on {runs} random target sets: min gap {worst:.3g}")


def _brute_clique(space):
    P = space.extreme_points
    n = len(P)
    ok = {(i, j): perfectly_distinguishable_pair(space, P[i], P[j]) for i, j in combinations(range(n), 2)}
    for k in range(n, 0, -1):
        if any(all(ok[p] for p in combinations(S, 2)) for S in combinations(range(n), k)):
            return k
    return 0


def test_10_cliques():
    got = {}
    ok = True
    for N in (2, 3, 4, 5):
        got[f"simplex{N}"] = len(max_pairwise_clique(simplex(N)))
        ok &= got[f"simplex{N}"] == N
    got["square"] = len(max_pairwise_clique(square()))
    got["pentagon"] = len(max_pairwise_clique(pentagon()))
    ok &= got["square"] == 4 and got["pentagon"] == 2
    for space in fixtures().values():
        ok &= len(max_pairwise_clique(space)) == _brute_clique(space)
    record("10", ok, "clique sizes " + ", ".join(f"{k}={v}" for k, v in got.items()) + "; brute force agrees")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
