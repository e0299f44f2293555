import numpy as np
import pytest

from gptlab.channels import make_channel
from gptlab.core import perfectly_distinguishable_pair, simplex
from gptlab.fixtures import fixtures, square
from gptlab.polygon import polygon_theory
from gptlab.core import make_state_space
from gptlab.structure import (AmbiguousVerdict, Partition, StructureError, check_condition_star,
                              enumerate_quasiclassical_decompositions, equivalence_decomposition,
                              quasiclassical_witness, random_partition, set_partitions, witness_certificates)


def blocks_of(found):
    return {s.partition.canonical() for s in found}


def test_partition_validation(sq):
    with pytest.raises(StructureError):
        Partition(sq, ((0, 1), (1, 2, 3)))
    with pytest.raises(StructureError):
        Partition(sq, ((0, 1), ()))
    assert Partition(sq, ((3, 1), (0, 2))).blocks == ((1, 3), (0, 2))


def test_equivalence_examples(sq, pent):
    assert equivalence_decomposition(simplex(4)).degree == 4
    assert equivalence_decomposition(sq).blocks == ((0,), (1,), (2,), (3,))
    assert equivalence_decomposition(pent).blocks == ((0, 1, 2, 3, 4),)


def test_witness_examples(sq, prism_space):
    assert quasiclassical_witness(Partition(sq, ((0, 1), (2, 3)))) is not None
    diag = Partition(sq, ((0, 2), (1, 3)))
    assert quasiclassical_witness(diag) is None
    cert = witness_certificates(diag)
    assert set(cert) == {0, 1}
    assert quasiclassical_witness(Partition(prism_space, ((0, 1, 2), (3, 4, 5)))) is not None


def test_square_census(sq):
    found = enumerate_quasiclassical_decompositions(sq, 2)
    assert blocks_of(found) == {((0, 1), (2, 3)), ((0, 3), (1, 2))}
    assert blocks_of(enumerate_quasiclassical_decompositions(sq, 4)) == blocks_of(found)


def test_prism_census(prism_space):
    found = enumerate_quasiclassical_decompositions(prism_space, 3)
    got = blocks_of(found)
    assert ((0, 1, 2), (3, 4, 5)) in got
    assert ((0, 3), (1, 4), (2, 5)) in got
    # each vertical edge also splits off alone
    assert len(got) == 5
    assert all(s.check() for s in found)


def test_pentagon_census(pent):
    assert enumerate_quasiclassical_decompositions(pent, 5) == []


def test_class_cap():
    with pytest.raises(StructureError, match="cap"):
        enumerate_quasiclassical_decompositions(simplex(5), 2, max_classes=4)
    with pytest.raises(StructureError):
        enumerate_quasiclassical_decompositions(simplex(3), 1)


def test_set_partitions_counts():
    # Bell numbers, and Stirling-limited counts
    assert [sum(1 for _ in set_partitions(range(n))) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]
    assert sum(1 for _ in set_partitions(range(5), 2)) == 16


def test_condition_star_examples(sq):
    assert check_condition_star(Partition(sq, ((0, 1), (2, 3))))
    assert not check_condition_star(Partition(sq, ((0, 2), (1, 3))))
    s = simplex(4)
    for blocks in (((0,), (1, 2, 3)), ((0, 2), (1, 3)), ((0,), (1,), (2,), (3,))):
        assert check_condition_star(Partition(s, blocks))


def test_condition_star_ambiguous_warns():
    # a barely squashed square: the only linear relation moves block weight by about eps/4
    eps = 1e-7
    pts = np.array([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1 + eps, 1]], dtype=float)
    space = make_state_space(pts, [0, 0, 1], validate=False)
    with pytest.warns(AmbiguousVerdict):
        assert check_condition_star(Partition(space, ((0, 1), (2, 3))))


def test_prop4_equivalence_random(rng):
    spaces = list(fixtures().values())
    for _ in range(60):
        space = spaces[rng.integers(len(spaces))]
        part = random_partition(space, rng)
        assert (quasiclassical_witness(part) is not None) == check_condition_star(part)


def test_degree_bound():
    for name, space in fixtures().items():
        for s in enumerate_quasiclassical_decompositions(space, space.n_pure):
            assert s.degree <= space.dim
            if s.degree == space.dim:
                assert space.is_simplex


def test_witness_effects_distinguish_across_blocks(prism_space):
    for s in enumerate_quasiclassical_decompositions(prism_space, 3):
        lab = s.partition.labels()
        P = prism_space.extreme_points
        for i in range(6):
            for j in range(6):
                if lab[i] != lab[j]:
                    assert s.witness.effects[lab[i]] @ P[i] == pytest.approx(1)
                    assert s.witness.effects[lab[i]] @ P[j] == pytest.approx(0, abs=1e-9)
                    assert perfectly_distinguishable_pair(prism_space, P[i], P[j])


@pytest.mark.parametrize("M", [4, 5, 6, 8])
def test_classes_invariant_under_rotation(M):
    pt = polygon_theory(M)
    a = 2 * np.pi / M
    R = make_channel([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]], pt.space, pt.space)
    part = equivalence_decomposition(pt.space)
    rotated = make_state_space(pt.space.extreme_points @ R.matrix.T, pt.space.unit, validate=False)
    # relabelled pure state i of the rotated space is pure state i+1 of the original
    mapped = {tuple(sorted((i + 1) % M for i in b)) for b in equivalence_decomposition(rotated).blocks}
    assert mapped == set(part.blocks)
