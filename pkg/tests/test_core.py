from itertools import combinations

import numpy as np
import pytest
from scipy.optimize import linprog

from gptlab.core import (NotDistinguishable, ObservableError, StateSpaceError, UnsupportedError,
                         contains_state, direct_sum, facet_rays_bruteforce, facet_rays_qhull,
                         find_distinguishing_observable, informationally_complete_observable, is_effect,
                         make_state_space, max_clique, max_pairwise_clique, random_observable, random_state,
                         simplex, validate_observable)
from gptlab.fixtures import fixtures
from gptlab.polygon import polygon_theory


def rows_key(V):
    return sorted(map(tuple, np.round(V, 6) + 0.0))


def test_rejects_bad_spaces():
    with pytest.raises(StateSpaceError, match="unit effect"):
        make_state_space([[1, 0], [0, 2]], [1, 1])
    with pytest.raises(StateSpaceError, match="not extreme"):
        make_state_space([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1 / 3, 1 / 3, 1 / 3]], [1, 1, 1])
    with pytest.raises(StateSpaceError, match="subspace"):
        make_state_space([[1, 0, 0], [0, 1, 0]], [1, 1, 1])


def test_simplex_and_direct_sum():
    s = simplex(3)
    assert s.is_simplex and s.n_pure == 3
    ds = direct_sum([simplex(2), polygon_theory(4).space])
    assert ds.dim == 5 and ds.n_pure == 6 and ds.blocks == ((0, 2), (2, 5))


def test_membership(sq, rng):
    assert contains_state(sq, sq.barycenter)
    assert not contains_state(sq, 1.5 * sq.pure(0) - 0.5 * sq.barycenter)
    for _ in range(20):
        assert contains_state(sq, random_state(sq, rng))


@pytest.mark.parametrize("name", ["square", "pentagon", "hexagon", "prism", "simplex4", "pentagon+pentagon"])
def test_rays_bruteforce_matches_qhull(name):
    space = fixtures()[name]
    R = space.effect_rays
    assert rows_key(facet_rays_bruteforce(space)) == rows_key(facet_rays_qhull(space))
    assert rows_key(R) == rows_key(facet_rays_qhull(space))
    vals = R @ space.extreme_points.T
    assert vals.min() >= -1e-9
    # each ray vanishes on at least dim-1 pure states
    assert ((np.abs(vals) < 1e-9).sum(axis=1) >= space.dim - 1).all()


def test_square_effect_vertices(sq):
    V = sq.effect_vertices
    assert len(V) == 6
    for v in V:
        assert is_effect(sq, v)
    expected = np.vstack([polygon_theory(4).effects, np.zeros(3), sq.unit])
    assert rows_key(V) == rows_key(expected)


def test_pentagon_effect_vertices():
    pt = polygon_theory(5)
    V = pt.space.effect_vertices
    expected = np.vstack([pt.extreme_effects, np.zeros(3), pt.space.unit])
    assert rows_key(V) == rows_key(expected)


def test_effect_vertices_dimension_limit():
    with pytest.raises(UnsupportedError):
        _ = simplex(7).effect_vertices


def test_observable_validation(sq):
    validate_observable(sq, [sq.unit])
    with pytest.raises(ObservableError, match="unit"):
        validate_observable(sq, [sq.unit, sq.unit])
    with pytest.raises(ObservableError, match="takes value"):
        validate_observable(sq, [2 * sq.unit, -sq.unit])


def test_random_observable_is_valid(rng):
    for space in fixtures().values():
        obs = random_observable(space, rng, outcomes=3)
        validate_observable(space, obs.effects)


def test_distinguishability_examples(s2, sq, pent):
    assert find_distinguishing_observable(s2, np.eye(2))
    obs = find_distinguishing_observable(sq, [sq.pure(0), sq.pure(2)])
    np.testing.assert_allclose(obs.effects @ np.array([sq.pure(0), sq.pure(2)]).T, np.eye(2), atol=1e-9)
    res = find_distinguishing_observable(pent, [pent.pure(0), pent.pure(1)])
    assert isinstance(res, NotDistinguishable) and not res
    with pytest.raises(ObservableError):
        find_distinguishing_observable(sq, [sq.pure(0), sq.pure(0)])


def _scipy_pair(space, a, b):
    P = space.extreme_points
    d = space.dim
    res = linprog(np.zeros(d), A_ub=np.vstack([P, -P]), b_ub=np.r_[np.ones(len(P)), np.zeros(len(P))],
                  A_eq=np.vstack([a, b]), b_eq=[1, 0], bounds=[(None, None)] * d, method="highs")
    return res.status == 0


def _brute_clique(space, cands):
    n = len(cands)
    ok = {(i, j): _scipy_pair(space, cands[i], cands[j]) and _scipy_pair(space, cands[j], cands[i])
          for i, j in combinations(range(n), 2)}
    for k in range(n, 0, -1):
        for S in combinations(range(n), k):
            if all(ok[p] for p in combinations(S, 2)):
                return k
    return 0


@pytest.mark.parametrize("name", ["simplex2", "simplex3", "simplex4", "square", "pentagon", "hexagon", "prism"])
def test_clique_matches_brute_force(name):
    space = fixtures()[name]
    assert len(max_pairwise_clique(space)) == _brute_clique(space, space.extreme_points)


def test_clique_with_mixed_candidates(sq, rng):
    cands = np.vstack([sq.extreme_points, [random_state(sq, rng) for _ in range(6)]])
    assert len(max_pairwise_clique(sq, cands)) == _brute_clique(sq, cands)


def test_max_clique_random_graphs(rng):
    for _ in range(30):
        n = int(rng.integers(1, 10))
        adj = np.triu(rng.uniform(size=(n, n)) < 0.5, 1)
        adj = adj | adj.T
        best = max_clique(adj)
        assert all(adj[i, j] for i, j in combinations(best, 2))
        brute = max((len(S) for k in range(1, n + 1) for S in combinations(range(n), k)
                     if all(adj[i, j] for i, j in combinations(S, 2))), default=0)
        assert len(best) == brute


@pytest.mark.parametrize("name", list(fixtures()))
def test_informationally_complete_observable(name, rng):
    space = fixtures()[name]
    for _ in range(5):
        k = int(rng.integers(2, 6))
        T = np.array([random_state(space, rng, 0.5) for _ in range(k)])
        obs = informationally_complete_observable(space, T, rng=rng)
        assert len(obs) == k
        stats = T @ obs.effects.T
        assert min(np.abs(stats[i] - stats[j]).max() for i, j in combinations(range(k), 2)) > 1e-7


def test_informationally_complete_dependent_targets(sq):
    T = np.array([sq.pure(0), sq.pure(1), sq.pure(2), sq.pure(3), sq.barycenter])
    obs = informationally_complete_observable(sq, T)
    stats = T @ obs.effects.T
    assert min(np.abs(stats[i] - stats[j]).max() for i, j in combinations(range(5), 2)) > 1e-7
