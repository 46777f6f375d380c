"""Graph enumeration and formation/ensemble invariants."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import clustergt as cg
from clustergt.model import _enumerate_formations_bruteforce


class TestRunningExample:
    def test_four_formations_with_exact_probs(self, running_ensemble):
        ens = running_ensemble
        assert [form.clusters for form in ens.formations] == [
            ((1, 2, 3),),
            ((1, 2), (3,)),
            ((1, 3), (2,)),
            ((1,), (2,), (3,)),
        ]
        assert list(ens.probs) == [
            Fraction("0.15"), Fraction("0.15"), Fraction("0.35"), Fraction("0.35")
        ]

    def test_probs_sum_to_one(self, running_ensemble):
        assert sum(running_ensemble.probs) == 1

    def test_sigma_nondecreasing(self, running_ensemble):
        sigmas = [form.sigma for form in running_ensemble.formations]
        assert sigmas == sorted(sigmas)


def test_empty_graph_single_formation():
    g = cg.RandomConnectionGraph.build(3, [])
    ens = cg.enumerate_formations(g)
    assert ens.f == 1
    assert ens.formations[0].clusters == ((1,), (2,), (3,))
    assert ens.probs[0] == 1


def test_edge_order_invariance():
    edges = [(1, 2, "0.3"), (2, 3, "0.25"), (1, 4, "0.7"), (3, 4, "0.5")]
    a = cg.enumerate_formations(cg.RandomConnectionGraph.build(4, edges))
    b = cg.enumerate_formations(
        cg.RandomConnectionGraph.build(4, list(reversed(edges)))
    )
    assert a == b


def test_certain_edge_contraction_matches_bruteforce():
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(2, 8)
        edges = []
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                r = rng.random()
                if r < 0.2:
                    edges.append((i, j, 1))
                elif r < 0.3:
                    edges.append((i, j, 0))
                elif r < 0.6:
                    edges.append((i, j, Fraction(rng.randint(1, 9), 10)))
        g = cg.RandomConnectionGraph.build(n, edges)
        assert cg.enumerate_formations(g) == _enumerate_formations_bruteforce(g)


def test_uncertain_edge_cap():
    n = 30
    edges = [(i, i + 1, "0.5") for i in range(1, 26)]
    g = cg.RandomConnectionGraph.build(n, edges)
    with pytest.raises(cg.TooManyUncertainEdges):
        cg.enumerate_formations(g)


def test_graph_validation_errors():
    with pytest.raises(ValueError):
        cg.RandomConnectionGraph.build(3, [(1, 1, "0.5")])
    with pytest.raises(ValueError):
        cg.RandomConnectionGraph.build(3, [(1, 2, "0.5"), (2, 1, "0.4")])
    with pytest.raises(ValueError):
        cg.RandomConnectionGraph.build(3, [(1, 2, "1.5")])
    with pytest.raises(ValueError):
        cg.RandomConnectionGraph.build(3, [(1, 5, "0.5")])


class TestRealizeInfection:
    def test_cluster_membership(self, running_ensemble):
        state = cg.realize_infection(running_ensemble, 1, 1)  # {{1,2},{3}}
        assert state.infected == (True, True, False)

    def test_singleton(self, running_ensemble):
        state = cg.realize_infection(running_ensemble, 3, 2)
        assert state.infected == (False, True, False)

    def test_motivating_bottom_cluster(self, motivating_tree):
        ens = motivating_tree.ensemble
        state = cg.realize_infection(ens, 0, 7)
        assert state.infected == (False,) * 5 + (True,) * 5

    def test_index_validation(self, running_ensemble):
        with pytest.raises(IndexError):
            cg.realize_infection(running_ensemble, 9, 1)
        with pytest.raises(IndexError):
            cg.realize_infection(running_ensemble, 0, 4)

    def test_same_cluster_same_status(self, small_trees):
        for tree in small_trees[:10]:
            ens = tree.ensemble
            for alpha, form in enumerate(ens.formations):
                state = cg.realize_infection(ens, alpha, 1)
                for cluster in form.clusters:
                    statuses = {state.infected[v - 1] for v in cluster}
                    assert len(statuses) == 1


@given(
    st.integers(min_value=2, max_value=7),
    st.data(),
)
@settings(max_examples=40, deadline=None)
def test_probability_mass_always_one(n, data):
    edges = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            p = data.draw(
                st.sampled_from([0, 1, Fraction(1, 4), Fraction(1, 2), Fraction(9, 10), None])
            )
            if p is not None:
                edges.append((i, j, p if p in (0, 1) else p))
    g = cg.RandomConnectionGraph.build(n, [e for e in edges if True])
    ens = cg.enumerate_formations(g)
    assert sum(ens.probs) == 1
    assert all(p > 0 for p in ens.probs)


def test_ensemble_rejects_duplicates():
    form = cg.ClusterFormation.from_sets(2, [{1}, {2}])
    with pytest.raises(ValueError):
        cg.FormationEnsemble.build([(form, "0.5"), (form, "0.5")])


def test_formation_canonicalization():
    form = cg.ClusterFormation.from_sets(5, [[5, 4], [3, 1, 2]])
    assert form.clusters == ((1, 2, 3), (4, 5))
    with pytest.raises(ValueError):
        cg.ClusterFormation.from_sets(5, [[1, 2], [2, 3], [4, 5]])
    with pytest.raises(ValueError):
        cg.ClusterFormation.from_sets(5, [[1, 2], [4, 5]])
