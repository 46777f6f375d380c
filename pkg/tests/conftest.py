"""Shared fixtures: the bundled scenarios and a seeded random-tree generator."""

import random
from fractions import Fraction

import pytest

import clustergt as cg


@pytest.fixture(scope="session")
def running_graph():
    return cg.RandomConnectionGraph.build(3, [(1, 2, "0.3"), (1, 3, "0.5")])


@pytest.fixture(scope="session")
def running_ensemble(running_graph):
    return cg.enumerate_formations(running_graph)


def motivating_ensemble():
    return cg.FormationEnsemble.build(
        [
            (cg.ClusterFormation.from_sets(10, [{1, 2, 3}, {4, 5}, range(6, 11)]),
             Fraction("0.4")),
            (cg.ClusterFormation.from_sets(10, [{1, 2}, {3}, {4, 5}, range(6, 11)]),
             Fraction("0.2")),
            (cg.ClusterFormation.from_sets(10, [{1, 2}, {3}, {4, 5}, {6, 7},
                                                {8, 9, 10}]),
             Fraction("0.4")),
        ]
    )


@pytest.fixture(scope="session")
def motivating_tree():
    return cg.validate_tree(motivating_ensemble())


def random_formation_tree(rng: random.Random, n: int, f: int):
    """Random refinement chain: start from a random partition, split at least
    one cluster per level, attach random exact probabilities."""
    base = []
    # random top partition
    k = rng.randint(1, max(1, n // 3))
    vertices = list(range(1, n + 1))
    rng.shuffle(vertices)
    cuts = sorted(rng.sample(range(1, n), k - 1)) if k > 1 else []
    cur = []
    prev = 0
    for c in cuts + [n]:
        cur.append(sorted(vertices[prev:c]))
        prev = c
    base.append([list(x) for x in cur])
    for _ in range(f - 1):
        splittable = [i for i, c in enumerate(cur) if len(c) > 1]
        if not splittable:
            break
        nxt = []
        chosen = rng.sample(splittable, rng.randint(1, len(splittable)))
        for i, c in enumerate(cur):
            if i in chosen:
                pivot = rng.randint(1, len(c) - 1)
                members = list(c)
                rng.shuffle(members)
                nxt.append(sorted(members[:pivot]))
                nxt.append(sorted(members[pivot:]))
            else:
                nxt.append(list(c))
        base.append(nxt)
        cur = nxt
    weights = [rng.randint(1, 9) for _ in base]
    total = sum(weights)
    items = [
        (cg.ClusterFormation.from_sets(n, parts), Fraction(w, total))
        for parts, w in zip(base, weights)
    ]
    return cg.validate_tree(cg.FormationEnsemble.build(items))


@pytest.fixture(scope="session")
def small_trees():
    """Deterministic batch of >= 50 random trees with n <= 12, f <= 5."""
    rng = random.Random(20240817)
    trees = []
    while len(trees) < 60:
        n = rng.randint(4, 12)
        f = rng.randint(2, 5)
        try:
            trees.append(random_formation_tree(rng, n, f))
        except ValueError:
            continue
    return trees
