"""Formation-tree validation, node dedup, and ancestor statistics."""

import pytest

import clustergt as cg


class TestValidation:
    def test_motivating_is_tree(self, motivating_tree):
        assert motivating_tree.f == 3

    def test_running_example_not_a_tree(self, running_ensemble):
        with pytest.raises(cg.NotATree) as err:
            cg.validate_tree(running_ensemble)
        assert err.value.levels == (2, 3)

    def test_single_level_valid(self):
        ens = cg.FormationEnsemble.build(
            [(cg.ClusterFormation.from_sets(4, [{1, 2}, {3, 4}]), 1)]
        )
        tree = cg.validate_tree(ens)
        assert tree.lambda_total(1) == 2


class TestLambdaCounts:
    def test_motivating_unique_node_counts(self, motivating_tree):
        # unique clusters at and above each level, counted by hand from the
        # three formations: level 1 has 3; level 2 adds {1,2} and {3};
        # level 3 adds {6,7} and {8,9,10}
        assert motivating_tree.lambda_total(1) == 3
        assert motivating_tree.lambda_total(2) == 5
        assert motivating_tree.lambda_total(3) == 7

    def test_sigma_prefix_dominates_lambda(self, small_trees):
        for tree in small_trees:
            sigmas = [form.sigma for form in tree.ensemble.formations]
            for j in range(1, tree.f + 1):
                assert sum(sigmas[:j]) >= tree.lambda_total(j)

    def test_node_dedup_count(self, small_trees):
        for tree in small_trees:
            assert len(tree.nodes) == tree.lambda_total(tree.f)

    def test_expsplit_lambda(self):
        for f in (2, 5, 8):
            tree = cg.generate(cg.ExpSplitParams(f=f, delta=1))
            for j in range(1, f + 1):
                assert tree.lambda_total(j) == (1 << j) - 1


class TestLambdaOfNode:
    def test_motivating_singleton(self, motivating_tree):
        assert cg.lambda_of_node(motivating_tree, {3}) == 1

    def test_top_level_node(self, motivating_tree):
        assert cg.lambda_of_node(motivating_tree, {1, 2, 3}) == 0
        assert cg.lambda_of_node(motivating_tree, {4, 5}) == 0

    def test_expsplit_bottom_nodes(self):
        for f in (3, 6, 10):
            tree = cg.generate(cg.ExpSplitParams(f=f, delta=1))
            for cluster in tree.ensemble.formations[f - 1].clusters:
                assert cg.lambda_of_node(tree, cluster) == f - 1

    def test_unknown_node(self, motivating_tree):
        with pytest.raises(cg.UnknownNode):
            cg.lambda_of_node(motivating_tree, {1, 4})


def brute_force_is_refinement(fine, coarse):
    return all(
        any(set(c).issubset(set(big)) for big in coarse.clusters)
        for c in fine.clusters
    )


def test_refinement_agrees_with_bruteforce(small_trees):
    for tree in small_trees[:20]:
        forms = tree.ensemble.formations
        for i in range(len(forms) - 1):
            assert brute_force_is_refinement(forms[i + 1], forms[i])


def test_nonrefinement_rejected():
    items = [
        (cg.ClusterFormation.from_sets(4, [{1, 2}, {3, 4}]), "0.5"),
        (cg.ClusterFormation.from_sets(4, [{1, 3}, {2}, {4}]), "0.5"),
    ]
    with pytest.raises(cg.NotATree):
        cg.validate_tree(cg.FormationEnsemble.build(items))


def test_lambda_table_rows(motivating_tree):
    assert cg.lambda_table(motivating_tree) == [(1, 3, 3), (2, 4, 5), (3, 5, 7)]
