"""Feasible infected sets, matrix construction, decoding, and the pipeline."""

import itertools
from fractions import Fraction

import pytest

import clustergt as cg


def sets_as_sorted(sets):
    return sorted(tuple(sorted(s)) for s in sets)


class TestPossibleInfectedSets:
    def test_motivating(self, motivating_tree):
        tree = motivating_tree
        expect = {
            1: [(1,), (4,), (8,)],
            2: [(1,), (3,), (4,), (8,), (1, 3)],
            3: [(1,), (3,), (4,), (6,), (8,), (1, 3), (6, 8)],
        }
        for m, want in expect.items():
            plan = cg.optimal_sampling(tree, m)
            got = sets_as_sorted(cg.possible_infected_sets(tree, plan))
            assert got == sorted(want)

    def test_tree_walk_equals_bruteforce(self, small_trees):
        for tree in small_trees[:25]:
            for m in range(1, tree.f + 1):
                plan = cg.optimal_sampling(tree, m)
                via_tree = set(cg.possible_infected_sets(tree, plan))
                via_ens = set(cg.possible_infected_sets(tree.ensemble, plan))
                assert via_tree == via_ens

    def test_count_matches_unique_nodes(self, small_trees):
        for tree in small_trees[:25]:
            for m in range(1, tree.f + 1):
                plan = cg.optimal_sampling(tree, m)
                assert len(cg.possible_infected_sets(tree, plan)) == tree.lambda_total(m)


class TestLowerBound:
    def test_motivating_bounds(self, motivating_tree):
        assert cg.lower_bound_tests(motivating_tree, 1) == 2
        assert cg.lower_bound_tests(motivating_tree, 2) == 3
        assert cg.lower_bound_tests(motivating_tree, 3) == 3

    def test_expsplit_bottom(self):
        for f in (2, 4, 8):
            tree = cg.generate(cg.ExpSplitParams(f=f, delta=1))
            assert cg.lower_bound_tests(tree, f) == f


class TestConstruction:
    def test_motivating_row_counts(self, motivating_tree):
        for m, want_t in ((1, 2), (2, 3), (3, 3)):
            plan = cg.optimal_sampling(motivating_tree, m)
            built = cg.construct_matrix(motivating_tree, plan)
            assert built.exact
            assert built.matrix.t_rows == want_t

    def test_motivating_m1_matrix_rows(self, motivating_tree):
        plan = cg.optimal_sampling(motivating_tree, 1)
        built = cg.construct_matrix(motivating_tree, plan)
        assert built.matrix.rows() == [(0, 1, 1), (1, 0, 1)]

    def test_never_below_lower_bound(self, small_trees):
        for tree in small_trees[:25]:
            for m in range(1, tree.f + 1):
                plan = cg.optimal_sampling(tree, m)
                built = cg.construct_matrix(tree, plan)
                assert built.matrix.t_rows >= cg.lower_bound_tests(tree, m)

    def test_separability_bruteforce(self, small_trees):
        for tree in small_trees[:25]:
            for m in range(1, tree.f + 1):
                plan = cg.optimal_sampling(tree, m)
                sets = cg.possible_infected_sets(tree, plan)
                built = cg.construct_matrix(tree, plan, sets)
                assert cg.verify_separable(
                    built.matrix, plan, sets,
                    zero_reserved=cg.empty_infected_achievable(tree, plan),
                )

    def test_zero_vector_reserved_when_coarser(self, small_trees):
        for tree in small_trees[:15]:
            for m in range(1, tree.f):
                plan = cg.optimal_sampling(tree, m)
                built = cg.construct_matrix(tree, plan)
                for s in cg.possible_infected_sets(tree, plan):
                    assert cg.encode(built.matrix, plan, s) != 0

    def test_decode_encode_identity(self, small_trees):
        for tree in small_trees[:25]:
            for m in range(1, tree.f + 1):
                plan = cg.optimal_sampling(tree, m)
                built = cg.construct_matrix(tree, plan)
                for s in cg.possible_infected_sets(tree, plan):
                    y = cg.encode(built.matrix, plan, s)
                    assert cg.decode(built.decode_table, y) == frozenset(s)

    def test_hamming_weight_strictly_decreases(self, small_trees):
        """Ancestor OR values strictly outweigh every descendant's."""
        for tree in small_trees[:15]:
            for m in range(1, tree.f + 1):
                plan = cg.optimal_sampling(tree, m)
                built = cg.construct_matrix(tree, plan)
                values = {
                    frozenset(s): cg.encode(built.matrix, plan, s)
                    for s in cg.possible_infected_sets(tree, plan)
                }
                for s1, v1 in values.items():
                    for s2, v2 in values.items():
                        if s1 < s2:
                            assert v1 | v2 == v2
                            assert bin(v1).count("1") < bin(v2).count("1")


class TestDecode:
    def test_zero_decodes_to_empty(self, motivating_tree):
        plan = cg.optimal_sampling(motivating_tree, 2)
        built = cg.construct_matrix(motivating_tree, plan)
        assert cg.decode(built.decode_table, 0) == frozenset()
        assert cg.decode(built.decode_table, (0, 0, 0)) == frozenset()

    def test_column_of_first_rep(self, motivating_tree):
        plan = cg.optimal_sampling(motivating_tree, 1)
        built = cg.construct_matrix(motivating_tree, plan)
        y = built.matrix.columns[0]
        assert cg.decode(built.decode_table, y) == frozenset({1})

    def test_unrecognized_vector(self, motivating_tree):
        plan = cg.optimal_sampling(motivating_tree, 1)
        built = cg.construct_matrix(motivating_tree, plan)
        missing = next(
            y for y in range(1 << built.matrix.t_rows)
            if y not in built.decode_table.mapping
        )
        with pytest.raises(cg.UnrecognizedResultVector):
            cg.decode(built.decode_table, missing)

    def test_published_m2_matrix_decodes(self, motivating_tree):
        """A hand-specified valid matrix for level 2 decodes (1,1,1) -> {1,3}."""
        plan = cg.make_plan(motivating_tree, 2, (1, 3, 4, 8))
        cols = []
        for bits in ((1, 1, 0), (0, 1, 1), (0, 1, 0), (1, 0, 1)):
            val = 0
            for b in bits:
                val = (val << 1) | b
            cols.append(val)
        matrix = cg.TestMatrix(t_rows=3, columns=tuple(cols))
        sets = cg.possible_infected_sets(motivating_tree, plan)
        assert cg.verify_separable(matrix, plan, sets, zero_reserved=True)
        table = cg.build_decode_table(matrix, plan, sets, zero_reserved=True)
        assert cg.decode(table, (1, 1, 1)) == frozenset({1, 3})

    def test_published_m3_matrix_is_separable(self, motivating_tree):
        plan = cg.make_plan(motivating_tree, 3, (1, 3, 4, 6, 8))
        cols = []
        for bits in ((1, 1, 0), (0, 1, 1), (0, 1, 0), (1, 0, 0), (0, 0, 1)):
            val = 0
            for b in bits:
                val = (val << 1) | b
            cols.append(val)
        matrix = cg.TestMatrix(t_rows=3, columns=tuple(cols))
        sets = cg.possible_infected_sets(motivating_tree, plan)
        assert cg.verify_separable(matrix, plan, sets, zero_reserved=False)


class TestRunTwoStep:
    def test_bottom_level_zero_error(self, small_trees):
        for tree in small_trees[:10]:
            ens = tree.ensemble
            m = ens.f
            plan = cg.optimal_sampling(tree, m)
            built = cg.construct_matrix(tree, plan)
            for alpha in range(ens.f):
                for z in range(1, ens.n + 1):
                    state = cg.realize_infection(ens, alpha, z)
                    u_hat = cg.run_two_step(
                        tree, plan, built.matrix, built.decode_table, state
                    )
                    assert u_hat == state.infected

    def test_motivating_false_classification(self, motivating_tree):
        plan = cg.optimal_sampling(motivating_tree, 1)
        built = cg.construct_matrix(motivating_tree, plan)
        state = cg.realize_infection(motivating_tree.ensemble, 1, 1)  # {1,2} infected
        u_hat = cg.run_two_step(
            motivating_tree, plan, built.matrix, built.decode_table, state
        )
        assert u_hat == (True, True, True) + (False,) * 7
        errs = sum(a != b for a, b in zip(u_hat, state.infected))
        assert errs == 1

    def test_sampled_cluster_always_covered(self, small_trees):
        """At or above the sampling level the true cluster always holds a
        representative, so the infected sample set is never empty."""
        for tree in small_trees[:10]:
            ens = tree.ensemble
            for m in range(1, ens.f + 1):
                plan = cg.optimal_sampling(tree, m)
                built = cg.construct_matrix(tree, plan)
                zero_res = cg.empty_infected_achievable(tree, plan)
                for alpha in range(m):
                    for z in range(1, ens.n + 1):
                        state = cg.realize_infection(ens, alpha, z)
                        infected_reps = [
                            v for v in plan.selected if state.infected[v - 1]
                        ]
                        assert infected_reps
                        if zero_res:
                            assert cg.encode(built.matrix, plan, infected_reps) != 0


class TestExpSplit:
    def test_f10_bottom_is_13_rows(self):
        tree = cg.generate(cg.ExpSplitParams(f=10, delta=1))
        plan = cg.optimal_sampling(tree, 10)
        built = cg.construct_matrix(tree, plan)
        assert built.exact and built.matrix.t_rows == 13

    def test_construction_meets_min_tests(self):
        for f in range(1, 9):
            tree = cg.generate(cg.ExpSplitParams(f=f, delta=1))
            plan = cg.make_plan(
                tree, f, tuple(c[0] for c in tree.ensemble.formations[f - 1].clusters)
            )
            built = cg.construct_matrix(tree, plan)
            assert built.exact and built.matrix.t_rows == cg.min_tests(f)


def test_matrix_export_format(motivating_tree):
    plan = cg.optimal_sampling(motivating_tree, 1)
    built = cg.construct_matrix(motivating_tree, plan)
    text = built.matrix.export_text()
    lines = text.strip().split("\n")
    assert lines[0] == "2 3"
    assert lines[1:] == ["0 1 1", "1 0 1"]


def test_family_cap():
    tree = cg.generate(cg.ExpSplitParams(f=4, delta=1))
    plan = cg.optimal_sampling(tree, 4)
    with pytest.raises(cg.TooLarge):
        cg.construct_matrix(
            tree, plan,
            [frozenset({1, i}) for i in range(2, 2 ** 20 + 4)],
        )
