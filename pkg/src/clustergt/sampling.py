"""Representative selection: misclassification costs and optimal sampling.

The cost of testing vertex k at level i is the probability-weighted count of
misclassifications k's status would induce across the finer formations; the
optimal sampling function picks the cheapest vertex of every cluster. The
analytic expected-false-classification formulas here are cross-checked
against exhaustive (formation, patient-zero) enumeration in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import FormationEnsemble
from .tree import FormationTree


class OpCounter:
    """Counts detached-cluster visits inside beta (complexity regression)."""

    def __init__(self):
        self.visits = 0

    def reset(self):
        self.visits = 0


op_counter = OpCounter()


@dataclass(frozen=True)
class SamplingPlan:
    """Chosen sampling level m (1-based) and one representative per cluster."""

    m: int
    selected: tuple[int, ...]


def make_plan(tree_or_ens, m: int, selected: Sequence[int]) -> SamplingPlan:
    """Validate and build a sampling plan for level m (1-based)."""
    ens = tree_or_ens.ensemble if isinstance(tree_or_ens, FormationTree) else tree_or_ens
    if not (1 <= m <= ens.f):
        raise IndexError(f"m={m} outside 1..{ens.f}")
    form = ens.formations[m - 1]
    chosen = tuple(selected)
    if len(chosen) != form.sigma:
        raise ValueError(f"need {form.sigma} representatives, got {len(chosen)}")
    if len(set(chosen)) != len(chosen):
        raise ValueError("representatives must be distinct")
    for rep, cluster in zip(chosen, form.clusters):
        if rep not in cluster:
            raise ValueError(f"representative {rep} not in cluster {cluster}")
    return SamplingPlan(m=m, selected=chosen)


def beta(tree: FormationTree, level: int, vertex: int):
    """Misclassification cost of sampling ``vertex`` at 1-based ``level``.

    Sum over finer levels j of p(F_j) * (|S^j(k)| * |S^i(k) \\ S^j(k)| +
    sum of squared sizes of the F_j clusters inside the difference set).
    Returns an exact Fraction when the ensemble probabilities are exact.
    """
    ens = tree.ensemble
    f = ens.f
    if not (1 <= level <= f):
        raise IndexError(f"level {level} outside 1..{f}")
    if not (1 <= vertex <= ens.n):
        raise IndexError(f"vertex {vertex} outside 1..{ens.n}")
    if level == f:
        return Fraction(0)

    size_i = len(ens.formations[level - 1].clusters[tree.labels(level)[vertex]])

    total = Fraction(0)
    cur = ens.formations[level - 1].clusters[tree.labels(level)[vertex]]
    detached: list = []
    ssq = 0
    for j in range(level + 1, f + 1):
        lab_j = tree.labels(j)
        new_cur = ens.formations[j - 1].clusters[lab_j[vertex]]
        if new_cur != cur:
            # k's cluster split: siblings join the detached set
            node = tree.nodes[cur]
            for child in node.children:
                if vertex not in child.members:
                    detached.append(child)
                    ssq += child.size * child.size
            cur = new_cur
        # detached clusters that split at this level are replaced by children
        next_detached = []
        for d in detached:
            op_counter.visits += 1
            if d.last_level < j:
                for child in d.children:
                    next_detached.append(child)
                    ssq += child.size * child.size
                ssq -= d.size * d.size
            else:
                next_detached.append(d)
        detached = next_detached
        size_j = len(new_cur)
        term = size_j * (size_i - size_j) + ssq
        total += ens.probs[j - 1] * term
    return total


def optimal_sampling(tree: FormationTree, m: int) -> SamplingPlan:
    """Cheapest representative per cluster of F_m, ties to smallest index."""
    ens = tree.ensemble
    if not (1 <= m <= ens.f):
        raise IndexError(f"m={m} outside 1..{ens.f}")
    chosen = []
    for cluster in ens.formations[m - 1].clusters:
        best_v = None
        best_cost = None
        for v in cluster:
            cost = beta(tree, m, v)
            if best_cost is None or cost < best_cost:
                best_cost, best_v = cost, v
        chosen.append(best_v)
    return SamplingPlan(m=m, selected=tuple(chosen))


def expected_false_given(tree: FormationTree, plan: SamplingPlan, alpha: int):
    """Expected false classifications given the true formation F_alpha.

    Zero when alpha <= m. Exact Fraction with denominator n otherwise.
    """
    ens = tree.ensemble
    m = plan.m
    if not (1 <= alpha <= ens.f):
        raise IndexError(f"alpha {alpha} outside 1..{ens.f}")
    if alpha <= m:
        return Fraction(0)

    form_m = ens.formations[m - 1]
    form_a = ens.formations[alpha - 1]
    lab_m = tree.labels(m)
    lab_a = tree.labels(alpha)

    # Q[i] = sum of squared sizes of the F_alpha clusters inside S_i^m
    q = [0] * form_m.sigma
    for c in form_a.clusters:
        q[lab_m[c[0]]] += len(c) * len(c)

    total = 0
    for i, rep in enumerate(plan.selected):
        rep_cluster = form_a.clusters[lab_a[rep]]
        sa = len(rep_cluster)
        sm = len(form_m.clusters[i])
        total += sa * (sm - sa) + q[i] - sa * sa
    return Fraction(total, ens.n)


def expected_false(tree: FormationTree, plan: SamplingPlan):
    """Probability-weighted expected false classifications of a plan."""
    ens = tree.ensemble
    total = Fraction(0)
    for alpha in range(plan.m + 1, ens.f + 1):
        total = total + ens.probs[alpha - 1] * expected_false_given(tree, plan, alpha)
    return total


def rep_cost_general(ens: FormationEnsemble, cluster: Sequence[int], vertex: int):
    """Cost of representing ``cluster`` by ``vertex``, for any ensemble.

    Counts, over every formation and every true infected cluster C weighted
    by |C|/n, the members of ``cluster`` whose status would disagree with the
    representative's. Works without the tree assumption (true clusters may
    straddle sampling clusters) and reduces to the beta-based cost on trees.
    """
    members = set(cluster)
    size_s = len(members)
    total = Fraction(0)
    for form, p in zip(ens.formations, ens.probs):
        acc = 0
        for c in form.clusters:
            inter = len(members.intersection(c))
            if vertex in c:
                acc += len(c) * (size_s - inter)
            else:
                acc += len(c) * inter
        total = total + p * Fraction(acc, ens.n)
    return total


def optimal_sampling_general(ens: FormationEnsemble, m: int) -> SamplingPlan:
    """Per-cluster cheapest representative for arbitrary ensembles.

    Brute-force analogue of optimal_sampling used when the ensemble is not a
    formation tree; ties break to the smallest vertex index.
    """
    if not (1 <= m <= ens.f):
        raise IndexError(f"m={m} outside 1..{ens.f}")
    chosen = []
    for cluster in ens.formations[m - 1].clusters:
        best_v = None
        best_cost = None
        for v in cluster:
            cost = rep_cost_general(ens, cluster, v)
            if best_cost is None or cost < best_cost:
                best_cost, best_v = cost, v
        chosen.append(best_v)
    return SamplingPlan(m=m, selected=tuple(chosen))


def expected_false_general(ens: FormationEnsemble, plan: SamplingPlan):
    """Expected false classifications of a plan over any ensemble."""
    form_m = ens.formations[plan.m - 1]
    total = Fraction(0)
    for cluster, rep in zip(form_m.clusters, plan.selected):
        total = total + rep_cost_general(ens, cluster, rep)
    return total


def all_plans(tree_or_ens, m: int):
    """Yield every single-representative plan for level m (test oracle)."""
    import itertools

    ens = tree_or_ens.ensemble if isinstance(tree_or_ens, FormationTree) else tree_or_ens
    clusters = ens.formations[m - 1].clusters
    for combo in itertools.product(*clusters):
        yield SamplingPlan(m=m, selected=tuple(combo))
