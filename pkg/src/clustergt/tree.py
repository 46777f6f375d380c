"""Cluster-formation-tree validation and node/ancestor statistics.

A valid tree is an ensemble in which every formation refines the previous
one. Clusters that survive unchanged across levels are stored as a single
node; the per-level and per-node unique counts drive the test-count bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import NotATree, UnknownNode
from .model import ClusterFormation, FormationEnsemble


@dataclass
class Node:
    """One unique cluster, spanning the levels where it appears unchanged."""

    members: tuple[int, ...]
    first_level: int  # 1-based level of first appearance
    last_level: int  # last level at which it is still unsplit
    parent: Optional["Node"] = None
    children: list["Node"] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)

    def __hash__(self) -> int:
        return hash(self.members)


@dataclass(frozen=True)
class FormationTree:
    """Validated refinement-ordered ensemble with a deduplicated node graph."""

    ensemble: FormationEnsemble
    nodes: dict  # canonical cluster tuple -> Node
    level_nodes: tuple  # per level (0-based), tuple of Node in cluster order
    _labels: tuple  # per level, vertex -> cluster index list
    _lambda_total: tuple  # 1-based prefix counts of unique nodes

    @property
    def n(self) -> int:
        return self.ensemble.n

    @property
    def f(self) -> int:
        return self.ensemble.f

    def labels(self, level: int) -> list:
        """vertex -> cluster index for 1-based ``level``."""
        return self._labels[level - 1]

    def lambda_total(self, level: int) -> int:
        """Number of unique nodes at and above the 1-based ``level``."""
        if not (1 <= level <= self.f):
            raise IndexError(f"level {level} outside 1..{self.f}")
        return self._lambda_total[level - 1]

    def node_of(self, cluster: Iterable[int]) -> Node:
        key = tuple(sorted(cluster))
        try:
            return self.nodes[key]
        except KeyError:
            raise UnknownNode(f"{key} is not a node of this tree") from None


def validate_tree(ens: FormationEnsemble) -> FormationTree:
    """Check the refinement property and build the node graph.

    Raises NotATree with the first violating 1-based level pair; callers
    handling arbitrary ensembles fall back to brute-force code paths.
    """
    n = ens.n
    labels = [form.labels() for form in ens.formations]

    nodes: dict[tuple, Node] = {}
    level_nodes: list[tuple[Node, ...]] = []

    first = ens.formations[0]
    row = []
    for c in first.clusters:
        node = Node(members=c, first_level=1, last_level=1)
        nodes[c] = node
        row.append(node)
    level_nodes.append(tuple(row))

    for i in range(1, ens.f):
        form = ens.formations[i]
        prev_form = ens.formations[i - 1]
        prev_lab = labels[i - 1]
        row = []
        fresh: dict[tuple, list] = {}
        for c in form.clusters:
            container = prev_form.clusters[prev_lab[c[0]]]
            if not set(c) <= set(container):
                raise NotATree(i, i + 1, f"cluster {c} not inside {container}")
            parent_node = nodes[container]
            if c == container:
                parent_node.last_level = i + 1
                row.append(parent_node)
            else:
                node = Node(members=c, first_level=i + 1, last_level=i + 1,
                            parent=parent_node)
                nodes[c] = node
                fresh.setdefault(container, []).append(node)
                row.append(node)
        for container, kids in fresh.items():
            nodes[container].children = kids
        level_nodes.append(tuple(row))

    lam = []
    count = 0
    by_first: dict[int, int] = {}
    for node in nodes.values():
        by_first[node.first_level] = by_first.get(node.first_level, 0) + 1
    for lvl in range(1, ens.f + 1):
        count += by_first.get(lvl, 0)
        lam.append(count)

    return FormationTree(
        ensemble=ens,
        nodes=nodes,
        level_nodes=tuple(level_nodes),
        _labels=tuple(labels),
        _lambda_total=tuple(lam),
    )


def lambda_of_node(tree: FormationTree, cluster: Iterable[int]) -> int:
    """Number of distinct proper-ancestor clusters of a node."""
    node = tree.node_of(cluster)
    count = 0
    cur = node.parent
    while cur is not None:
        count += 1
        cur = cur.parent
    return count


def lambda_table(tree: FormationTree) -> list[tuple[int, int, int]]:
    """Rows of (level, sigma, lambda_total) for CSV emission."""
    return [
        (lvl, tree.ensemble.formations[lvl - 1].sigma, tree.lambda_total(lvl))
        for lvl in range(1, tree.f + 1)
    ]
