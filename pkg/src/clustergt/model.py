"""Random connection graphs, cluster formations, and ensemble enumeration.

Vertices are labeled 1..n throughout. A cluster formation is a partition of
{1..n}; its canonical form sorts members inside each cluster and sorts the
clusters by their smallest member. Probabilities are kept as
``fractions.Fraction`` whenever the inputs allow it, so the bundled golden
values compare exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import TooManyUncertainEdges

Prob = Union[Fraction, float]

# 2^24 realizations is the hard ceiling for exhaustive enumeration.
MAX_UNCERTAIN_EDGES = 24


def as_exact_prob(value) -> Prob:
    """Coerce a probability to Fraction when that is lossless.

    Strings and integers become Fractions; Fractions pass through; floats
    stay floats (the caller opted out of exact arithmetic).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise TypeError(f"unsupported probability type: {type(value)!r}")


def _check_prob_range(p: Prob) -> None:
    if not (0 <= p <= 1):
        raise ValueError(f"probability {p} outside [0, 1]")


@dataclass(frozen=True)
class RandomConnectionGraph:
    """Undirected random graph with independent edge-existence probabilities.

    ``edges`` holds (i, j, p) triples with i < j and p in [0, 1].
    """

    n: int
    edges: tuple[tuple[int, int, Prob], ...]

    @staticmethod
    def build(n: int, edges: Iterable[tuple[int, int, object]]) -> "RandomConnectionGraph":
        if n < 1:
            raise ValueError("n must be positive")
        seen = set()
        out = []
        for i, j, p in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"edge ({i},{j}) outside vertex range 1..{n}")
            a, b = (i, j) if i < j else (j, i)
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a},{b})")
            seen.add((a, b))
            prob = as_exact_prob(p)
            _check_prob_range(prob)
            out.append((a, b, prob))
        out.sort(key=lambda e: (e[0], e[1]))
        return RandomConnectionGraph(n, tuple(out))


@dataclass(frozen=True)
class ClusterFormation:
    """A partition of {1..n} in canonical form."""

    n: int
    clusters: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_sets(n: int, sets: Iterable[Iterable[int]]) -> "ClusterFormation":
        canon = []
        seen: set[int] = set()
        for s in sets:
            members = tuple(sorted(s))
            if not members:
                raise ValueError("empty cluster")
            for v in members:
                if not (1 <= v <= n):
                    raise ValueError(f"vertex {v} outside 1..{n}")
                if v in seen:
                    raise ValueError(f"vertex {v} appears in two clusters")
                seen.add(v)
            canon.append(members)
        if len(seen) != n:
            missing = sorted(set(range(1, n + 1)) - seen)
            raise ValueError(f"partition does not cover vertices {missing}")
        canon.sort(key=lambda c: c[0])
        return ClusterFormation(n, tuple(canon))

    @property
    def sigma(self) -> int:
        """Number of clusters."""
        return len(self.clusters)

    def cluster_of(self, vertex: int) -> tuple[int, ...]:
        for c in self.clusters:
            if vertex in c:
                return c
        raise ValueError(f"vertex {vertex} outside 1..{self.n}")

    def labels(self) -> list[int]:
        """vertex -> cluster index array (index 0 unused)."""
        lab = [-1] * (self.n + 1)
        for idx, c in enumerate(self.clusters):
            for v in c:
                lab[v] = idx
        return lab


@dataclass(frozen=True)
class FormationEnsemble:
    """Ordered cluster formations with their probabilities.

    Formations are sorted by nondecreasing cluster count, ties broken by
    canonical form; probabilities are positive and sum to one.
    """

    formations: tuple[ClusterFormation, ...]
    probs: tuple[Prob, ...]

    @staticmethod
    def build(items: Iterable[tuple[ClusterFormation, object]]) -> "FormationEnsemble":
        pairs = [(f, as_exact_prob(p)) for f, p in items]
        if not pairs:
            raise ValueError("empty ensemble")
        n = pairs[0][0].n
        for f, p in pairs:
            if f.n != n:
                raise ValueError("formations disagree on n")
            if not p > 0:
                raise ValueError(f"non-positive probability {p}")
        keys = {f.clusters for f, _ in pairs}
        if len(keys) != len(pairs):
            raise ValueError("duplicate formation in ensemble")
        total = sum(p for _, p in pairs)
        if abs(total - 1) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")
        pairs.sort(key=lambda fp: (fp[0].sigma, fp[0].clusters))
        return FormationEnsemble(
            tuple(f for f, _ in pairs), tuple(p for _, p in pairs)
        )

    @property
    def n(self) -> int:
        return self.formations[0].n

    @property
    def f(self) -> int:
        """Number of formations."""
        return len(self.formations)

    def index_of(self, formation: ClusterFormation) -> int:
        """0-based index of a formation with the given canonical clusters."""
        for i, g in enumerate(self.formations):
            if g.clusters == formation.clusters:
                return i
        raise ValueError("formation not in ensemble")


@dataclass(frozen=True)
class InfectionState:
    """Realized infection vector for one (formation, patient zero) draw."""

    infected: tuple[bool, ...]
    patient_zero: int
    formation_index: int


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _components_to_formation(n: int, root_of: Sequence[int]) -> ClusterFormation:
    groups: dict[int, list[int]] = {}
    for v in range(1, n + 1):
        groups.setdefault(root_of[v], []).append(v)
    return ClusterFormation.from_sets(n, groups.values())


def enumerate_formations(g: RandomConnectionGraph) -> FormationEnsemble:
    """Enumerate the cluster-formation ensemble of a random connection graph.

    Edges with p=1 are contracted up front and p=0 edges dropped; the
    remaining uncertain edges are realized exhaustively (2^|E| cases, capped
    at 2^24), connected components computed per realization, and probability
    mass aggregated per distinct partition.
    """
    certain = [(i, j) for i, j, p in g.edges if p == 1]
    uncertain = [(i, j, p) for i, j, p in g.edges if 0 < p < 1]
    if len(uncertain) > MAX_UNCERTAIN_EDGES:
        raise TooManyUncertainEdges(
            f"{len(uncertain)} uncertain edges exceed cap {MAX_UNCERTAIN_EDGES}"
        )

    base = _DSU(g.n + 1)
    for i, j in certain:
        base.union(i, j)
    base_root = [base.find(v) for v in range(g.n + 1)]

    # Complement probabilities once; realizations multiply per-edge terms.
    one = Fraction(1)
    comp = [
        (one - p) if isinstance(p, Fraction) else (1.0 - p) for _, _, p in uncertain
    ]

    acc: dict[tuple, Prob] = {}
    m = len(uncertain)
    for mask in range(1 << m):
        dsu = _DSU(g.n + 1)
        dsu.parent = list(base_root)
        prob: Prob = one
        for e in range(m):
            i, j, p = uncertain[e]
            if mask >> e & 1:
                prob = prob * p
                dsu.union(i, j)
            else:
                prob = prob * comp[e]
        if prob == 0:
            continue
        form = _components_to_formation(g.n, [dsu.find(v) for v in range(g.n + 1)])
        key = form.clusters
        if key in acc:
            acc[key] = acc[key] + prob
        else:
            acc[key] = prob

    return FormationEnsemble.build(
        (ClusterFormation(g.n, key), p) for key, p in acc.items()
    )


def _enumerate_formations_bruteforce(g: RandomConnectionGraph) -> FormationEnsemble:
    """Reference enumeration without the p=1 contraction (test oracle)."""
    edges = [(i, j, p) for i, j, p in g.edges if p > 0]
    acc: dict[tuple, Prob] = {}
    one = Fraction(1)
    for bits in itertools.product((0, 1), repeat=len(edges)):
        prob: Prob = one
        dsu = _DSU(g.n + 1)
        for (i, j, p), b in zip(edges, bits):
            if b:
                prob = prob * p
                dsu.union(i, j)
            else:
                prob = prob * (one - p if isinstance(p, Fraction) else 1.0 - p)
        if prob == 0:
            continue
        form = _components_to_formation(g.n, [dsu.find(v) for v in range(g.n + 1)])
        acc[form.clusters] = acc.get(form.clusters, 0) + prob
    return FormationEnsemble.build(
        (ClusterFormation(g.n, key), p) for key, p in acc.items()
    )


def realize_infection(
    ens: FormationEnsemble, formation_index: int, patient_zero: int
) -> InfectionState:
    """Infection vector when the given formation is true and Z is given.

    Everyone in patient zero's cluster is infected, nobody else.
    """
    if not (0 <= formation_index < ens.f):
        raise IndexError(f"formation index {formation_index} outside 0..{ens.f - 1}")
    n = ens.n
    if not (1 <= patient_zero <= n):
        raise IndexError(f"patient zero {patient_zero} outside 1..{n}")
    cluster = set(ens.formations[formation_index].cluster_of(patient_zero))
    return InfectionState(
        infected=tuple(v in cluster for v in range(1, n + 1)),
        patient_zero=patient_zero,
        formation_index=formation_index,
    )
