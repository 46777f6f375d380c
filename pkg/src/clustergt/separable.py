"""Zero-error non-adaptive test matrices for restricted infected-set families.

Given the family of subsets of sampled individuals that can actually be
infected, a feasible matrix assigns every family member a distinct OR of its
columns. Construction searches for the minimum row count: a counting prune
rejects impossible row counts outright, a weight-stratified assignment
handles large perfect binary split trees, and a generic backtracking search
(kernelized) covers everything else. Decoding is an exact hash lookup.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import comb
from typing import Iterable, Optional, Sequence

from . import _kernels
from .errors import SearchExhausted, TooLarge, UnrecognizedResultVector
from .model import FormationEnsemble, InfectionState
from .sampling import SamplingPlan
from .tree import FormationTree, lambda_of_node

MAX_FAMILY = 1 << 20

# Generic search is attempted only below this column count; perfect binary
# split trees above it use the stratified constructor.
_STRATIFIED_MIN_COLS = 32


@dataclass(frozen=True)
class TestMatrix:
    """T x sigma_m binary matrix; column j belongs to the j-th representative.

    Columns are stored as integers read MSB-first: row r of column value v is
    ``(v >> (T - 1 - r)) & 1``.
    """

    t_rows: int
    columns: tuple[int, ...]

    def row(self, r: int) -> tuple[int, ...]:
        shift = self.t_rows - 1 - r
        return tuple((c >> shift) & 1 for c in self.columns)

    def rows(self) -> list[tuple[int, ...]]:
        return [self.row(r) for r in range(self.t_rows)]

    def export_text(self) -> str:
        lines = [f"{self.t_rows} {len(self.columns)}"]
        for r in range(self.t_rows):
            lines.append(" ".join(str(b) for b in self.row(r)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DecodeTable:
    """Exact-match lookup from result values to infected vertex sets."""

    t_rows: int
    mapping: dict  # int result value -> frozenset of vertices

    def export_csv_rows(self) -> list[tuple[str, str]]:
        rows = []
        for y in sorted(self.mapping):
            members = self.mapping[y]
            rows.append((format(y, f"0{self.t_rows}b") if self.t_rows else "",
                         ";".join(str(v) for v in sorted(members))))
        return rows


@dataclass(frozen=True)
class Construction:
    """construct_matrix result; ``exact`` is False when the search budget ran
    out and ``matrix.t_rows`` is only an upper bound."""

    matrix: TestMatrix
    decode_table: DecodeTable
    exact: bool
    t_lower: int
    search_nodes: int


def _ensemble_of(tree_or_ens) -> FormationEnsemble:
    if isinstance(tree_or_ens, FormationTree):
        return tree_or_ens.ensemble
    return tree_or_ens


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def _subtree_repsets(tree: FormationTree, plan: SamplingPlan) -> dict:
    """node (by canonical members) -> frozenset of representatives, for all
    unique nodes at levels 1..m."""
    m = plan.m
    rep_of = {}
    for cluster, rep in zip(tree.ensemble.formations[m - 1].clusters, plan.selected):
        rep_of[cluster] = rep

    memo: dict[tuple, frozenset] = {}

    def repset(node) -> frozenset:
        key = node.members
        got = memo.get(key)
        if got is not None:
            return got
        if node.last_level >= m:
            out = frozenset((rep_of[key],))
        else:
            acc = set()
            for child in node.children:
                acc |= repset(child)
            out = frozenset(acc)
        memo[key] = out
        return out

    out = {}
    for node in tree.nodes.values():
        if node.first_level <= m:
            out[node.members] = repset(node)
    return out


def possible_infected_sets(tree_or_ens, plan: SamplingPlan) -> tuple:
    """All nonempty subsets of the representatives that can be infected.

    On trees this walks the subtree above the sampling level, adding the
    merged representative sets; on arbitrary ensembles it intersects every
    cluster of every formation with the representative set.
    """
    if isinstance(tree_or_ens, FormationTree):
        sets = set(_subtree_repsets(tree_or_ens, plan).values())
    else:
        ens = tree_or_ens
        selected = frozenset(plan.selected)
        sets = set()
        for form in ens.formations:
            for cluster in form.clusters:
                hit = selected.intersection(cluster)
                if hit:
                    sets.add(frozenset(hit))
    return tuple(sorted(sets, key=lambda s: (len(s), sorted(s))))


def empty_infected_achievable(tree_or_ens, plan: SamplingPlan) -> bool:
    """True when some realizable infected cluster avoids all representatives."""
    if isinstance(tree_or_ens, FormationTree):
        return plan.m < tree_or_ens.f
    selected = frozenset(plan.selected)
    for form in tree_or_ens.formations:
        for cluster in form.clusters:
            if not selected.intersection(cluster):
                return True
    return False


def lower_bound_tests(tree: FormationTree, m: int) -> int:
    """Row-count lower bound from ancestor chains and the unique-node count.

    max(max_j lambda_{S_j^m} + 1, ceil(log2(lambda_m + 1))), with the +1
    terms removed when m equals the bottom level.
    """
    if not (1 <= m <= tree.f):
        raise IndexError(f"m={m} outside 1..{tree.f}")
    anc = max(
        lambda_of_node(tree, c) for c in tree.ensemble.formations[m - 1].clusters
    )
    lam = tree.lambda_total(m)
    if m < tree.f:
        return max(anc + 1, _ceil_log2(lam + 1))
    return max(anc, _ceil_log2(lam))


def _counting_infeasible(tree: FormationTree, plan: SamplingPlan, t_rows: int,
                         zero_reserved: bool) -> bool:
    """Sound (never wrong) Hall-style prune for trees.

    Each unique node needs a weight in [height + lo0, t_rows - ancestors]
    where lo0 is 1, or 0 for leaves when the zero vector is free; weight w
    admits at most C(t_rows, w) distinct vectors. Returns True only when no
    weight assignment can exist.
    """
    m = plan.m
    intervals = []

    height_memo: dict[tuple, int] = {}

    def height(node) -> int:
        key = node.members
        got = height_memo.get(key)
        if got is not None:
            return got
        if node.last_level >= m:
            h = 0
        else:
            h = 1 + max(height(ch) for ch in node.children)
        height_memo[key] = h
        return h

    for node in tree.nodes.values():
        if node.first_level > m:
            continue
        anc = 0
        cur = node.parent
        while cur is not None:
            anc += 1
            cur = cur.parent
        h = height(node)
        # One descendant chain may end on the zero vector when it is free.
        lo = h + (1 if zero_reserved else 0)
        hi = t_rows - anc
        if lo > hi:
            return True
        intervals.append((lo, hi))

    # Greedy capacity check: serve nodes in order of earliest deadline.
    by_lo: dict[int, list[int]] = {}
    for lo, hi in intervals:
        by_lo.setdefault(lo, []).append(hi)
    heap: list[int] = []
    zero_budget = 0 if zero_reserved else 1
    for w in range(0, t_rows + 1):
        for hi in by_lo.get(w, ()):  # nodes become available
            heapq.heappush(heap, hi)
        cap = comb(t_rows, w) if w > 0 else zero_budget
        while cap > 0 and heap and heap[0] >= w:
            heapq.heappop(heap)
            cap -= 1
        if heap and heap[0] < w:
            return True
    return len(heap) > 0


def _is_perfect_binary_subtree(tree: FormationTree, m: int) -> bool:
    for lvl in range(1, m + 1):
        if len(tree.level_nodes[lvl - 1]) != 1 << (lvl - 1):
            return False
    for lvl in range(1, m):
        for node in tree.level_nodes[lvl - 1]:
            if node.last_level != lvl or len(node.children) != 2:
                return False
    return True


def _match_slots(candidate_lists: list):
    """Maximum matching of slots to distinct values (Kuhn, deterministic).

    candidate_lists[s] is slot s's values in preference order. Returns
    (by_slot dict, unmatched slot list).
    """
    owner: dict[int, int] = {}  # value -> slot

    def try_slot(slot: int, seen: set) -> bool:
        for cand in candidate_lists[slot]:
            if cand in seen:
                continue
            seen.add(cand)
            if cand not in owner or try_slot(owner[cand], seen):
                owner[cand] = slot
                return True
        return False

    unmatched = []
    for slot in range(len(candidate_lists)):
        if not try_slot(slot, set()):
            unmatched.append(slot)
    by_slot = {slot: val for val, slot in owner.items()}
    return by_slot, unmatched


def _level_pairs(parent_vals: list, t_rows: int, rng) -> Optional[list]:
    """Two distinct drop-one children per parent, all distinct in the level.

    Kuhn matching between parent slots and candidate supports; candidate
    order comes from ``rng`` (None keeps ascending bit order), which only
    steers which of the many valid matchings is produced.
    """
    candidate_lists = []
    for pv in parent_vals:
        bits = [b for b in range(t_rows) if pv >> b & 1]
        if rng is not None:
            rng.shuffle(bits)
        for side in (0, 1):
            rot = bits[side:] + bits[:side]
            candidate_lists.append([pv ^ (1 << b) for b in rot])
    by_slot, unmatched = _match_slots(candidate_lists)
    if unmatched:
        return None
    return [
        tuple(sorted((by_slot[2 * p], by_slot[2 * p + 1])))
        for p in range(len(parent_vals))
    ]


def _submask_pairs(pv: int, t_rows: int, max_weight: int) -> list:
    """Unordered sibling pairs (A, B) with A | B = pv and weights bounded.

    Pairs drop disjoint nonempty bit sets; sorted by total dropped weight so
    large (cheap) children come first.
    """
    import itertools

    bits = [b for b in range(t_rows) if pv >> b & 1]
    width = len(bits)
    min_drop = max(1, width - max_weight)
    out = set()
    for da in range(min_drop, width):
        for sa in itertools.combinations(bits, da):
            a_val = pv
            for b in sa:
                a_val ^= 1 << b
            rest = [b for b in bits if b not in sa]
            for db in range(da, min(len(rest), width - min_drop) + 1):
                for sb in itertools.combinations(rest, db):
                    b_val = pv
                    for b in sb:
                        b_val ^= 1 << b
                    if b_val != a_val:
                        out.add((da + db, min(a_val, b_val), max(a_val, b_val)))
    return [(a, b) for _, a, b in sorted(out)]


def _bottom_pairs(parent_vals: list, t_rows: int, max_weight: int,
                  budget: int) -> Optional[list]:
    """Bottom-level sibling pairs, all 2N supports globally distinct.

    Tries the plain drop-one matching first; if the pool is too tight, runs
    a forward-checking search over general sibling pairs, most-constrained
    parent first, low-contention pairs first.
    """
    quick = _level_pairs(parent_vals, t_rows, None)
    if quick is not None and all(
        bin(v).count("1") <= max_weight for pair in quick for v in pair
    ):
        return quick

    n = len(parent_vals)
    pairs = [_submask_pairs(pv, t_rows, max_weight) for pv in parent_vals]
    contention: dict[int, int] = {}
    touch: dict[int, list] = {}
    for p, plist in enumerate(pairs):
        for a, b in plist:
            contention[a] = contention.get(a, 0) + 1
            contention[b] = contention.get(b, 0) + 1
            touch.setdefault(a, []).append(p)
            touch.setdefault(b, []).append(p)
    for p in range(n):
        pairs[p].sort(key=lambda ab: (contention[ab[0]] + contention[ab[1]], ab))
    for v in touch:
        touch[v] = sorted(set(touch[v]))

    used: set[int] = set()
    assigned: dict[int, tuple] = {}
    nodes = 0

    def open_count(p: int) -> int:
        c = 0
        for a, b in pairs[p]:
            if a not in used and b not in used:
                c += 1
        return c

    # availability cache, recounted only for parents touching changed values
    avail = [len(pairs[p]) for p in range(n)]

    def dfs() -> bool:
        nonlocal nodes
        if len(assigned) == n:
            return True
        best_p = None
        best_c = None
        for p in range(n):
            if p in assigned:
                continue
            c = avail[p]
            if best_c is None or c < best_c:
                best_p, best_c = p, c
                if c <= 1:
                    break
        for a, b in pairs[best_p]:
            if a in used or b in used:
                continue
            nodes += 1
            if nodes > budget:
                raise _BudgetExhausted()
            used.add(a)
            used.add(b)
            assigned[best_p] = (a, b)
            saved = []
            viable = True
            for q in set(touch.get(a, ())) | set(touch.get(b, ())):
                if q in assigned:
                    continue
                saved.append((q, avail[q]))
                avail[q] = open_count(q)
                if avail[q] == 0:
                    viable = False
            if viable and dfs():
                return True
            for q, old in saved:
                avail[q] = old
            used.discard(a)
            used.discard(b)
            del assigned[best_p]
        return False

    try:
        if not dfs():
            return None
    except _BudgetExhausted:
        return None
    return [assigned[p] for p in range(n)]


class _BudgetExhausted(Exception):
    pass


_STRATIFIED_ATTEMPTS = 24
_BOTTOM_BUDGET = 60_000


def _stratified_columns(tree: FormationTree, m: int, t_rows: int) -> Optional[list]:
    """Weight-stratified assignment for perfect binary split subtrees.

    Internal level l nodes receive weight t_rows + 1 - l via per-level
    drop-one matchings; the bottom level draws on all weights up to
    t_rows - m + 1 through a forward-checking pair search. A deterministic
    schedule of shuffled candidate orders retries the whole placement when
    a level jams. Returns leaf values in cluster order, or None.
    """
    import random as _random
    import sys as _sys

    if t_rows - m + 1 < 1:
        return None
    need = 4 * len(tree.level_nodes[m - 1]) + 1000
    old_limit = _sys.getrecursionlimit()
    if old_limit < need:
        _sys.setrecursionlimit(need)
    try:
        for attempt in range(_STRATIFIED_ATTEMPTS):
            columns = _try_stratified(tree, m, t_rows, _random.Random(attempt))
            if columns is not None:
                return columns
        return None
    finally:
        _sys.setrecursionlimit(old_limit)


def _try_stratified(tree: FormationTree, m: int, t_rows: int, rng) -> Optional[list]:
    assign = {tree.level_nodes[0][0].members: (1 << t_rows) - 1}
    for lvl in range(1, m):
        parents = tree.level_nodes[lvl - 1]
        parent_vals = [assign[node.members] for node in parents]
        if lvl + 1 == m:
            pairs = _bottom_pairs(parent_vals, t_rows, t_rows - m + 1,
                                  _BOTTOM_BUDGET)
        else:
            pairs = _level_pairs(parent_vals, t_rows, rng)
        if pairs is None:
            return None
        for node, (a_val, b_val) in zip(parents, pairs):
            left, right = node.children
            assign[left.members] = a_val
            assign[right.members] = b_val
    return [assign[node.members] for node in tree.level_nodes[m - 1]]


def _identity_columns(n_cols: int) -> list:
    return [1 << (n_cols - 1 - j) for j in range(n_cols)]


def construct_matrix(tree_or_ens, plan: SamplingPlan, sets: Optional[Iterable] = None,
                     *, budget: int = 10_000_000, strict: bool = False) -> Construction:
    """Find a minimum-row matrix separating the possible infected sets.

    Tries row counts upward from the lower bound; within each row count a
    counting prune (trees), the stratified constructor (large perfect binary
    split trees), or the generic backtracking kernel decides feasibility.
    When the node budget runs out the identity-matrix upper bound is
    returned with ``exact=False`` (or SearchExhausted is raised under
    ``strict``).
    """
    ens = _ensemble_of(tree_or_ens)
    if sets is None:
        sets = possible_infected_sets(tree_or_ens, plan)
    else:
        sets = tuple(frozenset(s) for s in sets)
    if len(sets) > MAX_FAMILY:
        raise TooLarge(f"{len(sets)} possible infected sets exceed cap {MAX_FAMILY}")

    col_of = {rep: j for j, rep in enumerate(plan.selected)}
    n_cols = len(plan.selected)
    set_cols = tuple(tuple(sorted(col_of[v] for v in s)) for s in sets)
    zero_res = empty_infected_achievable(tree_or_ens, plan)

    is_tree = isinstance(tree_or_ens, FormationTree)
    if is_tree:
        t_lower = lower_bound_tests(tree_or_ens, plan.m)
    else:
        t_lower = _ceil_log2(len(sets) + (1 if zero_res else 0))
    t_start = max(t_lower, 1)

    perfect = is_tree and _is_perfect_binary_subtree(tree_or_ens, plan.m)

    nodes_total = 0
    columns = None
    t_used = None
    exact = True
    unproven_skip = False
    for t_rows in range(t_start, n_cols + 1):
        if len(sets) + (1 if zero_res else 0) > 1 << t_rows:
            continue
        if is_tree and _counting_infeasible(tree_or_ens, plan, t_rows, zero_res):
            continue
        if perfect:
            got = _stratified_columns(tree_or_ens, plan.m, t_rows)
            if got is not None:
                columns, t_used = got, t_rows
                exact = not unproven_skip
                break
            if n_cols > _STRATIFIED_MIN_COLS:
                # too large for the generic search; a later success is only
                # an upper bound
                unproven_skip = True
                continue
        got, nodes, exhausted = _kernels.find_columns(
            set_cols, n_cols, t_rows, zero_res, budget - nodes_total
        )
        nodes_total += nodes
        if got is not None:
            columns, t_used = got, t_rows
            exact = exact and not unproven_skip
            break
        if exhausted:
            exact = False
            break

    if columns is None:
        # Budget ran out (or stratified jammed): fall back to the always
        # feasible identity matrix and report inexactness.
        exact = False
        columns, t_used = _identity_columns(n_cols), n_cols

    if strict and not exact:
        raise SearchExhausted(t_used)

    matrix = TestMatrix(t_rows=t_used, columns=tuple(columns))
    table = _build_decode_table(matrix, plan, sets, set_cols, zero_res)
    return Construction(matrix=matrix, decode_table=table, exact=exact,
                        t_lower=t_lower, search_nodes=nodes_total)


def _build_decode_table(matrix: TestMatrix, plan: SamplingPlan, sets, set_cols,
                        zero_reserved: bool) -> DecodeTable:
    mapping = {}
    if zero_reserved:
        mapping[0] = frozenset()
    for s, cols in zip(sets, set_cols):
        y = 0
        for c in cols:
            y |= matrix.columns[c]
        if y in mapping:
            raise ValueError(
                f"matrix does not separate {set(s)} from {set(mapping[y])}"
            )
        mapping[y] = frozenset(s)
    return DecodeTable(t_rows=matrix.t_rows, mapping=mapping)


def build_decode_table(matrix: TestMatrix, plan: SamplingPlan, sets,
                       zero_reserved: bool) -> DecodeTable:
    """Decode table for any matrix claimed to separate ``sets``.

    Raises ValueError when two sets collide, i.e. the matrix is not actually
    separating.
    """
    sets = tuple(frozenset(s) for s in sets)
    col_of = {rep: j for j, rep in enumerate(plan.selected)}
    set_cols = tuple(tuple(sorted(col_of[v] for v in s)) for s in sets)
    return _build_decode_table(matrix, plan, sets, set_cols, zero_reserved)


def encode(matrix: TestMatrix, plan: SamplingPlan, infected_reps: Iterable) -> int:
    """Result value produced when exactly the given representatives are infected."""
    y = 0
    col_of = {rep: j for j, rep in enumerate(plan.selected)}
    for v in infected_reps:
        y |= matrix.columns[col_of[v]]
    return y


def decode(table: DecodeTable, y) -> frozenset:
    """Exact lookup of a result vector (int or 0/1 sequence, MSB row first)."""
    if not isinstance(y, int):
        bits = list(y)
        if len(bits) != table.t_rows:
            raise UnrecognizedResultVector(
                f"result vector has {len(bits)} rows, expected {table.t_rows}"
            )
        val = 0
        for b in bits:
            val = (val << 1) | (1 if b else 0)
        y = val
    try:
        return table.mapping[y]
    except KeyError:
        raise UnrecognizedResultVector(
            f"result value {y:#x} not in decode table"
        ) from None


def verify_separable(matrix: TestMatrix, plan: SamplingPlan, sets,
                     zero_reserved: bool = False) -> bool:
    """Brute-force check of OR-distinctness over the whole family."""
    sets = tuple(sets)
    if len(sets) > MAX_FAMILY:
        raise TooLarge(f"{len(sets)} sets exceed verification cap")
    seen = {0} if zero_reserved else set()
    for s in sets:
        y = encode(matrix, plan, s)
        if y in seen:
            return False
        seen.add(y)
    return True


def run_two_step(tree_or_ens, plan: SamplingPlan, matrix: TestMatrix,
                 table: DecodeTable, state: InfectionState) -> tuple:
    """Full pipeline: pool the representatives, decode, expand cluster-wise."""
    ens = _ensemble_of(tree_or_ens)
    y = 0
    for j, rep in enumerate(plan.selected):
        if state.infected[rep - 1]:
            y |= matrix.columns[j]
    k_hat = decode(table, y)
    u_hat = [False] * ens.n
    for cluster, rep in zip(ens.formations[plan.m - 1].clusters, plan.selected):
        status = rep in k_hat
        if status:
            for v in cluster:
                u_hat[v - 1] = True
    return tuple(u_hat)
