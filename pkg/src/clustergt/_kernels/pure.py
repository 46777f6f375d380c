"""Pure-Python kernel twins.

The compiled module `_fast` implements the same two entry points with the
same arithmetic in the same order, so either implementation produces
bit-identical results; only speed differs.
"""

from __future__ import annotations


def find_columns(set_cols, n_cols, t_rows, zero_reserved, budget):
    """Backtracking search for test-matrix columns.

    set_cols: tuple of tuples; each inner tuple lists the column indices of
    one possible infected set. A feasible assignment gives every set a
    distinct OR over its columns (with 0 additionally excluded when
    ``zero_reserved``).

    Column values are tried in ascending order, so the first solution is the
    lexicographically least one. Returns (columns, nodes, exhausted):
    columns is None when no assignment exists (exhausted False) or when the
    node budget ran out first (exhausted True).
    """
    limit = 1 << t_rows
    # sets complete when their highest column gets a value
    complete_at = [[] for _ in range(n_cols)]
    for s, cols in enumerate(set_cols):
        complete_at[max(cols)].append(s)

    used = {}
    if zero_reserved:
        used[0] = -1

    cols = [0] * n_cols
    cand = [0] * n_cols
    inserted = [[] for _ in range(n_cols)]
    nodes = 0
    depth = 0
    while True:
        if depth == n_cols:
            return list(cols), nodes, False
        v = cand[depth]
        placed = False
        while v < limit:
            nodes += 1
            if nodes > budget:
                return None, nodes, True
            cols[depth] = v
            ok = True
            ins = inserted[depth]
            for s in complete_at[depth]:
                orv = 0
                for c in set_cols[s]:
                    orv |= cols[c]
                if orv in used:
                    ok = False
                    break
                used[orv] = s
                ins.append(orv)
            if ok:
                cand[depth] = v + 1
                depth += 1
                if depth < n_cols:
                    cand[depth] = 0
                placed = True
                break
            for orv in ins:
                del used[orv]
            ins.clear()
            v += 1
        if placed:
            continue
        # exhausted this depth: backtrack
        if depth == 0:
            return None, nodes, False
        depth -= 1
        for orv in inserted[depth]:
            del used[orv]
        inserted[depth].clear()


def rep_costs(labels, sizes, probs, n, cluster, scratch_len):
    """Misclassification cost of each candidate representative of a cluster.

    labels: per formation, a list mapping 0-based vertex -> cluster index.
    sizes: per formation, a list of cluster sizes.
    probs: per formation float probability.
    cluster: 0-based vertices of the sampling cluster (candidates = members).

    cost(k) = sum over formations p * [ |C_k|*(|S| - 2*|S inter C_k|) +
    sum_C |C|*|S inter C| ] / n, with C_k the true cluster containing k.
    Float accumulation runs in formation order for cross-twin determinism.
    """
    size_s = len(cluster)
    m_count = len(cluster)
    costs = [0.0] * m_count
    inter = [0] * scratch_len
    for a in range(len(probs)):
        lab = labels[a]
        siz = sizes[a]
        touched = []
        for v in cluster:
            c = lab[v]
            if inter[c] == 0:
                touched.append(c)
            inter[c] += 1
        dot = 0
        for c in touched:
            dot += siz[c] * inter[c]
        p = probs[a]
        for idx in range(m_count):
            ck = lab[cluster[idx]]
            acc = siz[ck] * (size_s - 2 * inter[ck]) + dot
            costs[idx] += p * (acc / n)
        for c in touched:
            inter[c] = 0
    return costs
