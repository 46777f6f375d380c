# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel twins; see `pure.py` for the reference semantics.

Arithmetic and iteration order match the pure implementation exactly, so the
two produce bit-identical results.
"""

from libc.stdlib cimport free, malloc


def find_columns(set_cols, int n_cols, int t_rows, bint zero_reserved, long long budget):
    cdef long long limit = 1LL << t_rows
    cdef int n_sets = len(set_cols)

    # Flatten set membership into C arrays.
    cdef int total = 0
    for cols in set_cols:
        total += len(cols)
    cdef int *flat = <int *> malloc(total * sizeof(int))
    cdef int *offs = <int *> malloc((n_sets + 1) * sizeof(int))
    cdef int *set_max = <int *> malloc(n_sets * sizeof(int)) if n_sets else NULL
    cdef long long *colv = <long long *> malloc(n_cols * sizeof(long long))
    cdef long long *cand = <long long *> malloc(n_cols * sizeof(long long))
    if flat == NULL or offs == NULL or colv == NULL or cand == NULL:
        raise MemoryError()
    cdef int s, c, i, mx
    cdef int pos = 0
    for s in range(n_sets):
        offs[s] = pos
        mx = 0
        for c in set_cols[s]:
            flat[pos] = c
            if c > mx:
                mx = c
            pos += 1
        set_max[s] = mx
    offs[n_sets] = pos

    complete_at = [[] for _ in range(n_cols)]
    for s in range(n_sets):
        complete_at[set_max[s]].append(s)

    used = {}
    if zero_reserved:
        used[0] = -1
    inserted = [[] for _ in range(n_cols)]

    cdef long long nodes = 0
    cdef int depth = 0
    cdef long long v, orv
    cdef bint ok, placed
    try:
        for i in range(n_cols):
            colv[i] = 0
            cand[i] = 0
        while True:
            if depth == n_cols:
                return [colv[i] for i in range(n_cols)], nodes, False
            v = cand[depth]
            placed = False
            while v < limit:
                nodes += 1
                if nodes > budget:
                    return None, nodes, True
                colv[depth] = v
                ok = True
                ins = inserted[depth]
                for s in complete_at[depth]:
                    orv = 0
                    for i in range(offs[s], offs[s + 1]):
                        orv |= colv[flat[i]]
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
                for prev in ins:
                    del used[prev]
                del ins[:]
                v += 1
            if placed:
                continue
            if depth == 0:
                return None, nodes, False
            depth -= 1
            for prev in inserted[depth]:
                del used[prev]
            del inserted[depth][:]
    finally:
        free(flat)
        free(offs)
        free(set_max)
        free(colv)
        free(cand)


def rep_costs(labels, sizes, probs, int n, cluster, int scratch_len):
    cdef int m_count = len(cluster)
    cdef int f_count = len(probs)
    cdef int size_s = m_count
    cdef int a, idx, c, v, ck, t_count
    cdef long long dot, acc
    cdef double p

    cdef int *clus = <int *> malloc(m_count * sizeof(int))
    cdef long long *inter = <long long *> malloc(scratch_len * sizeof(long long))
    cdef int *touched = <int *> malloc(m_count * sizeof(int))
    cdef double *costs = <double *> malloc(m_count * sizeof(double))
    cdef int *lab_c = NULL
    cdef long long *siz_c = NULL
    if clus == NULL or inter == NULL or touched == NULL or costs == NULL:
        raise MemoryError()
    cdef int max_sig = 0
    for a in range(f_count):
        if len(sizes[a]) > max_sig:
            max_sig = len(sizes[a])
    cdef int n_verts = len(labels[0]) if f_count else 0
    lab_c = <int *> malloc(n_verts * sizeof(int))
    siz_c = <long long *> malloc(max_sig * sizeof(long long))
    if lab_c == NULL or siz_c == NULL:
        free(clus); free(inter); free(touched); free(costs)
        if lab_c != NULL:
            free(lab_c)
        raise MemoryError()
    try:
        for idx in range(m_count):
            clus[idx] = cluster[idx]
            costs[idx] = 0.0
        for c in range(scratch_len):
            inter[c] = 0
        for a in range(f_count):
            lab = labels[a]
            siz = sizes[a]
            for v in range(n_verts):
                lab_c[v] = lab[v]
            for c in range(len(siz)):
                siz_c[c] = siz[c]
            t_count = 0
            for idx in range(m_count):
                c = lab_c[clus[idx]]
                if inter[c] == 0:
                    touched[t_count] = c
                    t_count += 1
                inter[c] += 1
            dot = 0
            for idx in range(t_count):
                c = touched[idx]
                dot += siz_c[c] * inter[c]
            p = probs[a]
            for idx in range(m_count):
                ck = lab_c[clus[idx]]
                acc = siz_c[ck] * (size_s - 2 * inter[ck]) + dot
                costs[idx] += p * (<double> acc / n)
            for idx in range(t_count):
                inter[touched[idx]] = 0
        return [costs[idx] for idx in range(m_count)]
    finally:
        free(clus)
        free(inter)
        free(touched)
        free(costs)
        free(lab_c)
        free(siz_c)
