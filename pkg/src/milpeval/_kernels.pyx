# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the graph kernels in _kernels_py.

Keep every loop and float expression in lockstep with the pure-Python
module: the selection logic in graphs.py promises bit-identical results
from either backend. Integer work is exact; float accumulations use the
same index order and the same expression shapes (built with
-ffp-contract=off so the compiler cannot fuse them).
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef extern from *:
    """
    #define mev_popcnt64(x) __builtin_popcountll(x)
    #define mev_ctz64(x) __builtin_ctzll(x)
    """
    int mev_popcnt64(unsigned long long) nogil
    int mev_ctz64(unsigned long long) nogil

BACKEND = "compiled"


cdef inline uint64_t _mix(uint64_t* state) nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t _below(uint64_t* state, uint64_t n) nogil:
    return _mix(state) % n


def projection_clustering(cons_ptr, cons_idx, n_vars, degree_cap, sample_pairs, seed):
    """Average local clustering of the variable projection (see twin)."""
    cdef int64_t n = n_vars
    if n <= 0:
        return 0.0
    cdef int64_t[::1] ptr = np.ascontiguousarray(cons_ptr, dtype=np.int64)
    cdef int64_t[::1] idx = np.ascontiguousarray(cons_idx, dtype=np.int64)
    cdef int64_t cap = degree_cap
    cdef int64_t pairs = sample_pairs
    cdef uint64_t state = <uint64_t>(int(seed) & ((1 << 64) - 1))

    cdef int64_t words = (n + 63) >> 6
    rows_arr = np.zeros(n * words, dtype=np.uint64)
    cdef uint64_t[::1] rows = rows_arr

    cdef int64_t m = ptr.shape[0] - 1
    cdef int64_t i, lo, hi, d, a, b, u, v, t
    with nogil:
        for i in range(m):
            lo = ptr[i]
            hi = ptr[i + 1]
            d = hi - lo
            if d < 2:
                continue
            if d <= cap:
                for a in range(lo, hi):
                    u = idx[a]
                    for b in range(a + 1, hi):
                        v = idx[b]
                        rows[u * words + (v >> 6)] |= (<uint64_t>1) << (v & 63)
                        rows[v * words + (u >> 6)] |= (<uint64_t>1) << (u & 63)
            else:
                for t in range(pairs):
                    a = <int64_t>_below(&state, <uint64_t>d)
                    b = <int64_t>_below(&state, <uint64_t>d)
                    if a == b:
                        continue
                    u = idx[lo + a]
                    v = idx[lo + b]
                    rows[u * words + (v >> 6)] |= (<uint64_t>1) << (v & 63)
                    rows[v * words + (u >> 6)] |= (<uint64_t>1) << (u & 63)

    cdef double total = 0.0
    cdef int64_t deg, paths, w, base, vbase
    cdef uint64_t x
    with nogil:
        for u in range(n):
            base = u * words
            deg = 0
            for w in range(words):
                deg += mev_popcnt64(rows[base + w])
            if deg < 2:
                continue
            paths = 0
            for w in range(words):
                x = rows[base + w]
                while x != 0:
                    v = (w << 6) + mev_ctz64(x)
                    x &= x - 1
                    vbase = v * words
                    for t in range(words):
                        paths += mev_popcnt64(rows[base + t] & rows[vbase + t])
            total += <double>paths / <double>(deg * (deg - 1))
    return total / <double>n


def louvain_labels(adj_ptr, adj_idx, n_nodes, seed, resolution=1.0, max_sweeps=64):
    """Greedy multi-level community labels (see twin for the contract)."""
    cdef uint64_t state = <uint64_t>(int(seed) & ((1 << 64) - 1))
    cdef int64_t n_orig = n_nodes
    cdef double gamma = resolution
    cdef int sweeps = max_sweeps

    ptr = np.ascontiguousarray(adj_ptr, dtype=np.int64)
    idx = np.ascontiguousarray(adj_idx, dtype=np.int64)
    wgt = np.ones(idx.shape[0], dtype=np.float64)
    selfw = np.zeros(n_nodes, dtype=np.float64)
    node_label = np.arange(n_nodes, dtype=np.int64)

    cdef int64_t n_comm, n_cur
    cdef int moved
    for _level in range(32):
        n_cur = ptr.shape[0] - 1
        comm = np.empty(n_cur, dtype=np.int64)
        moved = _one_level(ptr, idx, wgt, selfw, &state, gamma, sweeps, comm)
        labels = np.empty(n_cur, dtype=np.int64)
        n_comm = _compact(comm, labels)
        node_label = labels[node_label]
        if moved == 0 or n_comm == n_cur:
            break
        ptr, idx, wgt, selfw = _aggregate(ptr, idx, wgt, selfw, labels, n_comm)
    return node_label


cdef int _one_level(
    int64_t[::1] ptr,
    int64_t[::1] idx,
    double[::1] wgt,
    double[::1] selfw,
    uint64_t* state,
    double gamma,
    int max_sweeps,
    int64_t[::1] comm,
):
    cdef int64_t n = ptr.shape[0] - 1
    k_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] k = k_arr
    cdef int64_t u, v, e, c, c0, best_c, i, j, n_touched
    cdef double s, two_m, gain, best_gain

    for u in range(n):
        s = 2.0 * selfw[u]
        for e in range(ptr[u], ptr[u + 1]):
            s += wgt[e]
        k[u] = s
    two_m = 0.0
    for u in range(n):
        two_m += k[u]
    for u in range(n):
        comm[u] = u
    if two_m <= 0.0:
        return 0

    tot_arr = k_arr.copy()
    cdef double[::1] tot = tot_arr
    order_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] order = order_arr
    for u in range(n):
        order[u] = u
    for i in range(n - 1, 0, -1):
        j = <int64_t>_below(state, <uint64_t>(i + 1))
        u = order[i]
        order[i] = order[j]
        order[j] = u

    nbw_arr = np.zeros(n, dtype=np.float64)
    seen_arr = np.zeros(n, dtype=np.uint8)
    touched_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] nbw = nbw_arr
    cdef cnp.uint8_t[::1] seen = seen_arr
    cdef int64_t[::1] touched = touched_arr

    cdef int moved_any = 0
    cdef int64_t moves
    cdef int sweep
    for sweep in range(max_sweeps):
        moves = 0
        for i in range(n):
            u = order[i]
            c0 = comm[u]
            n_touched = 0
            for e in range(ptr[u], ptr[u + 1]):
                v = idx[e]
                if v == u:
                    continue
                c = comm[v]
                if seen[c] == 0:
                    seen[c] = 1
                    touched[n_touched] = c
                    n_touched += 1
                nbw[c] += wgt[e]
            tot[c0] -= k[u]
            best_c = c0
            best_gain = nbw[c0] - gamma * (tot[c0] * k[u]) / two_m
            for j in range(n_touched):
                c = touched[j]
                if c == c0:
                    continue
                gain = nbw[c] - gamma * (tot[c] * k[u]) / two_m
                if gain > best_gain:
                    best_gain = gain
                    best_c = c
            tot[best_c] += k[u]
            comm[u] = best_c
            if best_c != c0:
                moves += 1
                moved_any = 1
            for j in range(n_touched):
                c = touched[j]
                nbw[c] = 0.0
                seen[c] = 0
        if moves == 0:
            break
    return moved_any


cdef int64_t _compact(int64_t[::1] comm, int64_t[::1] labels):
    cdef int64_t n = comm.shape[0]
    remap_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] remap = remap_arr
    cdef int64_t u, nxt = 0
    for u in range(n):
        if remap[comm[u]] < 0:
            remap[comm[u]] = nxt
            nxt += 1
        labels[u] = remap[comm[u]]
    return nxt


def _aggregate(ptr_in, idx_in, wgt_in, selfw_in, labels_in, n_comm_in):
    cdef int64_t[::1] ptr = ptr_in
    cdef int64_t[::1] idx = idx_in
    cdef double[::1] wgt = wgt_in
    cdef double[::1] selfw = selfw_in
    cdef int64_t[::1] labels = labels_in
    cdef int64_t n_comm = n_comm_in
    cdef int64_t n = ptr.shape[0] - 1
    cdef int64_t n_edges = idx.shape[0]

    # Community member lists, members ascending (counting sort by label).
    counts_arr = np.zeros(n_comm + 1, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef int64_t u, c, e, v, i, j, pos
    for u in range(n):
        counts[labels[u] + 1] += 1
    for c in range(n_comm):
        counts[c + 1] += counts[c]
    members_arr = np.empty(n, dtype=np.int64)
    fill_arr = counts_arr[:-1].copy()
    cdef int64_t[::1] members = members_arr
    cdef int64_t[::1] fill = fill_arr
    for u in range(n):
        c = labels[u]
        members[fill[c]] = u
        fill[c] += 1

    new_selfw_arr = np.zeros(n_comm, dtype=np.float64)
    new_ptr_arr = np.empty(n_comm + 1, dtype=np.int64)
    new_idx_arr = np.empty(n_edges, dtype=np.int64)
    new_wgt_arr = np.empty(n_edges, dtype=np.float64)
    cdef double[::1] new_selfw = new_selfw_arr
    cdef int64_t[::1] new_ptr = new_ptr_arr
    cdef int64_t[::1] new_idx = new_idx_arr
    cdef double[::1] new_wgt = new_wgt_arr

    nbw_arr = np.zeros(n_comm, dtype=np.float64)
    seen_arr = np.zeros(n_comm, dtype=np.uint8)
    touched_arr = np.empty(n_comm, dtype=np.int64)
    cdef double[::1] nbw = nbw_arr
    cdef cnp.uint8_t[::1] seen = seen_arr
    cdef int64_t[::1] touched = touched_arr

    cdef int64_t n_touched, cv, key, out = 0
    cdef double intra
    new_ptr[0] = 0
    for c in range(n_comm):
        intra = 0.0
        n_touched = 0
        for pos in range(counts[c], counts[c + 1]):
            u = members[pos]
            new_selfw[c] += selfw[u]
            for e in range(ptr[u], ptr[u + 1]):
                cv = labels[idx[e]]
                if cv == c:
                    intra += wgt[e]
                else:
                    if seen[cv] == 0:
                        seen[cv] = 1
                        touched[n_touched] = cv
                        n_touched += 1
                    nbw[cv] += wgt[e]
        new_selfw[c] += intra / 2.0
        # insertion sort: neighbor communities ascending
        for i in range(1, n_touched):
            key = touched[i]
            j = i - 1
            while j >= 0 and touched[j] > key:
                touched[j + 1] = touched[j]
                j -= 1
            touched[j + 1] = key
        for i in range(n_touched):
            cv = touched[i]
            new_idx[out] = cv
            new_wgt[out] = nbw[cv]
            out += 1
            nbw[cv] = 0.0
            seen[cv] = 0
        new_ptr[c + 1] = out

    return (
        new_ptr_arr,
        new_idx_arr[:out].copy(),
        new_wgt_arr[:out].copy(),
        new_selfw_arr,
    )
