"""Pure-Python twins of the compiled graph kernels.

Every function here mirrors milpeval._kernels operation for operation:
same PRNG (splitmix64), same visit orders, same float expression shapes.
Integer work (triangle counts, degrees, edge weights) is exact in both
backends, and float accumulation happens in identical index order, so
the two backends return bit-identical values.
"""

import numpy as np

BACKEND = "python"

_MASK = (1 << 64) - 1


def _mix(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return z, state


class _Rng:
    """splitmix64 stream; must stay in lockstep with the compiled twin."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        z, self.state = _mix(self.state)
        return z

    def below(self, n):
        return self.next_u64() % n

    def permutation(self, n):
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order


def projection_clustering(cons_ptr, cons_idx, n_vars, degree_cap, sample_pairs, seed):
    """Average local clustering of the variable projection.

    Constraints with more than degree_cap members contribute
    sample_pairs sampled pairs instead of all of them. Rows of the
    projection are kept as big-int bitsets; triangle counting is then
    popcount(and), which is exact.
    """
    if n_vars <= 0:
        return 0.0
    rng = _Rng(seed)
    rows = [0] * n_vars
    m = len(cons_ptr) - 1
    for i in range(m):
        lo, hi = int(cons_ptr[i]), int(cons_ptr[i + 1])
        d = hi - lo
        if d < 2:
            continue
        if d <= degree_cap:
            for a in range(lo, hi):
                u = int(cons_idx[a])
                for b in range(a + 1, hi):
                    v = int(cons_idx[b])
                    rows[u] |= 1 << v
                    rows[v] |= 1 << u
        else:
            for _ in range(sample_pairs):
                a = rng.below(d)
                b = rng.below(d)
                if a == b:
                    continue
                u = int(cons_idx[lo + a])
                v = int(cons_idx[lo + b])
                rows[u] |= 1 << v
                rows[v] |= 1 << u

    total = 0.0
    for u in range(n_vars):
        row = rows[u]
        deg = row.bit_count()
        if deg < 2:
            continue
        paths = 0
        x = row
        while x:
            lsb = x & -x
            v = lsb.bit_length() - 1
            x ^= lsb
            paths += (row & rows[v]).bit_count()
        total += paths / (deg * (deg - 1))
    return total / n_vars


def louvain_labels(adj_ptr, adj_idx, n_nodes, seed, resolution=1.0, max_sweeps=64):
    """Greedy multi-level community labels for an undirected graph.

    adj_ptr/adj_idx is a symmetric CSR without self loops. Returns an
    int64 label array over the original nodes (labels are arbitrary
    ints, not compacted).
    """
    rng = _Rng(seed)
    ptr = [int(x) for x in adj_ptr]
    idx = [int(x) for x in adj_idx]
    wgt = [1.0] * len(idx)
    selfw = [0.0] * n_nodes
    node_label = list(range(n_nodes))

    for _level in range(32):
        comm, moved = _one_level(ptr, idx, wgt, selfw, rng, resolution, max_sweeps)
        labels = _compact(comm)
        n_comm = max(labels) + 1 if labels else 0
        for i in range(n_nodes):
            node_label[i] = labels[node_label[i]]
        if not moved or n_comm == len(comm):
            break
        ptr, idx, wgt, selfw = _aggregate(ptr, idx, wgt, selfw, labels, n_comm)
    return np.asarray(node_label, dtype=np.int64)


def _one_level(ptr, idx, wgt, selfw, rng, resolution, max_sweeps):
    n = len(ptr) - 1
    k = [0.0] * n
    for u in range(n):
        s = 2.0 * selfw[u]
        for e in range(ptr[u], ptr[u + 1]):
            s += wgt[e]
        k[u] = s
    two_m = 0.0
    for u in range(n):
        two_m += k[u]
    if two_m <= 0.0:
        return list(range(n)), False

    comm = list(range(n))
    tot = k[:]
    order = rng.permutation(n)
    nbw = [0.0] * n
    seen = [False] * n
    touched = []
    moved_any = False

    for _sweep in range(max_sweeps):
        moves = 0
        for u in order:
            c0 = comm[u]
            for e in range(ptr[u], ptr[u + 1]):
                v = idx[e]
                if v == u:
                    continue
                c = comm[v]
                if not seen[c]:
                    seen[c] = True
                    touched.append(c)
                nbw[c] += wgt[e]
            tot[c0] -= k[u]
            best_c = c0
            best_gain = nbw[c0] - resolution * (tot[c0] * k[u]) / two_m
            for c in touched:
                if c == c0:
                    continue
                gain = nbw[c] - resolution * (tot[c] * k[u]) / two_m
                if gain > best_gain:
                    best_gain = gain
                    best_c = c
            tot[best_c] += k[u]
            comm[u] = best_c
            if best_c != c0:
                moves += 1
                moved_any = True
            for c in touched:
                nbw[c] = 0.0
                seen[c] = False
            touched.clear()
        if moves == 0:
            break
    return comm, moved_any


def _compact(comm):
    """Relabel community ids by first appearance in node order."""
    remap = {}
    labels = []
    for c in comm:
        if c not in remap:
            remap[c] = len(remap)
        labels.append(remap[c])
    return labels


def _aggregate(ptr, idx, wgt, selfw, labels, n_comm):
    n = len(ptr) - 1
    new_selfw = [0.0] * n_comm
    inter = [{} for _ in range(n_comm)]
    intra = [0.0] * n_comm
    for u in range(n):
        cu = labels[u]
        new_selfw[cu] += selfw[u]
        for e in range(ptr[u], ptr[u + 1]):
            cv = labels[idx[e]]
            if cv == cu:
                intra[cu] += wgt[e]
            else:
                inter[cu][cv] = inter[cu].get(cv, 0.0) + wgt[e]
    new_ptr = [0]
    new_idx = []
    new_wgt = []
    for c in range(n_comm):
        new_selfw[c] += intra[c] / 2.0
        for cv in sorted(inter[c]):
            new_idx.append(cv)
            new_wgt.append(inter[c][cv])
        new_ptr.append(len(new_idx))
    return new_ptr, new_idx, new_wgt, new_selfw
