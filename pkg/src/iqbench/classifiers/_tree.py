"""Compiled CART kernels used by the random forest.

Trees are stored flat: parallel arrays ``feature, threshold, left, right,
value`` where ``left == -1`` marks a leaf and ``value`` is the weighted
excited fraction of the samples that reached the node.
"""

import numba
import numpy as np

GINI = 0
ENTROPY = 1


@numba.njit(cache=True, nogil=True)
def _impurity(c0, c1, criterion):
    tot = c0 + c1
    if tot <= 0:
        return 0.0
    p0 = c0 / tot
    p1 = c1 / tot
    if criterion == GINI:
        return 1.0 - p0 * p0 - p1 * p1
    h = 0.0
    if p0 > 0:
        h -= p0 * np.log2(p0)
    if p1 > 0:
        h -= p1 * np.log2(p1)
    return h


@numba.njit(cache=True, nogil=True)
def build_tree(X, y, w, criterion, max_features, rand):
    """Grow one tree to purity on the samples with positive weight.

    ``rand`` holds one row of uniforms per potential node and drives the
    per-node feature permutation, so the tree is a pure function of its
    inputs. Features are visited in that order until ``max_features``
    non-constant ones have been scored.
    """
    n_features = X.shape[1]
    idx = np.flatnonzero(w > 0)
    m = idx.shape[0]
    cap = 2 * m + 1
    feature = np.full(cap, -1, dtype=np.int32)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    value = np.zeros(cap)

    st_node = np.empty(cap, dtype=np.int64)
    st_lo = np.empty(cap, dtype=np.int64)
    st_hi = np.empty(cap, dtype=np.int64)
    sp = 0
    st_node[0] = 0
    st_lo[0] = 0
    st_hi[0] = m
    sp = 1
    n_nodes = 1
    perm = np.empty(n_features, dtype=np.int64)

    while sp > 0:
        sp -= 1
        node = st_node[sp]
        lo = st_lo[sp]
        hi = st_hi[sp]
        c0 = 0.0
        c1 = 0.0
        for k in range(lo, hi):
            s = idx[k]
            if y[s] == 1:
                c1 += w[s]
            else:
                c0 += w[s]
        value[node] = c1 / (c0 + c1)
        if c0 == 0.0 or c1 == 0.0 or hi - lo < 2:
            continue

        for k in range(n_features):
            perm[k] = k
        for k in range(n_features - 1, 0, -1):
            r = int(rand[node % rand.shape[0], k] * (k + 1))
            if r > k:
                r = k
            tmp = perm[k]
            perm[k] = perm[r]
            perm[r] = tmp

        best_imp = np.inf
        best_f = -1
        best_thr = 0.0
        scored = 0
        for k in range(n_features):
            if scored >= max_features:
                break
            f = perm[k]
            seg = idx[lo:hi]
            vals = X[seg, f]
            order = np.argsort(vals, kind="mergesort")
            if vals[order[0]] == vals[order[-1]]:
                continue
            scored += 1
            l0 = 0.0
            l1 = 0.0
            for t in range(order.shape[0] - 1):
                s = seg[order[t]]
                if y[s] == 1:
                    l1 += w[s]
                else:
                    l0 += w[s]
                a = vals[order[t]]
                b = vals[order[t + 1]]
                if a == b:
                    continue
                r0 = c0 - l0
                r1 = c1 - l1
                imp = (l0 + l1) * _impurity(l0, l1, criterion) + (r0 + r1) * _impurity(r0, r1, criterion)
                mid = 0.5 * (a + b)
                if mid >= b:
                    mid = a
                if (imp < best_imp or (imp == best_imp and (f < best_f or (f == best_f and mid < best_thr)))):
                    best_imp = imp
                    best_f = f
                    best_thr = mid
        if best_f < 0:
            continue

        # partition idx[lo:hi] by the chosen split
        i = lo
        j = hi - 1
        while i <= j:
            if X[idx[i], best_f] <= best_thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        st_node[sp] = n_nodes
        st_lo[sp] = lo
        st_hi[sp] = i
        sp += 1
        st_node[sp] = n_nodes + 1
        st_lo[sp] = i
        st_hi[sp] = hi
        sp += 1
        n_nodes += 2

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy())


@numba.njit(cache=True, nogil=True)
def vote_fraction(X, roots, feature, threshold, left, right, vote):
    """Fraction of trees whose leaf votes excited, per row of X."""
    n = X.shape[0]
    n_trees = roots.shape[0]
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for t in range(n_trees):
            node = roots[t]
            while left[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            acc += vote[node]
        out[i] = acc / n_trees
    return out
