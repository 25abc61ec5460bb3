"""Compiled kernels for forest training and prediction.

The tree-growing kernel reproduces tree.gini_split exactly: identical
threshold placement, identical floating-point evaluation order of the
size-weighted Gini score, identical tie-breaking. Trees are stored as
flat arrays (feature == -1 marks a leaf; child fields hold tree-local
node ids) so batches of trees can be concatenated for prediction.

Feature subsets are drawn from an in-kernel splitmix64 stream so tree
growth needs no Python callbacks; the stream is seeded per tree from a
spawned SeedSequence, which keeps forests byte-identical for a given
seed no matter how many threads train them.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

U64 = np.uint64


@njit(cache=True, nogil=True, inline="always")
def _splitmix64(state):
    state = state + U64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    z = z ^ (z >> U64(31))
    return state, z


@njit(cache=True, nogil=True)
def grow_tree_flat(
    x,
    y,
    sample_idx,
    n_classes,
    m,
    rng_seed,
    node_feature,
    node_threshold,
    node_left,
    node_right,
    node_pred,
    node_counts,
    importance,
):
    """Grow one tree over x[sample_idx]; returns the number of nodes used.

    Output arrays must be preallocated with capacity 2*len(sample_idx).
    importance accumulates the un-normalized impurity decrease per feature.
    """
    n = sample_idx.shape[0]
    p = x.shape[1]
    state = rng_seed

    idx = sample_idx.copy()
    tmp = np.empty(n, dtype=np.int64)
    vbuf = np.empty(n, dtype=np.float64)
    counts = np.empty(n_classes, dtype=np.int64)
    cl = np.empty(n_classes, dtype=np.int64)
    cr = np.empty(n_classes, dtype=np.int64)
    cand = np.empty(p, dtype=np.int64)

    stack_node = np.empty(2 * n + 2, dtype=np.int64)
    stack_lo = np.empty(2 * n + 2, dtype=np.int64)
    stack_hi = np.empty(2 * n + 2, dtype=np.int64)
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    sp = 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        lo = stack_lo[sp]
        hi = stack_hi[sp]
        nn = hi - lo

        for k in range(n_classes):
            counts[k] = 0
        for t in range(lo, hi):
            counts[y[idx[t]] - 1] += 1
        ss = np.int64(0)
        nonzero = 0
        best_k = 0
        for k in range(n_classes):
            ss += counts[k] * counts[k]
            if counts[k] > 0:
                nonzero += 1
            if counts[k] > counts[best_k]:
                best_k = k

        node_feature[node] = -1
        node_threshold[node] = 0.0
        node_left[node] = -1
        node_right[node] = -1
        node_pred[node] = best_k + 1
        for k in range(n_classes):
            node_counts[node, k] = counts[k]

        if nn == 1 or nonzero <= 1:
            continue

        parent_score = nn - ss / nn

        if m >= p:
            mm = p
            for t in range(p):
                cand[t] = t
        else:
            mm = m
            for t in range(p):
                cand[t] = t
            for t in range(m):
                state, z = _splitmix64(state)
                r = t + np.int64(z % U64(p - t))
                cand[t], cand[r] = cand[r], cand[t]
            # ascending order keeps the lowest-feature tie-break rule
            for a in range(1, m):
                key = cand[a]
                b = a - 1
                while b >= 0 and cand[b] > key:
                    cand[b + 1] = cand[b]
                    b -= 1
                cand[b + 1] = key

        best_score = parent_score
        best_j = -1
        best_s = 0.0
        for jj in range(mm):
            j = cand[jj]
            for t in range(nn):
                vbuf[t] = x[idx[lo + t], j]
            order = np.argsort(vbuf[:nn], kind="mergesort")
            if vbuf[order[0]] == vbuf[order[nn - 1]]:
                continue
            for k in range(n_classes):
                cl[k] = 0
                cr[k] = counts[k]
            ssl = np.int64(0)
            ssr = ss
            for t in range(nn - 1):
                c = y[idx[lo + order[t]]] - 1
                ssl += 2 * cl[c] + 1
                cl[c] += 1
                ssr -= 2 * cr[c] - 1
                cr[c] -= 1
                v0 = vbuf[order[t]]
                v1 = vbuf[order[t + 1]]
                if v0 < v1:
                    s = (v0 + v1) / 2.0
                    if not v0 < s:  # midpoint rounded down onto v0
                        continue
                    nl = t + 1
                    nr = nn - nl
                    score = (nl - ssl / nl) + (nr - ssr / nr)
                    if score < best_score:
                        best_score = score
                        best_j = j
                        best_s = s

        if best_j < 0:
            continue

        importance[best_j] += parent_score - best_score

        a = lo
        r = 0
        for t in range(lo, hi):
            v = idx[t]
            if x[v, best_j] < best_s:
                idx[a] = v
                a += 1
            else:
                tmp[r] = v
                r += 1
        for t in range(r):
            idx[a + t] = tmp[t]
        nl = a - lo

        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        node_feature[node] = best_j
        node_threshold[node] = best_s
        node_left[node] = left_id
        node_right[node] = right_id

        stack_node[sp] = right_id
        stack_lo[sp] = lo + nl
        stack_hi[sp] = hi
        sp += 1
        stack_node[sp] = left_id
        stack_lo[sp] = lo
        stack_hi[sp] = lo + nl
        sp += 1

    return n_nodes


@njit(cache=True, nogil=True, parallel=True)
def forest_votes(x, feat, thr, left, right, pred, offsets, n_classes):
    """Per-row class vote counts over all trees in the concatenated arrays."""
    nrows = x.shape[0]
    ntrees = offsets.shape[0] - 1
    votes = np.zeros((nrows, n_classes), dtype=np.int64)
    for i in prange(nrows):
        for t in range(ntrees):
            base = offsets[t]
            node = np.int64(0)
            while feat[base + node] >= 0:
                if x[i, feat[base + node]] < thr[base + node]:
                    node = left[base + node]
                else:
                    node = right[base + node]
            votes[i, pred[base + node] - 1] += 1
    return votes
