"""Compiled backtracking kernels.

All kernels walk vertices in a fixed elimination order. Position ``p`` has a
list of earlier neighbours ``nb_pos[nb_start[p]:nb_end[p]]``; for each of
those, row ``nb_row[q]`` of ``fmap`` maps the neighbour's label to the label it
forbids at ``p`` (or -1). Label sets are bitmasks, so m <= 8 keeps everything
in a single int64.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_OPTS = dict(cache=True, nogil=True)
_INLINE = dict(cache=True, nogil=True, inline="always")


@nb.njit(**_INLINE)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@nb.njit(**_INLINE)
def _lowbit_index(b):
    i = 0
    while (b >> i) != 1:
        i += 1
    return i


@nb.njit(**_INLINE)
def _mask_at(p, m, labels, nb_start, nb_end, nb_pos, nb_row, fmap, allowed):
    mask = allowed[p]
    for q in range(nb_start[p], nb_end[p]):
        f = fmap[nb_row[q], labels[nb_pos[q]]]
        if f >= 0:
            mask &= ~(1 << f)
    return mask


@nb.njit(**_OPTS)
def count_table(n, m, nb_start, nb_end, nb_pos, nb_row, fmap, allowed, keys, node_cap):
    """Coloring counts keyed by the labels of the first ``keys`` positions.

    Returns ``(table, nodes)``; ``table`` has m**keys entries indexed in
    base m with position 0 most significant. ``nodes`` is -1 if the cap hit.
    """
    size = 1
    for _ in range(keys):
        size *= m
    table = np.zeros(size, np.int64)
    if n == 0:
        table[0] = 1
        return table, 0
    labels = np.zeros(n, np.int64)
    avail = np.zeros(n, np.int64)
    nodes = 0
    p = 0
    while True:
        mask = _mask_at(p, m, labels, nb_start, nb_end, nb_pos, nb_row, fmap, allowed)
        nodes += 1
        if nodes > node_cap:
            return table, -1
        if p == n - 1:
            if keys < n:
                idx = 0
                for i in range(keys):
                    idx = idx * m + labels[i]
                table[idx] += _popcount(mask)
            else:
                base = 0
                for i in range(n - 1):
                    base = base * m + labels[i]
                mm = mask
                while mm:
                    b = mm & (-mm)
                    mm ^= b
                    table[base * m + _lowbit_index(b)] += 1
            p -= 1
        else:
            avail[p] = mask
        while p >= 0 and avail[p] == 0:
            p -= 1
        if p < 0:
            break
        b = avail[p] & (-avail[p])
        avail[p] ^= b
        labels[p] = _lowbit_index(b)
        p += 1
    return table, nodes


@nb.njit(**_OPTS)
def enumerate_colorings(n, m, nb_start, nb_end, nb_pos, nb_row, fmap, allowed, cap):
    """All colorings as rows of labels in position order; returns (array, count).

    If there are more than ``cap`` colorings, count is -1.
    """
    out = np.zeros((cap, max(n, 1)), np.int64)
    if n == 0:
        return out[:1], 1
    labels = np.zeros(n, np.int64)
    avail = np.zeros(n, np.int64)
    k = 0
    p = 0
    while True:
        mask = _mask_at(p, m, labels, nb_start, nb_end, nb_pos, nb_row, fmap, allowed)
        if p == n - 1:
            mm = mask
            while mm:
                b = mm & (-mm)
                mm ^= b
                if k >= cap:
                    return out, -1
                for i in range(n - 1):
                    out[k, i] = labels[i]
                out[k, n - 1] = _lowbit_index(b)
                k += 1
            p -= 1
        else:
            avail[p] = mask
        while p >= 0 and avail[p] == 0:
            p -= 1
        if p < 0:
            break
        b = avail[p] & (-avail[p])
        avail[p] ^= b
        labels[p] = _lowbit_index(b)
        p += 1
    return out[:k], k


@nb.njit(**_INLINE)
def _load_outer(o, nouter, nperm, digits, free_rows, free_inv, fmap, P, Pinv, m):
    x = o
    for k in range(nouter - 1, -1, -1):
        digits[k] = x % nperm
        x //= nperm
    for k in range(nouter):
        r = free_rows[k]
        for a in range(m):
            fmap[r, a] = P[digits[k], a] if free_inv[k] == 0 else Pinv[digits[k], a]


@nb.njit(**_INLINE)
def _pair_table(n, m, nb_start, nb_end, nb_pos, nb_row, fmap, allowed, labels, avail, M):
    # Colorings of the cover without its tail edge, keyed by the labels of
    # positions 0 and 1 (the tail edge's endpoints).
    for a in range(m):
        for b in range(m):
            M[a, b] = 0
    nodes = 0
    p = 0
    while True:
        mask = _mask_at(p, m, labels, nb_start, nb_end, nb_pos, nb_row, fmap, allowed)
        nodes += 1
        if p == n - 1:
            M[labels[0], labels[1]] += _popcount(mask)
            p -= 1
        else:
            avail[p] = mask
        while p >= 0 and avail[p] == 0:
            p -= 1
        if p < 0:
            break
        b = avail[p] & (-avail[p])
        avail[p] ^= b
        labels[p] = _lowbit_index(b)
        p += 1
    return nodes


@nb.njit(**_OPTS)
def dp_search(n, m, nb_start, nb_end, nb_pos, nb_row, fmap0, allowed, free_rows, free_inv,
              P, Pinv, lo, hi, nouter):
    """Minimum count over outer indices [lo, hi) times every tail permutation.

    The tail edge joins positions 0 and 1 and is absent from the fmap; its
    forbidden pairs are (a, P[s, a]). Returns (best, best_o, best_s, nodes),
    with the first minimum in (o, s) order.
    """
    fmap = fmap0.copy()
    nperm = P.shape[0]
    labels = np.zeros(n, np.int64)
    avail = np.zeros(n, np.int64)
    M = np.zeros((m, m), np.int64)
    digits = np.zeros(max(nouter, 1), np.int64)
    best = -1
    best_o = -1
    best_s = -1
    nodes = 0
    for o in range(lo, hi):
        _load_outer(o, nouter, nperm, digits, free_rows, free_inv, fmap, P, Pinv, m)
        nodes += _pair_table(n, m, nb_start, nb_end, nb_pos, nb_row, fmap, allowed, labels, avail, M)
        tot = M.sum()
        for s in range(nperm):
            c = tot
            for a in range(m):
                c -= M[a, P[s, a]]
            if best < 0 or c < best:
                best = c
                best_o = o
                best_s = s
    return best, best_o, best_s, nodes


@nb.njit(**_OPTS)
def dp_collect(n, m, nb_start, nb_end, nb_pos, nb_row, fmap0, allowed, free_rows, free_inv,
               P, Pinv, lo, hi, nouter, threshold, cap):
    """Every (o, s, count) in the range with count < threshold, in (o, s) order.

    Returns the (k, 3) array trimmed to its used rows and the node count;
    the node count is -1 if more than ``cap`` rows were produced.
    """
    fmap = fmap0.copy()
    nperm = P.shape[0]
    labels = np.zeros(n, np.int64)
    avail = np.zeros(n, np.int64)
    M = np.zeros((m, m), np.int64)
    digits = np.zeros(max(nouter, 1), np.int64)
    out = np.zeros((cap, 3), np.int64)
    k = 0
    nodes = 0
    for o in range(lo, hi):
        _load_outer(o, nouter, nperm, digits, free_rows, free_inv, fmap, P, Pinv, m)
        nodes += _pair_table(n, m, nb_start, nb_end, nb_pos, nb_row, fmap, allowed, labels, avail, M)
        tot = M.sum()
        for s in range(nperm):
            c = tot
            for a in range(m):
                c -= M[a, P[s, a]]
            if c < threshold:
                if k >= cap:
                    return out[:k], -1
                out[k, 0] = o
                out[k, 1] = s
                out[k, 2] = c
                k += 1
    return out[:k], nodes


@nb.njit(**_OPTS)
def triangle_sweep(n, m, nb_start, nb_end, nb_pos, nb_row, fmap0, allowed, free_rows, free_inv,
                   P, Pinv, lo, hi, nouter, tri_pos, tri_slot, pair_ok):
    """Check that every independent triple on every listed triangle extends.

    ``tri_pos[t]`` holds the positions of triangle t's vertices (a, b, c) and
    ``tri_slot[t, e]`` the permutation source of its edges ab, ac, bc:
    -1 for a fixed identity edge, k < nouter for outer digit k, nouter for the
    tail edge. ``pair_ok[e, perm]`` is the bitmask over triples
    a*m*m + b*m + c whose pair on edge e is not a cross-edge under ``perm``.
    Requires m**3 <= 64. Returns (o, s, t) of the first failure or (-1, -1, -1).
    """
    fmap = fmap0.copy()
    nperm = P.shape[0]
    T = tri_pos.shape[0]
    labels = np.zeros(n, np.int64)
    avail = np.zeros(n, np.int64)
    digits = np.zeros(max(nouter, 1), np.int64)
    zero = np.uint64(0)
    one = np.uint64(1)
    R = np.zeros((m, m, T), np.uint64)
    Rex = np.zeros((m, m, T), np.uint64)
    m2 = m * m
    for o in range(lo, hi):
        _load_outer(o, nouter, nperm, digits, free_rows, free_inv, fmap, P, Pinv, m)
        for a in range(m):
            for b in range(m):
                for t in range(T):
                    R[a, b, t] = zero
        p = 0
        while True:
            mask = _mask_at(p, m, labels, nb_start, nb_end, nb_pos, nb_row, fmap, allowed)
            if p == n - 1:
                mm = mask
                while mm:
                    bit = mm & (-mm)
                    mm ^= bit
                    labels[p] = _lowbit_index(bit)
                    for t in range(T):
                        idx = labels[tri_pos[t, 0]] * m2 + labels[tri_pos[t, 1]] * m + labels[tri_pos[t, 2]]
                        R[labels[0], labels[1], t] |= one << np.uint64(idx)
                p -= 1
            else:
                avail[p] = mask
            while p >= 0 and avail[p] == 0:
                p -= 1
            if p < 0:
                break
            bit = avail[p] & (-avail[p])
            avail[p] ^= bit
            labels[p] = _lowbit_index(bit)
            p += 1
        # Rex[a, x, t]: realized triples over colorings with label a at
        # position 0 and any label but x at position 1.
        for a in range(m):
            for x in range(m):
                for t in range(T):
                    acc = zero
                    for b in range(m):
                        if b != x:
                            acc |= R[a, b, t]
                    Rex[a, x, t] = acc
        for s in range(nperm):
            for t in range(T):
                need = ~zero
                for e in range(3):
                    sl = tri_slot[t, e]
                    if sl < 0:
                        pi = 0
                    elif sl < nouter:
                        pi = digits[sl]
                    else:
                        pi = s
                    need &= pair_ok[e, pi]
                got = zero
                for a in range(m):
                    got |= Rex[a, P[s, a], t]
                if (got & need) != need:
                    return o, s, t
    return -1, -1, -1


@nb.njit(**_OPTS)
def coloring_triples(cols, tri_pos, m):
    """Per coloring and triangle, the encoded label triple a*m*m + b*m + c."""
    k = cols.shape[0]
    T = tri_pos.shape[0]
    out = np.zeros((k, T), np.int64)
    for i in range(k):
        for t in range(T):
            out[i, t] = cols[i, tri_pos[t, 0]] * m * m + cols[i, tri_pos[t, 1]] * m + cols[i, tri_pos[t, 2]]
    return out


@nb.njit(**_OPTS)
def free_label_counts(hist, options, m):
    """For one tessellated triangle: free labels of the new vertex per triple.

    ``hist`` is unused beyond its length (m**3); ``options[q]`` lists the
    labels forbidden by (c_w, c_a, c_b) as three m-arrays: identity on w, and
    maps phi_a, phi_b. Returns g[q, triple] = m - |{c_w, phi_a(c_a), phi_b(c_b)}|.
    """
    Q = options.shape[0]
    size = hist.shape[0]
    g = np.zeros((Q, size), np.int64)
    for q in range(Q):
        for idx in range(size):
            cw = idx // (m * m)
            ca = (idx // m) % m
            cb = idx % m
            x = options[q, 0, cw]
            y = options[q, 1, ca]
            z = options[q, 2, cb]
            d = 1
            if y != x:
                d += 1
            if z != x and z != y:
                d += 1
            g[q, idx] = m - d
    return g


@nb.njit(**_OPTS)
def tessellation_bounds(n, m, nb_start, nb_end, nb_pos, nb_row, fmap0, allowed, free_rows, free_inv,
                        P, Pinv, digits_all, tri_pos, tri_twist_slot, G):
    """Per candidate cover: coloring count and, per triangle, the least excess.

    Row i of ``digits_all`` fixes every free edge. For triangle t the excess is
    min over the rows q of ``G`` of sum_I (G[q, triple_t(I)] - 1); it is left at
    0 when ``tri_twist_slot[t]`` is -1 or names a free edge whose digit is 0.
    """
    N = digits_all.shape[0]
    F = digits_all.shape[1]
    T = tri_pos.shape[0]
    Q = G.shape[0]
    size = m * m * m
    fmap = fmap0.copy()
    labels = np.zeros(n, np.int64)
    avail = np.zeros(n, np.int64)
    hist = np.zeros((T, size), np.int64)
    counts = np.zeros(N, np.int64)
    excess = np.zeros((N, T), np.int64)
    bins = np.zeros(size, np.int64)
    wts = np.zeros(size, np.int64)
    for i in range(N):
        for k in range(F):
            r = free_rows[k]
            d = digits_all[i, k]
            for a in range(m):
                fmap[r, a] = P[d, a] if free_inv[k] == 0 else Pinv[d, a]
        hist[:, :] = 0
        total = 0
        p = 0
        while True:
            mask = _mask_at(p, m, labels, nb_start, nb_end, nb_pos, nb_row, fmap, allowed)
            if p == n - 1:
                mm = mask
                while mm:
                    bit = mm & (-mm)
                    mm ^= bit
                    labels[p] = _lowbit_index(bit)
                    total += 1
                    for t in range(T):
                        hist[t, labels[tri_pos[t, 0]] * m * m + labels[tri_pos[t, 1]] * m + labels[tri_pos[t, 2]]] += 1
                p -= 1
            else:
                avail[p] = mask
            while p >= 0 and avail[p] == 0:
                p -= 1
            if p < 0:
                break
            bit = avail[p] & (-avail[p])
            avail[p] ^= bit
            labels[p] = _lowbit_index(bit)
            p += 1
        counts[i] = total
        for t in range(T):
            sl = tri_twist_slot[t]
            if sl < 0 or digits_all[i, sl] == 0:
                continue
            nz = 0
            for b in range(size):
                if hist[t, b]:
                    bins[nz] = b
                    wts[nz] = hist[t, b]
                    nz += 1
            best = -1
            for q in range(Q):
                acc = 0
                for z in range(nz):
                    acc += wts[z] * G[q, bins[z]]
                if best < 0 or acc < best:
                    best = acc
            excess[i, t] = best - total
    return counts, excess
