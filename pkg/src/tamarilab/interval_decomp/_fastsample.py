"""Compiled kernels for the recursive sampler (float weights).

The same functions run uncompiled through ``.py_func``; the tests compare
both paths on identical uniform buffers.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _pick_root(N, table, u):
    total = 0.0
    for c in range(table.shape[1]):
        total += table[N, c]
    target = u * total
    last = -1
    for c in range(table.shape[1]):
        w = table[N, c]
        if w > 0.0:
            last = c
            if target < w:
                return c
            target -= w
    return last


@njit(cache=True)
def draw_tree_float(N, table, tails, rho, uniforms, size, k1s, marks, child1, child2, contacts):
    """Draw the decomposition tree of a uniform interval of size ``N``.

    Fills the node arrays in creation order (parents before children) and
    returns the number of nodes.  Consumes exactly ``2N + 1`` uniforms.
    """
    cap = table.shape[1] - 2
    pos = 0
    size[0] = N
    contacts[0] = _pick_root(N, table, uniforms[pos])
    pos += 1
    count = 1
    stack = np.empty(2 * N + 2, dtype=np.int64)
    top = 0
    stack[top] = 0
    top += 1
    while top > 0:
        top -= 1
        node = stack[top]
        s = size[node]
        child1[node] = -1
        child2[node] = -1
        if s == 0:
            continue
        c = contacts[node]
        n = s - 1
        target = uniforms[pos] * table[s, c] / rho
        pos += 1
        best_a = -1
        best_m = -1
        found = False
        for step in range(n + 1):
            if step % 2 == 0:
                a = step // 2
            else:
                a = n - step // 2
            b = n - a
            m_lo = c - min(b + 1, cap)
            if m_lo < 1:
                m_lo = 1
            m_hi = min(c - 1, a + 1, cap)
            for m in range(m_lo, m_hi + 1):
                w = tails[a, m] * table[b, c - m]
                if w > 0.0:
                    best_a = a
                    best_m = m
                    if target < w:
                        found = True
                        break
                    target -= w
            if found:
                break
        a = best_a
        m = best_m
        b = n - a
        # number of contacts of the first piece, at least m
        target = uniforms[pos] * tails[a, m]
        pos += 1
        k1 = -1
        top_k = min(a + 1, cap)
        for k in range(m, top_k + 1):
            w = table[a, k]
            if w > 0.0:
                k1 = k
                if target < w:
                    break
                target -= w
        k1s[node] = k1
        marks[node] = k1 - m + 1
        first = count
        second = count + 1
        count += 2
        size[first] = a
        contacts[first] = k1
        size[second] = b
        contacts[second] = c - m
        child1[node] = first
        child2[node] = second
        stack[top] = second
        top += 1
        stack[top] = first
        top += 1
    return count


@njit(cache=True)
def assemble(nnodes, size, marks, child1, child2):
    """Build both paths of the interval from a decomposition tree.

    Steps live in linked lists so that inserting the down step after the
    marked contact costs a walk along the contact chain only.
    """
    N = size[0]
    nsteps = 2 * N
    val = np.zeros(nsteps, dtype=np.uint8)
    nxt = np.full(nsteps, -1, dtype=np.int64)
    cnext = np.full(nsteps, -1, dtype=np.int64)
    qval = np.zeros(nsteps, dtype=np.uint8)
    qnxt = np.full(nsteps, -1, dtype=np.int64)
    ph = np.full(nnodes, -1, dtype=np.int64)
    pt = np.full(nnodes, -1, dtype=np.int64)
    pcf = np.full(nnodes, -1, dtype=np.int64)
    pcl = np.full(nnodes, -1, dtype=np.int64)
    qh = np.full(nnodes, -1, dtype=np.int64)
    qt = np.full(nnodes, -1, dtype=np.int64)
    free = 0
    for node in range(nnodes - 1, -1, -1):
        if size[node] == 0:
            continue
        c1 = child1[node]
        c2 = child2[node]
        up = free
        down = free + 1
        free += 2
        val[up] = 1
        val[down] = 0
        qup = up
        qdown = down
        qval[qup] = 1
        qval[qdown] = 0
        # upper path: u Q1 d Q2
        if qh[c1] >= 0:
            qnxt[qup] = qh[c1]
            qnxt[qt[c1]] = qdown
        else:
            qnxt[qup] = qdown
        if qh[c2] >= 0:
            qnxt[qdown] = qh[c2]
            qt[node] = qt[c2]
        else:
            qnxt[qdown] = -1
            qt[node] = qdown
        qh[node] = qup
        # lower path: u P1' d P1'' then P2
        j = marks[node]
        if j == 1:
            nxt[up] = down
            nxt[down] = ph[c1]
            tail0 = pt[c1] if ph[c1] >= 0 else down
            cnext[down] = pcf[c1]
            last0 = pcl[c1] if pcf[c1] >= 0 else down
        else:
            x = pcf[c1]
            for _ in range(j - 2):
                x = cnext[x]
            nxt[up] = ph[c1]
            nxt[down] = nxt[x]
            nxt[x] = down
            tail0 = down if x == pt[c1] else pt[c1]
            cnext[down] = cnext[x]
            last0 = down if x == pcl[c1] else pcl[c1]
            if x == pcl[c1]:
                cnext[down] = -1
        if ph[c2] >= 0:
            nxt[tail0] = ph[c2]
            pt[node] = pt[c2]
            cnext[last0] = pcf[c2]
            pcl[node] = pcl[c2]
        else:
            nxt[tail0] = -1
            pt[node] = tail0
            cnext[last0] = -1
            pcl[node] = last0
        ph[node] = up
        pcf[node] = down
    lower = np.empty(nsteps, dtype=np.uint8)
    upper = np.empty(nsteps, dtype=np.uint8)
    k = ph[0]
    i = 0
    while k >= 0:
        lower[i] = val[k]
        k = nxt[k]
        i += 1
    k = qh[0]
    i = 0
    while k >= 0:
        upper[i] = qval[k]
        k = qnxt[k]
        i += 1
    return lower, upper


@njit(cache=True)
def sample_one_float(N, table, tails, rho, uniforms):
    nn = 2 * N + 1
    size = np.zeros(nn, dtype=np.int64)
    k1s = np.zeros(nn, dtype=np.int64)
    marks = np.zeros(nn, dtype=np.int64)
    child1 = np.full(nn, -1, dtype=np.int64)
    child2 = np.full(nn, -1, dtype=np.int64)
    contacts = np.zeros(nn, dtype=np.int64)
    count = draw_tree_float(N, table, tails, rho, uniforms, size, k1s, marks, child1, child2, contacts)
    return assemble(count, size, marks, child1, child2)


@njit(cache=True)
def height_moments(steps, kmax):
    """Sums of ``h**k`` over all abscissas ``0 .. 2n`` for ``k = 0 .. kmax``."""
    out = np.zeros(kmax + 1, dtype=np.float64)
    h = 0
    for i in range(steps.shape[0] + 1):
        p = 1.0
        for k in range(kmax + 1):
            out[k] += p
            p *= h
        if i < steps.shape[0]:
            h += 1 if steps[i] == 1 else -1
    return out
