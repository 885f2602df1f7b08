"""Compiled inner loops: union-find labelling, replica batches, explorations.

The per-edge uniform here must stay bit-identical to rng.uniforms_for_keys:
u = ((mix64(key ^ mix64(seed))) >> 11) * 2**-53, open iff u < prob.  Kernels
take the already-mixed seed (one uint64 per replica) so the splitmix chain
is shared with the numpy path and both routes can be compared exactly.
"""

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_NEG53 = 2.0 ** -53


@njit(cache=True, inline="always")
def _mix64(z):
    z = z + _GAMMA
    z = (z ^ (z >> _S30)) * _MIX_A
    z = (z ^ (z >> _S27)) * _MIX_B
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _is_open(key, hseed, prob):
    u = (_mix64(key ^ hseed) >> _S11) * _TWO_NEG53
    return u < prob


@njit(cache=True, inline="always")
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, inline="always")
def _union(parent, rank, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    if rank[ra] < rank[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    if rank[ra] == rank[rb]:
        rank[ra] += 1


@njit(cache=True, nogil=True)
def uf_from_open(eu, ev, open_, parent, rank):
    """Labels for one materialized configuration; parent flattened to roots."""
    n = parent.size
    for i in range(n):
        parent[i] = i
        rank[i] = 0
    for e in range(eu.size):
        if open_[e]:
            _union(parent, rank, eu[e], ev[e])
    for i in range(n):
        parent[i] = _find(parent, i)


@njit(cache=True, nogil=True)
def theta_batch(nv, eu, ev, keys, probs, hseeds, origin, bverts):
    """Per replica: does the origin share a cluster with any boundary vertex."""
    out = np.zeros(hseeds.size, np.uint8)
    parent = np.empty(nv, np.int64)
    rank = np.empty(nv, np.int64)
    for s in range(hseeds.size):
        h = hseeds[s]
        for i in range(nv):
            parent[i] = i
            rank[i] = 0
        for e in range(eu.size):
            if _is_open(keys[e], h, probs[e]):
                _union(parent, rank, eu[e], ev[e])
        ro = _find(parent, origin)
        for j in range(bverts.size):
            if _find(parent, bverts[j]) == ro:
                out[s] = 1
                break
    return out


@njit(cache=True, nogil=True)
def pair_batch(nv, eu, ev, keys, probs, hseeds, aidx, bidx, cidx):
    """Per replica flags: bit0 = A connected to B, bit1 = the joint cluster
    of A and B touches the censor vertex set (verdict could shift in a
    larger window)."""
    out = np.zeros(hseeds.size, np.uint8)
    parent = np.empty(nv, np.int64)
    rank = np.empty(nv, np.int64)
    visit = np.zeros(nv, np.int64)
    stamp = 0
    for s in range(hseeds.size):
        h = hseeds[s]
        for i in range(nv):
            parent[i] = i
            rank[i] = 0
        for e in range(eu.size):
            if _is_open(keys[e], h, probs[e]):
                _union(parent, rank, eu[e], ev[e])
        stamp += 1
        for j in range(aidx.size):
            visit[_find(parent, aidx[j])] = stamp
        hit = 0
        for j in range(bidx.size):
            if visit[_find(parent, bidx[j])] == stamp:
                hit = 1
                break
        for j in range(bidx.size):
            visit[_find(parent, bidx[j])] = stamp
        cens = 0
        for j in range(cidx.size):
            if visit[_find(parent, cidx[j])] == stamp:
                cens = 1
                break
        out[s] = hit | (cens << 1)
    return out


@njit(cache=True, nogil=True)
def escape_batch(nv, eu, ev, keys, probs, hseeds, eptr, eord, vptr, vord,
                 origin):
    """Largest r with origin connected to the shell at distance r, per replica.

    Shells are activated in order; the escape event is nested in r, so the
    loop stops at the first disconnected shell.
    """
    out = np.zeros(hseeds.size, np.int64)
    parent = np.empty(nv, np.int64)
    rank = np.empty(nv, np.int64)
    rmax = eptr.size - 2
    for s in range(hseeds.size):
        h = hseeds[s]
        for i in range(nv):
            parent[i] = i
            rank[i] = 0
        reach = 0
        for r in range(1, rmax + 1):
            for j in range(eptr[r], eptr[r + 1]):
                e = eord[j]
                if _is_open(keys[e], h, probs[e]):
                    _union(parent, rank, eu[e], ev[e])
            ro = _find(parent, origin)
            ok = False
            for j in range(vptr[r], vptr[r + 1]):
                if _find(parent, vord[j]) == ro:
                    ok = True
                    break
            if not ok:
                break
            reach = r
        out[s] = reach
    return out


@njit(cache=True, inline="always")
def _heap_push(heap, n, val):
    heap[n] = val
    i = n
    n += 1
    while i > 0:
        p = (i - 1) >> 1
        if heap[p] <= heap[i]:
            break
        tmp = heap[p]
        heap[p] = heap[i]
        heap[i] = tmp
        i = p
    return n


@njit(cache=True, inline="always")
def _heap_pop(heap, n):
    top = heap[0]
    n -= 1
    heap[0] = heap[n]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        c = l
        r = l + 1
        if r < n and heap[r] < heap[l]:
            c = r
        if heap[i] <= heap[c]:
            break
        tmp = heap[i]
        heap[i] = heap[c]
        heap[c] = tmp
        i = c
    return top, n


@njit(cache=True, nogil=True)
def explore_batch(nv, eu, ev, keys, probs, hseeds, inc_ptr, inc_edge,
                  minus_mask, plus_mask, binit_ptr, binit_edge, anchor_z,
                  vh, voff, bflag, l0, cap):
    """Sequential cone explorations per replica, least-index edge revelation.

    Returns (t, censored): t > 0 is the ordinal of the first succeeding
    exploration, t == 0 means the cap on explorations was hit with every one
    failed, t < 0 means the anchor supply ran out after |t| failures.
    For t > 0, censored marks a leaky success (the succeeding exploration
    added a window-boundary vertex, so a larger window could flip it);
    failures are definitive, so for t <= 0 censored just records whether
    any exploration's added set exited the window.
    """
    nrep = hseeds.size
    na = anchor_z.size
    t_out = np.zeros(nrep, np.int64)
    c_out = np.zeros(nrep, np.uint8)
    cstamp = np.zeros(nv, np.int64)
    estamp = np.zeros(keys.size, np.int64)
    heap = np.empty(keys.size + 8, np.int64)
    tick = 0
    for s in range(nrep):
        h = hseeds[s]
        ai = 0
        count = 0
        any_touch = 0
        while True:
            if ai >= na:
                t_out[s] = -count
                c_out[s] = any_touch
                break
            if count >= cap:
                t_out[s] = 0
                c_out[s] = any_touch
                break
            count += 1
            tick += 1
            # a sorted id list already satisfies the min-heap ordering
            hs = binit_ptr[ai + 1] - binit_ptr[ai]
            for j in range(hs):
                heap[j] = binit_edge[binit_ptr[ai] + j]
            failed = False
            touch = 0
            zneed = np.int64(-(1 << 60))
            while hs > 0:
                e, hs = _heap_pop(heap, hs)
                if estamp[e] == tick:
                    continue
                estamp[e] = tick
                u = eu[e]
                v = ev[e]
                uin = minus_mask[ai, u] == 1 or cstamp[u] == tick
                vin = minus_mask[ai, v] == 1 or cstamp[v] == tick
                if uin and vin:
                    continue
                w = v if uin else u
                if not _is_open(keys[e], h, probs[e]):
                    continue
                cstamp[w] = tick
                if bflag[w] == 1:
                    touch = 1
                need = vh[w] + voff[w]
                if need > zneed:
                    zneed = need
                if plus_mask[ai, w] == 1:
                    failed = True
                    break
                for j in range(inc_ptr[w], inc_ptr[w + 1]):
                    e2 = inc_edge[j]
                    if estamp[e2] == tick:
                        continue
                    o = eu[e2] + ev[e2] - w
                    if minus_mask[ai, o] == 1 or cstamp[o] == tick:
                        continue
                    hs = _heap_push(heap, hs, e2)
            if touch == 1:
                any_touch = 1
            if not failed:
                t_out[s] = count
                c_out[s] = touch
                break
            zmin = zneed + l0
            nxt = ai + 1
            while nxt < na and anchor_z[nxt] < zmin:
                nxt += 1
            ai = nxt
    return t_out, c_out
