# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled LexDijkstra kernel.

Same contract as ``_lexdijkstra_py.lex_sssp_rows``.  The per-source loop runs
without the GIL so callers may split ``sources`` across threads.
"""
from libc.stdlib cimport malloc, free
from libc.string cimport memset

cimport numpy as cnp

cnp.import_array()

KERNEL = "cython"

ctypedef cnp.int64_t i64


cdef inline bint _less(i64 d1, i64 h1, i64 v1, i64 d2, i64 h2, i64 v2) noexcept nogil:
    if d1 != d2:
        return d1 < d2
    if h1 != h2:
        return h1 < h2
    return v1 < v2


cdef void _push(i64* hd, i64* hh, i64* hv, i64* size, i64 d, i64 h, i64 v) noexcept nogil:
    cdef i64 i = size[0]
    cdef i64 parent
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _less(d, h, v, hd[parent], hh[parent], hv[parent]):
            hd[i] = hd[parent]
            hh[i] = hh[parent]
            hv[i] = hv[parent]
            i = parent
        else:
            break
    hd[i] = d
    hh[i] = h
    hv[i] = v


cdef void _pop(i64* hd, i64* hh, i64* hv, i64* size) noexcept nogil:
    cdef i64 n = size[0] - 1
    cdef i64 d = hd[n]
    cdef i64 h = hh[n]
    cdef i64 v = hv[n]
    cdef i64 i = 0
    cdef i64 child
    size[0] = n
    if n == 0:
        return
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and _less(hd[child + 1], hh[child + 1], hv[child + 1],
                                   hd[child], hh[child], hv[child]):
            child += 1
        if _less(hd[child], hh[child], hv[child], d, h, v):
            hd[i] = hd[child]
            hh[i] = hh[child]
            hv[i] = hv[child]
            i = child
        else:
            break
    hd[i] = d
    hh[i] = h
    hv[i] = v


cdef void _lex_sssp(i64 source, i64 n, const i64* indptr, const i64* nbr,
                    const i64* eid, const i64* wt, i64* dist, i64* hops,
                    i64* pe, i64* pv, char* done,
                    i64* hd, i64* hh, i64* hv) noexcept nogil:
    cdef i64 INF = (<i64>1) << 62
    cdef i64 x, u, v, e, idx, nd, nh, a, b, min_new, min_old, ea, eb
    cdef i64 d, h
    cdef i64 size = 0
    for x in range(n):
        dist[x] = INF
        hops[x] = -1
        pe[x] = -1
        pv[x] = -1
    memset(done, 0, n)
    dist[source] = 0
    hops[source] = 0
    _push(hd, hh, hv, &size, 0, 0, source)
    while size > 0:
        d = hd[0]
        h = hh[0]
        u = hv[0]
        _pop(hd, hh, hv, &size)
        if done[u]:
            continue
        done[u] = 1
        for idx in range(indptr[u], indptr[u + 1]):
            v = nbr[idx]
            if done[v]:
                continue
            e = eid[idx]
            nd = d + wt[idx]
            nh = h + 1
            if nd < dist[v] or (nd == dist[v] and nh < hops[v]):
                dist[v] = nd
                hops[v] = nh
                pe[v] = e
                pv[v] = u
                _push(hd, hh, hv, &size, nd, nh, v)
            elif nd == dist[v] and nh == hops[v]:
                a = u
                b = pv[v]
                min_new = e
                min_old = pe[v]
                while a != b:
                    ea = pe[a]
                    if ea < min_new:
                        min_new = ea
                    a = pv[a]
                    eb = pe[b]
                    if eb < min_old:
                        min_old = eb
                    b = pv[b]
                if min_new < min_old:
                    pe[v] = e
                    pv[v] = u
    for x in range(n):
        if dist[x] == INF:
            dist[x] = -1


def lex_sssp_rows(i64[::1] indptr, i64[::1] nbr, i64[::1] eid, i64[::1] wt,
                  i64[::1] sources, i64[:, ::1] dist, i64[:, ::1] hops,
                  i64[:, ::1] pe, i64[:, ::1] pv):
    cdef i64 n = indptr.shape[0] - 1
    cdef i64 cap = nbr.shape[0] + 2
    cdef i64 r, nsrc = sources.shape[0]
    cdef char* done
    cdef i64* hd
    cdef i64* hh
    cdef i64* hv
    if nsrc == 0:
        return
    done = <char*>malloc(n + 1)
    hd = <i64*>malloc(cap * sizeof(i64))
    hh = <i64*>malloc(cap * sizeof(i64))
    hv = <i64*>malloc(cap * sizeof(i64))
    if not done or not hd or not hh or not hv:
        free(done); free(hd); free(hh); free(hv)
        raise MemoryError()
    cdef const i64* ip = &indptr[0]
    cdef const i64* nb = &nbr[0] if nbr.shape[0] > 0 else NULL
    cdef const i64* ed = &eid[0] if eid.shape[0] > 0 else NULL
    cdef const i64* w = &wt[0] if wt.shape[0] > 0 else NULL
    try:
        with nogil:
            for r in range(nsrc):
                _lex_sssp(sources[r], n, ip, nb, ed, w,
                          &dist[r, 0], &hops[r, 0], &pe[r, 0], &pv[r, 0],
                          done, hd, hh, hv)
    finally:
        free(done)
        free(hd)
        free(hh)
        free(hv)
