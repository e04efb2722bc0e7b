"""Pure-Python LexDijkstra kernel (fallback for the compiled extension).

Both kernels share one signature and fill caller-owned output rows:

    lex_sssp_rows(indptr, nbr, eid, wt, sources, dist, hops, pe, pv)

Row ``r`` of each output array holds the shortest-path forest grown from
``sources[r]``: path weight, hop count, parent edge and parent vertex.
Unreachable vertices get ``-1`` everywhere; the source has parents ``-1``.
"""
from heapq import heappop, heappush

KERNEL = "python"


def _lex_sssp(source, n, indptr, nbr, eid, wt):
    INF = 1 << 62
    dist = [INF] * n
    hops = [-1] * n
    pe = [-1] * n
    pv = [-1] * n
    done = [False] * n
    dist[source] = 0
    hops[source] = 0
    heap = [(0, 0, source)]
    while heap:
        d, h, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for idx in range(indptr[u], indptr[u + 1]):
            v = nbr[idx]
            if done[v]:
                continue
            e = eid[idx]
            nd = d + wt[idx]
            nh = h + 1
            dv = dist[v]
            if nd < dv or (nd == dv and nh < hops[v]):
                dist[v] = nd
                hops[v] = nh
                pe[v] = e
                pv[v] = u
                heappush(heap, (nd, nh, v))
            elif nd == dv and nh == hops[v]:
                # equal weight and length: the smaller minimum edge id on the
                # differing segments wins; both branches reach their nearest
                # common ancestor after the same number of steps
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
    return dist, hops, pe, pv


def lex_sssp_rows(indptr, nbr, eid, wt, sources, dist, hops, pe, pv):
    n = len(indptr) - 1
    ip = indptr.tolist()
    nb = nbr.tolist()
    ed = eid.tolist()
    w = wt.tolist()
    for r, s in enumerate(sources.tolist()):
        d, h, e, p = _lex_sssp(s, n, ip, nb, ed, w)
        dist[r] = d
        hops[r] = h
        pe[r] = e
        pv[r] = p
