"""Compiled scans over SA-family games.

A profile ``(i, j)`` of bitmasks has player payoffs
``dis[i | j]`` when ``i & j == 0`` and ``agree[i & j] + union[i | j]`` otherwise.
All tables are int64 numerators over a common denominator.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def sa_best_responses(agree1, agree2, union1, union2, dis1, dis2, m):
    """Best-response values: column maxima of P1 and row maxima of P2."""
    lowest = np.iinfo(np.int64).min
    best1 = np.full(m, lowest, dtype=np.int64)
    best2 = np.full(m, lowest, dtype=np.int64)
    for i in range(m):
        row_best = lowest
        for j in range(m):
            inter = i & j
            uni = i | j
            if inter == 0:
                p1 = dis1[uni]
                p2 = dis2[uni]
            else:
                p1 = agree1[inter] + union1[uni]
                p2 = agree2[inter] + union2[uni]
            if p1 > best1[j]:
                best1[j] = p1
            if p2 > row_best:
                row_best = p2
        best2[i] = row_best
    return best1, best2


@njit(cache=True, nogil=True)
def _sa_scan(agree1, agree2, union1, union2, dis1, dis2, best1, best2, m, out, fill):
    count = 0
    for i in range(m):
        for j in range(m):
            inter = i & j
            uni = i | j
            if inter == 0:
                p1 = dis1[uni]
                p2 = dis2[uni]
            else:
                p1 = agree1[inter] + union1[uni]
                p2 = agree2[inter] + union2[uni]
            if p1 == best1[j] and p2 == best2[i]:
                if fill:
                    out[count, 0] = i
                    out[count, 1] = j
                    out[count, 2] = p1
                    out[count, 3] = p2
                count += 1
    return count


def sa_equilibria(tables, m):
    """All pure equilibria as an ``(k, 4)`` array of ``(i, j, p1, p2)`` rows."""
    best1, best2 = sa_best_responses(*tables, m)
    empty = np.zeros((0, 4), dtype=np.int64)
    k = _sa_scan(*tables, best1, best2, m, empty, False)
    out = np.zeros((k, 4), dtype=np.int64)
    _sa_scan(*tables, best1, best2, m, out, True)
    return out
