"""Inner loop of the brute-force map census.

Enumerates every color-respecting perfect matching of the half-edge slots
by iterative backtracking; at each complete matching it keeps connected
gluings and buckets them by genus, with faces traced through the rotation
system (next slot clockwise after crossing an edge).  Written on flat
int arrays so numba can compile it; falls back to plain Python when numba
is missing.
"""

from __future__ import annotations

import numpy as np


def _census_scan(colors, star_of, succ, nstars):
    n = colors.size
    pairs = n // 2
    max_g = pairs // 2 + 1
    counts = np.zeros(max_g + 1, dtype=np.int64)
    disconnected = np.int64(0)
    if n == 0:
        # the empty gluing is connected only for a single (empty) star
        if nstars <= 1:
            counts[0] = 1
        return counts, disconnected
    match = np.full(n, -1, dtype=np.int64)
    s_of = np.zeros(pairs, dtype=np.int64)
    t_of = np.zeros(pairs, dtype=np.int64)
    next_t = np.zeros(pairs, dtype=np.int64)
    visited = np.zeros(n, dtype=np.int64)
    parent = np.zeros(nstars, dtype=np.int64)
    stamp = np.int64(0)
    depth = 0
    advance = True
    while True:
        if advance:
            s = 0
            while s < n and match[s] >= 0:
                s += 1
            if s == n:
                # complete matching: connectivity then genus
                for i in range(nstars):
                    parent[i] = i
                for a in range(n):
                    b = match[a]
                    if b > a:
                        x = star_of[a]
                        while parent[x] != x:
                            x = parent[x]
                        y = star_of[b]
                        while parent[y] != y:
                            y = parent[y]
                        if x != y:
                            parent[x] = y
                roots = 0
                for i in range(nstars):
                    if parent[i] == i:
                        roots += 1
                if roots == 1:
                    stamp += 1
                    faces = 0
                    for d0 in range(n):
                        if visited[d0] != stamp:
                            faces += 1
                            d = d0
                            while visited[d] != stamp:
                                visited[d] = stamp
                                d = succ[match[d]]
                    g = (2 - nstars + pairs - faces) // 2
                    counts[g] += 1
                else:
                    disconnected += 1
                depth -= 1
                advance = False
                continue
            s_of[depth] = s
            next_t[depth] = s + 1
        else:
            if depth < 0:
                break
            s = s_of[depth]
            told = t_of[depth]
            match[s] = -1
            match[told] = -1
            next_t[depth] = told + 1
        s = s_of[depth]
        c = colors[s]
        t = next_t[depth]
        found = -1
        while t < n:
            if match[t] < 0 and colors[t] == c:
                found = t
                break
            t += 1
        if found >= 0:
            match[s] = found
            match[found] = s
            t_of[depth] = found
            depth += 1
            advance = True
        else:
            depth -= 1
            if depth < 0:
                break
            advance = False
    return counts, disconnected


try:  # pragma: no cover - exercised implicitly wherever numba is installed
    from numba import njit

    _census_scan_fast = njit(cache=True)(_census_scan)
except Exception:  # pragma: no cover
    _census_scan_fast = _census_scan


def census_counts(colors, star_sizes):
    """Genus-indexed counts of connected gluings plus the disconnected total.

    ``colors`` lists the half-edge colors star by star; ``star_sizes`` the
    number of slots each star contributes, in the same order.
    """
    n = len(colors)
    if n % 2:
        return {}, 0
    colors_arr = np.asarray(colors, dtype=np.int64)
    star_of = np.empty(n, dtype=np.int64)
    succ = np.empty(n, dtype=np.int64)
    pos = 0
    for si, size in enumerate(star_sizes):
        for j in range(size):
            star_of[pos + j] = si
            succ[pos + j] = pos + (j + 1) % size
        pos += size
    counts, disconnected = _census_scan_fast(colors_arr, star_of, succ, len(star_sizes))
    return ({int(g): int(c) for g, c in enumerate(counts) if c},
            int(disconnected))
