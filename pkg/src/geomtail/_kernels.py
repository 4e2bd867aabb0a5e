"""Compiled batch kernels for the replicate harness.

Each kernel processes a batch of replicates packed into one flat coordinate
array (``offsets`` delimits replicates) and fills one statistic per
replicate.  A linear-probing hash grid keyed by cell id keeps the working
set cache-resident; occupied slots are tracked in a touched list so resets
cost O(points), not O(table).

The kernels mirror the reference implementations in ``spatial`` and
``functionals`` expression by expression (squared-distance comparisons,
lexicographic ordering of tuple members, identical circumcircle algebra), so
integer statistics agree bitwise with the pure-Python paths; the test suite
enforces this on shared inputs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

EPS_GEOM = 1e-12  # keep in sync with geometry.EPS_GEOM

# Fibonacci-hash multiplier 0x9E3779B97F4A7C15 as a wrapped signed 64-bit int.
_HASH_MULT = np.int64(-7046029254386353131)


@njit(cache=True)
def _probe(slot_key, mask, key):
    """Slot of ``key`` or of the first empty slot along its probe path."""
    h = (key * _HASH_MULT) & mask
    while True:
        k2 = slot_key[h]
        if k2 == key or k2 == -1:
            return h
        h = (h + 1) & mask


@njit(cache=True)
def _build_grid(pts, lo, hi, inv_cell, ncols, slot_key, slot_head, nxt, touched):
    ntouch = 0
    mask = slot_key.shape[0] - 1
    for i in range(lo, hi):
        ix = np.int64(pts[i, 0] * inv_cell)
        iy = np.int64(pts[i, 1] * inv_cell)
        key = ix * ncols + iy
        h = _probe(slot_key, mask, key)
        if slot_key[h] == -1:
            slot_key[h] = key
            slot_head[h] = -1
            touched[ntouch] = h
            ntouch += 1
        nxt[i] = slot_head[h]
        slot_head[h] = i
    return ntouch


@njit(cache=True)
def _reset_grid(slot_key, touched, ntouch):
    for q in range(ntouch):
        slot_key[touched[q]] = -1


@njit(cache=True)
def _cell_head(slot_key, slot_head, mask, key):
    h = (key * _HASH_MULT) & mask
    while True:
        k2 = slot_key[h]
        if k2 == key:
            return slot_head[h]
        if k2 == -1:
            return -1
        h = (h + 1) & mask


@njit(cache=True)
def _member_crowded(pts, slot_key, slot_head, nxt, mask, ncols, inv_cell,
                    px, py, radius2, skip_a, skip_b, skip_c):
    """Any point other than the skips strictly inside the radius around (px,py)?"""
    cx = np.int64(px * inv_cell)
    cy = np.int64(py * inv_cell)
    for dx in range(-1, 2):
        for dy in range(-1, 2):
            z = _cell_head(slot_key, slot_head, mask, (cx + dx) * ncols + (cy + dy))
            while z != -1:
                if z != skip_a and z != skip_b and z != skip_c:
                    ddx = pts[z, 0] - px
                    ddy = pts[z, 1] - py
                    if ddx * ddx + ddy * ddy < radius2:
                        return True
                z = nxt[z]
    return False


@njit(cache=True)
def _lex_less(pts, u, v):
    if pts[u, 0] < pts[v, 0]:
        return True
    if pts[u, 0] > pts[v, 0]:
        return False
    return pts[u, 1] < pts[v, 1]


@njit(cache=True)
def _lex_order3(pts, i, j, k):
    """Indices (i, j, k) sorted lexicographically by coordinates."""
    a, b, c = i, j, k
    if _lex_less(pts, b, a):
        a, b = b, a
    if _lex_less(pts, c, b):
        b, c = c, b
        if _lex_less(pts, b, a):
            a, b = b, a
    return a, b, c


@njit(cache=True)
def _circumcircle_scaled(y1x, y1y, y2x, y2y):
    """Circumcircle through (0,0), y1, y2: (ok, center_x, center_y, radius).

    Same algebra as geometry.circumcircle with the first point at the origin.
    """
    area2 = y1x * y2y - y1y * y2x
    if abs(area2) <= EPS_GEOM:
        return False, 0.0, 0.0, np.inf
    d = 2.0 * (y1x * y2y - y1y * y2x)
    b2 = y1x * y1x + y1y * y1y
    c2 = y2x * y2x + y2y * y2y
    ux = (y2y * b2 - y1y * c2) / d
    uy = (y1x * c2 - y2x * b2) / d
    return True, ux, uy, np.hypot(ux, uy)


# ---------------------------------------------------------------------------
# pair statistics (k = 2)
# ---------------------------------------------------------------------------

@njit(cache=True)
def pair_count_batch(pts, offsets, r, t_h, t_iso, L,
                     slot_key, slot_head, nxt, touched, out):
    """Isolated-pair score sums: one count per replicate.

    A pair contributes iff its raw squared distance is within (r*L)^2, its
    r-scaled squared distance within t_h^2, and no third point lies strictly
    within r*t_iso of either member.
    """
    cell = r * max(L, max(t_h, t_iso))
    inv_cell = 1.0 / cell
    ncols = np.int64(inv_cell) + 3
    mask = slot_key.shape[0] - 1
    reach = r * L
    reach2 = reach * reach
    th2 = t_h * t_h
    radius = r * t_iso
    radius2 = radius * radius
    for rep in range(offsets.shape[0] - 1):
        lo, hi = offsets[rep], offsets[rep + 1]
        ntouch = _build_grid(pts, lo, hi, inv_cell, ncols, slot_key, slot_head,
                             nxt, touched)
        count = 0
        for i in range(lo, hi):
            xi = pts[i, 0]
            yi = pts[i, 1]
            cx = np.int64(xi * inv_cell)
            cy = np.int64(yi * inv_cell)
            for nb in range(5):
                if nb == 0:
                    dx, dy = 0, 0
                elif nb == 1:
                    dx, dy = 0, 1
                elif nb == 2:
                    dx, dy = 1, -1
                elif nb == 3:
                    dx, dy = 1, 0
                else:
                    dx, dy = 1, 1
                j = _cell_head(slot_key, slot_head, mask,
                               (cx + dx) * ncols + (cy + dy))
                while j != -1:
                    if nb != 0 or j > i:
                        ddx = pts[j, 0] - xi
                        ddy = pts[j, 1] - yi
                        d2 = ddx * ddx + ddy * ddy
                        if d2 <= reach2:
                            sx = ddx / r
                            sy = ddy / r
                            if sx * sx + sy * sy <= th2:
                                if not _member_crowded(
                                        pts, slot_key, slot_head, nxt, mask,
                                        ncols, inv_cell, xi, yi, radius2,
                                        i, j, -1) and not _member_crowded(
                                        pts, slot_key, slot_head, nxt, mask,
                                        ncols, inv_cell, pts[j, 0], pts[j, 1],
                                        radius2, i, j, -1):
                                    count += 1
                    j = nxt[j]
        out[rep] = count
        _reset_grid(slot_key, touched, ntouch)


@njit(cache=True)
def blocked_pair_count_batch(pts, offsets, r, t_iso, L, m_side,
                             slot_key, slot_head, nxt, touched, out):
    """Per-block isolated-pair counts with isolation restricted to the block.

    Blocks form an m_side x m_side partition of the unit square.  A pair
    counts for its block iff both members share the block, the diameter is
    within r*L, and no same-block point is strictly within r*t_iso of either
    member.  ``out`` has one row of m_side^2 block counts per replicate.
    """
    cell = r * max(L, t_iso)
    inv_cell = 1.0 / cell
    ncols = np.int64(inv_cell) + 3
    mask = slot_key.shape[0] - 1
    reach = r * L
    reach2 = reach * reach
    radius = r * t_iso
    radius2 = radius * radius
    nblocks = m_side * m_side
    for rep in range(offsets.shape[0] - 1):
        lo, hi = offsets[rep], offsets[rep + 1]
        ntouch = _build_grid(pts, lo, hi, inv_cell, ncols, slot_key, slot_head,
                             nxt, touched)
        base = rep * nblocks
        for i in range(lo, hi):
            xi = pts[i, 0]
            yi = pts[i, 1]
            bix = min(np.int64(xi * m_side), m_side - 1)
            biy = min(np.int64(yi * m_side), m_side - 1)
            cx = np.int64(xi * inv_cell)
            cy = np.int64(yi * inv_cell)
            for nb in range(5):
                if nb == 0:
                    dx, dy = 0, 0
                elif nb == 1:
                    dx, dy = 0, 1
                elif nb == 2:
                    dx, dy = 1, -1
                elif nb == 3:
                    dx, dy = 1, 0
                else:
                    dx, dy = 1, 1
                j = _cell_head(slot_key, slot_head, mask,
                               (cx + dx) * ncols + (cy + dy))
                while j != -1:
                    if nb != 0 or j > i:
                        bjx = min(np.int64(pts[j, 0] * m_side), m_side - 1)
                        bjy = min(np.int64(pts[j, 1] * m_side), m_side - 1)
                        if bjx == bix and bjy == biy:
                            ddx = pts[j, 0] - xi
                            ddy = pts[j, 1] - yi
                            if ddx * ddx + ddy * ddy <= reach2:
                                if not _block_crowded(
                                        pts, slot_key, slot_head, nxt, mask,
                                        ncols, inv_cell, xi, yi, radius2,
                                        i, j, bix, biy, m_side) and \
                                   not _block_crowded(
                                        pts, slot_key, slot_head, nxt, mask,
                                        ncols, inv_cell, pts[j, 0], pts[j, 1],
                                        radius2, i, j, bix, biy, m_side):
                                    out[base + bix * m_side + biy] += 1
                    j = nxt[j]
        _reset_grid(slot_key, touched, ntouch)


@njit(cache=True)
def _block_crowded(pts, slot_key, slot_head, nxt, mask, ncols, inv_cell,
                   px, py, radius2, skip_a, skip_b, bix, biy, m_side):
    cx = np.int64(px * inv_cell)
    cy = np.int64(py * inv_cell)
    for dx in range(-1, 2):
        for dy in range(-1, 2):
            z = _cell_head(slot_key, slot_head, mask, (cx + dx) * ncols + (cy + dy))
            while z != -1:
                if z != skip_a and z != skip_b:
                    bzx = min(np.int64(pts[z, 0] * m_side), m_side - 1)
                    bzy = min(np.int64(pts[z, 1] * m_side), m_side - 1)
                    if bzx == bix and bzy == biy:
                        ddx = pts[z, 0] - px
                        ddy = pts[z, 1] - py
                        if ddx * ddx + ddy * ddy < radius2:
                            return True
                z = nxt[z]
    return False


# ---------------------------------------------------------------------------
# triple statistics (k = 3, d = 2)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _gather_neighbors(pts, slot_key, slot_head, nxt, mask, ncols, inv_cell,
                      i, reach2, buf):
    """Indices j > i within sqrt(reach2) of point i (3x3 cell scan)."""
    cx = np.int64(pts[i, 0] * inv_cell)
    cy = np.int64(pts[i, 1] * inv_cell)
    cnt = 0
    for dx in range(-1, 2):
        for dy in range(-1, 2):
            j = _cell_head(slot_key, slot_head, mask, (cx + dx) * ncols + (cy + dy))
            while j != -1:
                if j > i:
                    ddx = pts[j, 0] - pts[i, 0]
                    ddy = pts[j, 1] - pts[i, 1]
                    if ddx * ddx + ddy * ddy <= reach2:
                        buf[cnt] = j
                        cnt += 1
                j = nxt[j]
    return cnt


@njit(cache=True)
def _ptriple_h(pts, a, b, c, r, s, t):
    """Persistent-triple indicator on the lex-ordered scaled coordinates."""
    a, b, c = _lex_order3(pts, a, b, c)
    y1x = (pts[b, 0] - pts[a, 0]) / r
    y1y = (pts[b, 1] - pts[a, 1]) / r
    y2x = (pts[c, 0] - pts[a, 0]) / r
    y2y = (pts[c, 1] - pts[a, 1]) / r
    ab2 = y1x * y1x + y1y * y1y
    ac2 = y2x * y2x + y2y * y2y
    ex = y2x - y1x
    ey = y2y - y1y
    bc2 = ex * ex + ey * ey
    area2 = y1x * y2y - y1y * y2x
    circum = np.sqrt(ab2 * ac2 * bc2) / (2.0 * abs(area2))
    longest2 = max(ab2, max(ac2, bc2))
    other = ab2 + ac2 + bc2 - longest2
    if longest2 >= other or abs(area2) <= EPS_GEOM:
        s_star = 0.5 * np.sqrt(longest2)
    else:
        s_star = circum
    if longest2 <= s * s and t < 2.0 * s_star:
        return True
    return False


@njit(cache=True)
def ptriple_count_batch(pts, offsets, r, s, t,
                        slot_key, slot_head, nxt, touched, buf, out):
    """Isolated persistent one-cycle triples: one count per replicate."""
    cell = r * t
    inv_cell = 1.0 / cell
    ncols = np.int64(inv_cell) + 3
    mask = slot_key.shape[0] - 1
    reach = r * t  # support bound L = t
    reach2 = reach * reach
    radius = r * t
    radius2 = radius * radius
    for rep in range(offsets.shape[0] - 1):
        lo, hi = offsets[rep], offsets[rep + 1]
        ntouch = _build_grid(pts, lo, hi, inv_cell, ncols, slot_key, slot_head,
                             nxt, touched)
        count = 0
        for i in range(lo, hi):
            nn = _gather_neighbors(pts, slot_key, slot_head, nxt, mask, ncols,
                                   inv_cell, i, reach2, buf)
            for p in range(nn):
                j = buf[p]
                for q in range(p + 1, nn):
                    k = buf[q]
                    ddx = pts[j, 0] - pts[k, 0]
                    ddy = pts[j, 1] - pts[k, 1]
                    if ddx * ddx + ddy * ddy > reach2:
                        continue
                    if not _ptriple_h(pts, i, j, k, r, s, t):
                        continue
                    if _member_crowded(pts, slot_key, slot_head, nxt, mask,
                                       ncols, inv_cell, pts[i, 0], pts[i, 1],
                                       radius2, i, j, k):
                        continue
                    if _member_crowded(pts, slot_key, slot_head, nxt, mask,
                                       ncols, inv_cell, pts[j, 0], pts[j, 1],
                                       radius2, i, j, k):
                        continue
                    if _member_crowded(pts, slot_key, slot_head, nxt, mask,
                                       ncols, inv_cell, pts[k, 0], pts[k, 1],
                                       radius2, i, j, k):
                        continue
                    count += 1
        out[rep] = count
        _reset_grid(slot_key, touched, ntouch)


@njit(cache=True)
def _morse_triple(pts, a, b, c, r, t_max):
    """(qualifies_at_tmax, circumradius, center_x, center_y) on scaled coords."""
    a, b, c = _lex_order3(pts, a, b, c)
    y1x = (pts[b, 0] - pts[a, 0]) / r
    y1y = (pts[b, 1] - pts[a, 1]) / r
    y2x = (pts[c, 0] - pts[a, 0]) / r
    y2y = (pts[c, 1] - pts[a, 1]) / r
    ok, ux, uy, radius = _circumcircle_scaled(y1x, y1y, y2x, y2y)
    if not ok or radius > t_max:
        return False, np.inf, 0.0, 0.0
    # acute test at each vertex (0,0), y1, y2, mirroring the reference path
    dot0 = y1x * y2x + y1y * y2y
    if dot0 <= EPS_GEOM:
        return False, np.inf, 0.0, 0.0
    dot1 = (y2x - y1x) * (0.0 - y1x) + (y2y - y1y) * (0.0 - y1y)
    if dot1 <= EPS_GEOM:
        return False, np.inf, 0.0, 0.0
    dot2 = (0.0 - y2x) * (y1x - y2x) + (0.0 - y2y) * (y1y - y2y)
    if dot2 <= EPS_GEOM:
        return False, np.inf, 0.0, 0.0
    cx = pts[a, 0] + r * ux
    cy = pts[a, 1] + r * uy
    return True, radius, cx, cy


@njit(cache=True)
def morse_count_batch(pts, offsets, r, t_arr,
                      slot_key, slot_head, nxt, touched, buf, out):
    """Critical-point counts per replicate, one column per threshold."""
    t_max = t_arr.max()
    cell = r * 2.0 * t_max
    inv_cell = 1.0 / cell
    ncols = np.int64(inv_cell) + 3
    mask = slot_key.shape[0] - 1
    reach = r * 2.0 * t_max
    reach2 = reach * reach
    m = t_arr.shape[0]
    for rep in range(offsets.shape[0] - 1):
        lo, hi = offsets[rep], offsets[rep + 1]
        ntouch = _build_grid(pts, lo, hi, inv_cell, ncols, slot_key, slot_head,
                             nxt, touched)
        for i in range(lo, hi):
            nn = _gather_neighbors(pts, slot_key, slot_head, nxt, mask, ncols,
                                   inv_cell, i, reach2, buf)
            for p in range(nn):
                j = buf[p]
                for q in range(p + 1, nn):
                    k = buf[q]
                    ddx = pts[j, 0] - pts[k, 0]
                    ddy = pts[j, 1] - pts[k, 1]
                    if ddx * ddx + ddy * ddy > reach2:
                        continue
                    ok, radius_scaled, ccx, ccy = _morse_triple(pts, i, j, k,
                                                                r, t_max)
                    if not ok:
                        continue
                    radius = r * radius_scaled
                    if _member_crowded(pts, slot_key, slot_head, nxt, mask,
                                       ncols, inv_cell, ccx, ccy,
                                       radius * radius, i, j, k):
                        continue
                    for ti in range(m):
                        if radius_scaled <= t_arr[ti]:
                            out[rep, ti] += 1
        _reset_grid(slot_key, touched, ntouch)


# ---------------------------------------------------------------------------
# brute-force oracles (direct O(n^k) scans, no grid)
# ---------------------------------------------------------------------------

@njit(cache=True)
def brute_pair_count(pts, r, t_h, t_iso, L):
    n = pts.shape[0]
    reach2 = (r * L) * (r * L)
    th2 = t_h * t_h
    radius = r * t_iso
    radius2 = radius * radius
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            ddx = pts[j, 0] - pts[i, 0]
            ddy = pts[j, 1] - pts[i, 1]
            d2 = ddx * ddx + ddy * ddy
            if d2 > reach2:
                continue
            sx = ddx / r
            sy = ddy / r
            if sx * sx + sy * sy > th2:
                continue
            good = True
            for z in range(n):
                if z == i or z == j:
                    continue
                da = (pts[z, 0] - pts[i, 0]) ** 2 + (pts[z, 1] - pts[i, 1]) ** 2
                db = (pts[z, 0] - pts[j, 0]) ** 2 + (pts[z, 1] - pts[j, 1]) ** 2
                if da < radius2 or db < radius2:
                    good = False
                    break
            if good:
                count += 1
    return count


@njit(cache=True)
def _triple_isolated(pts, i, j, k, radius2):
    n = pts.shape[0]
    for z in range(n):
        if z == i or z == j or z == k:
            continue
        for m in (i, j, k):
            ddx = pts[z, 0] - pts[m, 0]
            ddy = pts[z, 1] - pts[m, 1]
            if ddx * ddx + ddy * ddy < radius2:
                return False
    return True


@njit(cache=True)
def brute_ptriple_count(pts, r, s, t):
    n = pts.shape[0]
    reach2 = (r * t) * (r * t)
    radius2 = reach2
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                d01 = (pts[j, 0] - pts[i, 0]) ** 2 + (pts[j, 1] - pts[i, 1]) ** 2
                d02 = (pts[k, 0] - pts[i, 0]) ** 2 + (pts[k, 1] - pts[i, 1]) ** 2
                d12 = (pts[k, 0] - pts[j, 0]) ** 2 + (pts[k, 1] - pts[j, 1]) ** 2
                if d01 > reach2 or d02 > reach2 or d12 > reach2:
                    continue
                if not _ptriple_h(pts, i, j, k, r, s, t):
                    continue
                if _triple_isolated(pts, i, j, k, radius2):
                    count += 1
    return count


@njit(cache=True)
def brute_morse_count(pts, r, t_arr, out):
    n = pts.shape[0]
    t_max = t_arr.max()
    reach2 = (2.0 * r * t_max) ** 2
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                d01 = (pts[j, 0] - pts[i, 0]) ** 2 + (pts[j, 1] - pts[i, 1]) ** 2
                d02 = (pts[k, 0] - pts[i, 0]) ** 2 + (pts[k, 1] - pts[i, 1]) ** 2
                d12 = (pts[k, 0] - pts[j, 0]) ** 2 + (pts[k, 1] - pts[j, 1]) ** 2
                if d01 > reach2 or d02 > reach2 or d12 > reach2:
                    continue
                ok, radius_scaled, ccx, ccy = _morse_triple(pts, i, j, k, r, t_max)
                if not ok:
                    continue
                radius = r * radius_scaled
                radius2 = radius * radius
                empty = True
                for z in range(n):
                    if z == i or z == j or z == k:
                        continue
                    ddx = pts[z, 0] - ccx
                    ddy = pts[z, 1] - ccy
                    if ddx * ddx + ddy * ddy < radius2:
                        empty = False
                        break
                if not empty:
                    continue
                for ti in range(t_arr.shape[0]):
                    if radius_scaled <= t_arr[ti]:
                        out[ti] += 1


@njit(cache=True)
def _triple_edge_count(pts, i, j, k, r, t):
    t2 = t * t
    cnt = 0
    d01 = ((pts[j, 0] - pts[i, 0]) / r) ** 2 + ((pts[j, 1] - pts[i, 1]) / r) ** 2
    d02 = ((pts[k, 0] - pts[i, 0]) / r) ** 2 + ((pts[k, 1] - pts[i, 1]) / r) ** 2
    d12 = ((pts[k, 0] - pts[j, 0]) / r) ** 2 + ((pts[k, 1] - pts[j, 1]) / r) ** 2
    if d01 <= t2:
        cnt += 1
    if d02 <= t2:
        cnt += 1
    if d12 <= t2:
        cnt += 1
    return cnt


@njit(cache=True)
def _triple_filled(pts, i, j, k, r, t):
    """Whether radius-t/2 balls around the scaled triple share a point.

    Mirrors geometry.enclosing_radius: half the longest edge for right or
    obtuse triples, circumradius (same algebra as geometry.circumcircle)
    otherwise.
    """
    a, b, c = _lex_order3(pts, i, j, k)
    y1x = (pts[b, 0] - pts[a, 0]) / r
    y1y = (pts[b, 1] - pts[a, 1]) / r
    y2x = (pts[c, 0] - pts[a, 0]) / r
    y2y = (pts[c, 1] - pts[a, 1]) / r
    ab2 = y1x * y1x + y1y * y1y
    ac2 = y2x * y2x + y2y * y2y
    ex = y2x - y1x
    ey = y2y - y1y
    bc2 = ex * ex + ey * ey
    longest2 = max(ab2, max(ac2, bc2))
    other = ab2 + ac2 + bc2 - longest2
    if longest2 >= other:
        s_star = 0.5 * np.sqrt(longest2)
    else:
        ok, _ux, _uy, radius = _circumcircle_scaled(y1x, y1y, y2x, y2y)
        if not ok:
            s_star = 0.5 * np.sqrt(longest2)
        else:
            s_star = radius
    return t >= 2.0 * s_star


@njit(cache=True)
def brute_triple_class_count(pts, r, t, want_edges, want_filled):
    """Triples whose radius-t geometric/Cech class matches, isolated at t.

    ``want_edges`` is the required edge count (2 = path, 3 = triangle); when
    ``want_filled`` >= 0 the 2-simplex presence must equal it (Cech targets),
    otherwise only the 1-skeleton matters (geometric-graph targets).
    Enumeration bound is the component support L = 3t.
    """
    n = pts.shape[0]
    reach2 = (3.0 * r * t) ** 2
    radius2 = (r * t) * (r * t)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                d01 = (pts[j, 0] - pts[i, 0]) ** 2 + (pts[j, 1] - pts[i, 1]) ** 2
                d02 = (pts[k, 0] - pts[i, 0]) ** 2 + (pts[k, 1] - pts[i, 1]) ** 2
                d12 = (pts[k, 0] - pts[j, 0]) ** 2 + (pts[k, 1] - pts[j, 1]) ** 2
                if d01 > reach2 or d02 > reach2 or d12 > reach2:
                    continue
                edges = _triple_edge_count(pts, i, j, k, r, t)
                if edges != want_edges:
                    continue
                if want_filled >= 0:
                    filled = 0
                    if edges == 3 and _triple_filled(pts, i, j, k, r, t):
                        filled = 1
                    if filled != want_filled:
                        continue
                if _triple_isolated(pts, i, j, k, radius2):
                    count += 1
    return count
