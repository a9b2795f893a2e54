"""Compiled inner loops: strand layout, orbit tracing, complement topology,
lattice enumeration and hyperbolic lengths.

Conventions are identical to :mod:`curvecount.curves`; the pure-Python module
is the reference and the test-suite checks that both agree.

Surface arrays (see ``surface_arrays``):
    slot_cuff[p, j], other_pants[p, j], other_slot[p, j]  (int64, shape (n, 3))
    parity[p, i]   number of slots of pants p on cuff i
    cuff_code[i]   classification code of cuff i as a simple closed curve
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# layout
# ---------------------------------------------------------------------------


@njit(cache=True)
def _layout(m, slot_cuff, off, partner, heavy, nfront):
    """Fill ``off`` (n,3), ``partner`` (flat endpoints), ``heavy`` (n,), ``nfront`` (n,3)."""
    n = slot_cuff.shape[0]
    pos = 0
    for p in range(n):
        for j in range(3):
            off[p, j] = pos
            pos += m[slot_cuff[p, j]]
    X = np.zeros(3, np.int64)
    ms = np.zeros(3, np.int64)
    for p in range(n):
        for j in range(3):
            ms[j] = m[slot_cuff[p, j]]
        h = -1
        xaa = 0
        for a in range(3):
            b = (a + 1) % 3
            c = (a + 2) % 3
            if ms[a] > ms[b] + ms[c]:
                h = a
                xaa = (ms[a] - ms[b] - ms[c]) // 2
        if h < 0:
            for k in range(3):
                X[k] = (ms[k] + ms[(k + 1) % 3] - ms[(k + 2) % 3]) // 2
        else:
            X[h] = ms[(h + 1) % 3]
            X[(h + 2) % 3] = ms[(h + 2) % 3]
            X[(h + 1) % 3] = 0
        heavy[p] = h
        for j in range(3):
            nf = X[(j + 2) % 3] + X[j]
            if h == j:
                nf += xaa
            nfront[p, j] = nf
        # pair (k, k+1): q-th arc nearest to the seam
        for k in range(3):
            k1 = (k + 1) % 3
            base_k = X[(k + 2) % 3] + (xaa if h == k else 0)
            for q in range(X[k]):
                e1 = off[p, k] + base_k + (X[k] - 1 - q)
                e2 = off[p, k1] + q
                partner[e1] = e2
                partner[e2] = e1
        if h >= 0:
            for q in range(xaa):
                e1 = off[p, h] + X[(h + 2) % 3] + (xaa - 1 - q)
                e2 = off[p, h] + nfront[p, h] + q
                partner[e1] = e2
                partner[e2] = e1


@njit(cache=True)
def _endpoint_info(e, off, m, slot_cuff):
    """Return (pants, slot, rank) of flat endpoint ``e``."""
    n = off.shape[0]
    for p in range(n):
        for j in range(3):
            mm = m[slot_cuff[p, j]]
            if off[p, j] <= e < off[p, j] + mm:
                return p, j, e - off[p, j]
    return -1, -1, -1


@njit(cache=True)
def _fill_slot_tables(m, slot_cuff, off, ep_pants, ep_slot, ep_rank):
    n = slot_cuff.shape[0]
    for p in range(n):
        for j in range(3):
            mm = m[slot_cuff[p, j]]
            for r in range(mm):
                e = off[p, j] + r
                ep_pants[e] = p
                ep_slot[e] = j
                ep_rank[e] = r


@njit(cache=True)
def _fill_cross(m, t, slot_cuff, other_pants, other_slot, off, ep_pants, ep_slot, ep_rank,
                cross, wind):
    E = ep_pants.shape[0]
    for e in range(E):
        p = ep_pants[e]
        j = ep_slot[e]
        k = ep_rank[e]
        i = slot_cuff[p, j]
        mm = m[i]
        v = mm - 1 - k + t[i]
        jj = v % mm
        cross[e] = off[other_pants[p, j], other_slot[p, j]] + jj
        wind[e] = v // mm


# ---------------------------------------------------------------------------
# classification of (m, t mod m)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def _classify(m, t, slot_cuff, other_pants, other_slot, genus,
              off, partner, heavy, nfront, ep_pants, ep_slot, ep_rank, cross, wind,
              seen, region, parent, chi):
    """Code of the curve system with crossings ``m`` and twists ``t`` (zero-m twists must be 0).

    -1: not a single curve; 0: nonseparating; k >= 1: separating into genus k and g - k (k <= g - k).
    Layout arrays must already be filled for ``m``.
    """
    E = partner.shape[0]
    _fill_cross(m, t, slot_cuff, other_pants, other_slot, off, ep_pants, ep_slot, ep_rank,
                cross, wind)
    # orbit count
    for e in range(E):
        seen[e] = 0
    orbits = 0
    for e0 in range(E):
        if seen[e0]:
            continue
        orbits += 1
        if orbits > 1:
            return -1
        e = e0
        while True:
            seen[e] = 1
            f = partner[e]
            seen[f] = 1
            e = cross[f]
            if e == e0:
                break
    if orbits != 1:
        return -1
    # regions: gap after endpoint e has id = e
    n = slot_cuff.shape[0]
    for e in range(E):
        region[e] = -1
    nreg = 0
    for e0 in range(E):
        if region[e0] >= 0:
            continue
        e = e0
        while region[e] < 0:
            region[e] = nreg
            p = ep_pants[e]
            j = ep_slot[e]
            mm = m[slot_cuff[p, j]]
            nxt = off[p, j] + (ep_rank[e] + 1) % mm
            e = partner[nxt]
        chi[nreg] = 1
        nreg += 1
    # circles
    circle = np.empty((n, 3), np.int64)
    for p in range(n):
        any_arc = False
        for j in range(3):
            if m[slot_cuff[p, j]] > 0:
                any_arc = True
        if not any_arc:
            chi[nreg] = 2
            for j in range(3):
                circle[p, j] = nreg
            nreg += 1
        else:
            h = heavy[p]
            x = h
            if x < 0:
                for j in range(3):
                    if m[slot_cuff[p, j]] > 0:
                        x = j
                        break
            for j in range(3):
                if m[slot_cuff[p, j]] == 0:
                    if j == (x + 2) % 3:
                        g = off[p, x] + m[slot_cuff[p, x]] - 1
                    else:
                        g = off[p, x] + nfront[p, x] - 1
                    circle[p, j] = region[g]
        for j in range(3):
            if m[slot_cuff[p, j]] == 0:
                chi[circle[p, j]] -= 1
    for r in range(nreg):
        parent[r] = r
    # gluing
    for p in range(n):
        for j in range(3):
            i = slot_cuff[p, j]
            q = other_pants[p, j]
            jj = other_slot[p, j]
            if (q, jj) < (p, j):
                continue
            mm = m[i]
            if mm > 0:
                for k in range(mm):
                    e = off[p, j] + k
                    tgt = cross[e] - off[q, jj]
                    g2 = off[q, jj] + (tgt - 1) % mm
                    a = _find(parent, region[e])
                    b = _find(parent, region[g2])
                    chi[a] -= 1
                    if a != b:
                        parent[a] = b
                        chi[b] += chi[a]
            else:
                a = _find(parent, circle[p, j])
                b = _find(parent, circle[q, jj])
                if a != b:
                    parent[a] = b
                    chi[b] += chi[a]
    # sides of the curve: first arc from endpoint u to v = partner(u)
    u = 0
    v = partner[0]
    left = _find(parent, region[v])
    right = _find(parent, region[u])
    if left == right:
        return 0
    gl = (2 - chi[left] - 1) // 2
    gr = (2 - chi[right] - 1) // 2
    if gl + gr != genus:
        return -2
    return gl if gl < gr else gr


@njit(cache=True)
def class_table(m, slot_cuff, other_pants, other_slot, genus):
    """Codes for every residue vector of ``t mod m`` (mixed radix over coordinates with m_i > 0)."""
    d = m.shape[0]
    n = slot_cuff.shape[0]
    E = 2 * np.sum(m)
    off = np.zeros((n, 3), np.int64)
    partner = np.zeros(E, np.int64)
    heavy = np.zeros(n, np.int64)
    nfront = np.zeros((n, 3), np.int64)
    ep_pants = np.zeros(E, np.int64)
    ep_slot = np.zeros(E, np.int64)
    ep_rank = np.zeros(E, np.int64)
    cross = np.zeros(E, np.int64)
    wind = np.zeros(E, np.int64)
    seen = np.zeros(E, np.int64)
    region = np.zeros(E, np.int64)
    parent = np.zeros(E + 3 * n + 1, np.int64)
    chi = np.zeros(E + 3 * n + 1, np.int64)
    _layout(m, slot_cuff, off, partner, heavy, nfront)
    _fill_slot_tables(m, slot_cuff, off, ep_pants, ep_slot, ep_rank)
    size = 1
    for i in range(d):
        if m[i] > 0:
            size *= m[i]
    table = np.empty(size, np.int64)
    t = np.zeros(d, np.int64)
    for idx in range(size):
        rem = idx
        for i in range(d):
            if m[i] > 0:
                t[i] = rem % m[i]
                rem //= m[i]
            else:
                t[i] = 0
        if E == 0:
            table[idx] = -1
        else:
            table[idx] = _classify(m, t, slot_cuff, other_pants, other_slot, genus, off, partner,
                                   heavy, nfront, ep_pants, ep_slot, ep_rank, cross, wind, seen,
                                   region, parent, chi)
    return table


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


@njit(cache=True)
def _in_sector(m, t, nrm, signs, lo, hi):
    d = m.shape[0]
    for i in range(d):
        s = signs[i]
        if s > 0 and t[i] < 0:
            return False
        if s < 0 and t[i] >= 0:
            return False
        x = m[i] / nrm
        if x < lo[i] - 1e-12 or (x >= hi[i] - 1e-12 and hi[i] < 1.0):
            return False
        y = abs(t[i]) / nrm
        if y < lo[d + i] - 1e-12 or (y >= hi[d + i] - 1e-12 and hi[d + i] < 1.0):
            return False
    return True


@njit(cache=True)
def _parity_ok(m, parity):
    n = parity.shape[0]
    d = m.shape[0]
    for p in range(n):
        s = 0
        for i in range(d):
            s += parity[p, i] * m[i]
        if s % 2:
            return False
    return True


@njit(cache=True)
def count_points(L, m0_values, slot_cuff, other_pants, other_slot, parity, cuff_code, genus,
                 use_sector, signs, lo, hi):
    """Histogram ``hist[slot, norm]`` over valid nonzero points with first crossing in ``m0_values``.

    slot 0 counts every point; slot ``1 + code`` counts single curves of that code.
    """
    d = slot_cuff.shape[0] * 3 // 2
    ncodes = genus // 2 + 1
    hist = np.zeros((ncodes + 1, L + 1), np.int64)
    m = np.zeros(d, np.int64)
    t = np.zeros(d, np.int64)
    rem = np.zeros(d, np.int64)
    for m0 in m0_values:
        if m0 > L:
            continue
        m[:] = 0
        m[0] = m0
        while True:
            msum = 0
            for i in range(d):
                msum += m[i]
            if msum <= L and _parity_ok(m, parity):
                table = class_table(m, slot_cuff, other_pants, other_slot, genus)
                B = L - msum
                mzero = msum == 0
                # odometer over t with sum |t| <= B, each point visited once
                rem[0] = B
                t[0] = -B if m[0] > 0 else 0
                for i in range(1, d):
                    rem[i] = rem[i - 1] - abs(t[i - 1])
                    t[i] = -rem[i] if m[i] > 0 else 0
                while True:
                    tsum = B - rem[d - 1] + abs(t[d - 1])
                    nrm = msum + tsum
                    if nrm > 0:
                        ok = True
                        if use_sector:
                            ok = _in_sector(m, t, nrm, signs, lo, hi)
                        if ok:
                            hist[0, nrm] += 1
                            code = -1
                            if mzero:
                                if tsum == 1:
                                    for i in range(d):
                                        if t[i] == 1:
                                            code = cuff_code[i]
                            else:
                                zero_clean = True
                                idx = 0
                                rad = 1
                                for i in range(d):
                                    if m[i] == 0:
                                        if t[i] != 0:
                                            zero_clean = False
                                    else:
                                        idx += (t[i] % m[i]) * rad
                                        rad *= m[i]
                                if zero_clean:
                                    code = table[idx]
                            if code >= 0:
                                hist[1 + code, nrm] += 1
                    k = d - 1
                    while k >= 0 and t[k] >= rem[k]:
                        k -= 1
                    if k < 0:
                        break
                    t[k] += 1
                    for i in range(k + 1, d):
                        rem[i] = rem[i - 1] - abs(t[i - 1])
                        t[i] = -rem[i] if m[i] > 0 else 0
            # advance m (coordinates 1..d-1), keeping m[0] fixed
            k = d - 1
            while k >= 1:
                m[k] += 1
                s = 0
                for i in range(d):
                    s += m[i]
                if s <= L:
                    break
                m[k] = 0
                k -= 1
            if k < 1:
                break
    return hist


# ---------------------------------------------------------------------------
# hyperbolic lengths
# ---------------------------------------------------------------------------


@njit(cache=True)
def _mul(a, b):
    return (a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3])


@njit(cache=True)
def _shift(x):
    e = math.exp(x / 2)
    return (e, 0.0, 0.0, 1.0 / e)


@njit(cache=True)
def _trace_length(tr):
    a = abs(tr) / 2
    if not a > 1.0:
        return -1.0
    return 2.0 * math.log1p((a - 1.0) + math.sqrt((a - 1.0) * (a + 1.0)))


@njit(cache=True)
def _orbit_length(e0, slot_cuff, partner, nfront, ep_pants, ep_slot, ep_rank, cross, wind,
                  seam, lslot, theta, lcuff, seen):
    """Length of the closed strand orbit through endpoint ``e0``; -1 if not hyperbolic."""
    g = (1.0, 0.0, 0.0, 1.0)
    e = e0
    while True:
        seen[e] = 1
        f = partner[e]
        seen[f] = 1
        p = ep_pants[e]
        a = ep_slot[e]
        b = ep_slot[f]
        if a == b:
            c = (a + 1) % 3
            A = (seam[p, a, 0], seam[p, a, 1], seam[p, a, 2], seam[p, a, 3])
            sgn = 1.0 if ep_rank[e] < nfront[p, a] else -1.0
            M = _mul(_mul(A, _shift(sgn * lslot[p, c])), A)
            fx = lslot[p, b] / 2
        elif b == (a + 1) % 3:
            M = (seam[p, a, 0], seam[p, a, 1], seam[p, a, 2], seam[p, a, 3])
            fx = 0.0
        else:
            M = (seam[p, b, 0], seam[p, b, 1], seam[p, b, 2], seam[p, b, 3])
            fx = lslot[p, b] / 2
        nxt = cross[f]
        q = ep_pants[nxt]
        a2 = ep_slot[nxt]
        b2 = ep_slot[partner[nxt]]
        fe = lslot[q, a2] / 2 if (a2 == b2 or b2 == (a2 + 1) % 3) else 0.0
        i = slot_cuff[p, b]
        D = fx + fe - theta[i] + (wind[f] - 1) * lcuff[i]
        eD = math.exp(D / 2)
        g = _mul(g, _mul(M, (0.0, 1.0 / eD, -eD, 0.0)))
        e = nxt
        if e == e0:
            break
    return _trace_length(g[0] + g[3])


@njit(cache=True)
def multicurve_length(m, t, slot_cuff, other_pants, other_slot, seam, lslot, theta, lcuff):
    """Total length of the multicurve ``(m, t)``; -1 signals a non-hyperbolic component."""
    d = m.shape[0]
    n = slot_cuff.shape[0]
    E = 2 * np.sum(m)
    off = np.zeros((n, 3), np.int64)
    partner = np.zeros(E, np.int64)
    heavy = np.zeros(n, np.int64)
    nfront = np.zeros((n, 3), np.int64)
    ep_pants = np.zeros(E, np.int64)
    ep_slot = np.zeros(E, np.int64)
    ep_rank = np.zeros(E, np.int64)
    cross = np.zeros(E, np.int64)
    wind = np.zeros(E, np.int64)
    seen = np.zeros(E, np.int64)
    _layout(m, slot_cuff, off, partner, heavy, nfront)
    _fill_slot_tables(m, slot_cuff, off, ep_pants, ep_slot, ep_rank)
    _fill_cross(m, t, slot_cuff, other_pants, other_slot, off, ep_pants, ep_slot, ep_rank,
                cross, wind)
    return _total_length(m, t, slot_cuff, partner, nfront, ep_pants, ep_slot, ep_rank, cross,
                         wind, seam, lslot, theta, lcuff, seen)


@njit(cache=True)
def _total_length(m, t, slot_cuff, partner, nfront, ep_pants, ep_slot, ep_rank, cross, wind,
                  seam, lslot, theta, lcuff, seen):
    d = m.shape[0]
    E = partner.shape[0]
    total = 0.0
    for i in range(d):
        if m[i] == 0:
            total += t[i] * lcuff[i]
    for e in range(E):
        seen[e] = 0
    for e0 in range(E):
        if seen[e0]:
            continue
        x = _orbit_length(e0, slot_cuff, partner, nfront, ep_pants, ep_slot, ep_rank, cross,
                          wind, seam, lslot, theta, lcuff, seen)
        if x < 0:
            return -1.0
        total += x
    return total


@njit(cache=True)
def length_scan(N, m0_values, slot_cuff, other_pants, other_slot, parity, cuff_code, genus,
                target, seam, lslot, theta, lcuff, grid, cutoffs, collar):
    """Walk every valid nonzero point of norm <= N with first crossing in ``m0_values``.

    ``target < 0``: ratio mode over all multicurves.  Returns
    ``(stats, witness, counts, flags)`` with ``stats = [min ratio, max ratio, failures]``
    and ``witness`` the argmin / argmax points (rows of ``m`` then ``t``).

    ``target >= 0``: count single curves of that code.  ``counts[k]`` is the number
    with norm <= ``cutoffs[k]`` and length <= ``grid[k]``; ``flags[k]`` counts those
    with norm >= 0.95 cutoff and length >= 0.95 grid.  Crossing vectors with
    ``sum(m * collar) > grid[-1]`` are skipped: every crossing of cuff ``i`` spends
    at least ``collar[i]`` inside its collar, so none of their curves is counted.
    """
    d = slot_cuff.shape[0] * 3 // 2
    n = slot_cuff.shape[0]
    G = grid.shape[0]
    counts = np.zeros(G, np.int64)
    flags = np.zeros(G, np.int64)
    stats = np.array([np.inf, 0.0, 0.0])
    witness = np.zeros((2, 2 * d), np.int64)
    m = np.zeros(d, np.int64)
    t = np.zeros(d, np.int64)
    rem = np.zeros(d, np.int64)
    off = np.zeros((n, 3), np.int64)
    heavy = np.zeros(n, np.int64)
    nfront = np.zeros((n, 3), np.int64)
    Emax = 2 * N + 2
    partner = np.zeros(Emax, np.int64)
    ep_pants = np.zeros(Emax, np.int64)
    ep_slot = np.zeros(Emax, np.int64)
    ep_rank = np.zeros(Emax, np.int64)
    cross = np.zeros(Emax, np.int64)
    wind = np.zeros(Emax, np.int64)
    seen = np.zeros(Emax, np.int64)
    for m0 in m0_values:
        if m0 > N:
            continue
        m[:] = 0
        m[0] = m0
        while True:
            msum = 0
            for i in range(d):
                msum += m[i]
            skip = False
            if target >= 0:
                floor_len = 0.0
                for i in range(d):
                    floor_len += m[i] * collar[i]
                skip = floor_len > grid[G - 1]
            if msum <= N and not skip and _parity_ok(m, parity):
                E = 2 * msum
                P = partner[:E]
                EP = ep_pants[:E]
                ES = ep_slot[:E]
                ER = ep_rank[:E]
                CR = cross[:E]
                WI = wind[:E]
                SE = seen[:E]
                _layout(m, slot_cuff, off, P, heavy, nfront)
                _fill_slot_tables(m, slot_cuff, off, EP, ES, ER)
                table = np.zeros(1, np.int64)
                if target >= 0 and msum > 0:
                    table = class_table(m, slot_cuff, other_pants, other_slot, genus)
                B = N - msum
                rem[0] = B
                t[0] = -B if m[0] > 0 else 0
                for i in range(1, d):
                    rem[i] = rem[i - 1] - abs(t[i - 1])
                    t[i] = -rem[i] if m[i] > 0 else 0
                while True:
                    tsum = B - rem[d - 1] + abs(t[d - 1])
                    nrm = msum + tsum
                    if nrm > 0:
                        if target < 0:
                            _fill_cross(m, t, slot_cuff, other_pants, other_slot, off, EP, ES, ER,
                                        CR, WI)
                            x = _total_length(m, t, slot_cuff, P, nfront, EP, ES, ER, CR, WI,
                                              seam, lslot, theta, lcuff, SE)
                            if x < 0:
                                stats[2] += 1
                            else:
                                r = x / nrm
                                if r < stats[0]:
                                    stats[0] = r
                                    witness[0, :d] = m
                                    witness[0, d:] = t
                                if r > stats[1]:
                                    stats[1] = r
                                    witness[1, :d] = m
                                    witness[1, d:] = t
                        else:
                            code = -1
                            if msum == 0:
                                if tsum == 1:
                                    for i in range(d):
                                        if t[i] == 1:
                                            code = cuff_code[i]
                            else:
                                zero_clean = True
                                idx = 0
                                rad = 1
                                for i in range(d):
                                    if m[i] == 0:
                                        if t[i] != 0:
                                            zero_clean = False
                                    else:
                                        idx += (t[i] % m[i]) * rad
                                        rad *= m[i]
                                if zero_clean:
                                    code = table[idx]
                            if code == target:
                                _fill_cross(m, t, slot_cuff, other_pants, other_slot, off, EP, ES,
                                            ER, CR, WI)
                                x = _total_length(m, t, slot_cuff, P, nfront, EP, ES, ER, CR, WI,
                                                  seam, lslot, theta, lcuff, SE)
                                if x < 0:
                                    stats[2] += 1
                                else:
                                    if x / nrm < stats[0]:
                                        stats[0] = x / nrm
                                    for k in range(G):
                                        if nrm <= cutoffs[k] and x <= grid[k]:
                                            counts[k] += 1
                                            if nrm >= 0.95 * cutoffs[k] and x >= 0.95 * grid[k]:
                                                flags[k] += 1
                    k = d - 1
                    while k >= 0 and t[k] >= rem[k]:
                        k -= 1
                    if k < 0:
                        break
                    t[k] += 1
                    for i in range(k + 1, d):
                        rem[i] = rem[i - 1] - abs(t[i - 1])
                        t[i] = -rem[i] if m[i] > 0 else 0
            k = d - 1
            while k >= 1:
                m[k] += 1
                s = 0
                for i in range(d):
                    s += m[i]
                if s <= N:
                    break
                m[k] = 0
                k -= 1
            if k < 1:
                break
    return stats, witness, counts, flags
