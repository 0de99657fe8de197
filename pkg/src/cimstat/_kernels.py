"""Compiled inner loops: pair counting, hybrid overlap correction, region scanning.

Everything here works on plain numpy arrays and returns scalars or fills
caller-provided output buffers; the public wrappers live in :mod:`cimstat.tau`,
:mod:`cimstat.streaming` and :mod:`cimstat.cim`.
"""

import math

import numpy as np
from numba import njit

OOCTZT = 100


def closeness_to_zero_ties(n, ooctzt=OOCTZT):
    """Tied-pair budget below which a dimension still counts as continuous."""
    g = n // ooctzt
    return g * (g - 1) // 2


def tau_kl_from_counts(numer, n_pairs, ties_x, ties_y, cont_x, cont_y, overlap_k):
    """Return (value, hybrid, degenerate) for the tau_KL denominator rule.

    The hybrid branch is taken when one margin is continuous and the other
    carries ties; otherwise the tie-scaled denominator is used, which
    reduces to ``n_pairs`` for tie-free data.
    """
    hybrid = (cont_x and ties_y > 0) or (cont_y and ties_x > 0)
    if hybrid:
        t = max(ties_x, ties_y) - overlap_k
        den = float(n_pairs - t)
    else:
        a = n_pairs - ties_x
        b = n_pairs - ties_y
        if a == b:
            den = float(a)
        else:
            den = math.sqrt(float(a) * float(b))
    if den == 0.0:
        return 0.0, hybrid, True
    return numer / den, hybrid, False


_tau_kl_nb = njit(cache=True)(tau_kl_from_counts)


@njit(cache=True)
def _merge_count(y, buf, lo, mid, hi):
    # strict inversions y[i] > y[j], i < j, across the two halves
    i = lo
    j = mid
    k = lo
    inv = 0
    while i < mid and j < hi:
        if y[i] <= y[j]:
            buf[k] = y[i]
            i += 1
        else:
            buf[k] = y[j]
            inv += mid - i
            j += 1
        k += 1
    while i < mid:
        buf[k] = y[i]
        i += 1
        k += 1
    while j < hi:
        buf[k] = y[j]
        j += 1
        k += 1
    for t in range(lo, hi):
        y[t] = buf[t]
    return inv


@njit(cache=True)
def count_pairs(x, y):
    """Concordance bookkeeping in O(n log n).

    Returns (concordant, discordant, ties_x, ties_y, ties_xy, distinct_x,
    distinct_y). Tie counts are numbers of tied pairs.
    """
    n = x.shape[0]
    o1 = np.argsort(y, kind="mergesort")
    o2 = o1[np.argsort(x[o1], kind="mergesort")]
    xs = x[o2]
    ys = y[o2].copy()

    ties_x = 0
    ties_xy = 0
    distinct_x = 0
    run_x = 0
    run_xy = 0
    for i in range(n):
        if i > 0 and xs[i] == xs[i - 1]:
            run_x += 1
            if ys[i] == ys[i - 1]:
                run_xy += 1
            else:
                ties_xy += run_xy * (run_xy + 1) // 2
                run_xy = 0
        else:
            ties_x += run_x * (run_x + 1) // 2
            ties_xy += run_xy * (run_xy + 1) // 2
            run_x = 0
            run_xy = 0
            distinct_x += 1
    ties_x += run_x * (run_x + 1) // 2
    ties_xy += run_xy * (run_xy + 1) // 2

    # bottom-up merge sort of ys counts strict y-inversions = discordant pairs
    buf = np.empty_like(ys)
    disc = 0
    width = 1
    while width < n:
        lo = 0
        while lo < n - width:
            mid = lo + width
            hi = min(lo + 2 * width, n)
            disc += _merge_count(ys, buf, lo, mid, hi)
            lo += 2 * width
        width *= 2

    ties_y = 0
    distinct_y = 0
    run_y = 0
    for i in range(n):
        if i > 0 and ys[i] == ys[i - 1]:
            run_y += 1
        else:
            ties_y += run_y * (run_y + 1) // 2
            run_y = 0
            distinct_y += 1
    ties_y += run_y * (run_y + 1) // 2

    n_pairs = n * (n - 1) // 2
    conc = n_pairs - ties_x - ties_y + ties_xy - disc
    return conc, disc, ties_x, ties_y, ties_xy, distinct_x, distinct_y


@njit(cache=True)
def overlap_correction(cont, disc):
    """Hybrid correction K = C(u', 2) * v'.

    ``v'`` is the number of distinct discrete values. For every pair of
    adjacent discrete values, the continuous ranges of the two groups are
    intersected and the smaller of the two groups' member counts inside the
    intersection is taken; ``u'`` is the floor of the mean of these counts
    over adjacent pairs. Disjoint ranges (a perfectly monotone hybrid) give 0.
    """
    m = disc.shape[0]
    if m < 2:
        return 0
    order = np.argsort(disc, kind="mergesort")
    level = np.empty(m, dtype=np.int64)
    nlev = 0
    for p in range(m):
        if p == 0 or disc[order[p]] != disc[order[p - 1]]:
            nlev += 1
        level[p] = nlev - 1
    if nlev < 2:
        return 0
    lmin = np.empty(nlev, dtype=cont.dtype)
    lmax = np.empty(nlev, dtype=cont.dtype)
    seen = np.zeros(nlev, dtype=np.bool_)
    for p in range(m):
        c = cont[order[p]]
        g = level[p]
        if not seen[g]:
            lmin[g] = c
            lmax[g] = c
            seen[g] = True
        else:
            if c < lmin[g]:
                lmin[g] = c
            if c > lmax[g]:
                lmax[g] = c
    npair = nlev - 1
    lo = np.empty(npair, dtype=cont.dtype)
    hi = np.empty(npair, dtype=cont.dtype)
    for g in range(npair):
        lo[g] = max(lmin[g], lmin[g + 1])
        hi[g] = min(lmax[g], lmax[g + 1])
    below = np.zeros(npair, dtype=np.int64)
    above = np.zeros(npair, dtype=np.int64)
    for p in range(m):
        c = cont[order[p]]
        g = level[p]
        if g < npair and lo[g] <= hi[g] and lo[g] <= c <= hi[g]:
            below[g] += 1
        if g > 0 and lo[g - 1] <= hi[g - 1] and lo[g - 1] <= c <= hi[g - 1]:
            above[g - 1] += 1
    total = 0
    for g in range(npair):
        total += min(below[g], above[g])
    up = total // npair
    return (up * (up - 1) // 2) * nlev


@njit(cache=True)
def _region_tau(a, b, lo, hi, numer, mm, uu, vv, ctzt, use_k):
    n_pairs = mm * (mm - 1) // 2
    cont_a = uu <= ctzt
    cont_b = vv <= ctzt
    k = 0
    if use_k and ((cont_a and vv > 0) or (cont_b and uu > 0)):
        if cont_a and not cont_b:
            k = overlap_correction(a[lo:hi], b[lo:hi])
        elif cont_b and not cont_a:
            k = overlap_correction(b[lo:hi], a[lo:hi])
        elif uu > vv:
            k = overlap_correction(b[lo:hi], a[lo:hi])
        else:
            k = overlap_correction(a[lo:hi], b[lo:hi])
    val, hyb, deg = _tau_kl_nb(numer, n_pairs, uu, vv, cont_a, cont_b, k)
    return val


@njit(cache=True)
def _consume_range(a, b, start, p, q, umap, vmap, st, ooctzt):
    # st = [numer, mm, uu, vv, mmg, ctzt]; consumes samples p..q-1 one by one
    for j in range(p, q):
        up = 0
        um = 0
        vp = 0
        vm = 0
        aj = a[j]
        bj = b[j]
        # branch-free tallies so the loop vectorizes
        for i in range(start, j):
            du = aj - a[i]
            dv = bj - b[i]
            nu = du != 0
            nv = dv != 0
            up += (du > 0) & nv
            um += (du < 0) & nv
            vp += (dv > 0) & nu
            vm += (dv < 0) & nu
        if up < um:
            st[0] += vm - vp
        else:
            st[0] += vp - vm
        st[1] += 1
        umap[aj] += 1
        st[2] += umap[aj] - 1
        vmap[bj] += 1
        st[3] += vmap[bj] - 1
        if st[1] % ooctzt == 0:
            st[4] += 1
            st[5] += st[4] - 1


@njit(cache=True)
def _scan_core(a, b, cell, ncells, zcrit, sigma_coef, ooctzt, use_k, umap, vmap,
               out_lo, out_hi, out_tau, out_cnt):
    # umap/vmap must be zero on entry and are left zeroed on exit
    m = a.shape[0]
    st = np.zeros(6, dtype=np.int64)
    nreg = 0
    start = 0
    start_cell = 0
    m_prev = 0.0
    tau_prev = 0.0
    is_new = True
    p = 0
    for c in range(ncells):
        q = p
        while q < m and cell[q] == c:
            q += 1
        if q == p:
            continue
        mm_before = st[1]
        tau_before = tau_prev
        _consume_range(a, b, start, p, q, umap, vmap, st, ooctzt)
        tau = _region_tau(a, b, start, q, st[0], st[1], st[2], st[3], st[5], use_k)
        cur = abs(tau)
        boundary = False
        if not is_new and st[1] >= 2:
            sig = sigma_coef * (1.0 - tau * tau)
            if cur < m_prev - sig / math.sqrt(st[1]) * zcrit:
                boundary = True
        is_new = False
        if boundary:
            out_lo[nreg] = start_cell
            out_hi[nreg] = c
            out_tau[nreg] = tau_before
            out_cnt[nreg] = mm_before
            nreg += 1
            for i in range(start, q):
                umap[a[i]] = 0
                vmap[b[i]] = 0
            st[:] = 0
            start = p
            start_cell = c
            _consume_range(a, b, start, p, q, umap, vmap, st, ooctzt)
            tau = _region_tau(a, b, start, q, st[0], st[1], st[2], st[3], st[5], use_k)
            cur = abs(tau)
            is_new = True
        m_prev = cur
        tau_prev = tau
        p = q
    for i in range(start, m):
        umap[a[i]] = 0
        vmap[b[i]] = 0
    out_lo[nreg] = start_cell
    out_hi[nreg] = ncells
    out_tau[nreg] = tau_prev
    out_cnt[nreg] = st[1]
    return nreg + 1


@njit(cache=True)
def scan_sorted(a, b, cell, ncells, zcrit, sigma_coef, ooctzt, use_k,
                out_lo, out_hi, out_tau, out_cnt):
    """Scan one strip of samples already sorted by the scan coordinate.

    ``a``/``b`` are integer ranks on the scan and cross axes, ``cell`` each
    sample's increment index (nondecreasing). Samples are streamed into a
    running tau_KL one at a time (O(prefix) per sample); after every
    non-empty increment the boundary test compares the region's |tau| with
    its value before the increment. Regions are written to the ``out_*``
    buffers as half-open cell ranges; the number of regions is returned.
    """
    nmax = 1
    for i in range(a.shape[0]):
        nmax = max(nmax, a[i], b[i])
    umap = np.zeros(nmax + 1, dtype=np.int64)
    vmap = np.zeros(nmax + 1, dtype=np.int64)
    return _scan_core(a, b, cell, ncells, zcrit, sigma_coef, ooctzt, use_k, umap, vmap,
                      out_lo, out_hi, out_tau, out_cnt)


@njit(cache=True)
def sweep(a_all, b_all, offsets, ncells_list, n, zcrit, sigma_coef, ooctzt, use_k,
          out_lo, out_hi, out_tau, out_cnt, nreg, nonempty, partial):
    """Scan every strip at every increment in one call.

    Strip ``s`` is ``a_all[offsets[s]:offsets[s+1]]`` (sorted by scan rank).
    Regions of (strip s, increment k) are appended to the ``out_*`` buffers
    in that order; ``nreg[s, k]`` receives their number, ``nonempty[s, k]``
    how many hold samples and ``partial[s, k]`` the sum of
    ``count / n * |tau|`` accumulated in region order.
    """
    umap = np.zeros(n + 1, dtype=np.int64)
    vmap = np.zeros(n + 1, dtype=np.int64)
    pos = 0
    for s in range(offsets.shape[0] - 1):
        a = a_all[offsets[s]:offsets[s + 1]]
        b = b_all[offsets[s]:offsets[s + 1]]
        cell = np.empty(a.shape[0], dtype=np.int64)
        for k in range(ncells_list.shape[0]):
            ncells = ncells_list[k]
            if a.shape[0] == 0:
                out_lo[pos] = 0
                out_hi[pos] = ncells
                out_tau[pos] = 0.0
                out_cnt[pos] = 0
                r = 1
            else:
                for i in range(a.shape[0]):
                    cell[i] = (a[i] * ncells + n - 1) // n - 1
                r = _scan_core(a, b, cell, ncells, zcrit, sigma_coef, ooctzt, use_k,
                               umap, vmap, out_lo[pos:], out_hi[pos:], out_tau[pos:],
                               out_cnt[pos:])
            acc = 0.0
            ne = 0
            for t in range(pos, pos + r):
                acc += (out_cnt[t] / n) * abs(out_tau[t])
                if out_cnt[t] > 0:
                    ne += 1
            nreg[s, k] = r
            nonempty[s, k] = ne
            partial[s, k] = acc
            pos += r
    return pos
