"""Pure-Python kernel lane.

Same entry points and bit-identical outputs as the compiled kernel in
``_fastkernel.pyx``; selected at import time when the extension is missing or
when FIRELINE_PURE=1.  Keep every floating-point expression in the same shape
as the Cython source: the parity tests assert exact equality between lanes.
"""

from __future__ import annotations

import heapq
import math

from . import rng

COMPILED = False

_EMPTY_L, _EMPTY_R = 1, 0  # sentinel pair for "no cluster"


# ---------------------------------------------------------------------------
# mark sampling (array form)
# ---------------------------------------------------------------------------


def sample_marks_arrays(horizon, half_width, key):
    """Poisson(1) marks on [0,horizon] x [-A,A]; returns (times, positions)."""
    rate = 2.0 * half_width
    ts = []
    xs = []
    seen = set()
    t = 0.0
    k = 0
    while True:
        t_next = t + rng.exp_gap(key, rng.CH_TIME, k) / rate
        retry = 0
        while t_next <= t:
            retry += 1
            t_next = t + rng.exp_gap(key, rng.CH_TIME + (retry << 8), k) / rate
        t = t_next
        if t > horizon:
            return ts, xs
        x = -half_width + 2.0 * half_width * rng.unit(key, rng.CH_POS, k)
        retry = 0
        while x in seen:
            retry += 1
            x = -half_width + 2.0 * half_width * rng.unit(key, rng.CH_POS + (retry << 8), k)
        seen.add(x)
        ts.append(t)
        xs.append(x)
        k += 1


# ---------------------------------------------------------------------------
# lattice event loop
# ---------------------------------------------------------------------------


def lattice_run(
    a_lambda,
    horizon,
    growth_key,
    ign_times,
    ign_sites,
    ign_rate,
    ign_key,
    probe_sites,
    snapshot_times,
    want_burns,
):
    """Event-driven run of the finite-box forest fire process.

    Sites are indexed 0..2*a_lambda inside, absolute site = index - a_lambda.
    Ignitions come either from the (ign_times, ign_sites) schedule, or, when
    ign_rate > 0, from internal per-site Poisson clocks keyed by ign_key.
    Events are processed in (time, site, growth-before-ignition) order.

    Returns a dict of plain Python lists; both kernel lanes return the same
    structure with bit-identical contents.
    """
    n = 2 * a_lambda + 1
    occ = bytearray(n)
    vacant = n

    # one pending growth time per site, plus one pending ignition in clock mode
    heap = []
    g_count = [0] * n
    g_time = [0.0] * n
    for idx in range(n):
        t0 = rng.exp_gap(growth_key, idx - a_lambda, 0)
        g_count[idx] = 1
        g_time[idx] = t0
        heap.append((t0, idx * 2))
    internal = ign_rate > 0.0
    i_count = [0] * n
    i_time = [0.0] * n
    if internal:
        for idx in range(n):
            t0 = rng.exp_gap(ign_key, idx - a_lambda, 0) / ign_rate
            i_count[idx] = 1
            i_time[idx] = t0
            heap.append((t0, idx * 2 + 1))
    heapq.heapify(heap)

    burn_t, burn_l, burn_r, burn_trig = [], [], [], []
    n_probe = len(probe_sites)
    p_idx = [s + a_lambda for s in probe_sites]
    p_l = [_EMPTY_L] * n_probe
    p_r = [_EMPTY_R] * n_probe
    probe_out = [([0.0], [_EMPTY_L], [_EMPTY_R]) for _ in range(n_probe)]
    snaps = []
    snap_ptr = 0
    n_snap = len(snapshot_times)
    ig_ptr = 0
    n_sched = len(ign_times)
    growth_generated = n  # initial pending times
    growth_applied = 0
    ign_consumed = 0

    def scan_left(idx):
        pos = occ.rfind(0, 0, idx)
        return pos + 1  # -1 + 1 == 0 at the boundary

    def scan_right(idx):
        pos = occ.find(0, idx + 1, n)
        return (pos - 1) if pos >= 0 else (n - 1)

    def take_snapshot(at):
        runs_l, runs_r = [], []
        j = 0
        while j < n:
            if occ[j]:
                k = occ.find(0, j + 1, n)
                if k < 0:
                    k = n
                runs_l.append(j - a_lambda)
                runs_r.append(k - 1 - a_lambda)
                j = k
            else:
                j += 1
        snaps.append((at, runs_l, runs_r))

    while True:
        if heap:
            t_ev, slot = heap[0]
        else:
            t_ev, slot = math.inf, 0
        from_sched = False
        if ig_ptr < n_sched:
            ts = ign_times[ig_ptr]
            slot_s = (ign_sites[ig_ptr] + a_lambda) * 2 + 1
            if ts < t_ev or (ts == t_ev and slot_s < slot):
                t_ev, slot, from_sched = ts, slot_s, True
        if t_ev > horizon:
            break
        while snap_ptr < n_snap and snapshot_times[snap_ptr] < t_ev:
            take_snapshot(snapshot_times[snap_ptr])
            snap_ptr += 1
        idx = slot >> 1
        if not slot & 1:
            # growth
            if not occ[idx]:
                occ[idx] = 1
                vacant -= 1
                growth_applied += 1
                for j in range(n_probe):
                    pj = p_idx[j]
                    if p_l[j] > p_r[j]:
                        if idx == pj:
                            p_l[j] = scan_left(pj)
                            p_r[j] = scan_right(pj)
                            st, sl, sr = probe_out[j]
                            st.append(t_ev)
                            sl.append(p_l[j] - a_lambda)
                            sr.append(p_r[j] - a_lambda)
                    elif idx == p_l[j] - 1:
                        p_l[j] = scan_left(idx)
                        st, sl, sr = probe_out[j]
                        st.append(t_ev)
                        sl.append(p_l[j] - a_lambda)
                        sr.append(p_r[j] - a_lambda)
                    elif idx == p_r[j] + 1:
                        p_r[j] = scan_right(idx)
                        st, sl, sr = probe_out[j]
                        st.append(t_ev)
                        sl.append(p_l[j] - a_lambda)
                        sr.append(p_r[j] - a_lambda)
            g_time[idx] += rng.exp_gap(growth_key, idx - a_lambda, g_count[idx])
            g_count[idx] += 1
            growth_generated += 1
            heapq.heapreplace(heap, (g_time[idx], slot))
        else:
            # ignition
            if occ[idx]:
                l = scan_left(idx)
                r = scan_right(idx)
                occ[l : r + 1] = bytes(r + 1 - l)
                vacant += r + 1 - l
                if want_burns:
                    burn_t.append(t_ev)
                    burn_l.append(l - a_lambda)
                    burn_r.append(r - a_lambda)
                    burn_trig.append(idx - a_lambda)
                for j in range(n_probe):
                    if p_l[j] <= p_r[j] and l <= p_idx[j] <= r:
                        p_l[j], p_r[j] = _EMPTY_L, _EMPTY_R
                        st, sl, sr = probe_out[j]
                        st.append(t_ev)
                        sl.append(_EMPTY_L)
                        sr.append(_EMPTY_R)
            if from_sched:
                ig_ptr += 1
                ign_consumed += 1
            else:
                i_time[idx] += rng.exp_gap(ign_key, idx - a_lambda, i_count[idx]) / ign_rate
                i_count[idx] += 1
                heapq.heapreplace(heap, (i_time[idx], slot))

    while snap_ptr < n_snap and snapshot_times[snap_ptr] <= horizon:
        take_snapshot(snapshot_times[snap_ptr])
        snap_ptr += 1

    return {
        "burns": (burn_t, burn_l, burn_r, burn_trig),
        "probes": probe_out,
        "snapshots": snaps,
        "occupancy": bytes(occ),
        "vacant": vacant,
        "growth_generated": growth_generated,
        "growth_applied": growth_applied,
        "ignitions_consumed": ign_consumed,
    }


# ---------------------------------------------------------------------------
# limit-process fold (array form)
# ---------------------------------------------------------------------------


def _lffp_query(bx, bzb, bzt, bhb, bht, czb, czt, half_width, t, x0):
    """(Z, D) of the folded state at (t, x0); x0 must not sit on a breakpoint.

    Saturation/expiry classification compares t against knot times (base_time
    plus remaining value), never against reconstructed values, so a rounding
    ulp cannot flip a blocking decision.
    """
    m = len(bx)
    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi) >> 1
        if bx[mid] < x0:
            lo = mid + 1
        else:
            hi = mid
    c0 = lo
    z = czb[c0] + (t - czt[c0])
    if z > 1.0:
        z = 1.0
    if t < czt[c0] + (1.0 - czb[c0]):
        return z, x0, x0
    c = c0
    while True:
        if c == 0:
            left = -half_width
            break
        j = c - 1
        if t < bzt[j] + (1.0 - bzb[j]) or t < bht[j] + bhb[j]:
            left = bx[j]
            break
        if t < czt[j] + (1.0 - czb[j]):
            left = bx[j]
            break
        c = j
    c = c0
    while True:
        if c == m:
            right = half_width
            break
        if t < bzt[c] + (1.0 - bzb[c]) or t < bht[c] + bhb[c]:
            right = bx[c]
            break
        if t < czt[c + 1] + (1.0 - czb[c + 1]):
            right = bx[c]
            break
        c += 1
    return z, left, right


def _lffp_apply(bx, bzb, bzt, bhb, bht, czb, czt, half_width, t, x):
    """One mark of the constructive algorithm; mutates the parallel lists."""
    m = len(bx)
    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi) >> 1
        if bx[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    i = lo
    if i < m and bx[i] == x:
        return -1  # duplicate coordinate; caller decides
    if t < czt[i] + (1.0 - czb[i]):
        z = czb[i] + (t - czt[i])
        bx.insert(i, x)
        bzb.insert(i, czb[i])
        bzt.insert(i, czt[i])
        bhb.insert(i, z)
        bht.insert(i, t)
        czb.insert(i, czb[i])
        czt.insert(i, czt[i])
        return 0
    # macroscopic: burn the component of x, boundary values reset only if
    # they were saturated just before the mark
    lj = i - 1
    while lj >= 0:
        if t < bzt[lj] + (1.0 - bzb[lj]) or t < bht[lj] + bhb[lj]:
            break
        if t < czt[lj] + (1.0 - czb[lj]):
            break
        lj -= 1
    rj = i
    while rj < m:
        if t < bzt[rj] + (1.0 - bzb[rj]) or t < bht[rj] + bhb[rj]:
            break
        if t < czt[rj + 1] + (1.0 - czb[rj + 1]):
            break
        rj += 1
    for c in range(lj + 1, rj + 1):
        czb[c] = 0.0
        czt[c] = t
    for j in range(lj + 1, rj):
        bzb[j] = 0.0
        bzt[j] = t
    for j in (lj, rj):
        if 0 <= j < m and t >= bzt[j] + (1.0 - bzb[j]):
            bzb[j] = 0.0
            bzt[j] = t
    return 1


def lffp_endpoint_batch(half_width, t_eval, keys, x0):
    """Z_t(x0) and D_t(x0) over independent limit-process replicas.

    For each stream key: sample marks on [0, t_eval] x [-A, A], fold them in
    time order, query at (t_eval, x0).  Returns (z, left, right) lists.
    """
    out_z, out_l, out_r = [], [], []
    for key in keys:
        ts, xs = sample_marks_arrays(t_eval, half_width, key)
        bx, bzb, bzt, bhb, bht = [], [], [], [], []
        czb, czt = [0.0], [0.0]
        for q in range(len(ts)):
            _lffp_apply(bx, bzb, bzt, bhb, bht, czb, czt, half_width, ts[q], xs[q])
        z, l, r = _lffp_query(bx, bzb, bzt, bhb, bht, czb, czt, half_width, t_eval, x0)
        out_z.append(z)
        out_l.append(l)
        out_r.append(r)
    return out_z, out_l, out_r
