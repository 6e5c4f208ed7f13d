# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel lane.

Mirror of ``_pykernel.py``: same entry points, same event ordering, and the
same floating-point expression shapes so that outputs are bit-identical
between lanes.  Any change here must be replicated there (the parity tests
enforce this).
"""

from libc.stdlib cimport malloc, free, realloc
from libc.string cimport memset, memmove
from libc.math cimport log

COMPILED = True

cdef long EMPTY_L = 1
cdef long EMPTY_R = 0

cdef unsigned long long GOLDEN = 0x9E3779B97F4A7C15ULL
cdef unsigned long long PRIME2 = 0xC2B2AE3D27D4EB4FULL

cdef inline unsigned long long mix64(unsigned long long z) nogil:
    z ^= z >> 30
    z = z * 0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z = z * 0x94D049BB133111EBULL
    z ^= z >> 31
    return z

cdef inline unsigned long long raw64(unsigned long long key,
                                     unsigned long long channel,
                                     unsigned long long index) nogil:
    cdef unsigned long long z = mix64(key)
    z = mix64(z + channel * GOLDEN)
    z = mix64(z + index * PRIME2)
    return z

cdef inline double unit(unsigned long long key,
                        unsigned long long channel,
                        unsigned long long index) nogil:
    return ((raw64(key, channel, index) >> 11) + 0.5) * (2.0 ** -53)

cdef inline double exp_gap(unsigned long long key,
                           unsigned long long channel,
                           unsigned long long index) nogil:
    return -log(unit(key, channel, index))

cdef inline unsigned long long subkey(unsigned long long key,
                                      unsigned long long channel) nogil:
    # raw64(key, channel, index) == mix64(subkey(key, channel) + index*PRIME2)
    return mix64(mix64(key) + channel * GOLDEN)

cdef inline double exp_gap_sub(unsigned long long sub,
                               unsigned long long index) nogil:
    return -log(((mix64(sub + index * PRIME2) >> 11) + 0.5) * (2.0 ** -53))


# ---------------------------------------------------------------------------
# mark sampling (array form)
# ---------------------------------------------------------------------------


def sample_marks_arrays(double horizon, double half_width, key):
    """Poisson(1) marks on [0,horizon] x [-A,A]; returns (times, positions)."""
    cdef unsigned long long k64 = <unsigned long long> (<object> key & 0xFFFFFFFFFFFFFFFF)
    cdef double rate = 2.0 * half_width
    cdef list ts = []
    cdef list xs = []
    cdef double t = 0.0, t_next, x
    cdef unsigned long long k = 0
    cdef unsigned long long retry
    cdef Py_ssize_t i, n
    while True:
        t_next = t + exp_gap(k64, 0, k) / rate
        retry = 0
        while t_next <= t:
            retry += 1
            t_next = t + exp_gap(k64, 0 + (retry << 8), k) / rate
        t = t_next
        if t > horizon:
            return ts, xs
        x = -half_width + 2.0 * half_width * unit(k64, 1, k)
        retry = 0
        while _contains(xs, x):
            retry += 1
            x = -half_width + 2.0 * half_width * unit(k64, 1 + (retry << 8), k)
        ts.append(t)
        xs.append(x)
        k += 1


cdef bint _contains(list xs, double x):
    cdef Py_ssize_t i
    for i in range(len(xs)):
        if <double> xs[i] == x:
            return True
    return False


cdef inline bint _carr_contains(double *arr, Py_ssize_t n, double x) nogil:
    cdef Py_ssize_t i
    for i in range(n):
        if arr[i] == x:
            return True
    return False


# ---------------------------------------------------------------------------
# lattice event loop
# ---------------------------------------------------------------------------


cdef struct Heap:
    double *t
    long *slot
    Py_ssize_t size

cdef inline void heap_sift_down(Heap *h, Py_ssize_t pos) nogil:
    cdef double vt = h.t[pos]
    cdef long vs = h.slot[pos]
    cdef Py_ssize_t child
    while True:
        child = 2 * pos + 1
        if child >= h.size:
            break
        if child + 1 < h.size and (h.t[child + 1] < h.t[child] or
                (h.t[child + 1] == h.t[child] and h.slot[child + 1] < h.slot[child])):
            child += 1
        if h.t[child] < vt or (h.t[child] == vt and h.slot[child] < vs):
            h.t[pos] = h.t[child]
            h.slot[pos] = h.slot[child]
            pos = child
        else:
            break
    h.t[pos] = vt
    h.slot[pos] = vs

cdef inline void heap_build(Heap *h) nogil:
    cdef Py_ssize_t i
    for i in range(h.size // 2 - 1, -1, -1):
        heap_sift_down(h, i)


def lattice_run(
    long a_lambda,
    double horizon,
    growth_key,
    ign_times,
    ign_sites,
    double ign_rate,
    ign_key,
    probe_sites,
    snapshot_times,
    bint want_burns,
):
    """Event-driven run of the finite-box forest fire process.

    See the pure lane for the full contract; outputs are identical.
    """
    cdef unsigned long long gkey = <unsigned long long> (<object> growth_key & 0xFFFFFFFFFFFFFFFF)
    cdef unsigned long long ikey = <unsigned long long> (<object> ign_key & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t n = 2 * a_lambda + 1
    cdef bint internal = ign_rate > 0.0
    cdef Py_ssize_t n_sched = len(ign_times)
    cdef Py_ssize_t n_probe = len(probe_sites)
    cdef Py_ssize_t n_snap = len(snapshot_times)
    cdef Py_ssize_t i, j, idx, l, r

    cdef unsigned char *occ = <unsigned char *> malloc(n)
    cdef double *sched_t = <double *> malloc((n_sched + 1) * sizeof(double))
    cdef long *sched_s = <long *> malloc((n_sched + 1) * sizeof(long))
    cdef double *snap_t = <double *> malloc((n_snap + 1) * sizeof(double))
    cdef long *g_count = <long *> malloc(n * sizeof(long))
    cdef double *g_time = <double *> malloc(n * sizeof(double))
    cdef unsigned long long *g_sub = <unsigned long long *> malloc(n * sizeof(unsigned long long))
    cdef long *i_count = NULL
    cdef double *i_time = NULL
    cdef unsigned long long *i_sub = NULL
    cdef long *p_idx = <long *> malloc((n_probe + 1) * sizeof(long))
    cdef long *p_l = <long *> malloc((n_probe + 1) * sizeof(long))
    cdef long *p_r = <long *> malloc((n_probe + 1) * sizeof(long))
    cdef Heap heap
    heap.size = 2 * n if internal else n
    heap.t = <double *> malloc(heap.size * sizeof(double))
    heap.slot = <long *> malloc(heap.size * sizeof(long))
    if internal:
        i_count = <long *> malloc(n * sizeof(long))
        i_time = <double *> malloc(n * sizeof(double))
        i_sub = <unsigned long long *> malloc(n * sizeof(unsigned long long))

    cdef object burn_t = [], burn_l = [], burn_r = [], burn_trig = []
    cdef object probe_out = [([0.0], [EMPTY_L], [EMPTY_R]) for _ in range(n_probe)]
    cdef object snaps = []

    cdef long vacant = n
    cdef long growth_generated = 0, growth_applied = 0, ign_consumed = 0
    cdef Py_ssize_t ig_ptr = 0, snap_ptr = 0
    cdef double t_ev, ts_next, t0
    cdef long slot, slot_s
    cdef bint from_sched

    try:
        memset(occ, 0, n)
        for i in range(n_sched):
            sched_t[i] = <double> ign_times[i]
            sched_s[i] = <long> ign_sites[i]
        for i in range(n_snap):
            snap_t[i] = <double> snapshot_times[i]
        for i in range(n_probe):
            p_idx[i] = <long> probe_sites[i] + a_lambda
            p_l[i] = EMPTY_L
            p_r[i] = EMPTY_R
        for i in range(n):
            g_sub[i] = subkey(gkey, <unsigned long long> (i - a_lambda))
            t0 = exp_gap_sub(g_sub[i], 0)
            g_count[i] = 1
            g_time[i] = t0
            heap.t[i] = t0
            heap.slot[i] = <long> (i * 2)
        if internal:
            for i in range(n):
                i_sub[i] = subkey(ikey, <unsigned long long> (i - a_lambda))
                t0 = exp_gap_sub(i_sub[i], 0) / ign_rate
                i_count[i] = 1
                i_time[i] = t0
                heap.t[n + i] = t0
                heap.slot[n + i] = <long> (i * 2 + 1)
        heap_build(&heap)
        growth_generated = n

        while True:
            t_ev = heap.t[0]
            slot = heap.slot[0]
            from_sched = False
            if ig_ptr < n_sched:
                ts_next = sched_t[ig_ptr]
                slot_s = (sched_s[ig_ptr] + a_lambda) * 2 + 1
                if ts_next < t_ev or (ts_next == t_ev and slot_s < slot):
                    t_ev = ts_next
                    slot = slot_s
                    from_sched = True
            if t_ev > horizon:
                break
            while snap_ptr < n_snap and snap_t[snap_ptr] < t_ev:
                snaps.append(_take_snapshot(occ, n, a_lambda, snap_t[snap_ptr]))
                snap_ptr += 1
            idx = slot >> 1
            if not slot & 1:
                # growth
                if not occ[idx]:
                    occ[idx] = 1
                    vacant -= 1
                    growth_applied += 1
                    for j in range(n_probe):
                        if p_l[j] > p_r[j]:
                            if idx == p_idx[j]:
                                p_l[j] = _scan_left(occ, idx)
                                p_r[j] = _scan_right(occ, n, idx)
                                _probe_append(probe_out, j, t_ev, p_l[j] - a_lambda, p_r[j] - a_lambda)
                        elif idx == p_l[j] - 1:
                            p_l[j] = _scan_left(occ, idx)
                            _probe_append(probe_out, j, t_ev, p_l[j] - a_lambda, p_r[j] - a_lambda)
                        elif idx == p_r[j] + 1:
                            p_r[j] = _scan_right(occ, n, idx)
                            _probe_append(probe_out, j, t_ev, p_l[j] - a_lambda, p_r[j] - a_lambda)
                g_time[idx] += exp_gap_sub(g_sub[idx], <unsigned long long> g_count[idx])
                g_count[idx] += 1
                growth_generated += 1
                heap.t[0] = g_time[idx]
                heap.slot[0] = slot
                heap_sift_down(&heap, 0)
            else:
                # ignition
                if occ[idx]:
                    l = _scan_left(occ, idx)
                    r = _scan_right(occ, n, idx)
                    memset(occ + l, 0, r + 1 - l)
                    vacant += r + 1 - l
                    if want_burns:
                        burn_t.append(t_ev)
                        burn_l.append(<long> (l - a_lambda))
                        burn_r.append(<long> (r - a_lambda))
                        burn_trig.append(<long> (idx - a_lambda))
                    for j in range(n_probe):
                        if p_l[j] <= p_r[j] and l <= p_idx[j] <= r:
                            p_l[j] = EMPTY_L
                            p_r[j] = EMPTY_R
                            _probe_append(probe_out, j, t_ev, EMPTY_L, EMPTY_R)
                if from_sched:
                    ig_ptr += 1
                    ign_consumed += 1
                else:
                    i_time[idx] += exp_gap_sub(i_sub[idx], <unsigned long long> i_count[idx]) / ign_rate
                    i_count[idx] += 1
                    heap.t[0] = i_time[idx]
                    heap.slot[0] = slot
                    heap_sift_down(&heap, 0)

        while snap_ptr < n_snap and snap_t[snap_ptr] <= horizon:
            snaps.append(_take_snapshot(occ, n, a_lambda, snap_t[snap_ptr]))
            snap_ptr += 1

        occupancy = (<char *> occ)[:n]
        return {
            "burns": (burn_t, burn_l, burn_r, burn_trig),
            "probes": probe_out,
            "snapshots": snaps,
            "occupancy": occupancy,
            "vacant": vacant,
            "growth_generated": growth_generated,
            "growth_applied": growth_applied,
            "ignitions_consumed": ign_consumed,
        }
    finally:
        free(occ)
        free(sched_t)
        free(sched_s)
        free(snap_t)
        free(g_count)
        free(g_time)
        free(g_sub)
        free(p_idx)
        free(p_l)
        free(p_r)
        free(heap.t)
        free(heap.slot)
        if internal:
            free(i_count)
            free(i_time)
            free(i_sub)


cdef inline long _scan_left(unsigned char *occ, Py_ssize_t idx) nogil:
    cdef Py_ssize_t j = idx - 1
    while j >= 0 and occ[j]:
        j -= 1
    return <long> (j + 1)

cdef inline long _scan_right(unsigned char *occ, Py_ssize_t n, Py_ssize_t idx) nogil:
    cdef Py_ssize_t j = idx + 1
    while j < n and occ[j]:
        j += 1
    return <long> (j - 1)

cdef _probe_append(object probe_out, Py_ssize_t j, double t, long l, long r):
    st, sl, sr = <tuple> probe_out[j]
    (<list> st).append(t)
    (<list> sl).append(l)
    (<list> sr).append(r)

cdef _take_snapshot(unsigned char *occ, Py_ssize_t n, long a_lambda, double at):
    cdef list runs_l = [], runs_r = []
    cdef Py_ssize_t j = 0, k
    while j < n:
        if occ[j]:
            k = j + 1
            while k < n and occ[k]:
                k += 1
            runs_l.append(<long> (j - a_lambda))
            runs_r.append(<long> (k - 1 - a_lambda))
            j = k
        else:
            j += 1
    return (at, runs_l, runs_r)


# ---------------------------------------------------------------------------
# limit-process fold (array form)
# ---------------------------------------------------------------------------


cdef struct LState:
    double *bx
    double *bzb
    double *bzt
    double *bhb
    double *bht
    double *czb
    double *czt
    Py_ssize_t m        # breakpoint count; cells = m + 1
    Py_ssize_t cap


cdef inline Py_ssize_t _bisect(double *arr, Py_ssize_t m, double x) nogil:
    cdef Py_ssize_t lo = 0, hi = m, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef int _lffp_apply(LState *s, double half_width, double t, double x) nogil:
    cdef Py_ssize_t m = s.m
    cdef Py_ssize_t i = _bisect(s.bx, m, x)
    cdef Py_ssize_t lj, rj, c, j
    cdef double z
    if i < m and s.bx[i] == x:
        return -1
    if t < s.czt[i] + (1.0 - s.czb[i]):
        z = s.czb[i] + (t - s.czt[i])
        memmove(s.bx + i + 1, s.bx + i, (m - i) * sizeof(double))
        memmove(s.bzb + i + 1, s.bzb + i, (m - i) * sizeof(double))
        memmove(s.bzt + i + 1, s.bzt + i, (m - i) * sizeof(double))
        memmove(s.bhb + i + 1, s.bhb + i, (m - i) * sizeof(double))
        memmove(s.bht + i + 1, s.bht + i, (m - i) * sizeof(double))
        memmove(s.czb + i + 1, s.czb + i, (m + 1 - i) * sizeof(double))
        memmove(s.czt + i + 1, s.czt + i, (m + 1 - i) * sizeof(double))
        s.bx[i] = x
        s.bzb[i] = s.czb[i + 1]
        s.bzt[i] = s.czt[i + 1]
        s.bhb[i] = z
        s.bht[i] = t
        s.czb[i] = s.czb[i + 1]
        s.czt[i] = s.czt[i + 1]
        s.m = m + 1
        return 0
    lj = i - 1
    while lj >= 0:
        if t < s.bzt[lj] + (1.0 - s.bzb[lj]) or t < s.bht[lj] + s.bhb[lj]:
            break
        if t < s.czt[lj] + (1.0 - s.czb[lj]):
            break
        lj -= 1
    rj = i
    while rj < m:
        if t < s.bzt[rj] + (1.0 - s.bzb[rj]) or t < s.bht[rj] + s.bhb[rj]:
            break
        if t < s.czt[rj + 1] + (1.0 - s.czb[rj + 1]):
            break
        rj += 1
    for c in range(lj + 1, rj + 1):
        s.czb[c] = 0.0
        s.czt[c] = t
    for j in range(lj + 1, rj):
        s.bzb[j] = 0.0
        s.bzt[j] = t
    if lj >= 0 and lj < m:
        if t >= s.bzt[lj] + (1.0 - s.bzb[lj]):
            s.bzb[lj] = 0.0
            s.bzt[lj] = t
    if rj >= 0 and rj < m:
        if t >= s.bzt[rj] + (1.0 - s.bzb[rj]):
            s.bzb[rj] = 0.0
            s.bzt[rj] = t
    return 1


cdef void _lffp_query(LState *s, double half_width, double t, double x0,
                      double *out_z, double *out_l, double *out_r) nogil:
    cdef Py_ssize_t m = s.m
    cdef Py_ssize_t c0 = _bisect(s.bx, m, x0)
    cdef Py_ssize_t c, j
    cdef double z, left, right
    z = s.czb[c0] + (t - s.czt[c0])
    if z > 1.0:
        z = 1.0
    out_z[0] = z
    if t < s.czt[c0] + (1.0 - s.czb[c0]):
        out_l[0] = x0
        out_r[0] = x0
        return
    c = c0
    while True:
        if c == 0:
            left = -half_width
            break
        j = c - 1
        if t < s.bzt[j] + (1.0 - s.bzb[j]) or t < s.bht[j] + s.bhb[j]:
            left = s.bx[j]
            break
        if t < s.czt[j] + (1.0 - s.czb[j]):
            left = s.bx[j]
            break
        c = j
    out_l[0] = left
    c = c0
    while True:
        if c == m:
            right = half_width
            break
        if t < s.bzt[c] + (1.0 - s.bzb[c]) or t < s.bht[c] + s.bhb[c]:
            right = s.bx[c]
            break
        if t < s.czt[c + 1] + (1.0 - s.czb[c + 1]):
            right = s.bx[c]
            break
        c += 1
    out_r[0] = right


def lffp_endpoint_batch(double half_width, double t_eval, keys, double x0):
    """Z_t(x0) and D_t(x0) over independent limit-process replicas."""
    cdef list out_z = [], out_l = [], out_r = []
    cdef unsigned long long key
    cdef double rate = 2.0 * half_width
    cdef Py_ssize_t cap = 256
    cdef LState s
    cdef double t, t_next, x, z, dl, dr
    cdef unsigned long long k, retry
    cdef Py_ssize_t i, q, n_marks
    cdef double *mt = <double *> malloc(cap * sizeof(double))
    cdef double *mx = <double *> malloc(cap * sizeof(double))
    s.cap = cap + 4
    s.bx = <double *> malloc(s.cap * sizeof(double))
    s.bzb = <double *> malloc(s.cap * sizeof(double))
    s.bzt = <double *> malloc(s.cap * sizeof(double))
    s.bhb = <double *> malloc(s.cap * sizeof(double))
    s.bht = <double *> malloc(s.cap * sizeof(double))
    s.czb = <double *> malloc((s.cap + 1) * sizeof(double))
    s.czt = <double *> malloc((s.cap + 1) * sizeof(double))
    try:
        for key_obj in keys:
            key = <unsigned long long> (<object> key_obj & 0xFFFFFFFFFFFFFFFF)
            # sample marks on [0, t_eval]
            n_marks = 0
            t = 0.0
            k = 0
            while True:
                t_next = t + exp_gap(key, 0, k) / rate
                retry = 0
                while t_next <= t:
                    retry += 1
                    t_next = t + exp_gap(key, 0 + (retry << 8), k) / rate
                t = t_next
                if t > t_eval:
                    break
                x = -half_width + 2.0 * half_width * unit(key, 1, k)
                retry = 0
                while _carr_contains(mx, n_marks, x):
                    retry += 1
                    x = -half_width + 2.0 * half_width * unit(key, 1 + (retry << 8), k)
                if n_marks == cap:
                    cap *= 2
                    mt = <double *> realloc(mt, cap * sizeof(double))
                    mx = <double *> realloc(mx, cap * sizeof(double))
                mt[n_marks] = t
                mx[n_marks] = x
                n_marks += 1
                k += 1
            if n_marks + 4 > s.cap:
                s.cap = n_marks + 8
                s.bx = <double *> realloc(s.bx, s.cap * sizeof(double))
                s.bzb = <double *> realloc(s.bzb, s.cap * sizeof(double))
                s.bzt = <double *> realloc(s.bzt, s.cap * sizeof(double))
                s.bhb = <double *> realloc(s.bhb, s.cap * sizeof(double))
                s.bht = <double *> realloc(s.bht, s.cap * sizeof(double))
                s.czb = <double *> realloc(s.czb, (s.cap + 1) * sizeof(double))
                s.czt = <double *> realloc(s.czt, (s.cap + 1) * sizeof(double))
            s.m = 0
            s.czb[0] = 0.0
            s.czt[0] = 0.0
            for q in range(n_marks):
                _lffp_apply(&s, half_width, mt[q], mx[q])
            _lffp_query(&s, half_width, t_eval, x0, &z, &dl, &dr)
            out_z.append(z)
            out_l.append(dl)
            out_r.append(dr)
        return out_z, out_l, out_r
    finally:
        free(mt)
        free(mx)
        free(s.bx)
        free(s.bzb)
        free(s.bzt)
        free(s.bhb)
        free(s.bht)
        free(s.czb)
        free(s.czt)
