"""Independent reference implementations used only to check the simulators.

Nothing here shares code or random streams with the package: the fine-step
simulator is a per-step Bernoulli approximation driven by numpy's generator,
and the path-distance oracle is plain dense-grid quadrature.
"""

import math

import numpy as np


def naive_cluster_sizes(n_sites, lam, horizon, dt, n_replicas, seed, center):
    """Final-time cluster size at `center` from a fine-step simulator.

    Per step of length dt: every vacant site sprouts with the exact one-step
    hazard 1-exp(-dt); every site ignites with hazard 1-exp(-lam*dt), and an
    ignition on an occupied site clears its whole run.  Vectorized across
    replicas.
    """
    gen = np.random.default_rng(seed)
    steps = int(round(horizon / dt))
    p_grow = 1.0 - math.exp(-dt)
    p_ign = 1.0 - math.exp(-lam * dt)
    occ = np.zeros((n_replicas, n_sites), dtype=bool)
    row_idx = np.arange(n_replicas)
    for _ in range(steps):
        occ |= gen.random((n_replicas, n_sites)) < p_grow
        ign = (gen.random((n_replicas, n_sites)) < p_ign) & occ
        rows = np.nonzero(ign.any(axis=1))[0]
        if rows.size:
            sub_occ = occ[rows]
            cid = np.cumsum(~sub_occ, axis=1)
            marked = np.zeros((rows.size, n_sites + 1), dtype=bool)
            rr, cc = np.nonzero(ign[rows])
            marked[rr, cid[rr, cc]] = True
            burned = sub_occ & marked[np.arange(rows.size)[:, None], cid]
            occ[rows] = sub_occ & ~burned
    cid = np.cumsum(~occ, axis=1)
    same = (cid == cid[:, [center]]) & occ
    sizes = same.sum(axis=1)
    sizes[~occ[:, center]] = 0
    return sizes


def naive_final_occupancies(n_sites, lam, horizon, dt, n_replicas, seed):
    """Final occupancy vectors (replicas x sites) from the fine-step simulator."""
    gen = np.random.default_rng(seed)
    steps = int(round(horizon / dt))
    p_grow = 1.0 - math.exp(-dt)
    p_ign = 1.0 - math.exp(-lam * dt)
    occ = np.zeros((n_replicas, n_sites), dtype=bool)
    for _ in range(steps):
        occ |= gen.random((n_replicas, n_sites)) < p_grow
        ign = (gen.random((n_replicas, n_sites)) < p_ign) & occ
        rows = np.nonzero(ign.any(axis=1))[0]
        if rows.size:
            sub_occ = occ[rows]
            cid = np.cumsum(~sub_occ, axis=1)
            marked = np.zeros((rows.size, n_sites + 1), dtype=bool)
            rr, cc = np.nonzero(ign[rows])
            marked[rr, cid[rr, cc]] = True
            burned = sub_occ & marked[np.arange(rows.size)[:, None], cid]
            occ[rows] = sub_occ & ~burned
    return occ


def grid_path_distance(p, q, horizon, n_grid=200001):
    """Dense-grid approximation of the exact path distance."""
    from fireline.rescale import interval_delta

    ts = np.linspace(0.0, horizon, n_grid)
    sup = 0.0
    integral = 0.0
    ip = iq = 0
    prev_t = 0.0
    for t in ts:
        while ip + 1 < len(p.z0) and p.times[ip + 1] <= t:
            ip += 1
        while iq + 1 < len(q.z0) and q.times[iq + 1] <= t:
            iq += 1
        zp = p.z0[ip] + p.slope[ip] * (t - p.times[ip])
        zq = q.z0[iq] + q.slope[iq] * (t - q.times[iq])
        sup = max(sup, abs(zp - zq))
        if t > prev_t:
            integral += interval_delta(p.d[ip], q.d[iq]) * (t - prev_t)
        prev_t = t
    return sup, integral
