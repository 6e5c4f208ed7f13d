"""Rescaling maps, the interval/path distances, and coupled runs.

The lattice process is compared against the limit process on the same
driving marks: time is divided by log(1/lambda), space multiplied by
lambda*log(1/lambda), and the cluster-size coordinate is
log(1 + #C)/log(1/lambda).  The path distance is
sup_t |z_P - z_Q| + integral of the interval distance between the cluster
paths; both paths are piecewise simple, so the evaluation is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import lattice, limit
from .errors import ConfigError, DomainError
from .events import MarkSet, SeedSpec, marks_to_ignitions, sample_marks

Interval = Optional[Tuple[float, float]]


def rescale_cluster(cluster: Optional[Tuple[int, int]], lam: float) -> Interval:
    """Site interval -> real interval via multiplication by lambda*log(1/lambda)."""
    if not 0.0 < lam < 1.0:
        raise ConfigError(f"lambda must lie in (0,1), got {lam}")
    if cluster is None:
        return None
    scale = lam * math.log(1.0 / lam)
    return (cluster[0] * scale, cluster[1] * scale)


def rescale_size_exponent(cluster: Optional[Tuple[int, int]], lam: float) -> float:
    """Degree of smallness log(1 + #C)/log(1/lambda); 0 for the empty cluster."""
    if not 0.0 < lam < 1.0:
        raise ConfigError(f"lambda must lie in (0,1), got {lam}")
    if cluster is None:
        return 0.0
    n = cluster[1] - cluster[0] + 1
    return math.log(1.0 + n) / math.log(1.0 / lam)


def interval_delta(i: Interval, j: Interval) -> float:
    """|a-c| + |b-d| between intervals; an empty side contributes the other's length."""
    if i is None and j is None:
        return 0.0
    if i is None:
        return j[1] - j[0]
    if j is None:
        return i[1] - i[0]
    return abs(i[0] - j[0]) + abs(i[1] - j[1])


def path_distance(p: limit.PiecewisePath, q: limit.PiecewisePath, horizon: float) -> float:
    sup, integral = path_distance_parts(p, q, horizon)
    return sup + integral


def path_distance_parts(
    p: limit.PiecewisePath, q: limit.PiecewisePath, horizon: float
) -> Tuple[float, float]:
    """(sup |z_p - z_q|, integral of interval_delta(D_p, D_q)) over [0, horizon].

    Merges the two breakpoint grids; on each merged segment the z-difference
    is affine (sup attained at an endpoint) and the clusters are constant
    (the integrand is constant).
    """
    if p.times[-1] != horizon or q.times[-1] != horizon:
        raise DomainError("paths must cover exactly [0, horizon]")
    grid = sorted(set(p.times) | set(q.times))
    sup = 0.0
    integral = 0.0
    ip = iq = 0
    for k in range(len(grid) - 1):
        u, v = grid[k], grid[k + 1]
        while ip + 1 < len(p.z0) and p.times[ip + 1] <= u:
            ip += 1
        while iq + 1 < len(q.z0) and q.times[iq + 1] <= u:
            iq += 1
        zp_u = p.z0[ip] + p.slope[ip] * (u - p.times[ip])
        zq_u = q.z0[iq] + q.slope[iq] * (u - q.times[iq])
        zp_v = p.z0[ip] + p.slope[ip] * (v - p.times[ip])
        zq_v = q.z0[iq] + q.slope[iq] * (v - q.times[iq])
        sup = max(sup, abs(zp_u - zq_u), abs(zp_v - zq_v))
        integral += interval_delta(p.d[ip], q.d[iq]) * (v - u)
    return sup, integral


def paths_equal(p: limit.PiecewisePath, q: limit.PiecewisePath) -> bool:
    """Exact equality of two piecewise paths over their common horizon.

    Both paths have all their z-slope changes and cluster changes at their
    own knots, so checking the right-continuous values at the union of knots
    is checking the whole function.
    """
    if p.times[-1] != q.times[-1]:
        return False
    grid = sorted(set(p.times[:-1]) | set(q.times[:-1]))
    ip = iq = 0
    for u in grid:
        while ip + 1 < len(p.z0) and p.times[ip + 1] <= u:
            ip += 1
        while iq + 1 < len(q.z0) and q.times[iq + 1] <= u:
            iq += 1
        if p.d[ip] != q.d[iq]:
            return False
        zp = p.z0[ip] + p.slope[ip] * (u - p.times[ip])
        zq = q.z0[iq] + q.slope[iq] * (u - q.times[iq])
        if zp != zq:
            return False
    return True


def lattice_probe_path(
    record: lattice.ProbeRecord,
    lam: float,
    horizon_rescaled: float,
    raw_time_map: Optional[dict] = None,
) -> limit.PiecewisePath:
    """Rescaled piecewise-constant path of one lattice probe.

    raw_time_map sends exact ignition raw times back to the exact mark times
    that produced them; without it, dividing by log(1/lambda) can land a
    burn knot one ulp away from the limit path's knot at the same mark, and
    the sup term of the path distance then sees a full-height spike on the
    ulp-wide sliver.
    """
    log_inv = math.log(1.0 / lam)
    times: List[float] = []
    z0: List[float] = []
    slope: List[float] = []
    d: List[Interval] = []
    for t_raw, l, r in record.segments:
        t = raw_time_map.get(t_raw) if raw_time_map else None
        if t is None:
            t = t_raw / log_inv
        if t >= horizon_rescaled:
            break
        cluster = None if l > r else (l, r)
        times.append(t)
        z0.append(rescale_size_exponent(cluster, lam))
        slope.append(0.0)
        d.append(rescale_cluster(cluster, lam))
    times.append(horizon_rescaled)
    return limit.PiecewisePath(times, z0, slope, d)


@dataclass
class ProbeComparison:
    probe: float
    delta_t: float
    sup_z: float
    int_d: float


@dataclass
class CoupledRun:
    """One shared-marks run of the lattice and limit processes."""

    lam: float
    half_width: float
    horizon: float
    mark_seed: SeedSpec
    growth_seed: SeedSpec
    probes: List[ProbeComparison]
    mark_count: int

    def delta_for(self, x0: float) -> float:
        for pc in self.probes:
            if pc.probe == x0:
                return pc.delta_t
        raise KeyError(x0)


def coupled_run(
    lam: float,
    half_width: float,
    horizon: float,
    mark_seed: SeedSpec,
    growth_seed: SeedSpec,
    probes: Sequence[float],
    marks: Optional[MarkSet] = None,
) -> CoupledRun:
    """Drive both processes with one mark set and measure the path distance.

    The limit process consumes the marks directly; the lattice consumes
    their image under the ignition mapping plus per-site growth clocks, and
    its probe paths are pulled back to rescaled coordinates before the
    distance is evaluated.
    """
    if marks is None:
        marks = sample_marks(horizon, half_width, mark_seed)
    timeline = limit.simulate(half_width, horizon, marks)
    schedule = marks_to_ignitions(marks, lam)
    log_inv = math.log(1.0 / lam)
    raw_time_map = {m.t * log_inv: m.t for m in marks.marks}
    config = lattice.LatticeConfig(
        lam=lam,
        half_width=half_width,
        raw_horizon=horizon * log_inv,
        growth_seed=growth_seed,
        ignitions=schedule,
    )
    result = lattice.run(config, probes=probes)
    comparisons = []
    grid = [u for u in limit.critical_times(timeline, horizon) if u < horizon]
    for j, x0 in enumerate(probes):
        lim_path = limit.probe_path(timeline, x0, horizon, grid)
        lat_path = lattice_probe_path(result.probes[j], lam, horizon, raw_time_map)
        sup, integral = path_distance_parts(lat_path, lim_path, horizon)
        comparisons.append(ProbeComparison(x0, sup + integral, sup, integral))
    return CoupledRun(
        lam, half_width, horizon, mark_seed, growth_seed, comparisons, len(marks)
    )
