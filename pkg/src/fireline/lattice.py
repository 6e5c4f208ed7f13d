"""Finite-box discrete forest fire process.

Trees appear on vacant sites at rate 1, each site ignites at rate lambda,
and an ignited occupied site loses its whole connected cluster at once.
Clusters clamp at the box edges.  The event-driven run is exact: no time
discretization anywhere.
"""

from __future__ import annotations

import math
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from . import kernel, rng
from .errors import ConfigError, DomainError, InvariantError
from .events import IgnitionSchedule, SeedSpec, box_half_width_sites, site_growth_times

Cluster = Optional[Tuple[int, int]]

EMPTY_L, EMPTY_R = 1, 0  # sentinel pair used in probe CSV for "no cluster"


@dataclass
class LatticeConfig:
    """One run of the (lambda, A) process.

    Exactly one ignition source must be given: a schedule derived from
    shared space-time marks, or internal per-site rate-lambda clocks.
    """

    lam: float
    half_width: float
    raw_horizon: float
    growth_seed: SeedSpec
    ignitions: Optional[IgnitionSchedule] = None
    ignition_rate_clocks: bool = False
    ignition_seed: Optional[SeedSpec] = None
    a_lambda_override: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ConfigError(f"lambda must lie in (0,1), got {self.lam}")
        if not self.half_width > 0.0:
            raise ConfigError(f"half_width must be > 0, got {self.half_width}")
        if not self.raw_horizon > 0.0:
            raise ConfigError(f"raw_horizon must be > 0, got {self.raw_horizon}")
        if self.a_lambda < 1:
            raise ConfigError(
                f"degenerate box: floor(A/(lambda*log(1/lambda))) = {self.a_lambda}"
            )
        if (self.ignitions is None) == (not self.ignition_rate_clocks):
            raise ConfigError("exactly one of ignitions / ignition_rate_clocks required")
        if self.ignition_rate_clocks and self.ignition_seed is None:
            raise ConfigError("ignition_rate_clocks needs an ignition_seed")

    @property
    def a_lambda(self) -> int:
        if self.a_lambda_override is not None:
            return self.a_lambda_override
        return box_half_width_sites(self.lam, self.half_width)

    @property
    def site_count(self) -> int:
        return 2 * self.a_lambda + 1

    @property
    def log_inv(self) -> float:
        return math.log(1.0 / self.lam)

    def probe_site(self, x0: float) -> int:
        return int(math.floor(x0 / (self.lam * self.log_inv)))


@dataclass
class BurnEvent:
    raw_time: float
    interval: Tuple[int, int]
    trigger_site: int


@dataclass
class ProbeRecord:
    """Piecewise-constant cluster of one probed site; right-continuous."""

    probe_x: float
    site: int
    segments: List[Tuple[float, int, int]]  # (t_start, l, r); l > r means empty

    def cluster_at(self, raw_time: float) -> Cluster:
        lo, hi = 0, len(self.segments)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.segments[mid][0] <= raw_time:
                lo = mid + 1
            else:
                hi = mid
        _, l, r = self.segments[lo - 1]
        return None if l > r else (l, r)


@dataclass
class Snapshot:
    raw_time: float
    occupied_runs: List[Tuple[int, int]]


@dataclass
class RunResult:
    config: LatticeConfig
    burns: List[BurnEvent]
    probes: List[ProbeRecord]
    snapshots: List[Snapshot]
    occupancy: bytes  # final, index 0 = site -a_lambda
    vacant_count: int
    growth_generated: int
    growth_applied: int
    ignitions_consumed: int

    def final_cluster(self, site: int = 0) -> Cluster:
        a = self.config.a_lambda
        idx = site + a
        if not 0 <= idx < len(self.occupancy):
            raise DomainError(f"site {site} outside box [-{a}, {a}]")
        if not self.occupancy[idx]:
            return None
        pos = self.occupancy.rfind(0, 0, idx)
        l = pos + 1
        pos = self.occupancy.find(0, idx + 1)
        r = (pos - 1) if pos >= 0 else (len(self.occupancy) - 1)
        return (l - a, r - a)

    def vacant_density(self) -> float:
        return self.vacant_count / len(self.occupancy)

    def site_vacant(self, site: int = 0) -> bool:
        return not self.occupancy[site + self.config.a_lambda]


class LatticeState:
    """Explicit small-box state: sorted vacant set over [-a_lambda, a_lambda].

    This is the reference structure used by unit tests and the --verify
    runner; the production event loop lives in the kernel and is checked
    against it.
    """

    def __init__(self, a_lambda: int):
        if a_lambda < 0:
            raise ConfigError("a_lambda must be >= 0")
        self.a_lambda = a_lambda
        self.raw_time = 0.0
        self.vacant: List[int] = list(range(-a_lambda, a_lambda + 1))

    @property
    def site_count(self) -> int:
        return 2 * self.a_lambda + 1

    def _check_site(self, i: int) -> None:
        if not -self.a_lambda <= i <= self.a_lambda:
            raise DomainError(f"site {i} outside box [-{self.a_lambda}, {self.a_lambda}]")

    def is_vacant(self, i: int) -> bool:
        self._check_site(i)
        pos = bisect_left(self.vacant, i)
        return pos < len(self.vacant) and self.vacant[pos] == i

    def cluster_of(self, i: int) -> Cluster:
        """Maximal occupied run containing i, clamped at the box; None if vacant."""
        self._check_site(i)
        pos = bisect_left(self.vacant, i)
        if pos < len(self.vacant) and self.vacant[pos] == i:
            return None
        l = self.vacant[pos - 1] + 1 if pos > 0 else -self.a_lambda
        r = self.vacant[pos] - 1 if pos < len(self.vacant) else self.a_lambda
        return (l, r)

    def apply_growth(self, raw_time: float, i: int) -> None:
        self._check_site(i)
        if raw_time < self.raw_time:
            raise DomainError("events must be applied in time order")
        self.raw_time = raw_time
        pos = bisect_left(self.vacant, i)
        if pos < len(self.vacant) and self.vacant[pos] == i:
            del self.vacant[pos]

    def apply_ignition(self, raw_time: float, i: int) -> Optional[BurnEvent]:
        self._check_site(i)
        if raw_time < self.raw_time:
            raise DomainError("events must be applied in time order")
        self.raw_time = raw_time
        cluster = self.cluster_of(i)
        if cluster is None:
            return None
        l, r = cluster
        pos = bisect_left(self.vacant, l)
        self.vacant[pos:pos] = range(l, r + 1)
        return BurnEvent(raw_time, (l, r), i)

    def vacant_density(self) -> float:
        return len(self.vacant) / self.site_count

    def occupancy_vector(self) -> List[int]:
        occ = [1] * self.site_count
        for v in self.vacant:
            occ[v + self.a_lambda] = 0
        return occ


def _ignition_arrays(config: LatticeConfig):
    if config.ignition_rate_clocks:
        return [], [], config.lam, config.ignition_seed.key()
    times = [t for t, _ in config.ignitions.events]
    sites = [s for _, s in config.ignitions.events]
    return times, sites, 0.0, 0


def run(
    config: LatticeConfig,
    probes: Sequence[float] = (),
    snapshot_times: Sequence[float] = (),
) -> RunResult:
    """Exact event-driven simulation to config.raw_horizon.

    Probes are rescaled positions in (-A, A); snapshot times are raw times.
    Deterministic function of the config seeds.
    """
    a = config.a_lambda
    probe_sites = []
    for x0 in probes:
        if not -config.half_width < x0 < config.half_width:
            raise ConfigError(f"probe {x0} outside (-A, A)")
        s = config.probe_site(x0)
        if not -a <= s <= a:
            raise ConfigError(f"probe {x0} maps to site {s} outside the box")
        probe_sites.append(s)
    snap = sorted(snapshot_times)
    ign_times, ign_sites, ign_rate, ign_key = _ignition_arrays(config)
    raw = kernel.lattice_run(
        a,
        config.raw_horizon,
        config.growth_seed.key(),
        ign_times,
        ign_sites,
        ign_rate,
        ign_key,
        probe_sites,
        snap,
        True,
    )
    burn_t, burn_l, burn_r, burn_trig = raw["burns"]
    burns = [
        BurnEvent(burn_t[i], (burn_l[i], burn_r[i]), burn_trig[i])
        for i in range(len(burn_t))
    ]
    probe_records = []
    for j, x0 in enumerate(probes):
        st, sl, sr = raw["probes"][j]
        probe_records.append(
            ProbeRecord(x0, probe_sites[j], list(zip(st, sl, sr)))
        )
    snapshots = [
        Snapshot(t, list(zip(rl, rr))) for t, rl, rr in raw["snapshots"]
    ]
    return RunResult(
        config,
        burns,
        probe_records,
        snapshots,
        raw["occupancy"],
        raw["vacant"],
        raw["growth_generated"],
        raw["growth_applied"],
        raw["ignitions_consumed"],
    )


def run_verified(
    config: LatticeConfig,
    probes: Sequence[float] = (),
    snapshot_times: Sequence[float] = (),
) -> RunResult:
    """Kernel run cross-checked event-by-event against LatticeState.

    Regenerates the merged event stream in (time, site, growth-first) order,
    replays it on the explicit sorted-vacant-set state with invariant scans,
    and requires the kernel to agree on the final occupancy and burn log.
    Intended for small boxes (--verify flag).
    """
    result = run(config, probes, snapshot_times)
    a = config.a_lambda
    if config.site_count > 4097:
        raise ConfigError("run_verified is for small boxes (<= 4097 sites)")
    events = []  # (raw_time, site, kind) with kind 0 growth / 1 ignition
    for site in range(-a, a + 1):
        for t in site_growth_times(site, config.raw_horizon, config.growth_seed):
            events.append((t, site, 0))
    if config.ignition_rate_clocks:
        key = config.ignition_seed.key()
        for site in range(-a, a + 1):
            t = 0.0
            k = 0
            while True:
                t += rng.exp_gap(key, site, k) / config.lam
                if t > config.raw_horizon:
                    break
                events.append((t, site, 1))
                k += 1
    else:
        for t, site in config.ignitions.events:
            if t <= config.raw_horizon:
                events.append((t, site, 1))
    events.sort()
    state = LatticeState(a)
    burns = []
    for t, site, kind in events:
        if kind == 0:
            state.apply_growth(t, site)
        else:
            pre_vacant = set(state.vacant)
            ev = state.apply_ignition(t, site)
            if ev is not None:
                burns.append(ev)
                l, r = ev.interval
                for s in range(l, r + 1):
                    if s in pre_vacant or not state.is_vacant(s):
                        raise InvariantError("burned interval was not a maximal occupied run")
                if l - 1 >= -a and l - 1 not in pre_vacant:
                    raise InvariantError("burned cluster not maximal on the left")
                if r + 1 <= a and r + 1 not in pre_vacant:
                    raise InvariantError("burned cluster not maximal on the right")
        if sorted(set(state.vacant)) != state.vacant:
            raise InvariantError("vacant set not strictly sorted")
        if state.vacant and (state.vacant[0] < -a or state.vacant[-1] > a):
            raise InvariantError("vacant set escaped the box")
    occ = bytes(state.occupancy_vector())
    if occ != result.occupancy:
        raise InvariantError("kernel and reference disagree on final occupancy")
    kernel_burns = [(b.raw_time, b.interval, b.trigger_site) for b in result.burns]
    ref_burns = [(b.raw_time, b.interval, b.trigger_site) for b in burns]
    if kernel_burns != ref_burns:
        raise InvariantError("kernel and reference disagree on the burn log")
    return result


def write_burns_csv(path, burns: Sequence[BurnEvent]) -> None:
    with open(path, "w") as fh:
        fh.write("raw_time,l,r,trigger\n")
        for b in burns:
            fh.write(f"{b.raw_time:.17g},{b.interval[0]},{b.interval[1]},{b.trigger_site}\n")


def write_probes_csv(path, records: Sequence[ProbeRecord], horizon: float) -> None:
    with open(path, "w") as fh:
        fh.write("probe_x,site,t_start,t_end,l,r\n")
        for rec in records:
            segs = rec.segments
            for i, (t0, l, r) in enumerate(segs):
                t1 = segs[i + 1][0] if i + 1 < len(segs) else horizon
                fh.write(f"{rec.probe_x:.17g},{rec.site},{t0:.17g},{t1:.17g},{l},{r}\n")


def write_snapshots(path, snapshots: Sequence[Snapshot]) -> None:
    with open(path, "w") as fh:
        for snap in snapshots:
            runs = ",".join(f"{l}-{r}" for l, r in snap.occupied_runs)
            fh.write(f"{snap.raw_time:.17g};{runs}\n")
