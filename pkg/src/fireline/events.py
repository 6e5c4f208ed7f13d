"""Shared randomness: space-time fire marks and per-site growth clocks.

A single Poisson measure on [0,T] x [-A,A] drives the fires of every process
in the package, at every scale.  Growth clocks are rate-1 Poisson processes
addressed per site, so the same realization of the growth family is reused
across fire rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

from . import rng
from .errors import ConfigError

GROWTH_CHANNEL_RETRY_SHIFT = 8


@dataclass(frozen=True)
class SeedSpec:
    """Addressable stream identity: (master seed, purpose label)."""

    master_seed: int
    stream_label: str

    def key(self) -> int:
        return rng.derive_key(self.master_seed, self.stream_label)

    def child(self, index: int) -> "SeedSpec":
        """Per-replica sub-stream with the same label."""
        return SeedSpec(rng.child_key(self.key(), index), self.stream_label)


@dataclass(frozen=True)
class SpaceTimeMark:
    t: float
    x: float


@dataclass
class MarkSet:
    """Finite realization of the driving measure, sorted by time."""

    horizon: float
    half_width: float
    marks: List[SpaceTimeMark] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.marks)

    def times(self) -> List[float]:
        return [m.t for m in self.marks]

    def positions(self) -> List[float]:
        return [m.x for m in self.marks]

    def restricted(self, half_width: float) -> "MarkSet":
        """Marks falling inside the narrower box [-half_width, half_width]."""
        kept = [m for m in self.marks if abs(m.x) <= half_width]
        return MarkSet(self.horizon, half_width, kept)


@dataclass
class IgnitionSchedule:
    """Lattice fire times: (raw time, site), sorted by raw time."""

    events: List[Tuple[float, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.events)


def sample_marks(horizon: float, half_width: float, seed: SeedSpec) -> MarkSet:
    """Homogeneous rate-1 Poisson sample on [0, horizon] x [-A, A].

    Times come from cumulative exponential gaps at rate 2A, positions are
    uniform; the count is Poisson(2*A*horizon).  Exact duplicate times or
    positions (possible in floats, measure zero in law) are resampled from a
    retry channel so the output is strictly ordered with pairwise distinct
    positions.
    """
    if not horizon > 0.0:
        raise ConfigError(f"horizon must be > 0, got {horizon}")
    if not half_width > 0.0:
        raise ConfigError(f"half_width must be > 0, got {half_width}")
    key = seed.key()
    rate = 2.0 * half_width
    marks: List[SpaceTimeMark] = []
    seen_x = set()
    t = 0.0
    k = 0
    while True:
        gap = rng.exp_gap(key, rng.CH_TIME, k) / rate
        t_next = t + gap
        retry = 0
        while t_next <= t:  # addition underflow; push with a fresh gap
            retry += 1
            ch = rng.CH_TIME + (retry << GROWTH_CHANNEL_RETRY_SHIFT)
            t_next = t + rng.exp_gap(key, ch, k) / rate
        t = t_next
        if t > horizon:
            break
        x = -half_width + 2.0 * half_width * rng.unit(key, rng.CH_POS, k)
        retry = 0
        while x in seen_x:
            retry += 1
            ch = rng.CH_POS + (retry << GROWTH_CHANNEL_RETRY_SHIFT)
            x = -half_width + 2.0 * half_width * rng.unit(key, ch, k)
        seen_x.add(x)
        marks.append(SpaceTimeMark(t, x))
        k += 1
    return MarkSet(horizon, half_width, marks)


def box_half_width_sites(lam: float, half_width: float) -> int:
    """Number of sites on each side of the origin: floor(A / (lambda*log(1/lambda)))."""
    scale = lam * math.log(1.0 / lam)
    return int(math.floor(half_width / scale))


def marks_to_ignitions(marks: MarkSet, lam: float) -> IgnitionSchedule:
    """Map rescaled marks to lattice ignitions.

    A mark (t, x) ignites site floor(x / (lambda*log(1/lambda))) at raw time
    t*log(1/lambda).  Marks mapping outside the box are dropped.
    """
    if not 0.0 < lam < 1.0:
        raise ConfigError(f"lambda must lie in (0,1), got {lam}")
    log_inv = math.log(1.0 / lam)
    scale = lam * log_inv
    a_sites = box_half_width_sites(lam, marks.half_width)
    events = []
    for m in marks.marks:
        site = int(math.floor(m.x / scale))
        if -a_sites <= site <= a_sites:
            events.append((m.t * log_inv, site))
    return IgnitionSchedule(events)


def site_growth_times(site: int, horizon: float, seed: SeedSpec) -> List[float]:
    """Rate-1 Poisson arrival times on [0, horizon] for one site.

    The stream is addressed by (seed key, site, arrival index), so the same
    site always replays the same clock, independent of everything else.
    """
    if not horizon > 0.0:
        raise ConfigError(f"horizon must be > 0, got {horizon}")
    key = seed.key()
    out = []
    t = 0.0
    k = 0
    while True:
        t += rng.exp_gap(key, site, k)
        if t > horizon:
            return out
        out.append(t)
        k += 1


def write_marks_csv(path, marks: MarkSet) -> None:
    with open(path, "w") as fh:
        fh.write("t,x\n")
        for m in marks.marks:
            fh.write(f"{m.t:.17g},{m.x:.17g}\n")


def read_marks_csv(path, horizon: float, half_width: float) -> MarkSet:
    marks = []
    with open(path) as fh:
        header = fh.readline()
        if header.strip() != "t,x":
            raise ConfigError(f"{path}: expected 't,x' header, got {header.strip()!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t_s, x_s = line.split(",")
            marks.append(SpaceTimeMark(float(t_s), float(x_s)))
    return MarkSet(horizon, half_width, marks)


def write_ignitions_csv(path, schedule: IgnitionSchedule) -> None:
    with open(path, "w") as fh:
        fh.write("raw_time,site\n")
        for t, site in schedule.events:
            fh.write(f"{t:.17g},{site}\n")
