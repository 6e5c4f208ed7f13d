"""Limit forest fire process on a finite box [-A, A].

State between marks is fully determined: the saturation coordinate Z grows
linearly at rate 1 until it hits 1, barrier clocks H decay linearly to 0.
Both are therefore stored lazily as (base value, base time) and evaluated on
demand; the simulation advances only at marks of the driving measure.

A mark at (t, x) is *microscopic* when Z_{t-}(x) < 1: the point x becomes a
barrier with H = Z_{t-}(x), blocking cluster merging until it decays.  It is
*macroscopic* when Z_{t-}(x) = 1: the whole component [a, b] around x burns,
Z resets to 0 strictly inside, and each endpoint resets only if it was
saturated just before the mark.

The component D_t(x) is delimited by blocking coordinates: points with
Z < 1 or H > 0, clamped at the box edges.  Exact ties (H just expired, Z
just saturated) count as non-blocking, matching the half-open barrier
lifetime [t, t+z).
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import ConfigError, DomainError, DuplicateCoordinateError
from .events import MarkSet, SpaceTimeMark


@dataclass
class MarkEvent:
    t: float
    x: float
    kind: str  # "micro" | "macro"
    burned: Optional[Tuple[float, float]] = None  # [a, b] for macro
    barrier: Optional[float] = None  # H value set for micro; expiry = t + barrier


class LffpState:
    """Breakpoints (past microscopic marks) and the cells between them.

    Interior breakpoints sit at bx[0..m-1]; cell c spans the open interval
    between bx[c-1] and bx[c] with the box edges standing in at both ends.
    All z/h values are lazy (base, base_time) pairs.
    """

    __slots__ = ("half_width", "time", "bx", "bzb", "bzt", "bhb", "bht", "czb", "czt")

    def __init__(self, half_width: float):
        if not half_width > 0.0:
            raise ConfigError(f"half_width must be > 0, got {half_width}")
        self.half_width = half_width
        self.time = 0.0
        self.bx: List[float] = []
        self.bzb: List[float] = []
        self.bzt: List[float] = []
        self.bhb: List[float] = []
        self.bht: List[float] = []
        self.czb: List[float] = [0.0]
        self.czt: List[float] = [0.0]

    def copy(self) -> "LffpState":
        s = LffpState(self.half_width)
        s.time = self.time
        s.bx = self.bx[:]
        s.bzb = self.bzb[:]
        s.bzt = self.bzt[:]
        s.bhb = self.bhb[:]
        s.bht = self.bht[:]
        s.czb = self.czb[:]
        s.czt = self.czt[:]
        return s

    # -- lazy evaluation ----------------------------------------------------
    #
    # Values are reconstructed as base + elapsed; *classification* (is Z
    # saturated, is H expired) always compares t against the knot time
    # base_time + (1 - base) resp. base_time + base.  The knot times are the
    # same floats the trajectory grid is built from, so classification can
    # never disagree with the grid by a rounding ulp.

    def _z_cell(self, c: int, t: float) -> float:
        z = self.czb[c] + (t - self.czt[c])
        return 1.0 if z > 1.0 else z

    def _z_bp(self, j: int, t: float) -> float:
        z = self.bzb[j] + (t - self.bzt[j])
        return 1.0 if z > 1.0 else z

    def _h_bp(self, j: int, t: float) -> float:
        h = self.bhb[j] - (t - self.bht[j])
        return 0.0 if h < 0.0 else h

    def _zsat_cell(self, c: int) -> float:
        return self.czt[c] + (1.0 - self.czb[c])

    def _zsat_bp(self, j: int) -> float:
        return self.bzt[j] + (1.0 - self.bzb[j])

    def _hexp_bp(self, j: int) -> float:
        return self.bht[j] + self.bhb[j]

    def _cell_blocking(self, c: int, t: float) -> bool:
        return t < self._zsat_cell(c)

    def _bp_blocking(self, j: int, t: float) -> bool:
        return t < self._zsat_bp(j) or t < self._hexp_bp(j)

    def _check_domain(self, t: float, x: float) -> None:
        if t < 0.0:
            raise DomainError(f"negative time {t}")
        if not -self.half_width <= x <= self.half_width:
            raise DomainError(f"position {x} outside [-A, A]")

    def _locate(self, x: float) -> Tuple[int, bool]:
        """(index, at_breakpoint); index is the breakpoint slot or the cell."""
        i = bisect_left(self.bx, x)
        if i < len(self.bx) and self.bx[i] == x:
            return i, True
        return i, False

    # -- queries (right-continuous at event times) ---------------------------

    def z_at(self, t: float, x: float) -> float:
        self._check_domain(t, x)
        i, at_bp = self._locate(x)
        if at_bp:
            return self._z_bp(i, t)
        if abs(x) == self.half_width:
            # box edges follow the adjacent cell
            i = 0 if x < 0.0 else len(self.czb) - 1
        return self._z_cell(i, t)

    def h_at(self, t: float, x: float) -> float:
        self._check_domain(t, x)
        i, at_bp = self._locate(x)
        return self._h_bp(i, t) if at_bp else 0.0

    def growing_at(self, t: float, x: float) -> bool:
        """True while Z at x is below saturation (unit slope)."""
        i, at_bp = self._locate(x)
        if at_bp:
            return t < self._zsat_bp(i)
        if abs(x) == self.half_width:
            i = 0 if x < 0.0 else len(self.czb) - 1
        return t < self._zsat_cell(i)

    def _scan_left(self, c: int, t: float) -> Tuple[float, int]:
        """Nearest blocking coordinate at or left of cell c; (-A, -1) if none."""
        while True:
            if c == 0:
                return -self.half_width, -1
            j = c - 1
            if self._bp_blocking(j, t) or self._cell_blocking(j, t):
                return self.bx[j], j
            c = j

    def _scan_right(self, c: int, t: float) -> Tuple[float, int]:
        m = len(self.bx)
        while True:
            if c == m:
                return self.half_width, m
            if self._bp_blocking(c, t) or self._cell_blocking(c + 1, t):
                return self.bx[c], c
            c += 1

    def d_at(self, t: float, x: float) -> Tuple[float, float]:
        """Component [L, R] around x; degenerate [x, x] when x itself blocks."""
        self._check_domain(t, x)
        i, at_bp = self._locate(x)
        if at_bp:
            if self._bp_blocking(i, t):
                return (x, x)
            l = x if self._cell_blocking(i, t) else self._scan_left(i, t)[0]
            r = x if self._cell_blocking(i + 1, t) else self._scan_right(i + 1, t)[0]
            return (l, r)
        if abs(x) == self.half_width:
            i = 0 if x < 0.0 else len(self.czb) - 1
        if self._cell_blocking(i, t):
            return (x, x)
        l, _ = self._scan_left(i, t)
        r, _ = self._scan_right(i, t)
        return (l, r)

    # -- dynamics -------------------------------------------------------------

    def apply_mark(self, mark: SpaceTimeMark) -> MarkEvent:
        t, x = mark.t, mark.x
        if t < self.time:
            raise DomainError(f"mark at t={t} is in the past (state time {self.time})")
        if not -self.half_width < x < self.half_width:
            raise DomainError(f"mark position {x} not strictly inside (-A, A)")
        i, at_bp = self._locate(x)
        if at_bp:
            raise DuplicateCoordinateError(f"mark collides with breakpoint at x={x}")
        self.time = t
        if self._cell_blocking(i, t):
            z = self.czb[i] + (t - self.czt[i])
            self.bx.insert(i, x)
            self.bzb.insert(i, self.czb[i])
            self.bzt.insert(i, self.czt[i])
            self.bhb.insert(i, z)
            self.bht.insert(i, t)
            self.czb.insert(i, self.czb[i])
            self.czt.insert(i, self.czt[i])
            return MarkEvent(t, x, "micro", barrier=z)
        a, lj = self._scan_left(i, t)
        b, rj = self._scan_right(i, t)
        for c in range(lj + 1, rj + 1):
            self.czb[c] = 0.0
            self.czt[c] = t
        for j in range(lj + 1, rj):
            self.bzb[j] = 0.0
            self.bzt[j] = t
        for j in (lj, rj):
            if 0 <= j < len(self.bx) and t >= self._zsat_bp(j):
                self.bzb[j] = 0.0
                self.bzt[j] = t
        return MarkEvent(t, x, "macro", burned=(a, b))


@dataclass
class Timeline:
    """Completed simulation: marks, event records, and per-mark state copies."""

    half_width: float
    horizon: float
    marks: MarkSet
    events: List[MarkEvent]
    states: List[LffpState]  # states[q] holds after q marks; states[0] is initial
    event_times: List[float]

    def state_at(self, t: float) -> LffpState:
        """State in force at time t (right-continuous)."""
        if t < 0.0 or t > self.horizon:
            raise DomainError(f"time {t} outside [0, {self.horizon}]")
        q = bisect_right(self.event_times, t)
        return self.states[q]


def init(half_width: float) -> LffpState:
    """Fresh state: a single cell with Z growing from 0, no barriers."""
    return LffpState(half_width)


def simulate(half_width: float, horizon: float, marks: MarkSet) -> Timeline:
    """Fold the marks in time order; exact, deterministic, replayable."""
    if not horizon > 0.0:
        raise ConfigError(f"horizon must be > 0, got {horizon}")
    state = init(half_width)
    states = [state.copy()]
    events: List[MarkEvent] = []
    event_times: List[float] = []
    for m in marks.marks:
        if m.t > horizon:
            break
        events.append(state.apply_mark(m))
        states.append(state.copy())
        event_times.append(m.t)
    return Timeline(half_width, horizon, marks, events, states, event_times)


def query_Z(timeline: Timeline, t: float, x: float) -> float:
    return timeline.state_at(t).z_at(t, x)


def query_H(timeline: Timeline, t: float, x: float) -> float:
    return timeline.state_at(t).h_at(t, x)


def query_D(timeline: Timeline, t: float, x: float) -> Tuple[float, float]:
    return timeline.state_at(t).d_at(t, x)


# ---------------------------------------------------------------------------
# trajectory extraction
# ---------------------------------------------------------------------------


@dataclass
class PiecewisePath:
    """Right-continuous path t -> (z(t), D(t)) on [0, T].

    times[0] = 0 and times[-1] = T bracket the segments; on segment k the
    z-value is z0[k] + slope[k]*(t - times[k]) and D is constant (None for
    the empty cluster, which only the lattice side produces).
    """

    times: List[float]
    z0: List[float]
    slope: List[float]
    d: List[Optional[Tuple[float, float]]]

    def segment_count(self) -> int:
        return len(self.times) - 1

    def z_value(self, t: float, left_limit: bool = False) -> float:
        k = bisect_right(self.times, t) - 1
        if left_limit and k > 0 and self.times[k] == t:
            k -= 1
        k = min(k, len(self.z0) - 1)
        return self.z0[k] + self.slope[k] * (t - self.times[k])


def critical_times(timeline: Timeline, horizon: float) -> List[float]:
    """Times where any Z saturates, any H expires, or a mark lands.

    Between consecutive critical times every blocking predicate in the state
    is constant, so D(., x) is constant there for every x.
    """
    out = set()
    n_ev = len(timeline.event_times)
    for q, state in enumerate(timeline.states):
        lo = timeline.event_times[q - 1] if q > 0 else 0.0
        hi = timeline.event_times[q] if q < n_ev else horizon
        if lo > horizon:
            break
        hi = min(hi, horizon)
        for c in range(len(state.czb)):
            ts = state.czt[c] + (1.0 - state.czb[c])
            if lo < ts <= hi:
                out.add(ts)
        for j in range(len(state.bx)):
            ts = state.bzt[j] + (1.0 - state.bzb[j])
            if lo < ts <= hi:
                out.add(ts)
            te = state.bht[j] + state.bhb[j]
            if lo < te <= hi:
                out.add(te)
    for t in timeline.event_times:
        if 0.0 < t <= horizon:
            out.add(t)
    return sorted(out)


def probe_path(
    timeline: Timeline, x0: float, horizon: float, grid: Optional[List[float]] = None
) -> PiecewisePath:
    """Exact piecewise description of t -> (Z_t(x0), D_t(x0)) on [0, horizon].

    A precomputed critical-time grid can be shared across probes of the same
    timeline.
    """
    if not -timeline.half_width < x0 < timeline.half_width:
        raise DomainError(f"probe {x0} outside (-A, A)")
    if grid is None:
        grid = [t for t in critical_times(timeline, horizon) if t < horizon]
    times = [0.0] + grid
    z0: List[float] = []
    slope: List[float] = []
    d: List[Optional[Tuple[float, float]]] = []
    for t in times:
        state = timeline.state_at(t)
        z0.append(state.z_at(t, x0))
        slope.append(1.0 if state.growing_at(t, x0) else 0.0)
        d.append(state.d_at(t, x0))
    times.append(horizon)
    return PiecewisePath(times, z0, slope, d)


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def write_timeline_csv(path, timeline: Timeline) -> None:
    """Event log `t,x,kind,a,b`; a and b are empty for microscopic marks."""
    with open(path, "w") as fh:
        fh.write("t,x,kind,a,b\n")
        for ev in timeline.events:
            if ev.kind == "macro":
                a, b = ev.burned
                fh.write(f"{ev.t:.17g},{ev.x:.17g},macro,{a:.17g},{b:.17g}\n")
            else:
                fh.write(f"{ev.t:.17g},{ev.x:.17g},micro,,\n")


def state_dump_line(state: LffpState, t: float) -> str:
    """`t;x:z:h,...;l:r:z,...` with values evaluated at time t."""
    bps = ",".join(
        f"{state.bx[j]:.17g}:{state._z_bp(j, t):.17g}:{state._h_bp(j, t):.17g}"
        for j in range(len(state.bx))
    )
    edges = [-state.half_width] + state.bx + [state.half_width]
    cells = ",".join(
        f"{edges[c]:.17g}:{edges[c + 1]:.17g}:{state._z_cell(c, t):.17g}"
        for c in range(len(state.czb))
    )
    return f"{t:.17g};{bps};{cells}"


def write_state_dump(path, timeline: Timeline, grid_times: Sequence[float]) -> None:
    """Snapshot dump at the union of event times and the supplied grid."""
    ts = sorted(set(t for t in grid_times if 0.0 <= t <= timeline.horizon)
                | set(timeline.event_times))
    with open(path, "w") as fh:
        for t in ts:
            fh.write(state_dump_line(timeline.state_at(t), t) + "\n")
