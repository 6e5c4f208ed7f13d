"""Monte Carlo estimators for the quantitative laws of both processes.

Plain binomial estimators: p_hat = successes/n, SE = sqrt(p(1-p)/n).
Every replica depends only on (master seed, replica index), so any slice of
a batch can be recomputed in isolation and sums over replicas commute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import kernel, lattice, limit, rescale, rng
from .errors import ConfigError
from .events import SeedSpec, marks_to_ignitions, sample_marks


@dataclass
class TailEstimate:
    p_hat: float
    se: float
    n: int
    successes: int
    window: Optional[Tuple[float, float]] = None
    threshold: Optional[float] = None
    flagged: bool = False  # parameters outside the regime the law is stated for

    def as_dict(self) -> dict:
        d = {"p_hat": self.p_hat, "se": self.se, "n": self.n, "successes": self.successes}
        if self.window is not None:
            d["window"] = list(self.window)
        if self.threshold is not None:
            d["B"] = self.threshold
        if self.flagged:
            d["flagged"] = True
        return d


@dataclass
class CoincidenceReport:
    half_width: float
    horizon: float
    n: int
    agreeing: int
    process: str
    lam: Optional[float] = None

    @property
    def fraction(self) -> float:
        return self.agreeing / self.n

    @property
    def se(self) -> float:
        p = self.fraction
        return math.sqrt(p * (1.0 - p) / self.n)


def _binomial(successes: int, n: int, **kw) -> TailEstimate:
    p = successes / n
    return TailEstimate(p, math.sqrt(p * (1.0 - p) / n), n, successes, **kw)


def _replica_seeds(master_seed: int, i: int) -> Tuple[SeedSpec, SeedSpec]:
    return (
        SeedSpec(master_seed, "marks").child(i),
        SeedSpec(master_seed, "growth").child(i),
    )


def lattice_final_states(
    lam: float,
    t: float,
    n_replicas: int,
    box_half_width: float,
    master_seed: int,
    replica_offset: int = 0,
):
    """Yield final RunResults of independent mark-driven lattice replicas."""
    log_inv = math.log(1.0 / lam)
    for i in range(replica_offset, replica_offset + n_replicas):
        mark_seed, growth_seed = _replica_seeds(master_seed, i)
        marks = sample_marks(t, box_half_width, mark_seed)
        config = lattice.LatticeConfig(
            lam=lam,
            half_width=box_half_width,
            raw_horizon=t * log_inv,
            growth_seed=growth_seed,
            ignitions=marks_to_ignitions(marks, lam),
        )
        yield lattice.run(config)


def origin_cluster_sizes(
    lam: float,
    t: float,
    n_replicas: int,
    box_half_width: float,
    master_seed: int,
    replica_offset: int = 0,
) -> List[int]:
    """#C(0) at rescaled time t for each replica (0 when vacant)."""
    sizes = []
    for res in lattice_final_states(lam, t, n_replicas, box_half_width, master_seed, replica_offset):
        c = res.final_cluster(0)
        sizes.append(0 if c is None else c[1] - c[0] + 1)
    return sizes


def cluster_window_probs(
    lam: float,
    t: float,
    windows: Sequence[Tuple[float, float]],
    n_replicas: int,
    box_half_width: float,
    master_seed: int,
    replica_offset: int = 0,
) -> List[TailEstimate]:
    """P(#C(0) in [lambda^-a, lambda^-b]) for several windows on one batch."""
    for a, b in windows:
        if not 0.0 <= a < b < 1.0:
            raise ConfigError(f"need 0 <= a < b < 1, got ({a}, {b})")
    sizes = origin_cluster_sizes(lam, t, n_replicas, box_half_width, master_seed, replica_offset)
    out = []
    for a, b in windows:
        lo, hi = lam**-a, lam**-b
        hits = sum(1 for s in sizes if lo <= s <= hi)
        out.append(_binomial(hits, n_replicas, window=(a, b), flagged=t < 2.5))
    return out


def cluster_window_prob(
    lam: float,
    t: float,
    a: float,
    b: float,
    n_replicas: int,
    box_half_width: float,
    master_seed: int,
    replica_offset: int = 0,
) -> TailEstimate:
    """P(#C(0) in [lambda^-a, lambda^-b]) at rescaled time t."""
    return cluster_window_probs(
        lam, t, [(a, b)], n_replicas, box_half_width, master_seed, replica_offset
    )[0]


def macroscopic_tail(
    lam: float,
    t: float,
    threshold: float,
    n_replicas: int,
    box_half_width: float,
    master_seed: int,
    replica_offset: int = 0,
) -> TailEstimate:
    """P(#C(0) >= B/(lambda*log(1/lambda))) at rescaled time t."""
    cut = threshold / (lam * math.log(1.0 / lam))
    hits = 0
    for res in lattice_final_states(lam, t, n_replicas, box_half_width, master_seed, replica_offset):
        c = res.final_cluster(0)
        if c is not None and (c[1] - c[0] + 1) >= cut:
            hits += 1
    return _binomial(hits, n_replicas, threshold=threshold, flagged=t < 1.5)


def vacant_probability(
    lam: float,
    t: float,
    n_replicas: int,
    box_half_width: float,
    master_seed: int,
    replica_offset: int = 0,
) -> TailEstimate:
    """P(site 0 vacant) at rescaled time t; compare against 1/log(1/lambda)."""
    hits = 0
    for res in lattice_final_states(lam, t, n_replicas, box_half_width, master_seed, replica_offset):
        if res.site_vacant(0):
            hits += 1
    return _binomial(hits, n_replicas, flagged=t < 3.0)


def _lffp_batch(
    t: float,
    n_replicas: int,
    half_width: float,
    master_seed: int,
    replica_offset: int = 0,
):
    keys = [
        SeedSpec(master_seed, "marks").child(i).key()
        for i in range(replica_offset, replica_offset + n_replicas)
    ]
    return kernel.lffp_endpoint_batch(half_width, t, keys, 0.0)


def lffp_length_tails(
    t: float,
    thresholds: Sequence[float],
    n_replicas: int,
    half_width: float,
    horizon: float,
    master_seed: int,
    replica_offset: int = 0,
) -> List[TailEstimate]:
    """P(|D_t(0)| >= B) for several B over one batch of limit replicas."""
    for threshold in thresholds:
        if half_width < threshold + 4.0:
            raise ConfigError(
                f"box too small: need A >= B + 4, got A={half_width}, B={threshold}"
            )
    if horizon < t:
        raise ConfigError(f"horizon {horizon} shorter than query time {t}")
    _, ls, rs = _lffp_batch(t, n_replicas, half_width, master_seed, replica_offset)
    lengths = [r - l for l, r in zip(ls, rs)]
    out = []
    for threshold in thresholds:
        hits = sum(1 for w in lengths if w >= threshold)
        out.append(_binomial(hits, n_replicas, threshold=threshold, flagged=t < 1.5))
    return out


def lffp_length_tail(
    t: float,
    threshold: float,
    n_replicas: int,
    half_width: float,
    horizon: float,
    master_seed: int,
    replica_offset: int = 0,
) -> TailEstimate:
    """P(|D_t(0)| >= B) over independent limit-process replicas."""
    return lffp_length_tails(
        t, [threshold], n_replicas, half_width, horizon, master_seed, replica_offset
    )[0]


@dataclass
class AtomlessReport:
    t: float
    n: int
    exact_hits: Dict[float, int]
    window_masses: List[TailEstimate]


def lffp_z_atomless(
    t: float,
    z_values: Sequence[float],
    n_replicas: int,
    half_width: float,
    master_seed: int,
    windows: Sequence[Tuple[float, float]] = ((0.1, 0.3), (0.5, 0.7)),
    replica_offset: int = 0,
) -> AtomlessReport:
    """Exact-equality counts of Z_t(0) at candidate atoms, plus window masses."""
    zs, _, _ = _lffp_batch(t, n_replicas, half_width, master_seed, replica_offset)
    exact = {z: 0 for z in z_values}
    for z in zs:
        if z in exact:
            exact[z] += 1
    masses = []
    for a, b in windows:
        hits = sum(1 for z in zs if a <= z <= b)
        masses.append(_binomial(hits, n_replicas, window=(a, b)))
    return AtomlessReport(t, n_replicas, exact, masses)


def log_tail_slope(estimates: Sequence[TailEstimate]) -> float:
    """Least-squares slope of log p_hat against the threshold B.

    Zero counts are floored at half a success (the usual continuity floor
    for log-scale tail regressions) so the fit stays defined when the far
    tail produces no hits at the given replica budget.
    """
    xs = [e.threshold for e in estimates]
    ys = [math.log(max(e.p_hat, 0.5 / e.n)) for e in estimates]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = sum((x - xbar) ** 2 for x in xs)
    return num / den


def probe_grid(half_width: float, count: int = 9) -> List[float]:
    """Evenly spaced probes spanning [-A/2, A/2]."""
    if count == 1:
        return [0.0]
    step = half_width / (count - 1)
    return [-half_width / 2.0 + k * step for k in range(count)]


def localization_coincidence(
    half_width: float,
    horizon: float,
    n_replicas: int,
    master_seed: int,
    process: str = "limit",
    lam: Optional[float] = None,
    n_probes: int = 9,
    replica_offset: int = 0,
) -> CoincidenceReport:
    """Fraction of replicas where the A-box and 2A-box runs agree on [-A/2, A/2].

    Both runs share one mark sample on the larger box (the smaller run sees
    its restriction) and, for the lattice, one family of growth clocks.
    Agreement means the probe trajectories are identical over [0, horizon].
    """
    if half_width < 2.0:
        raise ConfigError(f"the coincidence regime needs A >= 2, got {half_width}")
    if process not in ("limit", "lattice"):
        raise ConfigError(f"unknown process {process!r}")
    if process == "lattice" and lam is None:
        raise ConfigError("lattice coincidence needs lambda")
    probes = probe_grid(half_width, n_probes)
    agree = 0
    for i in range(replica_offset, replica_offset + n_replicas):
        mark_seed, growth_seed = _replica_seeds(master_seed, i)
        marks_big = sample_marks(horizon, 2.0 * half_width, mark_seed)
        marks_small = marks_big.restricted(half_width)
        if process == "limit":
            tl_small = limit.simulate(half_width, horizon, marks_small)
            tl_big = limit.simulate(2.0 * half_width, horizon, marks_big)
            grid_s = [u for u in limit.critical_times(tl_small, horizon) if u < horizon]
            grid_b = [u for u in limit.critical_times(tl_big, horizon) if u < horizon]
            ok = True
            for x0 in probes:
                p = limit.probe_path(tl_small, x0, horizon, grid_s)
                q = limit.probe_path(tl_big, x0, horizon, grid_b)
                if not rescale.paths_equal(p, q):
                    ok = False
                    break
        else:
            log_inv = math.log(1.0 / lam)
            res = []
            for hw, marks in ((half_width, marks_small), (2.0 * half_width, marks_big)):
                config = lattice.LatticeConfig(
                    lam=lam,
                    half_width=hw,
                    raw_horizon=horizon * log_inv,
                    growth_seed=growth_seed,
                    ignitions=marks_to_ignitions(marks, lam),
                )
                res.append(lattice.run(config, probes=probes))
            ok = all(
                res[0].probes[j].segments == res[1].probes[j].segments
                for j in range(len(probes))
            )
        if ok:
            agree += 1
    return CoincidenceReport(half_width, horizon, n_replicas, agree, process, lam)


def median(values: Sequence[float]) -> float:
    s = sorted(values)
    n = len(s)
    if n % 2:
        return s[n // 2]
    return 0.5 * (s[n // 2 - 1] + s[n // 2])


def bootstrap_median_se(values: Sequence[float], n_boot: int = 1000, seed: int = 0) -> float:
    """Bootstrap standard error of the median (deterministic resampling)."""
    key = rng.derive_key(seed, "bootstrap")
    n = len(values)
    meds = []
    for b in range(n_boot):
        sample = [values[rng.raw64(key, b, j) % n] for j in range(n)]
        meds.append(median(sample))
    mbar = sum(meds) / n_boot
    var = sum((m - mbar) ** 2 for m in meds) / (n_boot - 1)
    return math.sqrt(var)


def paired_bootstrap_median_decrease_se(
    first: Sequence[float],
    second: Sequence[float],
    n_boot: int = 1000,
    seed: int = 0,
) -> float:
    """Bootstrap SE of median(first) - median(second) under paired resampling.

    Replicas of the two samples share their driving randomness (index i of
    one pairs with index i of the other), so the decrease of the medians is
    resampled replica-wise.
    """
    key = rng.derive_key(seed, "bootstrap")
    n = len(first)
    diffs = []
    for b in range(n_boot):
        idx = [rng.raw64(key, b, j) % n for j in range(n)]
        diffs.append(
            median([first[i] for i in idx]) - median([second[i] for i in idx])
        )
    mbar = sum(diffs) / n_boot
    var = sum((d - mbar) ** 2 for d in diffs) / (n_boot - 1)
    return math.sqrt(var)
