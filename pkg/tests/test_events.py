import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fireline.errors import ConfigError
from fireline.events import (
    MarkSet,
    SeedSpec,
    SpaceTimeMark,
    marks_to_ignitions,
    read_marks_csv,
    sample_marks,
    site_growth_times,
    write_marks_csv,
)


def test_tiny_horizon_is_empty():
    ms = sample_marks(1e-12, 5.0, SeedSpec(0, "marks"))
    assert len(ms) == 0


def test_sampling_is_deterministic():
    a = sample_marks(3.0, 5.0, SeedSpec(17, "marks"))
    b = sample_marks(3.0, 5.0, SeedSpec(17, "marks"))
    assert [(m.t, m.x) for m in a.marks] == [(m.t, m.x) for m in b.marks]


def test_marks_sorted_distinct_in_box():
    ms = sample_marks(4.0, 2.5, SeedSpec(3, "marks"))
    ts = ms.times()
    xs = ms.positions()
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert len(set(xs)) == len(xs)
    assert all(-2.5 <= x <= 2.5 for x in xs)
    assert all(0.0 < t <= 4.0 for t in ts)


def test_mean_count_matches_poisson_mean():
    # Poisson(2*A*T) = Poisson(30); Monte Carlo mean within 3 standard errors
    n = 10_000
    total = sum(len(sample_marks(3.0, 5.0, SeedSpec(i, "marks"))) for i in range(n))
    mean = total / n
    se = math.sqrt(30.0 / n)
    assert abs(mean - 30.0) < 3 * se


def test_count_distribution_chi_square():
    from scipy import stats as sps

    n = 10_000
    counts = [len(sample_marks(3.0, 5.0, SeedSpec(i, "gof"))) for i in range(n)]
    # bin the Poisson(30) support so every expected count is comfortably large
    edges = [0, 22, 25, 27, 29, 31, 33, 35, 38, 1000]
    observed = [0] * (len(edges) - 1)
    for c in counts:
        for k in range(len(edges) - 1):
            if edges[k] <= c < edges[k + 1]:
                observed[k] += 1
                break
    pois = sps.poisson(30.0)
    expected = [
        n * (pois.cdf(edges[k + 1] - 1) - pois.cdf(edges[k] - 1))
        for k in range(len(edges) - 1)
    ]
    chi2 = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    p = sps.chi2.sf(chi2, len(observed) - 1)
    assert p > 0.01


def test_invalid_box_rejected():
    with pytest.raises(ConfigError):
        sample_marks(0.0, 5.0, SeedSpec(0, "marks"))
    with pytest.raises(ConfigError):
        sample_marks(3.0, -1.0, SeedSpec(0, "marks"))


def test_ignition_mapping_examples():
    empty = MarkSet(1.0, 1.0, [])
    assert len(marks_to_ignitions(empty, 0.5)) == 0

    lam = math.exp(-1.0)  # log(1/lam) == 1
    ms = MarkSet(3.0, 5.0, [SpaceTimeMark(2.0, 0.5)])
    sched = marks_to_ignitions(ms, lam)
    assert sched.events == [(2.0, int(math.floor(0.5 / lam)))]
    assert sched.events[0][1] == 1

    ms = MarkSet(3.0, 5.0, [SpaceTimeMark(1.0, 0.0)])
    sched = marks_to_ignitions(ms, 0.01)
    assert sched.events[0] == (math.log(100.0), 0)


def test_ignition_mapping_rejects_bad_lambda():
    ms = MarkSet(1.0, 1.0, [])
    for lam in (0.0, 1.0, 1.5, -0.2):
        with pytest.raises(ConfigError):
            marks_to_ignitions(ms, lam)


def test_out_of_box_marks_dropped():
    # at lambda = e^-1, A = 1: box is [-2, 2]; a mark near the right edge
    # can map to site floor(x/0.3679) > 2 and must be dropped
    lam = math.exp(-1.0)
    ms = MarkSet(1.0, 1.0, [SpaceTimeMark(0.5, 0.99), SpaceTimeMark(0.7, -0.99)])
    sched = marks_to_ignitions(ms, lam)
    sites = [s for _, s in sched.events]
    a = int(math.floor(1.0 / lam))
    assert all(-a <= s <= a for s in sites)


@settings(max_examples=200, deadline=None)
@given(
    t=st.floats(0.001, 3.0),
    x=st.floats(-4.999, 4.999),
    lam=st.floats(1e-4, 0.9),
)
def test_mapping_consistency(t, x, lam):
    # un-mapping an ignition recovers the mark within one site width in
    # space and exactly in time
    ms = MarkSet(3.0, 5.0, [SpaceTimeMark(t, x)])
    sched = marks_to_ignitions(ms, lam)
    if not sched.events:
        return
    raw, site = sched.events[0]
    log_inv = math.log(1.0 / lam)
    assert raw / log_inv == pytest.approx(t, rel=1e-12)
    width = lam * log_inv
    assert site * width <= x + 1e-12
    assert (site + 1) * width >= x - 1e-12


def test_growth_times_structure():
    g = site_growth_times(5, 7.0, SeedSpec(2, "growth"))
    assert all(b > a for a, b in zip(g, g[1:]))
    assert all(0.0 < t <= 7.0 for t in g)
    assert g == site_growth_times(5, 7.0, SeedSpec(2, "growth"))


def test_growth_mean_count():
    n = 10_000
    total = 0
    for i in range(n):
        total += len(site_growth_times(i % 100 - 50, 10.0, SeedSpec(i // 100, "growth")))
    mean = total / n
    se = math.sqrt(10.0 / n)
    assert abs(mean - 10.0) < 3 * se


def test_sites_have_independent_streams():
    a = site_growth_times(1, 5.0, SeedSpec(4, "growth"))
    b = site_growth_times(2, 5.0, SeedSpec(4, "growth"))
    assert a != b


def test_marks_csv_roundtrip(tmp_path):
    ms = sample_marks(2.0, 3.0, SeedSpec(8, "marks"))
    path = tmp_path / "marks.csv"
    write_marks_csv(path, ms)
    back = read_marks_csv(path, 2.0, 3.0)
    assert [(m.t, m.x) for m in back.marks] == [(m.t, m.x) for m in ms.marks]


def test_restriction_keeps_inner_marks():
    ms = sample_marks(2.0, 4.0, SeedSpec(11, "marks"))
    inner = ms.restricted(2.0)
    assert all(abs(m.x) <= 2.0 for m in inner.marks)
    assert [(m.t, m.x) for m in inner.marks] == [
        (m.t, m.x) for m in ms.marks if abs(m.x) <= 2.0
    ]
