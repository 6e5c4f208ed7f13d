"""Bit-equality between the compiled and pure kernel lanes.

The compiled lane must be a perfect stand-in: same streams, same event
order, same floating-point expression shapes.  Skipped when the extension
is not built.
"""

import pytest

from fireline import _pykernel, kernel, rng
from fireline.events import SeedSpec, marks_to_ignitions, sample_marks

fast = pytest.importorskip("fireline._fastkernel")


@pytest.mark.parametrize("seed", range(20))
def test_mark_sampling_parity(seed):
    key = rng.derive_key(seed, "marks")
    assert _pykernel.sample_marks_arrays(3.0, 5.0, key) == fast.sample_marks_arrays(
        3.0, 5.0, key
    )


@pytest.mark.parametrize("seed", range(8))
def test_lattice_parity_schedule(seed):
    ms = sample_marks(3.0, 2.0, SeedSpec(seed, "marks"))
    ign = marks_to_ignitions(ms, 0.1)
    args = (
        8,
        6.9,
        rng.derive_key(seed, "growth"),
        [t for t, _ in ign.events],
        [s for _, s in ign.events],
        0.0,
        0,
        [0, 3],
        [2.0, 5.0],
        True,
    )
    assert _pykernel.lattice_run(*args) == fast.lattice_run(*args)


@pytest.mark.parametrize("seed", range(8))
def test_lattice_parity_clocks(seed):
    args = (
        8,
        6.9,
        rng.derive_key(seed, "growth"),
        [],
        [],
        0.2,
        rng.derive_key(seed, "ignite"),
        [0],
        [1.0],
        True,
    )
    assert _pykernel.lattice_run(*args) == fast.lattice_run(*args)


def test_lffp_batch_parity():
    keys = [rng.derive_key(s, "limit") for s in range(300)]
    assert _pykernel.lffp_endpoint_batch(8.0, 3.0, keys, 0.0) == fast.lffp_endpoint_batch(
        8.0, 3.0, keys, 0.0
    )


def test_selected_lane_is_compiled_by_default(monkeypatch):
    assert kernel.COMPILED or not hasattr(kernel.impl, "__file__")


def test_public_sampler_matches_kernel_sampler():
    # events.sample_marks and the kernels' internal sampler must agree,
    # otherwise batch estimators would not be replayable mark-for-mark
    seed = SeedSpec(31, "marks")
    ms = sample_marks(2.5, 4.0, seed)
    ts, xs = kernel.sample_marks_arrays(2.5, 4.0, seed.key())
    assert ms.times() == ts
    assert ms.positions() == xs
