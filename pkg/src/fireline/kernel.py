"""Kernel lane selection.

The compiled extension implements the hot loops (lattice event processing,
limit-process batches); the pure-Python module is a drop-in replacement with
bit-identical outputs.  FIRELINE_PURE=1 forces the pure lane.
"""

import os

if os.environ.get("FIRELINE_PURE"):
    from . import _pykernel as impl
else:
    try:
        from . import _fastkernel as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernel as impl

COMPILED = impl.COMPILED
lattice_run = impl.lattice_run
lffp_endpoint_batch = impl.lffp_endpoint_batch
sample_marks_arrays = impl.sample_marks_arrays
