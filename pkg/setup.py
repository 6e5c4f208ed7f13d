"""Build script: compiles the event-loop kernel unless FIRELINE_NO_EXT is set.

The package works without the extension (a pure-Python kernel is selected at
import time), but the compiled kernel is what makes the large Monte Carlo
runs fit their time budgets.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FIRELINE_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "fireline._fastkernel",
                    ["src/fireline/_fastkernel.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
