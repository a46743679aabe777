"""Build script for the optional compiled kernels.

The package works without the extension (a pure-Python fallback with the
same call signatures is selected at import time), so a failed compile only
costs speed.  ``CONFLICTCOLOUR_NO_EXT=1`` skips the build entirely.
"""

from __future__ import annotations

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CONFLICTCOLOUR_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "conflictcolour._speedups",
                    ["src/conflictcolour/_speedups.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
