"""Builds the optional compiled kernels.

The package works without the extension (a pure-Python backend is selected
at import time), so a failed compile only costs speed.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "kerrpair._core._kernels",
                ["src/kerrpair/_core/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"kerrpair: skipping compiled kernels ({exc}); "
                     "falling back to the pure-Python backend\n")

setup(ext_modules=ext_modules)
