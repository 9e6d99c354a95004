"""Build script: compiles the optional speedup extension.

The package is fully functional without it (the numpy fallback kernels
are selected at import time), so any failure here degrades to a
pure-Python install instead of aborting.  Set SULFSIM_NO_EXT=1 to skip
the extension build outright.

No -march=native and no fast-math: kernel results must not depend on
the build host, and -ffp-contract=off keeps the C arithmetic aligned
with the numpy fallback's operation order.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SULFSIM_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "sulfsim._speedups",
                    ["src/sulfsim/_speedups.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
