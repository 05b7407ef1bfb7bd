"""Build hook for the optional compiled kernels.

The package is fully functional without the extension (a pure-Python
backend is selected at import time); set WARPMAP_NO_NATIVE=1 to skip the
build deliberately.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("WARPMAP_NO_NATIVE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "warpmap.kernels._native",
                    ["src/warpmap/kernels/_native.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
