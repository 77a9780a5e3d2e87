"""Build script for the optional compiled kernels.

The package is fully functional without them (a pure-Python twin of each
kernel is selected at import time), so extension build failures are not
fatal. Set SNIPMINER_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

EXT_FLAGS = ["-O3"]

extensions = [
    Extension(
        "snipminer._core._extract",
        ["src/snipminer/_core/_extract.pyx"],
        language="c++",
        extra_compile_args=EXT_FLAGS + ["-std=c++11"],
        optional=True,
    ),
    Extension(
        "snipminer._core._rcf",
        ["src/snipminer/_core/_rcf.pyx"],
        language="c++",
        extra_compile_args=EXT_FLAGS + ["-std=c++11"],
        optional=True,
    ),
]

if os.environ.get("SNIPMINER_SKIP_EXT"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
