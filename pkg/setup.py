"""Build script: compiles the optional dilogarithm extension.

The package works without the extension (a pure-Python kernel with the
same algorithm is selected at import time), so a failed compile only
costs speed. Set KNOTPOT_SKIP_EXT=1 to skip the build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("KNOTPOT_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/knotpot/_dilog_core.pyx"],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
