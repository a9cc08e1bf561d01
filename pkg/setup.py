"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a pure-Python twin of
the kernels is selected at import time), so a failed or skipped compilation
only costs speed.
"""

import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("COVERT_FBL_SKIP_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "covertfbl._kernels_cy",
                ["src/covertfbl/_kernels_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
