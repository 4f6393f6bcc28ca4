"""Build script: compiles the optional graph-kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "causalpipe.kernels._ckern",
                ["src/causalpipe/kernels/_ckern.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"warning: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
