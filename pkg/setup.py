"""Build script: compiles the optional Cython kernel core.

The package works without the extension (a pure-NumPy fallback is selected at
import time), so any failure here degrades performance, not correctness.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "lpproj._kernels",
                sources=["src/lpproj/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
