"""Build script for the optional compiled core.

The Cython extension is skipped when Cython is unavailable; the package then
runs on its numpy fallback.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ragclust._core",
                ["src/ragclust/_core.pyx"],
                include_dirs=[np.get_include()],
                # no -ffast-math: both backends must make identical comparisons
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
