"""Build the compiled collision core; the package falls back to NumPy if this fails."""
import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: ship the pure-Python fallback only
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("SLABKIN_NO_EXT", "") != "1":
    ext_modules = cythonize(
        [Extension(
            "slabkin._kernels",
            ["src/slabkin/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3", "-fopenmp"],
            extra_link_args=["-fopenmp"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
