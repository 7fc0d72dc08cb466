"""Build script for the optional compiled sphere-decoder kernel.

The package works without the extension (a pure NumPy fallback is
selected at import time); building it just makes Monte Carlo sweeps
several times faster.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext_modules = [
    Extension(
        "xnetsim._spherekernel",
        ["src/xnetsim/_spherekernel.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    ),
]

setup(ext_modules=cythonize(ext_modules, language_level=3))
