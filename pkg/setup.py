import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the NumPy
# implementations in rlar._core_py when the extension is absent.
# Set RLAR_NO_EXT=1 to skip building it.
ext_modules = []
if not os.environ.get("RLAR_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "rlar._core",
                    ["src/rlar/_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
