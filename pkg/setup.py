import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "otlaplace._kernels",
                ["src/otlaplace/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Cython unavailable: install pure-Python only, the package falls back
    # to otlaplace._kernels_py at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
