import os

import numpy as np
from setuptools import Extension, setup


def extensions():
    """Build the sampling kernel unless Cython is missing or skipped.

    The package falls back to the pure-numpy kernel at import time, so a
    missing extension is never fatal. Set D2D_UNDERLAY_SKIP_KERNEL=1 to
    install without the compiled core.
    """
    if os.environ.get("D2D_UNDERLAY_SKIP_KERNEL"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    random_lib = os.path.join(os.path.dirname(np.random.__file__), "lib")
    kernel = Extension(
        "d2d_underlay._mc_kernel",
        sources=["src/d2d_underlay/_mc_kernel.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[random_lib],
        libraries=["npyrandom", "m"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([kernel], language_level=3)


setup(ext_modules=extensions())
