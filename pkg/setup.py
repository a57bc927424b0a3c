"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed build of ``wayscout.kernels._core`` should not
block installation: set WAYSCOUT_SKIP_EXT=1 to install without it.
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("WAYSCOUT_SKIP_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "wayscout.kernels._core",
        sources=["src/wayscout/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions())
