"""Builds the optional compiled kernels; the package works without them."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CONTOUR_SMC_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(["src/contour_smc/_kernels.pyx"],
                                compiler_directives={"language_level": 3})

setup(ext_modules=ext_modules)
