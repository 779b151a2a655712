"""Build the optional Cython kernels.

The package works without them: ``exedec_lab.kernels`` falls back to the
pure-Python implementation when ``_ckernels`` cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("EXEDEC_LAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "exedec_lab._ckernels",
                    ["src/exedec_lab/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
