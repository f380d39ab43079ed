"""Build script. Compiles the optional native evaluation kernel when Cython is
available; set NANDSCAPE_NO_NATIVE=1 to force a pure-Python install."""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("NANDSCAPE_NO_NATIVE"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "nandscape.kernels._native",
                    ["src/nandscape/kernels/_native.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
