"""Build script: compiles the optional Cython kernel extension.

Set CLUSTERGT_NO_EXT=1 to skip compilation; the package then runs on the
pure-Python kernel twins.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CLUSTERGT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "clustergt._kernels._fast",
                    ["src/clustergt/_kernels/_fast.pyx"],
                    extra_compile_args=["-O2"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
