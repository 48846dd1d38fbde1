"""Build script for the optional compiled kernels.

The Cython extension is optional: if it cannot be compiled the package
falls back to the pure-numpy kernels at import time.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("NLWITNESS_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "nlwitness._core",
                    ["src/nlwitness/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"warning: compiled kernels disabled ({exc})")
        ext_modules = []

setup(ext_modules=ext_modules)
