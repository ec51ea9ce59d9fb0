"""Build the optional compiled simulation kernel.

The package works without it; ``srbm_wedge`` falls back to the pure-Python
kernel when the extension cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SRBM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("srbm_wedge._simcore", ["src/srbm_wedge/_simcore.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
