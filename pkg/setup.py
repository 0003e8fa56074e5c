"""Build script for the optional compiled simulation kernel.

The package works without the extension (a pure-numpy engine is selected at
import time); set ALOHA_AOI_SKIP_EXT=1 to skip compilation entirely.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("ALOHA_AOI_SKIP_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/aloha_aoi/sim/_engine_cy.pyx"],
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.include_dirs.append(np.get_include())
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
