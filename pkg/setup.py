import os

from setuptools import Extension, setup

# The Cython kernel is an optional speedup; the package falls back to the
# pure-Python kernel at import time when the extension is missing.
ext_modules = []
if os.environ.get("STABLECOMM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("stablecomm._kernel_cy", ["src/stablecomm/_kernel_cy.pyx"])],
            language_level=3,
        )
        for ext in ext_modules:
            ext.optional = True
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
