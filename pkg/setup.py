"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python twin of every
kernel is selected at import), so a missing Cython toolchain only costs
speed, not functionality.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("cadaug._speedups", ["src/cadaug/_speedups.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
