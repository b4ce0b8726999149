"""Optional compiled kernels; the package works without them."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("B0UNITS_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("b0units._kernels", ["src/b0units/_kernels.pyx"],
                       include_dirs=[numpy.get_include()], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
