"""Build the optional compiled kernels.

The extension is optional: if Cython or a C compiler is missing the package
installs in pure-Python mode and ``multifrey.kernels`` falls back at import.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("MULTIFREY_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "multifrey._kernels",
                    ["src/multifrey/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
