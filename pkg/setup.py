"""Build script: compiles the optional theta-summation extension.

The package works without the extension (a numpy fallback is selected at
import time), so the build is marked optional and failures are tolerated.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cmtheta.kernels._speed",
                sources=["src/cmtheta/kernels/_speed.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    ext_modules = []

for ext in ext_modules:
    ext.optional = True

setup(ext_modules=ext_modules)
