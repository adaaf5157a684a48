import numpy
from setuptools import setup
from setuptools.extension import Extension

from Cython.Build import cythonize

ext_modules = cythonize(
    [
        Extension(
            "texclass._kernels._native",
            ["src/texclass/_kernels/_native.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ],
    compiler_directives={"language_level": 3},
)

setup(ext_modules=ext_modules)
