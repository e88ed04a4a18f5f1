"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: treegreen._kernels
falls back to numpy implementations that produce bit-identical results.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "treegreen._kernels._core_cy",
                ["src/treegreen/_kernels/_core_cy.pyx"],
                include_dirs=[numpy.get_include()],
                # No -ffast-math: the fallback and the compiled kernels must
                # agree bit for bit, so IEEE semantics are required.
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
