import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "solarcap._kernels._cy",
                ["src/solarcap/_kernels/_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-python fallback in solarcap._kernels still works without the
    # compiled module.
    ext_modules = []

setup(ext_modules=ext_modules)
