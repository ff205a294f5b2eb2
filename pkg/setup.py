import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "l1rankone._jacobi",
                ["src/l1rankone/_jacobi.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,  # package still works on the NumPy fallback
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
