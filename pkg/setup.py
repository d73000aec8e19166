import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "zeus_ode._kernels._gmm_cy",
                ["src/zeus_ode/_kernels/_gmm_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython: install pure-Python only; the kernel package falls back at import.
    ext_modules = []

setup(ext_modules=ext_modules)
