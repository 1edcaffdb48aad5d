import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "irsdfrc._kernels._gridcore",
                ["src/irsdfrc/_kernels/_gridcore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython available: the package still works through the pure backend.
    ext_modules = []

setup(ext_modules=ext_modules)
