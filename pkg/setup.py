import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

kernels = Extension(
    "citykit._kernels._core",
    ["src/citykit/_kernels/_core.pyx"],
    include_dirs=[np.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([kernels], language_level=3))
