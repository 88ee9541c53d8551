from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [
            Extension(
                "opacheck._kernel._ckernel",
                ["src/opacheck/_kernel/_ckernel.pyx"],
                language="c++",
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
)
