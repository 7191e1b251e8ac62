from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the compiled kernel must produce bit-identical doubles to
# the pure-Python fallback, so FMA contraction of a*b+c is disabled.
extensions = [
    Extension(
        "surrmeta._kernel",
        ["src/surrmeta/_kernel.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
