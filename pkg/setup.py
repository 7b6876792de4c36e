import os

from setuptools import Extension, setup

# AAI_NO_EXT=1 skips the compiled kernel; the package then runs on the numpy fallback.
ext_modules = []
if not os.environ.get("AAI_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("aai.oracle._kernels", ["src/aai/oracle/_kernels.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
