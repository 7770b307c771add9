from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # build without the compiled kernels
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "quasiphase._ext",
                ["src/quasiphase/_ext.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
