from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mcflreach.engine._saturate_cy",
                ["src/mcflreach/engine/_saturate_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The package works without the compiled kernel; the pure-Python
    # twin is selected at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
