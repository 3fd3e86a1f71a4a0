"""Build shim for the optional compiled simulation kernel.

The package is pure Python except for ``stackgame._simcore``, a Cython
translation of the Euler path loop.  If Cython or a C compiler is missing
the extension is skipped and the package falls back to the vectorized
NumPy kernel at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "stackgame._simcore",
                ["src/stackgame/_simcore.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
