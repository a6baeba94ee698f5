"""Build script; compiles the optional Cython kernel core when available.

The package is fully functional without the extension (numpy fallback is
selected at import).  Build in place with:

    python setup.py build_ext --inplace
"""

from setuptools import setup, Extension

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        [Extension(
            "cipflow._kernels",
            ["src/cipflow/_kernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    import warnings

    warnings.warn(f"building without compiled kernels: {exc}")

setup(ext_modules=ext_modules)
