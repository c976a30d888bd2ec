# Builds the compiled simplex pivot kernel.  The package works without it
# (a pure numpy fallback is selected at import); set LAYERSCHED_PURE=1 to
# skip compilation entirely.
#
#   python setup.py build_ext --inplace

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LAYERSCHED_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "layersched._pivot_core",
                    ["src/layersched/_pivot_core.pyx"],
                    # -ffp-contract=off keeps the kernel bit-identical to the
                    # numpy fallback (no fused multiply-add in eliminations).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
