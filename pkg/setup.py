"""Build glue for the optional compiled kernels.

The package works without the extension (a pure-Python twin of every
kernel ships in milpeval._kernels_py); compilation failures therefore
degrade to a source-only install instead of aborting.
"""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    try:
        from Cython.Build import cythonize
        import numpy
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "milpeval._kernels",
        sources=["src/milpeval/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # Kernel results must match the pure-Python twin bit for bit, so
        # keep the compiler from contracting float expressions.
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level=3)


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels skipped ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: building {ext.name} failed ({exc})", file=sys.stderr)


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
