"""Build script for the optional compiled kernels.

The package works without the extension: lpequiv.backend falls back to the
numpy implementation when lpequiv._kernels is absent, so a failed compile
only costs speed, never correctness.
"""
import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            sys.stderr.write(
                f"warning: compiled kernels skipped ({exc}); "
                "falling back to the pure-numpy backend\n"
            )

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(
                f"warning: building {ext.name} failed ({exc}); "
                "falling back to the pure-numpy backend\n"
            )


def extensions():
    if os.environ.get("LPEQUIV_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "lpequiv._kernels",
        ["src/lpequiv/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
