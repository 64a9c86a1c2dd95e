"""Build script: compiles the split-search core when Cython and a C compiler
are available; the package falls back to the pure-Python kernels otherwise."""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class _OptionalBuildExt(build_ext):
    """Skip the extension (with a warning) instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled core not built ({exc}); "
                  "using the pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "using the pure-Python kernels")


ext_modules = []
if os.environ.get("SABERPRO_CART_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        # No -ffast-math: the compiled kernels must be bit-identical to the
        # pure-Python ones (IEEE double arithmetic, same operation order).
        ext_modules = cythonize(
            [
                Extension(
                    "saberpro_cart._core",
                    ["src/saberpro_cart/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": _OptionalBuildExt})
