"""Build script: compiles the optional replay kernel extension.

The compiled kernel is a pure accelerator. If Cython or a C compiler is
unavailable the install still succeeds and the package falls back to the
pure-Python kernel at import time.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Skip the extension (with a warning) instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            print(f"WARNING: building the compiled kernel failed ({exc}); "
                  "falling back to the pure-Python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: {ext.name} failed to compile ({exc}); "
                  "falling back to the pure-Python kernel")


ext_modules = []
if not os.environ.get("URNDIST_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "urndist._kernel_cy",
                    ["src/urndist/_kernel_cy.pyx"],
                    # -ffp-contract=off keeps the float semantics identical to
                    # the pure-Python kernel (no FMA contraction).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        print("WARNING: Cython not available; installing pure-Python only")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
