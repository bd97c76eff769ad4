"""Build script: compiles the optional C kernel extension.

The extension accelerates term matching and rule-support counting. If the
build fails (no compiler, no Cython), the install still succeeds and the
package falls back to the pure-Python kernels at import time.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            _warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            _warn(exc)


def _warn(exc):
    print(f"WARNING: building lexsev._ckernels failed ({exc}); "
          "the pure-Python kernels will be used instead")


ext_modules = []
if os.environ.get("LEXSEV_NO_EXTENSION") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "lexsev._ckernels",
                    ["src/lexsev/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError as exc:
        _warn(exc)

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
