from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension("epslab._jets", ["src/epslab/_jets.pyx"]),
    Extension("epslab._ddcore", ["src/epslab/_ddcore.pyx"]),
]

if cythonize is not None:
    ext_modules = cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
else:
    # Pure-Python fallbacks ship with the package; the wheel still works.
    ext_modules = []

setup(ext_modules=ext_modules)
