from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fallback kernel is used
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("lapsm._ckernel", ["src/lapsm/_ckernel.pyx"], optional=True)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
