from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "creepgp._kernels_cy",
                ["src/creepgp/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # -ffast-math lets gcc use libmvec's vectorized exp/pow in
                # the elementwise loops; fine here (no NaN/Inf semantics
                # relied on inside the kernels).
                extra_compile_args=["-O3", "-march=native", "-ffast-math"],
                extra_link_args=["-lmvec", "-lm"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python install still works; the backend falls back to NumPy.
    ext_modules = []

setup(ext_modules=ext_modules)
