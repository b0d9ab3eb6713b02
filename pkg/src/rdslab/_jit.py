"""Kernel compilation plumbing.

Hot loops live in :mod:`rdslab.kernels` and are decorated with :func:`kernel`.
When numba is importable and the environment variable ``RDSLAB_NUMBA`` is not
set to a falsey value (``0``, ``false``, ``no``, ``off``), kernels are
compiled with ``numba.njit(cache=True, nogil=True)``. Otherwise they run as
plain Python over NumPy arrays.

Kernels draw randomness exclusively from pre-generated buffers of uniform
doubles, so the two backends execute identical arithmetic and produce
bit-identical results.
"""

import os

_FALSEY = {"0", "false", "no", "off"}


def _numba_enabled() -> bool:
    flag = os.environ.get("RDSLAB_NUMBA", "").strip().lower()
    if flag in _FALSEY:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_enabled()

if NUMBA_ENABLED:
    from numba import njit

    def kernel(func):
        return njit(cache=True, nogil=True)(func)
else:

    def kernel(func):
        return func


def python_impl(compiled):
    """Return the uncompiled Python implementation behind a kernel."""
    return getattr(compiled, "py_func", compiled)
