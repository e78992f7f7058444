"""Backend selection for the batch linear-algebra kernels.

The compiled extension ``_kernels`` is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` takes over. Setting the environment
variable ``INERTIA_BUNDLES_PURE_PYTHON=1`` forces the fallback.

All kernels take stacks of square matrices, shape ``(m, n, n)``.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("INERTIA_BUNDLES_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60


def get_backend(name=None):
    """Return the kernel module for ``name`` ("cython" or "python"), default active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def jacobi_eigh_batch(a, rel_tol=JACOBI_REL_TOL, max_sweeps=JACOBI_MAX_SWEEPS, backend=None):
    """Cyclic Jacobi eigensolver on a stack of symmetric matrices.

    Rotations visit the pairs ``(p, q)``, ``p < q``, in row order; a matrix is
    converged once its off-diagonal Frobenius norm drops below
    ``rel_tol * ||A||_F``.

    Returns
    -------
    w : ndarray, (m, n)
        Unsorted eigenvalues (the final diagonal).
    v : ndarray, (m, n, n)
        Orthogonal eigenvector matrices, ``A = V diag(w) V^T``.
    sweeps : ndarray of int, (m,)
        Sweeps used; ``-1`` where ``max_sweeps`` was exhausted.
    """
    a = np.asarray(a, dtype=np.float64)
    return get_backend(backend).jacobi_eigh_batch(a, float(rel_tol), int(max_sweeps))


def cholesky_batch(a, backend=None):
    """Lower Cholesky factors; ``info[b]`` is the failing pivot index or ``-1``."""
    return get_backend(backend).cholesky_batch(np.asarray(a, dtype=np.float64))


def tril_inv_batch(l, backend=None):
    """Inverse of a stack of nonsingular lower-triangular matrices by forward substitution."""
    return get_backend(backend).tril_inv_batch(np.asarray(l, dtype=np.float64))
