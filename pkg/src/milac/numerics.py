"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Column vectors
are ``(n, 1)`` arrays; 1-D inputs are promoted to columns.
"""

import warnings

import numpy as np
from scipy import linalg

__all__ = [
    "ShapeError",
    "SingularMatrixError",
    "as_matrix",
    "mat_mul",
    "solve_linear",
    "inverse",
    "relative_residual",
    "PIVOT_RTOL",
]

#: A pivot smaller than this fraction of its column's largest entry is singular.
PIVOT_RTOL = 1e-12


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix is singular to working precision.

    Attributes
    ----------
    index : int or None
        Zero-based column of the failing pivot in the LU factorization.
    label : str or None
        Human-readable name of the matrix expression that failed.
    """

    def __init__(self, message, index=None, label=None):
        super().__init__(message)
        self.index = index
        self.label = label


def as_matrix(a, name="matrix"):
    """Return `a` as a finite 2-D complex128 array (1-D becomes a column)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise ShapeError(f"{name} must be 1-D or 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def mat_mul(a, b):
    """Matrix product ``a @ b`` with an explicit shape check."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def _lu(a, label):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{label or 'A'} must be square, got {a.shape}")
    with warnings.catch_warnings():
        # exact zero pivots are reported below with the failing index
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    col_max = np.max(np.abs(a), axis=0) if a.size else np.zeros(0)
    bad = np.flatnonzero(pivots <= PIVOT_RTOL * col_max)
    if bad.size:
        k = int(bad[0])
        what = f"{label} is" if label else "matrix is"
        raise SingularMatrixError(
            f"{what} singular to working precision (pivot {k} = {pivots[k]:.3e})",
            index=k,
            label=label,
        )
    return lu, piv


def solve_linear(a, b, label=None):
    """Solve ``a @ x = b`` by LU with partial pivoting.

    Parameters
    ----------
    a : (n, n) array_like
    b : (n, k) or (n,) array_like
    label : str, optional
        Name used in the :class:`SingularMatrixError` message.

    Raises
    ------
    ShapeError
        If `a` is not square or its row count differs from `b`.
    SingularMatrixError
        If a pivot is below ``PIVOT_RTOL`` times its column's largest entry.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"A has {a.shape[0]} rows but B has {b.shape[0]}")
    lu, piv = _lu(a, label)
    return linalg.lu_solve((lu, piv), b, check_finite=False)


def inverse(a, label=None):
    a = as_matrix(a, "A")
    return solve_linear(a, np.eye(a.shape[0], dtype=np.complex128), label=label)


def relative_residual(a, x, b):
    """``||a x - b||_F / (||a||_F ||x||_F + ||b||_F)``."""
    a, x, b = as_matrix(a), as_matrix(x), as_matrix(b)
    num = np.linalg.norm(a @ x - b)
    den = np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(b)
    return num / den if den > 0 else num
