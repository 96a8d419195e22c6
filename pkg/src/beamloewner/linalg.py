"""Dense linear-algebra kernels.

Thin, contract-checked wrappers around LAPACK (via numpy/scipy).  All
other numeric modules route their solves, SVDs and eigenvalue problems
through these three functions so that singularity handling is uniform.
"""

import warnings

import numpy as np
import scipy.linalg as sla

from .exceptions import SingularMatrix

# Relative pivot threshold below which a linear system is declared
# singular.  10^-14 of the largest entry is below anything meaningful in
# double precision; for the undamped beam it detects evaluation exactly
# at a resonance.
PIVOT_RTOL = 1e-14

# Condition estimate above which a generalized eigenproblem refuses the
# reduction E^{-1}A.
COND_LIMIT = 1e10


def _require_finite(name, a):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")


def _pow2_scale(maxes):
    """Exact power-of-two scale factors bringing row/column maxima to ~1."""
    scale = np.ones_like(maxes)
    nz = maxes > 0
    scale[nz] = 2.0 ** (-np.round(np.log2(maxes[nz])))
    return scale


def solve_linear(A, b):
    """Solve A x = b by LU with partial pivoting.

    The matrix is row/column equilibrated with exact power-of-two
    factors first (the interface systems of the beam mix entry scales
    over many orders of magnitude); SingularMatrix is raised when any
    pivot of the equilibrated factorization falls below PIVOT_RTOL times
    its largest entry.  Supports real and complex input; stacked
    right-hand sides are allowed in the columns of ``b``.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"b length {b.shape[0]} does not match A size {A.shape[0]}")
    _require_finite("A", A)
    _require_finite("b", b)

    absA = np.abs(A)
    row = _pow2_scale(absA.max(axis=1))
    col = _pow2_scale((absA * row[:, None]).max(axis=0))
    As = A * row[:, None] * col[None, :]

    with warnings.catch_warnings():
        # singularity is reported through the pivot check below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(As, check_finite=False)
    pivots = np.abs(np.diag(lu))
    threshold = PIVOT_RTOL * np.max(np.abs(As))
    if np.any(pivots <= threshold):
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below threshold {threshold:.3e} "
            f"(matrix size {A.shape[0]})"
        )
    bs = b * row if b.ndim == 1 else b * row[:, None]
    x = sla.lu_solve((lu, piv), bs, check_finite=False)
    return x * col if x.ndim == 1 else x * col[:, None]


def svd_thin(A):
    """Thin singular value decomposition A = U diag(sigma) V^*.

    Returns (U, sigma, V) with orthonormal columns in U and V and sigma
    sorted nonincreasing.  Works for real and complex rectangular input.
    """
    A = np.asarray(A)
    _require_finite("A", A)
    U, sigma, Vh = np.linalg.svd(A, full_matrices=False)
    return U, sigma, Vh.conj().T


def generalized_eigenvalues(A, E):
    """Eigenvalues of the pencil (A, E), i.e. roots of det(A - lambda E).

    Solved by reduction to the standard problem eig(E^{-1} A), which is
    adequate here because truncation keeps E well conditioned (order
    r <= ~40).  Raises SingularMatrix when cond(E) exceeds COND_LIMIT.
    """
    A = np.asarray(A)
    E = np.asarray(E)
    if A.shape != E.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A and E must be square of equal size, got {A.shape} and {E.shape}")
    _require_finite("A", A)
    _require_finite("E", E)

    cond = np.linalg.cond(E)
    if not np.isfinite(cond) or cond >= COND_LIMIT:
        raise SingularMatrix(f"E numerically singular (cond estimate {cond:.3e})")
    return np.linalg.eigvals(solve_linear(E, A))
