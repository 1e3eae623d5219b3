"""Dense symmetric linear algebra used by the pipeline.

The heavy lifting is delegated to LAPACK through SciPy (LU factorisation and
the symmetric eigensolver). A small cyclic Jacobi solver is included as an
independent implementation for cross-checking results on small matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceError, InputError, SingularMatrixError

SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-13
CONDITION_FLOOR = 1e-13


def symmetrize(M, check: bool = True, stage: str = "linalg") -> np.ndarray:
    """Return ``(M + M.T) / 2`` after checking that ``M`` is symmetric.

    The tolerance is relative per entry: ``|M_ij - M_ji| <= 1e-12 max(1, |M_ij|)``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}", stage=stage)
    if check:
        bound = SYMMETRY_TOL * np.maximum(1.0, np.abs(M))
        if np.any(np.abs(M - M.T) > bound):
            raise InputError("matrix is not symmetric", stage=stage)
    return (M + M.T) / 2.0


def solve_linear(M, B, stage: str = "solve") -> np.ndarray:
    """Solve ``M X = B`` by LU factorisation with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If any pivot is smaller than ``1e-13 * ||M||_inf``.
    """
    M = np.asarray(M, dtype=float)
    B = np.asarray(B, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}", stage=stage)
    if B.shape[0] != M.shape[0]:
        raise InputError("right-hand side is not conformable", stage=stage)
    if not (np.all(np.isfinite(M)) and np.all(np.isfinite(B))):
        raise InputError("linear system has non-finite entries", stage=stage)
    norm_inf = np.abs(M).sum(axis=1).max() if M.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    smallest = np.abs(np.diag(lu)).min() if M.size else 0.0
    if norm_inf == 0.0 or smallest < PIVOT_TOL * norm_inf:
        raise SingularMatrixError(
            f"matrix is singular to working precision (pivot {smallest:.3g}, "
            f"||M||_inf {norm_inf:.3g})", stage=stage)
    return scipy.linalg.lu_solve((lu, piv), B, check_finite=False)


def determinant(M) -> float:
    """Determinant from the LU factors; 0 for an exactly singular matrix."""
    M = np.asarray(M, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return float((-1.0) ** swaps * np.prod(np.diag(lu)))


@dataclass(frozen=True)
class EigenBundle:
    """Eigenpairs sorted by decreasing eigenvalue.

    Attributes
    ----------
    values : ndarray of shape (m,)
    vectors : ndarray of shape (n, m)
        Column ``j`` pairs with ``values[j]``. Each column is signed so that
        its entry of largest magnitude is positive.
    selection : str
        ``"full"`` for a complete decomposition, ``"by-magnitude"`` after
        :func:`top_by_magnitude`.
    """

    values: np.ndarray
    vectors: np.ndarray
    selection: str = "full"

    def __len__(self):
        return len(self.values)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the entry of largest absolute value is positive.

    Ties in magnitude go to the lowest row index.
    """
    vectors = np.array(vectors, dtype=float, copy=True)
    if vectors.size == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def jacobi_eigh(M, tol: float = 1e-15, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Slow (pure Python loop over index pairs) but independent of LAPACK.
    Returns ``(values, vectors)`` in no particular order.
    """
    A = symmetrize(M, check=False)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            return np.diag(A).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    # theta^2 would overflow; tan of the rotation is 1 / (2 theta)
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
    raise ConvergenceError("Jacobi sweeps did not converge",
                           estimate=float(off), stage="eigen")


def eig_symmetric(M, method: str = "lapack", stage: str = "eigen") -> EigenBundle:
    """Full eigen-decomposition of a symmetric matrix.

    Parameters
    ----------
    M : array_like
        Symmetric matrix with finite entries.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls the divide-and-conquer driver; ``"jacobi"`` uses
        :func:`jacobi_eigh`.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise InputError("matrix has non-finite entries", stage=stage)
    S = symmetrize(M, check=False, stage=stage)
    if method == "lapack":
        values, vectors = scipy.linalg.eigh(S, check_finite=False, driver="evd")
    elif method == "jacobi":
        values, vectors = jacobi_eigh(S)
    else:
        raise InputError(f"unknown eigen method {method!r}", stage=stage)
    order = np.argsort(-values, kind="stable")
    return EigenBundle(values=values[order], vectors=fix_signs(vectors[:, order]),
                       selection="full")


def top_by_magnitude(bundle: EigenBundle, m: int) -> EigenBundle:
    """Keep the ``m`` pairs of largest ``|lambda|``, sorted by decreasing value.

    Among eigenvalues of equal magnitude the larger (positive) one is kept
    first, so the choice is deterministic.
    """
    if m < 1:
        raise InputError("must keep at least one eigenpair", stage="eigen")
    if m > len(bundle):
        raise InputError(f"asked for {m} eigenpairs from a spectrum of {len(bundle)}",
                         stage="eigen")
    # values are already sorted descending, so a stable sort on -|lambda|
    # prefers the positive member of a +/- pair.
    keep = np.argsort(-np.abs(bundle.values), kind="stable")[:m]
    keep = np.sort(keep)
    return EigenBundle(values=bundle.values[keep], vectors=bundle.vectors[:, keep],
                       selection="by-magnitude")


def condition_number(M) -> float:
    """Ratio ``max|lambda| / min|lambda|`` over the spectrum of the symmetric part.

    Returns ``inf`` when the smallest magnitude is below ``1e-13`` times the
    largest, and for the zero matrix.
    """
    M = np.asarray(M, dtype=float)
    values = np.abs(scipy.linalg.eigvalsh((M + M.T) / 2.0))
    top, bottom = values.max(), values.min()
    if top == 0.0 or bottom < CONDITION_FLOOR * top:
        return float("inf")
    return float(top / bottom)


def spectral_radius(M, tol: float = 1e-6, max_iter: int = 10000, seed: int = 0,
                    stage: str = "spectral-radius") -> float:
    """Estimate ``max|lambda|`` of a symmetric matrix by power iteration.

    The estimate at each step is ``||M x||`` for the current unit vector
    ``x``. For a symmetric matrix this sequence increases towards the
    spectral radius, also when both ``+rho`` and ``-rho`` are eigenvalues.
    Convergence is declared when the remaining error, extrapolated from the
    geometric decay of successive increments, is below ``tol`` relative.

    Raises
    ------
    ConvergenceError
        If the estimate has not settled within ``max_iter`` steps. The last
        estimate is attached.
    """
    if tol <= 0:
        raise InputError("tolerance must be positive", stage=stage)
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 0 or not np.any(M):
        return 0.0
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    estimate = 0.0
    step = None
    last_rate = None
    for _ in range(max_iter):
        y = M @ x
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        delta = abs(new - estimate)
        if step is not None:
            if delta == 0.0:
                return new
            rate = delta / step if step > 0 else 1.0
            # trust the extrapolation only once the decay rate has settled
            settled = last_rate is not None and abs(rate - last_rate) <= 0.05 * rate
            if rate < 1.0 and settled:
                remaining = delta * rate / (1.0 - rate)
                if remaining <= 0.1 * tol * new:
                    return new + remaining
            last_rate = rate
        step = delta
        estimate = new
        x = y / new
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps", estimate=estimate,
        stage=stage)
