"""Dense active-set non-negative least squares (Lawson-Hanson)."""

from __future__ import annotations

import numpy as np

from .errors import SolverError

__all__ = ["nnls"]


def _ls(A, b):
    return np.linalg.lstsq(A, b, rcond=None)[0]


def nnls(A, b, max_iter=None, tol=None):
    """Solve ``argmin_x ||A x - b||_2`` subject to ``x >= 0``.

    Parameters
    ----------
    A : (m, k) ndarray
    b : (m,) ndarray
    max_iter : int, optional
        Cap on outer plus inner iterations; defaults to ``10 * k``.
    tol : float, optional
        Dual-feasibility tolerance; defaults to ``1e-10 * ||A^T b||_inf``.

    Returns
    -------
    x : ndarray
    rnorm : float
        ``||A x - b||_2``.

    Raises
    ------
    SolverError
        When the iteration cap is reached; ``exc.best`` holds the iterate.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise ValueError(f"incompatible shapes {A.shape} and {b.shape}")
    m, k = A.shape
    max_iter = 10 * k if max_iter is None else max_iter
    if tol is None:
        tol = 1e-10 * max(np.max(np.abs(A.T @ b)), np.finfo(float).tiny)

    x = np.zeros(k)
    passive = np.zeros(k, dtype=bool)
    # columns whose entry was refused by rounding; cleared once x moves
    blocked = np.zeros(k, dtype=bool)
    w = A.T @ (b - A @ x)
    it = 0
    while True:
        free = ~passive & ~blocked & (w > tol)
        if not free.any():
            break
        if it >= max_iter:
            raise SolverError(f"NNLS hit the iteration cap of {max_iter}", x)
        j = np.argmax(np.where(free, w, -np.inf))
        passive[j] = True
        first = True
        while True:
            it += 1
            idx = np.nonzero(passive)[0]
            s = np.zeros(k)
            s[idx] = _ls(A[:, idx], b)
            if first and s[j] <= 0:
                passive[j] = False
                blocked[j] = True
                break
            first = False
            blocked[:] = False
            if np.all(s[idx] > 0):
                x = s
                break
            if it >= max_iter:
                raise SolverError(f"NNLS hit the iteration cap of {max_iter}", x)
            neg = idx[s[idx] <= 0]
            alpha = np.min(x[neg] / (x[neg] - s[neg]))
            x = x + alpha * (s - x)
            x[np.abs(x) < 1e-300] = 0.0
            passive &= x > 0
            x[~passive] = 0.0
            if not passive.any():
                break
        w = A.T @ (b - A @ x)
    return x, float(np.linalg.norm(A @ x - b))
