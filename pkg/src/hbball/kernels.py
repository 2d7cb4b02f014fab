"""Closed-form Szego/Cauchy, invariant Poisson and H(b) reproducing kernels.

Slot convention: ``hb_kernel(b, z, w) = (1 - conj(b(w)) b(z)) / (1 - <z, w>)^n``,
holomorphic in ``z`` and antiholomorphic in ``w``.  The matrix helpers
(``*_matrix``) take point arrays of shape ``(m, n)`` and ``(p, n)`` and
return ``(m, p)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, SingularityError
from .geometry import as_coords

__all__ = [
    "KernelValue",
    "szego",
    "invariant_poisson",
    "hb_kernel",
    "hb_kernel_norm",
    "szego_matrix",
    "poisson_matrix",
    "hb_kernel_matrix",
    "kernel_norm_sq",
    "SINGULAR_TOL",
]

SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class KernelValue:
    value: complex
    condition_hint: float


def _pairing(z, w):
    z = as_coords(z)
    w = as_coords(w)
    if z.shape != w.shape:
        raise DimensionError(f"length mismatch: {z.size} vs {w.size}")
    base = 1.0 - complex(np.dot(z, np.conj(w)))
    hint = abs(base)
    if hint < SINGULAR_TOL:
        raise SingularityError(f"|1 - <z,w>| = {hint:.3g} is below {SINGULAR_TOL}", hint)
    return z, w, base, hint


def szego(z, w, n: int | None = None) -> KernelValue:
    """``(1 - <z, w>)^{-n}``; ``w`` may lie on the sphere (Cauchy kernel)."""
    z, w, base, hint = _pairing(z, w)
    n = z.size if n is None else n
    return KernelValue(base ** (-n), hint)


def invariant_poisson(z, xi, n: int | None = None) -> float:
    """``((1 - |z|^2) / |1 - <z, xi>|^2)^n``."""
    z, xi, base, _ = _pairing(z, xi)
    n = z.size if n is None else n
    return float(((1.0 - np.vdot(z, z).real) / abs(base) ** 2) ** n)


def hb_kernel(b, z, w) -> KernelValue:
    z, w, base, hint = _pairing(z, w)
    bz = b(z)
    bw = b(w)
    return KernelValue((1.0 - np.conj(bw) * bz) * base ** (-z.size), hint)


def hb_kernel_norm(b, z) -> tuple[float, float]:
    """Squared norm ``q2 = (1 - |b(z)|^2) / (1 - |z|^2)^n`` of ``K^b(., z)`` and its root."""
    z = as_coords(z)
    r2 = float(np.vdot(z, z).real)
    if not r2 < 1:
        raise DomainError("kernel norm needs an interior point")
    q2 = (1.0 - abs(b(z)) ** 2) / (1.0 - r2) ** z.size
    return q2, float(np.sqrt(max(q2, 0.0)))


def kernel_norm_sq(b, Z) -> np.ndarray:
    """Vectorized ``q2`` over rows of ``Z``."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    r2 = np.sum(np.abs(Z) ** 2, axis=1)
    return (1.0 - np.abs(b(Z)) ** 2) / (1.0 - r2) ** Z.shape[1]


def _base_matrix(Z, W):
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    if Z.shape[1] != W.shape[1]:
        raise DimensionError("point arrays live in different dimensions")
    base = 1.0 - Z @ np.conj(W).T
    hint = np.abs(base)
    if np.any(hint < SINGULAR_TOL):
        raise SingularityError("kernel matrix touches the singular set", float(hint.min()))
    return Z, W, base


def szego_matrix(Z, W) -> np.ndarray:
    Z, W, base = _base_matrix(Z, W)
    return base ** (-Z.shape[1])


def poisson_matrix(Z, Xi) -> np.ndarray:
    """``P[k, j] = P(Z_k, Xi_j)``."""
    Z, Xi, base = _base_matrix(Z, Xi)
    r2 = np.sum(np.abs(Z) ** 2, axis=1)
    return ((1.0 - r2)[:, None] / np.abs(base) ** 2) ** Z.shape[1]


def hb_kernel_matrix(b, Z, W) -> np.ndarray:
    """``M[i, j] = K^b(Z_i, W_j)``."""
    Z, W, base = _base_matrix(Z, W)
    return (1.0 - np.outer(b(Z), np.conj(b(W)))) * base ** (-Z.shape[1])
