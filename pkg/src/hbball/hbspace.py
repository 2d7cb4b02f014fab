"""Finite sections of H(b): Gram matrices, minimal-norm interpolation,
membership evidence and the sup-definition norm for polynomial data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, SingularityError, UnsupportedError
from .geometry import BallPoint, SpherePoint, as_coords
from .kernels import hb_kernel_matrix
from .symbols import (
    Symbol,
    all_multi_indices,
    h2_monomial_norm_sq,
    poly_degree,
    taylor_coefficients,
)

__all__ = [
    "PointConfiguration",
    "GramSection",
    "CandidateFunction",
    "MembershipReport",
    "MembershipSettings",
    "INFEASIBLE",
    "UNBOUNDED",
    "gram_matrix",
    "min_norm_interpolant_norm",
    "reproducing_check",
    "membership_estimate",
    "sup_def_norm_estimate",
    "hb_inner_product",
    "nested_radial_configs",
]

INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
REG_EPSILON = 1e-10


@dataclass(frozen=True)
class PointConfiguration:
    """Distinct interior points, stored as a ``(m, n)`` complex array."""

    points: np.ndarray
    separation: float = field(init=False)

    def __post_init__(self):
        P = np.atleast_2d(np.array(self.points, dtype=complex))
        if P.shape[0] == 0:
            raise ConfigurationError("empty configuration")
        if np.any(np.linalg.norm(P, axis=1) >= 1):
            raise ConfigurationError("configuration points must lie inside the ball")
        if P.shape[0] > 1:
            d = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
            d[np.diag_indices_from(d)] = np.inf
            sep = float(d.min())
        else:
            sep = np.inf
        if not sep > 0:
            raise ConfigurationError("configuration has coincident points")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "separation", sep)

    def __len__(self):
        return self.points.shape[0]

    @classmethod
    def of(cls, pts) -> "PointConfiguration":
        return cls(np.array([as_coords(p) for p in pts]))

    def union(self, other) -> "PointConfiguration":
        extra = np.atleast_2d(np.asarray(other.points if isinstance(other, PointConfiguration) else other))
        return PointConfiguration(np.vstack([self.points, extra]))


@dataclass(frozen=True)
class GramSection:
    config: PointConfiguration
    matrix: np.ndarray
    reg_epsilon: float = REG_EPSILON

    def eigvalsh(self):
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class CandidateFunction:
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def __call__(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        return np.asarray(self.evaluator(Z), dtype=complex)


@dataclass(frozen=True)
class MembershipReport:
    config_sizes: list
    norm_estimates: list
    verdict: str
    bound_value: float
    label: str = ""

    def to_dict(self):
        return {
            "label": self.label,
            "configSizes": list(self.config_sizes),
            "normEstimates": list(self.norm_estimates),
            "verdict": self.verdict,
            "boundValue": self.bound_value,
        }


@dataclass(frozen=True)
class MembershipSettings:
    """Verdict heuristics for :func:`membership_estimate`."""

    plateau: float = 0.05
    slope: float = 0.25
    reg_epsilon: float = REG_EPSILON
    infeasible_tol: float = 1e-6


def gram_matrix(b: Symbol, config: PointConfiguration, reg_epsilon: float = REG_EPSILON) -> GramSection:
    if config.points.shape[1] != b.dimension:
        raise DimensionError("configuration and symbol dimensions differ")
    try:
        G = hb_kernel_matrix(b, config.points, config.points)
    except SingularityError as exc:
        raise ConfigurationError(f"singular kernel pairing in configuration: {exc}") from exc
    G = 0.5 * (G + G.conj().T)
    return GramSection(config, G, reg_epsilon)


def _spectral(gram: GramSection):
    lam, U = np.linalg.eigh(gram.matrix)
    lam_max = max(float(lam[-1]), 0.0)
    keep = lam > gram.reg_epsilon * lam_max if lam_max > 0 else np.zeros_like(lam, dtype=bool)
    return lam, U, keep


def min_norm_interpolant_norm(gram: GramSection, values, infeasible_tol: float = 1e-6):
    """Squared norm ``v* pinv(G) v`` of the minimal interpolant, or :data:`INFEASIBLE`.

    The pseudo-inverse discards eigenvalues below ``reg_epsilon * lambda_max``.
    ``v`` is infeasible when its component outside the retained eigenspace
    exceeds ``infeasible_tol * ||v||``.
    """
    v = np.asarray(values, dtype=complex).reshape(-1)
    if v.size != len(gram.config):
        raise DimensionError("values must match the configuration size")
    vn = np.linalg.norm(v)
    if vn == 0:
        return 0.0
    lam, U, keep = _spectral(gram)
    coef = U.conj().T @ v
    outside = np.linalg.norm(coef[~keep])
    if outside > infeasible_tol * vn:
        return INFEASIBLE
    return float(np.sum(np.abs(coef[keep]) ** 2 / lam[keep]))


def hb_inner_product(gram: GramSection, coeffs_a, coeffs_b) -> complex:
    """``<sum a_i K_i, sum b_j K_j>_b = b* G a``."""
    a = np.asarray(coeffs_a, dtype=complex).reshape(-1)
    c = np.asarray(coeffs_b, dtype=complex).reshape(-1)
    m = len(gram.config)
    if a.size != m or c.size != m:
        raise DimensionError("coefficient vectors must match the configuration size")
    return complex(np.conj(c) @ gram.matrix @ a)


def reproducing_check(b: Symbol, config: PointConfiguration, coeffs, z) -> float:
    """Residual of ``f(z) = <f, K^b(., z)>_b`` for ``f = sum c_j K^b(., w_j)``.

    ``f(z)`` is evaluated pointwise from the kernel formula; the inner
    product is read off the Gram matrix of ``config`` augmented by ``z``.
    """
    c = np.asarray(coeffs, dtype=complex).reshape(-1)
    z = as_coords(z)
    aug = config.union(z[None, :])
    gram = gram_matrix(b, aug)
    m = len(config)
    a = np.concatenate([c, [0]])
    e = np.zeros(m + 1, dtype=complex)
    e[m] = 1
    inner = hb_inner_product(gram, a, e)
    fz = complex(np.sum(hb_kernel_matrix(b, z[None, :], config.points)[0] * c))
    return abs(fz - inner)


def nested_radial_configs(xi, levels: int, scaffold=None, start: int = 1) -> list:
    """Nested configurations: interior scaffold plus ladder ``r_k = 1 - 2^{-k}`` toward ``xi``.

    Level ``j`` holds the scaffold and rungs ``k = start, ..., start + j``.
    """
    x = as_coords(xi)
    x = x / np.linalg.norm(x)
    scaffold = default_scaffold(x.size) if scaffold is None else np.atleast_2d(scaffold)
    out = []
    rungs = []
    for k in range(start, start + levels):
        rungs.append((1.0 - 2.0 ** (-k)) * x)
        pts = np.vstack([scaffold, np.array(rungs)]) if scaffold.size else np.array(rungs)
        out.append(PointConfiguration(pts))
    return out


def default_scaffold(n: int) -> np.ndarray:
    """A fixed, well-separated set of interior points away from every axis ladder."""
    pts = []
    for r in (0.25, 0.5):
        for j in range(n):
            for ph in (1j, -1, -1j):
                v = np.zeros(n, dtype=complex)
                v[j] = r * ph
                pts.append(v)
    pts.append(np.zeros(n, dtype=complex))
    return np.array(pts)


def _verdict(estimates, sizes, settings: MembershipSettings):
    e = np.asarray(estimates, dtype=float)
    last = e[-1]
    half = e[len(e) // 2]
    if last <= half * (1.0 + settings.plateau) or last == 0:
        return "bounded"
    s = np.asarray(sizes, dtype=float)
    lo = np.nonzero(s >= s[-1] / 10.0)[0][0]
    if lo == len(s) - 1:
        lo = max(0, len(s) - 2)
    if e[lo] > 0 and s[-1] > s[lo]:
        slope = (np.log(e[-1]) - np.log(e[lo])) / (np.log(s[-1]) - np.log(s[lo]))
        if slope > settings.slope:
            return "diverging"
    return "inconclusive"


def membership_estimate(
    b: Symbol,
    f: CandidateFunction,
    configs: Sequence[PointConfiguration],
    settings: MembershipSettings | None = None,
) -> MembershipReport:
    """Evidence for ``f in H(b)`` from minimal-norm interpolation on nested sections."""
    settings = settings or MembershipSettings()
    sizes, estimates = [], []
    prev = None
    for cfg in configs:
        if prev is not None:
            if len(cfg) <= len(prev) or not np.allclose(cfg.points[: len(prev)], prev.points):
                raise ConfigurationError("configurations must be strictly nested (prefix order)")
        prev = cfg
        gram = gram_matrix(b, cfg, settings.reg_epsilon)
        est = min_norm_interpolant_norm(gram, f(cfg.points), settings.infeasible_tol)
        sizes.append(len(cfg))
        if est == INFEASIBLE:
            return MembershipReport(sizes, estimates, "diverging", float("inf"), f.label)
        estimates.append(est)
    verdict = _verdict(estimates, sizes, settings)
    return MembershipReport(sizes, estimates, verdict, float(estimates[-1]), f.label)


def _multiplication_data(b_coeffs, f_coeffs, n, degree):
    bdeg = poly_degree(b_coeffs)
    g_idx = all_multi_indices(n, degree)
    out_idx = all_multi_indices(n, degree + bdeg)
    pos = {a: i for i, a in enumerate(out_idx)}
    g_norm = np.sqrt([h2_monomial_norm_sq(a) for a in g_idx])
    o_norm = np.sqrt([h2_monomial_norm_sq(a) for a in out_idx])
    B = np.zeros((len(out_idx), len(g_idx)), dtype=complex)
    for j, a in enumerate(g_idx):
        for beta, c in b_coeffs.items():
            k = pos[tuple(x + y for x, y in zip(a, beta))]
            B[k, j] += c * o_norm[k] / g_norm[j]
    F = np.zeros(len(out_idx), dtype=complex)
    for a, c in f_coeffs.items():
        if a not in pos:
            raise ValueError(f"f has monomial {a} above degree {degree}")
        F[pos[a]] += c * o_norm[pos[a]]
    return B, F


def sup_def_norm_estimate(b: Symbol, f_coeffs: dict, degree: int, tol: float = 1e-10):
    """``sup_g ||f + b g||^2 - ||g||^2`` over polynomials ``g`` of degree ``<= degree``.

    Works in the orthonormal monomial basis of ``H^2``.  Returns
    :data:`UNBOUNDED` when ``B* f`` has a component above ``tol`` in the
    kernel of ``I - B* B``.
    """
    if b.taylor is None:
        raise UnsupportedError(f"symbol of kind {b.kind!r} is not a polynomial")
    f_coeffs = {tuple(a): complex(c) for a, c in f_coeffs.items() if c != 0}
    if not f_coeffs:
        return 0.0
    if poly_degree(f_coeffs) > degree:
        raise ValueError("degree must be at least deg f")
    bc = taylor_coefficients(b, poly_degree(b.taylor))
    B, F = _multiplication_data(bc, f_coeffs, b.dimension, degree)
    rhs = B.conj().T @ F
    M = np.eye(B.shape[1]) - B.conj().T @ B
    lam, U = np.linalg.eigh(0.5 * (M + M.conj().T))
    coef = U.conj().T @ rhs
    null = lam <= tol
    scale = max(np.linalg.norm(F), 1.0)
    if np.linalg.norm(coef[null]) > tol * scale:
        return UNBOUNDED
    return float(np.linalg.norm(F) ** 2 + np.sum(np.abs(coef[~null]) ** 2 / lam[~null]))
