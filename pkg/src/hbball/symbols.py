"""Catalog of Schur-class symbols ``b`` on the ball of C^n.

Every symbol is evaluated vectorized: ``b(Z)`` with ``Z`` of shape
``(m, n)`` returns ``m`` complex values.  Polynomial symbols also carry
their exact Taylor coefficients as a ``{multi-index: coefficient}`` dict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping

import numpy as np

from .errors import DimensionError, UnsupportedError
from .geometry import BallPoint, SphereGrid, SpherePoint, as_coords, unit_vector

__all__ = [
    "Symbol",
    "coordinate_slice",
    "affine_half",
    "monomial",
    "disc_lift",
    "theta",
    "eval_symbol",
    "sup_norm_estimate",
    "taylor_coefficients",
    "symbol_from_config",
    "poly_eval",
]

Poly = dict  # multi-index tuple -> complex


@dataclass(frozen=True, eq=False)
class Symbol:
    dimension: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    kind: str
    params: Mapping = field(default_factory=dict)
    taylor: Poly | None = None
    # analytically known boundary data; read only by tests
    known_facts: Mapping = field(default_factory=dict)

    def __call__(self, z):
        """Evaluate at a single point (returns complex) or at rows of an array."""
        if isinstance(z, (BallPoint, SpherePoint)):
            z = z.coords
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        Z = np.atleast_2d(z)
        if Z.shape[-1] != self.dimension:
            raise DimensionError(
                f"symbol lives on C^{self.dimension}, got points in C^{Z.shape[-1]}"
            )
        out = np.asarray(self.evaluator(Z), dtype=complex)
        return complex(out[0]) if single else out

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.dimension, "parameters": dict(self.params)}


# --- polynomial helpers ------------------------------------------------------

def _padd(p: Poly, q: Poly, s: complex = 1.0) -> Poly:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v != 0}


def _pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for a, u in p.items():
        for b, v in q.items():
            k = tuple(i + j for i, j in zip(a, b))
            out[k] = out.get(k, 0) + u * v
    return {k: v for k, v in out.items() if v != 0}


def _ppow(p: Poly, k: int, n: int) -> Poly:
    out = {(0,) * n: 1.0 + 0j}
    for _ in range(k):
        out = _pmul(out, p)
    return out


def _linear_form(xi0: np.ndarray) -> Poly:
    n = xi0.size
    out = {}
    for j in range(n):
        if xi0[j] != 0:
            idx = [0] * n
            idx[j] = 1
            out[tuple(idx)] = complex(np.conj(xi0[j]))
    return out


def poly_eval(coeffs: Poly, Z: np.ndarray) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    out = np.zeros(Z.shape[0], dtype=complex)
    for alpha, c in coeffs.items():
        out += c * np.prod(Z ** np.asarray(alpha), axis=1)
    return out


# --- catalog -----------------------------------------------------------------

def _pairs(v):
    return [[float(c.real), float(c.imag)] for c in v]


def _direction(xi0, n):
    if xi0 is None:
        return unit_vector(n).coords
    return SpherePoint(as_coords(xi0)).coords


def coordinate_slice(xi0=None, n: int = 1, known_facts=None) -> Symbol:
    """``b(z) = <z, xi0>``."""
    x = _direction(xi0, n)
    return Symbol(
        x.size,
        lambda Z: Z @ np.conj(x),
        "coordinateSlice",
        {"xi0": _pairs(x)},
        _linear_form(x),
        known_facts or {},
    )


def affine_half(xi0=None, n: int = 1, known_facts=None) -> Symbol:
    """``b(z) = (1 + <z, xi0>) / 2``."""
    x = _direction(xi0, n)
    taylor = _padd({(0,) * x.size: 0.5}, _linear_form(x), 0.5)
    return Symbol(
        x.size,
        lambda Z: 0.5 * (1.0 + Z @ np.conj(x)),
        "affineHalf",
        {"xi0": _pairs(x)},
        taylor,
        known_facts or {},
    )


def monomial_sup(alpha) -> float:
    """Maximum of ``|z^alpha|`` over the unit sphere."""
    alpha = np.asarray(alpha, dtype=float)
    k = alpha.sum()
    nz = alpha[alpha > 0]
    return float(np.prod((nz / k) ** (nz / 2)))


def monomial(alpha, c: complex = 1.0, known_facts=None) -> Symbol:
    """``b(z) = c z^alpha``; requires ``|c| * max_S |z^alpha| <= 1``."""
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha) or sum(alpha) == 0:
        raise ValueError("alpha must be a nonzero multi-index of nonnegative integers")
    c = complex(c)
    if c == 0:
        raise ValueError("the zero monomial is constant")
    if abs(c) * monomial_sup(alpha) > 1 + 1e-12:
        raise ValueError(
            f"|c| = {abs(c)} exceeds 1/max|z^alpha| = {1 / monomial_sup(alpha)}"
        )
    a = np.asarray(alpha)
    return Symbol(
        len(alpha),
        lambda Z: c * np.prod(Z ** a, axis=1),
        "monomial",
        {"alpha": list(alpha), "c": [c.real, c.imag]},
        {alpha: c},
        known_facts or {},
    )


def _blaschke(zeros, w):
    out = np.ones_like(w)
    for a in zeros:
        if a == 0:
            out = out * w
        else:
            out = out * (w - a) / (1.0 - np.conj(a) * w)
    return out


def disc_lift(xi0=None, zeros=(0.0,), n: int = 1, known_facts=None) -> Symbol:
    """``b(z) = B(<z, xi0>)`` for the finite Blaschke product ``B`` with ``zeros``."""
    x = _direction(xi0, n)
    zeros = tuple(complex(a) for a in zeros)
    if not zeros:
        raise ValueError("an empty Blaschke product is constant")
    if any(abs(a) >= 1 for a in zeros):
        raise ValueError("Blaschke zeros must lie in the open disc")
    taylor = None
    if all(a == 0 for a in zeros):
        taylor = _ppow(_linear_form(x), len(zeros), x.size)
    return Symbol(
        x.size,
        lambda Z: _blaschke(zeros, Z @ np.conj(x)),
        "discLift",
        {"xi0": _pairs(x), "zeros": [[a.real, a.imag] for a in zeros]},
        taylor,
        known_facts or {},
    )


def theta(xi0=None, n: int = 1, known_facts=None) -> Symbol:
    """``Theta(z) = 1 - (1 - <z, xi0>)^n``."""
    x = _direction(xi0, n)
    d = x.size
    one = {(0,) * d: 1.0 + 0j}
    taylor = _padd(one, _ppow(_padd(one, _linear_form(x), -1.0), d, d), -1.0)
    return Symbol(
        d,
        lambda Z: 1.0 - (1.0 - Z @ np.conj(x)) ** d,
        "theta",
        {"xi0": _pairs(x)},
        taylor,
        known_facts or {},
    )


# --- operations ----------------------------------------------------------------

def eval_symbol(b: Symbol, z) -> complex:
    return b(z)


def sup_norm_estimate(b: Symbol, grids, radii) -> float:
    """Largest ``|b(r xi)|`` over grid nodes and radii (a lower bound for the sup norm)."""
    radii = np.asarray(radii, dtype=float)
    if np.any((radii <= 0) | (radii >= 1)):
        raise ValueError("radii must lie in (0, 1)")
    if isinstance(grids, SphereGrid):
        grids = [grids]
    best = 0.0
    for g in grids:
        for r in radii:
            best = max(best, float(np.max(np.abs(b(r * g.nodes)))))
    return best


def taylor_coefficients(b: Symbol, max_degree: int) -> Poly:
    if b.taylor is None:
        raise UnsupportedError(f"symbol of kind {b.kind!r} is not a polynomial")
    return {a: c for a, c in b.taylor.items() if sum(a) <= max_degree}


def poly_degree(p: Poly) -> int:
    return max((sum(a) for a in p), default=0)


def all_multi_indices(n: int, max_degree: int):
    """Multi-indices of total degree ``<= max_degree``, graded then lexicographic."""
    out = []
    for d in range(max_degree + 1):
        for a in product(range(d + 1), repeat=n):
            if sum(a) == d:
                out.append(a)
    return sorted(out, key=lambda a: (sum(a), tuple(-x for x in a)))


def h2_monomial_norm_sq(alpha) -> float:
    """``||z^alpha||^2`` in ``H^2`` of the ball: ``alpha! (n-1)! / (n-1+|alpha|)!``."""
    n = len(alpha)
    num = math.prod(math.factorial(a) for a in alpha) * math.factorial(n - 1)
    return num / math.factorial(n - 1 + sum(alpha))


_FACTORIES = {
    "coordinateSlice": coordinate_slice,
    "affineHalf": affine_half,
    "monomial": monomial,
    "discLift": disc_lift,
    "theta": theta,
}


def _complex_param(v):
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    return complex(v)


def _vector_param(v, n):
    return np.array([_complex_param(t) for t in v], dtype=complex)


def symbol_from_config(spec: Mapping) -> Symbol:
    """Build a catalog symbol from ``{"kind", "n", "parameters"}``.

    Complex numbers may be given as plain reals or as ``[re, im]`` pairs.
    Directions ``xi0`` are renormalized to the sphere.
    """
    kind = spec.get("kind")
    if kind not in _FACTORIES:
        raise ValueError(f"unknown symbol kind {kind!r}; expected one of {sorted(_FACTORIES)}")
    n = int(spec.get("n", 1))
    p = dict(spec.get("parameters", {}))
    if kind == "monomial":
        alpha = p.get("alpha")
        if alpha is None or len(alpha) != n:
            raise DimensionError("monomial alpha must have length n")
        return monomial(alpha, _complex_param(p.get("c", 1.0)))
    xi0 = _vector_param(p["xi0"], n) if "xi0" in p else unit_vector(n).coords
    if xi0.size != n:
        raise DimensionError("xi0 must have length n")
    if kind == "discLift":
        zeros = [_complex_param(a) for a in p.get("zeros", [0.0])]
        return disc_lift(xi0, zeros)
    return _FACTORIES[kind](xi0)
