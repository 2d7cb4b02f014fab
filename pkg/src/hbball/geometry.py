"""Points, approach regions, curves and quadrature grids on the unit ball of C^n.

Throughout, ``S^n`` denotes the unit sphere of ``C^n`` (real dimension
``2n - 1``) and ``sigma`` its rotation-invariant probability measure.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "BallPoint",
    "SpherePoint",
    "ApproachRegion",
    "Curve",
    "SphereGrid",
    "CurveCheck",
    "as_coords",
    "hermitian_inner",
    "in_admissible_region",
    "restricted_curve_check",
    "radial_curve",
    "linear_tangential_curve",
    "sphere_grid",
    "unit_vector",
    "TOL_CURVE",
]

TOL_CURVE = 1e-3
_SPHERE_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=complex).reshape(-1)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BallPoint:
    """A point strictly inside the unit ball."""

    coords: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        c = _frozen(self.coords)
        if c.size < 1:
            raise DimensionError("a ball point needs at least one coordinate")
        nrm = float(np.linalg.norm(c))
        if not nrm < 1.0:
            raise DomainError(f"point of norm {nrm!r} is not inside the unit ball")
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "norm", nrm)

    @property
    def n(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class SpherePoint:
    """A point of the unit sphere; renormalized on construction."""

    coords: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coords)
        if c.size < 1:
            raise DimensionError("a sphere point needs at least one coordinate")
        nrm = np.linalg.norm(c)
        if nrm == 0 or not np.isfinite(nrm):
            raise DomainError("cannot normalize a zero or non-finite vector")
        c = c / nrm
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.size


def unit_vector(n: int, j: int = 0) -> SpherePoint:
    """Standard basis vector ``e_{j+1}`` of ``C^n``."""
    e = np.zeros(n, dtype=complex)
    e[j] = 1.0
    return SpherePoint(e)


def as_coords(p) -> np.ndarray:
    """Coordinates of a point-like object as a complex 1-D array."""
    if isinstance(p, (BallPoint, SpherePoint)):
        return p.coords
    return np.asarray(p, dtype=complex).reshape(-1)


def hermitian_inner(z, w) -> complex:
    """``<z, w> = sum_j z_j conj(w_j)``."""
    z = as_coords(z)
    w = as_coords(w)
    if z.shape != w.shape:
        raise DimensionError(f"length mismatch: {z.size} vs {w.size}")
    return complex(np.dot(z, np.conj(w)))


@dataclass(frozen=True)
class ApproachRegion:
    """Koranyi region ``{z : |1 - <z, xi>| < (aperture/2)(1 - |z|^2)}``."""

    vertex: SpherePoint
    aperture: float

    def __post_init__(self):
        if not self.aperture > 1:
            raise ValueError(f"aperture must exceed 1, got {self.aperture!r}")

    def contains(self, z) -> np.ndarray:
        """Vectorized membership test; ``z`` has shape ``(..., n)``."""
        z = np.asarray(z, dtype=complex)
        lam = z @ np.conj(self.vertex.coords)
        rhs = 0.5 * self.aperture * (1.0 - np.sum(np.abs(z) ** 2, axis=-1))
        return np.abs(1.0 - lam) < rhs


def in_admissible_region(z, region: ApproachRegion) -> bool:
    return bool(region.contains(as_coords(z)))


@dataclass(frozen=True)
class Curve:
    """A curve ``t -> Lambda(t)`` in the ball approaching ``target`` as ``t -> 1``.

    ``sampler`` maps an array of ``t`` values (shape ``(m,)``) to points
    (shape ``(m, n)``).  ``tangential_bound`` is the constant ``M`` bounding
    ``|lambda(t) - 1| / (1 - |lambda(t)|)``.
    """

    sampler: Callable[[np.ndarray], np.ndarray]
    target: SpherePoint
    tangential_bound: float = 2.0

    def sample(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        pts = np.asarray(self.sampler(ts), dtype=complex).reshape(ts.size, -1)
        return pts


def radial_curve(xi: SpherePoint, tangential_bound: float = 1.0) -> Curve:
    x = xi.coords
    return Curve(lambda t: np.outer(t, x), xi, tangential_bound)


def linear_tangential_curve(xi: SpherePoint, direction, tangential_bound: float = 2.0) -> Curve:
    """``Lambda(t) = t xi + (1 - t) v`` with ``v`` a fixed vector."""
    x = xi.coords
    v = as_coords(direction)
    return Curve(lambda t: np.outer(t, x) + np.outer(1.0 - t, v), xi, tangential_bound)


@dataclass(frozen=True)
class CurveCheck:
    special_limit: float
    tangential_sup: float
    is_restricted: bool


def restricted_curve_check(curve: Curve, ts, tol: float = TOL_CURVE) -> CurveCheck:
    """Test the two restricted-approach conditions along sampled ``ts``.

    The orthogonal condition, ``|Lambda - lambda xi|^2 / (1 - |lambda|^2) -> 0``, is
    estimated by its maximum over the last decade of samples (those with
    ``1 - t <= 10 (1 - t_last)``).  The nontangential condition uses
    ``|lambda - 1| / (1 - |lambda|)`` over all samples.
    """
    ts = np.asarray(ts, dtype=float)
    if ts.size == 0:
        raise ValueError("ts must be non-empty")
    if np.any(np.diff(ts) <= 0) or ts[-1] >= 1:
        raise ValueError("ts must be strictly increasing with sup < 1")
    pts = curve.sample(ts)
    norms = np.linalg.norm(pts, axis=1)
    bad = np.nonzero(norms > 1.0 + 1e-12)[0]
    if bad.size:
        raise DomainError(f"curve leaves the closed ball at t={ts[bad[0]]!r}")
    xi = curve.target.coords
    lam = pts @ np.conj(xi)
    ortho = pts - np.outer(lam, xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        special = np.sum(np.abs(ortho) ** 2, axis=1) / (1.0 - np.abs(lam) ** 2)
        tangential = np.abs(lam - 1.0) / (1.0 - np.abs(lam))
    tail = (1.0 - ts) <= 10.0 * (1.0 - ts[-1])
    special_limit = float(np.max(special[tail]))
    tangential_sup = float(np.max(tangential))
    ok = special_limit <= tol and tangential_sup <= curve.tangential_bound
    return CurveCheck(special_limit, tangential_sup, bool(ok))


@dataclass(frozen=True)
class SphereGrid:
    """Monte Carlo quadrature rule for ``sigma`` on the sphere of ``C^n``."""

    nodes: np.ndarray  # (count, n) complex
    weights: np.ndarray  # (count,)
    seed: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0):
            raise ValueError("quadrature weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")

    @property
    def n(self) -> int:
        return self.nodes.shape[1]

    def __len__(self):
        return self.nodes.shape[0]

    def points(self) -> list[SpherePoint]:
        return [SpherePoint(x) for x in self.nodes]

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# seed={self.seed}\n")
        writer = csv.writer(buf, lineterminator="\n")
        header = []
        for j in range(self.n):
            header += [f"re{j + 1}", f"im{j + 1}"]
        writer.writerow(header + ["weight"])
        for x, w in zip(self.nodes, self.weights):
            row = []
            for c in x:
                row += [f"{c.real:.17g}", f"{c.imag:.17g}"]
            writer.writerow(row + [f"{w:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SphereGrid":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# seed="):
            raise ValueError("missing seed header line")
        seed = int(lines[0].split("=", 1)[1])
        rows = list(csv.reader(lines[1:]))
        body = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        if body.size == 0:
            raise ValueError("grid has no nodes")
        nodes = body[:, 0:-1:2] + 1j * body[:, 1:-1:2]
        return cls(nodes, body[:, -1], seed)


def sphere_grid(n: int, count: int, seed: int) -> SphereGrid:
    """I.i.d. uniform nodes on the sphere of ``C^n`` with equal weights."""
    if n < 1 or count < 1:
        raise ValueError("n and count must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return SphereGrid(g, np.full(count, 1.0 / count), seed)
