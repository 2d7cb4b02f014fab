"""Clark measures of Schur symbols on the ball.

The Clark measure ``mu_alpha`` of ``b`` is the positive measure on the sphere
whose invariant Poisson integral is ``(1 - |b|^2) / |alpha - b|^2``.  It is
recovered here as a discrete measure by non-negative least squares on
sampled Poisson data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, DomainError
from .geometry import SphereGrid, SpherePoint, as_coords
from .kernels import invariant_poisson, hb_kernel_matrix, poisson_matrix, szego_matrix
from .nnls import nnls
from .symbols import Symbol

__all__ = [
    "ClarkParameter",
    "DiscreteMeasure",
    "ClarkProblem",
    "ClarkSolveReport",
    "poisson_rhs",
    "poisson_transform",
    "solve_clark",
    "clark_problem",
    "clark_inner_identity_check",
    "vb_transform",
    "atom_mass_upper_bound",
    "absolute_continuity_check",
    "cap_distance",
    "default_samples",
]


@dataclass(frozen=True)
class ClarkParameter:
    alpha: complex = 1.0

    def __post_init__(self):
        a = complex(self.alpha)
        if abs(abs(a) - 1.0) > 1e-12:
            raise ValueError(f"Clark parameter must be unimodular, got |alpha| = {abs(a)}")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weights on grid nodes plus designated atoms kept off the grid."""

    support: np.ndarray  # (k, n) complex
    weights: np.ndarray  # (k,)
    atom_points: np.ndarray = None  # (a, n) complex
    atom_weights: np.ndarray = None  # (a,)

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.support, dtype=complex))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        n = S.shape[1]
        if self.atom_points is None:
            P = np.zeros((0, n), dtype=complex)
            aw = np.zeros(0)
        else:
            P = np.atleast_2d(np.asarray(self.atom_points, dtype=complex)).reshape(-1, n)
            aw = np.asarray(self.atom_weights, dtype=float).reshape(-1)
        if S.shape[0] != w.size or P.shape[0] != aw.size:
            raise DimensionError("support and weights have different lengths")
        if np.any(w < 0) or np.any(aw < 0):
            raise ValueError("measure weights must be nonnegative")
        if S.shape[0] and P.shape[0]:
            d = np.abs(1.0 - P @ np.conj(S).T)
            if np.any(d < 1e-14):
                raise ValueError("designated atoms must be distinct from the grid support")
        for name, val in (("support", S), ("weights", w), ("atom_points", P), ("atom_weights", aw)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def point_mass(cls, xi, mass: float = 1.0) -> "DiscreteMeasure":
        x = as_coords(xi)
        x = x / np.linalg.norm(x)
        return cls(np.zeros((0, x.size), dtype=complex), np.zeros(0), x[None, :], [mass])

    @property
    def n(self) -> int:
        return self.support.shape[1]

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.support, self.atom_points])

    @property
    def all_weights(self) -> np.ndarray:
        return np.concatenate([self.weights, self.atom_weights])

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum() + self.atom_weights.sum())

    def scaled(self, s: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.support, s * self.weights, self.atom_points, s * self.atom_weights)

    def cap_mass(self, center, radius: float) -> float:
        """Mass of ``{zeta : |1 - <zeta, center>|^{1/2} < radius}``."""
        c = as_coords(center)
        d = cap_distance(self.points, c)
        return float(self.all_weights[d < radius].sum())

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        head = []
        for j in range(self.n):
            head += [f"re{j + 1}", f"im{j + 1}"]
        wr.writerow(head + ["weight", "designated"])
        for pts, ws, flag in ((self.support, self.weights, 0), (self.atom_points, self.atom_weights, 1)):
            for x, w in zip(pts, ws):
                row = []
                for c in x:
                    row += [f"{c.real:.12g}", f"{c.imag:.12g}"]
                wr.writerow(row + [f"{w:.12g}", flag])
        return buf.getvalue()


def cap_distance(points, center) -> np.ndarray:
    """Boundary pseudo-metric ``|1 - <zeta, center>|^{1/2}``."""
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    return np.sqrt(np.abs(1.0 - P @ np.conj(as_coords(center))))


def _rhs(b, alpha, Z):
    bz = b(Z)
    return (1.0 - np.abs(bz) ** 2) / np.abs(alpha - bz) ** 2, bz


def poisson_rhs(b: Symbol, alpha, z) -> float:
    """``u(z) = (1 - |b|^2) / |alpha - b|^2 = Re((alpha + b) / (alpha - b))``.

    Both expressions are computed and must agree to ``1e-12`` relative.
    """
    a = alpha.alpha if isinstance(alpha, ClarkParameter) else complex(alpha)
    z = as_coords(z)
    if not np.linalg.norm(z) < 1:
        raise DomainError("poisson_rhs needs an interior point")
    bz = b(z)
    u1 = (1.0 - abs(bz) ** 2) / abs(a - bz) ** 2
    u2 = ((a + bz) / (a - bz)).real
    if abs(u1 - u2) > 1e-12 * max(abs(u1), 1.0) * 10:
        raise ArithmeticError(f"Poisson data cross-check failed: {u1!r} vs {u2!r}")
    return float(u1)


def poisson_transform(measure: DiscreteMeasure, z, n: int | None = None) -> float:
    Z = np.atleast_2d(as_coords(z))
    if measure.points.shape[0] == 0:
        return 0.0
    P = poisson_matrix(Z, measure.points)
    return float(P[0] @ measure.all_weights)


@dataclass(frozen=True)
class ClarkProblem:
    b: Symbol
    alpha: ClarkParameter
    interior_samples: np.ndarray  # (m, n)
    grid: SphereGrid
    mass_constraint: bool = True
    atom_candidates: np.ndarray = None  # (a, n)
    cap_center: np.ndarray = None
    cap_radii: tuple = (0.05, 0.1, 0.2)

    def __post_init__(self):
        Z = np.atleast_2d(np.asarray(self.interior_samples, dtype=complex))
        if Z.shape[1] != self.b.dimension or self.grid.n != self.b.dimension:
            raise DimensionError("symbol, samples and grid dimensions differ")
        if np.any(np.linalg.norm(Z, axis=1) >= 1):
            raise DomainError("interior samples must lie strictly inside the ball")
        if Z.shape[0] * 10 < len(self.grid):
            raise ValueError("need at least grid-size/10 interior samples")
        object.__setattr__(self, "interior_samples", Z)
        atoms = self.atom_candidates
        atoms = np.zeros((0, Z.shape[1]), dtype=complex) if atoms is None else np.atleast_2d(np.asarray(atoms, dtype=complex))
        atoms = atoms / np.linalg.norm(atoms, axis=1, keepdims=True) if atoms.size else atoms
        object.__setattr__(self, "atom_candidates", atoms)
        if self.cap_center is None and atoms.shape[0]:
            object.__setattr__(self, "cap_center", atoms[0])


@dataclass(frozen=True)
class ClarkSolveReport:
    measure: DiscreteMeasure
    residual_l2: float
    total_mass: float
    cap_masses: Mapping
    alpha: complex = 1.0

    def atom_masses(self):
        return [(p, float(w)) for p, w in zip(self.measure.atom_points, self.measure.atom_weights)]

    def to_dict(self):
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "totalMass": self.total_mass,
            "residualL2": self.residual_l2,
            "atoms": [
                {"point": [[c.real, c.imag] for c in p], "mass": w} for p, w in self.atom_masses()
            ],
            "capMasses": {f"{r:g}": m for r, m in self.cap_masses.items()},
        }


def default_samples(grid: SphereGrid, atom_candidates=None, shells=(0.3, 0.6, 0.85), stride: int = 2, ladder: int = 10):
    """Shells of grid-subsampled directions plus radial ladders toward candidate atoms."""
    dirs = grid.nodes[::stride]
    rows = [r * dirs for r in shells]
    if atom_candidates is not None:
        for a in np.atleast_2d(np.asarray(atom_candidates, dtype=complex)):
            a = a / np.linalg.norm(a)
            rows.append(np.outer(1.0 - 2.0 ** -np.arange(1, ladder + 1), a))
    return np.vstack(rows)


def clark_problem(b: Symbol, alpha=1.0, grid: SphereGrid = None, atom_candidates=None, mass_constraint: bool = True, **sample_kw) -> ClarkProblem:
    alpha = alpha if isinstance(alpha, ClarkParameter) else ClarkParameter(alpha)
    Z = default_samples(grid, atom_candidates, **sample_kw)
    return ClarkProblem(b, alpha, Z, grid, mass_constraint, atom_candidates)


def solve_clark(problem: ClarkProblem) -> ClarkSolveReport:
    """Discrete nonnegative measure whose Poisson integral fits the Clark data.

    Columns of the design matrix are the grid nodes followed by the
    designated atom candidates.  ``residual_l2`` is the relative residual
    ``||A x - u|| / ||u||`` on the sample rows.
    """
    b, a = problem.b, problem.alpha.alpha
    Z = problem.interior_samples
    cols = np.vstack([problem.grid.nodes, problem.atom_candidates])
    A = poisson_matrix(Z, cols)
    u, _ = _rhs(b, a, Z)
    A_fit, u_fit = A, u
    if problem.mass_constraint:
        wt = 10.0 * np.max(np.abs(A))
        u0, _ = _rhs(b, a, np.zeros((1, b.dimension)))
        A_fit = np.vstack([A, wt * np.ones((1, cols.shape[0]))])
        u_fit = np.concatenate([u, wt * u0])
    # dual tolerance from the unweighted system; the constraint row would inflate it
    tol = 1e-10 * np.max(np.abs(A.T @ u))
    x, _ = nnls(A_fit, u_fit, tol=tol)
    resid = float(np.linalg.norm(A @ x - u) / np.linalg.norm(u))
    g = len(problem.grid)
    mu = DiscreteMeasure(problem.grid.nodes, x[:g], problem.atom_candidates, x[g:])
    caps = {}
    if problem.cap_center is not None:
        caps = {float(r): mu.cap_mass(problem.cap_center, r) for r in problem.cap_radii}
    return ClarkSolveReport(mu, resid, mu.total_mass, caps, a)


def clark_inner_identity_check(b: Symbol, measure: DiscreteMeasure, z, w) -> float:
    """Relative residual of ``int K(xi,w) conj(K(xi,z)) dmu = K^b(z,w) / ((1-conj(b(w)))(1-b(z)))``."""
    z = as_coords(z)
    w = as_coords(w)
    X = measure.points
    Kw = szego_matrix(X, w[None, :])[:, 0]
    Kz = szego_matrix(X, z[None, :])[:, 0]
    lhs = complex(np.sum(measure.all_weights * Kw * np.conj(Kz)))
    bz, bw = b(z), b(w)
    kb = hb_kernel_matrix(b, z[None, :], w[None, :])[0, 0]
    rhs = kb / ((1.0 - np.conj(bw)) * (1.0 - bz))
    return abs(lhs - rhs) / (1.0 + abs(rhs))


def vb_transform(b: Symbol, measure: DiscreteMeasure, g, z) -> complex:
    """``(1 - b(z)) sum_j mu_j g(xi_j) / (1 - <z, xi_j>)^n``.

    ``g`` is either an array of values on ``measure.points`` (grid support
    followed by designated atoms) or a callable on point arrays.
    """
    X = measure.points
    vals = g(X) if callable(g) else np.asarray(g, dtype=complex).reshape(-1)
    if vals.size != X.shape[0]:
        raise DimensionError("g must be given on every support point and designated atom")
    Z = np.atleast_2d(as_coords(z))
    C = szego_matrix(Z, X)[0]
    return complex((1.0 - b(Z)[0]) * np.sum(measure.all_weights * vals * C))


def atom_mass_upper_bound(b: Symbol, alpha, xi0, r: float) -> float:
    """``u(r xi0) / P(r xi0, xi0)``, an upper bound for ``mu_alpha({xi0})``."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    x = SpherePoint(as_coords(xi0)).coords
    z = r * x
    return poisson_rhs(b, alpha, z) / invariant_poisson(z, x)


@dataclass(frozen=True)
class ACReport:
    density_values: np.ndarray
    l2_norm_in_mu: float
    comparable: bool
    singular_mass: float


def absolute_continuity_check(mu: DiscreteMeasure, nu: DiscreteMeasure, cutoff: float = 1e-12, tol: float = 1e-6) -> ACReport:
    """Discrete Radon-Nikodym density ``d nu / d mu`` on a common support.

    Points are matched across the two measures (grid nodes and designated
    atoms alike); ``nu`` mass sitting where ``mu <= cutoff`` is singular.
    """
    P, Q = mu.points, nu.points
    mw, nw = mu.all_weights, nu.all_weights
    # align nu onto mu's point list; unmatched nu points count as singular
    density = np.zeros(P.shape[0])
    singular = 0.0
    matched = np.zeros(Q.shape[0], dtype=bool)
    if P.shape[0] and Q.shape[0]:
        d = np.abs(1.0 - Q @ np.conj(P).T)
        j = np.argmin(d, axis=1)
        hit = d[np.arange(Q.shape[0]), j] < 1e-12
        for qi in np.nonzero(hit)[0]:
            pj = j[qi]
            matched[qi] = True
            if mw[pj] > cutoff:
                density[pj] += nw[qi] / mw[pj]
            else:
                singular += nw[qi]
    singular += float(nw[~matched].sum())
    l2 = float(np.sqrt(np.sum(mw * density ** 2)))
    return ACReport(density, l2, bool(singular <= tol), singular)
