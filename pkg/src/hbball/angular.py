"""Boundary quotients, angular derivatives and the equivalence harness.

Two quotients are tracked at every boundary point ``xi``:

* ``q1 = (1 - |b(z)|) / (1 - |z|)``, the Caratheodory quotient;
* ``q2 = (1 - |b(z)|^2) / (1 - |z|^2)^n``, the squared H(b) kernel norm.

They have the same radial behaviour only when ``n = 1``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clark import ClarkParameter, clark_problem, solve_clark
from .errors import DomainError
from .geometry import ApproachRegion, Curve, SpherePoint, as_coords, restricted_curve_check, sphere_grid
from .hbspace import CandidateFunction, MembershipSettings, membership_estimate, nested_radial_configs
from .kernels import kernel_norm_sq
from .symbols import Symbol

__all__ = [
    "BoundaryQuotients",
    "ADReport",
    "EquivalenceRecord",
    "HarnessSettings",
    "boundary_quotients",
    "angular_derivative_estimate",
    "julia_inequality_check",
    "admissible_limit",
    "essential_norm_lower_bound",
    "equivalence_harness",
    "extrapolate",
    "boundary_kernel_candidate",
    "worker_count",
]


def worker_count() -> int:
    """Thread cap from ``HB_BALL_THREADS`` (default: CPU count, at most 4)."""
    env = os.environ.get("HB_BALL_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(4, os.cpu_count() or 1))


@dataclass(frozen=True)
class BoundaryQuotients:
    q1: float
    q2: float
    ad_quotient: complex | None = None


def _unit(xi):
    return SpherePoint(as_coords(xi)).coords


def _quotients(b, Z, xi, eta=None):
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    bz = b(Z)
    r = np.linalg.norm(Z, axis=1)
    q1 = (1.0 - np.abs(bz)) / (1.0 - r)
    q2 = kernel_norm_sq(b, Z)
    ad = None
    if eta is not None:
        ad = np.conj(eta) * (bz - eta) / (1.0 - Z @ np.conj(xi))
    return q1, q2, ad, bz


def boundary_quotients(b: Symbol, z, xi, eta=None) -> BoundaryQuotients:
    z = as_coords(z)
    if not np.linalg.norm(z) < 1:
        raise DomainError("boundary quotients need an interior point")
    q1, q2, ad, _ = _quotients(b, z[None, :], _unit(xi), eta)
    return BoundaryQuotients(float(q1[0]), float(q2[0]), None if ad is None else complex(ad[0]))


def extrapolate(values, growth: float = 2.0, window: int = 4) -> float:
    """Limit of a sequence sampled at ``h_k = 2^{-k}``.

    Returns ``inf`` when the tail grows monotonically by more than
    ``growth`` over the last ``window`` steps; otherwise two levels of
    Richardson extrapolation assuming an expansion in powers of ``h``.
    """
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v[-window - 1 :])):
        return float("inf")
    tail = v[-window - 1 :]
    if np.all(np.diff(tail) > 0) and tail[-1] > growth * tail[0]:
        return float("inf")
    r1 = 2.0 * v[1:] - v[:-1]
    if r1.size < 2:
        return float(r1[-1]) if r1.size else float(v[-1])
    r2 = (4.0 * r1[1:] - r1[:-1]) / 3.0
    return float(r2[-1])


@dataclass(frozen=True)
class ADReport:
    xi: np.ndarray
    c_estimate: float
    q2_limit: float
    eta_estimate: complex | None
    caratheodory: bool
    derivative_modulus: float | None
    radii: np.ndarray = field(repr=False, default=None)
    q1_values: np.ndarray = field(repr=False, default=None)
    q2_values: np.ndarray = field(repr=False, default=None)

    def to_dict(self):
        eta = self.eta_estimate
        return {
            "xi": [[c.real, c.imag] for c in self.xi],
            "cEstimate": self.c_estimate,
            "q2Limit": self.q2_limit,
            "etaEstimate": None if eta is None else [eta.real, eta.imag],
            "caratheodory": self.caratheodory,
            "derivativeModulus": self.derivative_modulus,
        }


def angular_derivative_estimate(b: Symbol, xi, K: int = 16) -> ADReport:
    """Radial-ladder estimate of the Caratheodory constant at ``xi``.

    Rungs are ``r_k = 1 - 2^{-k}`` for ``k = 1..K``; the result is a
    liminf estimate along this ladder.
    """
    if K < 8:
        raise ValueError("need at least 8 ladder rungs")
    x = _unit(xi)
    r = 1.0 - 2.0 ** -np.arange(1, K + 1)
    Z = np.outer(r, x)
    q1, q2, _, bz = _quotients(b, Z, x)
    c = extrapolate(q1)
    q2lim = extrapolate(q2)
    eta = None
    if abs(bz[-1]) > 0.999:
        eta = complex(bz[-1] / abs(bz[-1]))
    dmod = None
    if eta is not None:
        _, _, ad, _ = _quotients(b, Z, x, eta)
        dmod = extrapolate(np.abs(ad))
    cara = bool(np.isfinite(c) and eta is not None)
    return ADReport(x, c, q2lim, eta, cara, dmod, r, q1, q2)


@dataclass(frozen=True)
class JuliaCheck:
    violations: int
    worst_slack: float


def julia_inequality_check(b: Symbol, p, q: complex, alpha_j: float, samples) -> JuliaCheck:
    """Count samples violating ``|1 - conj(q) b|^2 / |1 - <z,p>|^2 <= a (1 - |b|^2) / (1 - |z|^2)``."""
    Z = np.atleast_2d(np.asarray(samples, dtype=complex))
    x = _unit(p)
    bz = b(Z)
    lhs = np.abs(1.0 - np.conj(q) * bz) ** 2 / np.abs(1.0 - Z @ np.conj(x)) ** 2
    rhs = alpha_j * (1.0 - np.abs(bz) ** 2) / (1.0 - np.sum(np.abs(Z) ** 2, axis=1))
    slack = lhs - rhs
    return JuliaCheck(int(np.sum(slack > 1e-9)), float(np.max(slack)))


@dataclass(frozen=True)
class AdmissibleLimit:
    limits_per_curve: list
    spread: float


def admissible_limit(
    b: Symbol,
    f: CandidateFunction,
    xi,
    aperture: float,
    curves: Sequence[Curve],
    ts=None,
    tail: int = 4,
) -> AdmissibleLimit:
    """Limits of ``f`` along curves inside ``Gamma(xi, aperture)``.

    A curve whose ``|f|`` grows monotonically by more than 2x over the last
    ``tail`` samples reports ``None`` (no finite limit) and makes the
    spread infinite.
    """
    x = SpherePoint(as_coords(xi))
    region = ApproachRegion(x, aperture)
    ts = 1.0 - 2.0 ** -np.arange(2, 22) if ts is None else np.asarray(ts, dtype=float)
    limits = []
    for ci, curve in enumerate(curves):
        pts = curve.sample(ts)
        inside = region.contains(pts)
        if not inside.all():
            k = int(np.argmin(inside))
            raise DomainError(f"curve {ci} leaves the approach region at t={ts[k]!r} (sample {k})")
        chk = restricted_curve_check(curve, ts)
        if not chk.is_restricted:
            raise DomainError(f"curve {ci} is not a restricted curve: {chk}")
        vals = f(pts)
        mags = np.abs(vals[-tail - 1 :])
        if np.all(np.diff(mags) > 0) and mags[-1] > 2.0 * mags[0]:
            limits.append(None)
        else:
            limits.append(complex(np.mean(vals[-tail:])))
    if any(v is None for v in limits):
        spread = float("inf")
    else:
        arr = np.array(limits)
        spread = float(np.max(np.abs(arr[:, None] - arr[None, :]))) if arr.size else 0.0
    return AdmissibleLimit(limits, spread)


def essential_norm_lower_bound(b: Symbol, phi: Sequence[Symbol], ladder, tail: int = 3) -> float:
    """``max`` over the last rungs of ``||K^b(., phi(w))|| / ||K^b(., w)||``."""
    W = np.atleast_2d(np.asarray(ladder, dtype=complex))
    if len(phi) != W.shape[1]:
        raise DomainError("phi needs one coordinate symbol per dimension")
    PW = np.column_stack([p(W) for p in phi])
    if np.any(np.linalg.norm(PW, axis=1) >= 1):
        raise DomainError("phi maps a ladder point outside the ball")
    ratio = np.sqrt(kernel_norm_sq(b, PW) / kernel_norm_sq(b, W))
    return float(np.max(ratio[-tail:]))


def boundary_kernel_candidate(b: Symbol, xi, eta: complex) -> CandidateFunction:
    """``k(z) = (eta - b(z)) / (1 - <z, xi>)^n``."""
    x = _unit(xi)
    n = x.size
    return CandidateFunction(
        lambda Z: (eta - b(Z)) / (1.0 - Z @ np.conj(x)) ** n,
        f"({eta:.6g} - b)/(1 - <z,xi>)^{n}",
    )


@dataclass(frozen=True)
class HarnessSettings:
    ladder_rungs: int = 16
    membership_levels: int = 14
    grid_size: int = 400
    seed: int = 0
    atom_threshold: float = 0.1
    sample_ladder: int = 10
    membership: MembershipSettings = field(default_factory=MembershipSettings)


@dataclass(frozen=True)
class EquivalenceRecord:
    xi: list
    n: int
    c_finite: bool
    q2_finite: bool
    caratheodory: bool
    membership_verdict: str
    membership_bound: float
    atom_mass: float
    c_estimate: float
    q2_limit: float
    eta: list
    consistent_n1: bool
    symbol: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "xi": self.xi,
            "n": self.n,
            "cFinite": self.c_finite,
            "q2Finite": self.q2_finite,
            "caratheodory": self.caratheodory,
            "membershipVerdict": self.membership_verdict,
            "membershipBound": self.membership_bound,
            "atomMass": self.atom_mass,
            "cEstimate": self.c_estimate,
            "q2Limit": self.q2_limit,
            "eta": self.eta,
            "consistent_n1": self.consistent_n1,
            "symbol": self.symbol,
        }


def equivalence_harness(b: Symbol, xi, alpha=1.0, settings: HarnessSettings | None = None) -> EquivalenceRecord:
    """Run the angular, membership and Clark pipelines at one boundary point.

    The membership candidate and the Clark measure both use the estimated
    boundary value ``eta`` when it exists and the parameter ``alpha`` otherwise.
    """
    s = settings or HarnessSettings()
    alpha = alpha if isinstance(alpha, ClarkParameter) else ClarkParameter(alpha)
    x = _unit(xi)
    ad = angular_derivative_estimate(b, x, s.ladder_rungs)
    eta = ad.eta_estimate if ad.eta_estimate is not None else alpha.alpha

    def member():
        cfgs = nested_radial_configs(x, s.membership_levels)
        return membership_estimate(b, boundary_kernel_candidate(b, x, eta), cfgs, s.membership)

    def clark():
        grid = sphere_grid(b.dimension, s.grid_size, s.seed)
        prob = clark_problem(b, ClarkParameter(eta), grid, [x], ladder=s.sample_ladder)
        return solve_clark(prob)

    with ThreadPoolExecutor(max_workers=min(2, worker_count())) as pool:
        fm, fc = pool.submit(member), pool.submit(clark)
        mem, rep = fm.result(), fc.result()

    atom = float(rep.measure.atom_weights[0])
    c_fin = bool(np.isfinite(ad.c_estimate))
    flags = (c_fin, mem.verdict == "bounded", atom > s.atom_threshold, ad.caratheodory)
    consistent = bool(x.size == 1 and all(v == flags[0] for v in flags))
    return EquivalenceRecord(
        xi=[[c.real, c.imag] for c in x],
        n=int(x.size),
        c_finite=c_fin,
        q2_finite=bool(np.isfinite(ad.q2_limit)),
        caratheodory=ad.caratheodory,
        membership_verdict=mem.verdict,
        membership_bound=mem.bound_value,
        atom_mass=atom,
        c_estimate=ad.c_estimate,
        q2_limit=ad.q2_limit,
        eta=[complex(eta).real, complex(eta).imag],
        consistent_n1=consistent,
        symbol=b.describe(),
    )
