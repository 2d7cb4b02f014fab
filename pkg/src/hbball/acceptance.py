"""Acceptance criteria as runnable checks.

Each ``criterion_*`` function returns a :class:`CriterionResult` whose
``metrics`` are deterministic under a fixed seed; timings are measured by
the caller so that reports stay byte-stable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import angular, clark, geometry, hbspace, kernels, symbols
from .geometry import sphere_grid, unit_vector

__all__ = ["CriterionResult", "CRITERIA", "RUNTIME_LIMITS", "run_all", "catalog"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"criterion": self.number, "name": self.name, "passed": self.passed, "metrics": self.metrics}


def _ball_points(rng, count, n, rmax=0.95):
    g = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    # uniform in the ball of radius rmax (real dimension 2n)
    r = rmax * rng.random(count) ** (1.0 / (2 * n))
    return g * r[:, None]


def catalog(n: int) -> dict:
    """Schur catalog symbols used by the property criteria."""
    e = unit_vector(n).coords
    out = {
        "coordinateSlice": symbols.coordinate_slice(e),
        "affineHalf": symbols.affine_half(e),
        "monomial": symbols.monomial((2,) if n == 1 else (1, 1)),
        "discLift": symbols.disc_lift(e, [0.0, 0.5]),
    }
    if n == 1:
        # Theta = 1 - (1 - <z, xi0>)^n is Schur only for n = 1
        out["theta"] = symbols.theta(e)
    return out


def _series_szego(s, n, terms=200):
    k = np.arange(terms)
    coef = np.array([math.comb(n + int(j) - 1, int(j)) for j in k], dtype=float)
    return np.sum(coef * s ** k)


def criterion_1(seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (1, 2, 3):
        count = 0
        while count < 100:
            z, w = _ball_points(rng, 2, n, 0.999)
            s = complex(np.dot(z, np.conj(w)))
            if abs(s) > 0.7:
                continue
            count += 1
            val = kernels.szego(z, w, n).value
            ref = _series_szego(s, n)
            worst = max(worst, abs(val - ref) / abs(ref))
    return CriterionResult(1, "kernel series oracle", worst <= 1e-10, {"maxRelError": worst})


def moment_oracle(n, k):
    return math.factorial(k) * math.factorial(n - 1) / math.factorial(n + k - 1)


def criterion_2(seed=0, count=200_000):
    tol = 4 / math.sqrt(count)
    worst = 0.0
    for n in (1, 2, 3):
        g = sphere_grid(n, count, seed + n)
        a = np.abs(g.nodes[:, 0]) ** 2
        for k in (1, 2):
            worst = max(worst, abs(float(g.integrate(a ** k)) - moment_oracle(n, k)))
    return CriterionResult(2, "sphere moment oracle", worst <= tol, {"maxAbsError": worst, "tolerance": tol})


def _random_config(rng, n, size, min_sep=0.05, rmax=0.9):
    pts = []
    while len(pts) < size:
        p = _ball_points(rng, 1, n, rmax)[0]
        if all(np.linalg.norm(p - q) >= min_sep for q in pts):
            pts.append(p)
    return hbspace.PointConfiguration(np.array(pts))


def criterion_3(seed=0, configs=50):
    rng = np.random.default_rng(seed)
    worst_eig, worst_res = 0.0, 0.0
    for n in (1, 2):
        cat = catalog(n)
        for _ in range(configs):
            cfg = _random_config(rng, n, int(rng.integers(2, 13)))
            z = _ball_points(rng, 1, n, 0.9)[0]
            coeffs = rng.standard_normal(len(cfg)) + 1j * rng.standard_normal(len(cfg))
            for b in cat.values():
                lam = hbspace.gram_matrix(b, cfg).eigvalsh()
                worst_eig = min(worst_eig, lam[0] / lam[-1])
                fz = np.sum(kernels.hb_kernel_matrix(b, z[None, :], cfg.points)[0] * coeffs)
                res = hbspace.reproducing_check(b, cfg, coeffs, z) / (1 + abs(fz))
                worst_res = max(worst_res, res)
    ok = worst_eig >= -1e-8 and worst_res <= 1e-8
    return CriterionResult(3, "Gram PSD and reproducing identity", ok, {"minEigRatio": worst_eig, "maxReproResidual": worst_res})


def criterion_4(seed=0, candidates=20, levels=8):
    rng = np.random.default_rng(seed)
    worst = -np.inf
    names = []
    for i in range(candidates):
        n = 1 + i % 2
        cat = list(catalog(n).values())
        b = cat[int(rng.integers(len(cat)))]
        anchors = _ball_points(rng, 3, n, 0.8)
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        f = hbspace.CandidateFunction(lambda Z, b=b, a=anchors, c=c: kernels.hb_kernel_matrix(b, Z, a) @ c)
        xi = geometry.SpherePoint(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        cfgs = hbspace.nested_radial_configs(xi, levels)
        est = []
        for cfg in cfgs:
            est.append(hbspace.min_norm_interpolant_norm(hbspace.gram_matrix(b, cfg), f(cfg.points)))
        e = np.array(est, dtype=float)
        worst = max(worst, float(np.max(e[:-1] - e[1:])))
        names.append(b.kind)
    return CriterionResult(4, "nested monotonicity", worst <= 1e-10, {"maxDecrease": worst})


def criterion_5(seed=0):
    b = symbols.coordinate_slice(n=1)
    e1 = unit_vector(1)
    cfgs = hbspace.nested_radial_configs(e1, 12)
    G = hbspace.gram_matrix(b, cfgs[-1]).matrix
    gram_err = float(np.max(np.abs(G - 1)))
    one = hbspace.CandidateFunction(lambda Z: np.ones(len(Z)), "1")
    ident = hbspace.CandidateFunction(lambda Z: Z[:, 0], "z")
    m1 = hbspace.membership_estimate(b, one, cfgs)
    mz = hbspace.membership_estimate(b, ident, cfgs)
    sd1 = [hbspace.sup_def_norm_estimate(b, {(0,): 1.0}, d) for d in range(0, 13)]
    sdz = hbspace.sup_def_norm_estimate(b, {(1,): 1.0}, 1)
    sd_err = max(abs(v - 1) for v in sd1)
    ok = (
        gram_err <= 1e-12
        and m1.verdict == "bounded"
        and abs(m1.bound_value - 1) <= 1e-6
        and mz.verdict == "diverging"
        and sd_err <= 1e-10
        and sdz == hbspace.UNBOUNDED
    )
    return CriterionResult(5, "model space b=z", ok, {
        "gramMaxError": gram_err,
        "membershipOne": m1.verdict,
        "boundValueOne": m1.bound_value,
        "membershipZ": mz.verdict,
        "supDefOneMaxError": sd_err,
        "supDefZ": sdz,
    })


def model_measures(seed=0, grid_size=400):
    """Solved Clark measures (alpha = 1) for ``b = z`` and ``b = (1+z)/2`` on the circle."""
    grid = sphere_grid(1, grid_size, seed)
    e = unit_vector(1).coords
    out = {}
    for name, b in (("z", symbols.coordinate_slice(n=1)), ("affineHalf", symbols.affine_half(n=1))):
        out[name] = (b, clark.solve_clark(clark.clark_problem(b, 1.0, grid, [e])))
    return out


def criterion_6(seed=0, measures=None):
    measures = measures or model_measures(seed)
    _, rep = measures["z"]
    atom = float(rep.measure.atom_weights[0])
    frac = atom / rep.total_mass
    ok = frac >= 0.95 and abs(rep.total_mass - 1) <= 1e-2 and rep.residual_l2 <= 1e-3
    return CriterionResult(6, "Clark recovery b=z", ok, {"atomFraction": frac, "totalMass": rep.total_mass, "residual": rep.residual_l2})


def criterion_7(seed=0, measures=None):
    measures = measures or model_measures(seed)
    b, rep = measures["affineHalf"]
    atom = float(rep.measure.atom_weights[0])
    rest = rep.total_mass - atom
    bound = clark.atom_mass_upper_bound(b, 1.0, unit_vector(1), 0.999)
    ok = (
        abs(rep.total_mass - 3) <= 1e-2
        and abs(atom - 2) <= 0.1
        and abs(rest - 1) <= 0.1
        and abs(bound - 2.0005) <= 1e-3
    )
    return CriterionResult(7, "Clark recovery b=(1+z)/2", ok, {"totalMass": rep.total_mass, "atomMass": atom, "remainder": rest, "upperBound0999": bound})


def criterion_8(seed=0, measures=None):
    measures = measures or model_measures(seed)
    rng = np.random.default_rng(seed + 8)
    worst_lemma = worst_image = worst_iso = 0.0
    for b, rep in measures.values():
        mu = rep.measure
        for _ in range(20):
            z, w = _ball_points(rng, 2, 1, 0.5)
            worst_lemma = max(worst_lemma, clark.clark_inner_identity_check(b, mu, z, w))
        W = _ball_points(rng, 5, 1, 0.5)
        c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        # kernel-image identity for each Cauchy kernel
        Z = _ball_points(rng, 5, 1, 0.5)
        for w in W:
            for z in Z:
                got = clark.vb_transform(b, mu, lambda X, w=w: kernels.szego_matrix(X, w[None, :])[:, 0], z)
                want = kernels.hb_kernel(b, z, w).value / (1 - np.conj(b(w)))
                worst_image = max(worst_image, abs(got - want) / abs(want))
        # isometry on span of 5 Cauchy kernels
        g = lambda X: kernels.szego_matrix(X, W) @ c
        l2 = math.sqrt(float(np.sum(mu.all_weights * np.abs(g(mu.points)) ** 2)))
        vals = np.array([clark.vb_transform(b, mu, g, w) for w in W])
        cfg = hbspace.PointConfiguration(W)
        hb = hbspace.min_norm_interpolant_norm(hbspace.gram_matrix(b, cfg), vals)
        hb = math.sqrt(hb) if hb != hbspace.INFEASIBLE else math.inf
        worst_iso = max(worst_iso, abs(hb - l2) / l2)
    ok = worst_lemma <= 5e-2 and worst_image <= 5e-2 and worst_iso <= 5e-2
    return CriterionResult(8, "inner-product identity and V_b", ok, {"lemmaResidual": worst_lemma, "kernelImage": worst_image, "isometry": worst_iso})


N1_SUITE = {
    "z": lambda: symbols.coordinate_slice(n=1),
    "z^2": lambda: symbols.monomial((2,)),
    "(1+z)/2": lambda: symbols.affine_half(n=1),
    "blaschke(0.5)*z": lambda: symbols.disc_lift(zeros=[0.0, 0.5]),
}

N2_SUITE = {
    "z1": lambda: symbols.coordinate_slice(n=2),
    "(1+z1)/2": lambda: symbols.affine_half(n=2),
    "z1z2": lambda: symbols.monomial((1, 1)),
}


def criterion_9(seed=0):
    rng = np.random.default_rng(seed + 9)
    m = {}
    e2 = unit_vector(2)
    m["c_z1_n2"] = angular.angular_derivative_estimate(symbols.coordinate_slice(n=2), e2).c_estimate
    m["c_affineHalf"] = [
        angular.angular_derivative_estimate(symbols.affine_half(n=n), unit_vector(n)).c_estimate for n in (1, 2, 3)
    ]
    m["c_z1z2"] = angular.angular_derivative_estimate(symbols.monomial((1, 1)), e2).c_estimate
    adq = 0.0
    for n in (1, 2, 3):
        b = symbols.affine_half(n=n)
        e = unit_vector(n)
        for r in 1 - 2.0 ** -np.arange(1, 20):
            q = angular.boundary_quotients(b, r * e.coords, e, 1.0).ad_quotient
            adq = max(adq, abs(q + 0.5))
    m["adQuotientMaxError"] = adq
    samples = _ball_points(rng, 10_000, 1, 1.0 - 1e-9)
    viol, neg = {}, {}
    for name, make in N1_SUITE.items():
        b = make()
        ad = angular.angular_derivative_estimate(b, unit_vector(1))
        viol[name] = angular.julia_inequality_check(b, unit_vector(1), ad.eta_estimate, ad.c_estimate, samples).violations
        neg[name] = angular.julia_inequality_check(b, unit_vector(1), ad.eta_estimate, ad.c_estimate / 2, samples).violations
    m["juliaViolations"] = viol
    m["juliaNegativeControl"] = neg
    ok = (
        abs(m["c_z1_n2"] - 1) <= 1e-3
        and all(abs(c - 0.5) <= 1e-3 for c in m["c_affineHalf"])
        and math.isinf(m["c_z1z2"])
        and adq <= 1e-12
        and all(v == 0 for v in viol.values())
        and all(v > 0 for v in neg.values())
    )
    return CriterionResult(9, "angular suite", ok, m)


def criterion_10(seed=0):
    settings = angular.HarnessSettings(seed=seed)
    rows = {}
    for name, make in N1_SUITE.items():
        rec = angular.equivalence_harness(make(), unit_vector(1), 1.0, settings)
        rows[name] = {
            "consistent_n1": rec.consistent_n1,
            "cEstimate": rec.c_estimate,
            "membership": rec.membership_verdict,
            "atomMass": rec.atom_mass,
        }
    ok = all(r["consistent_n1"] for r in rows.values())
    return CriterionResult(10, "n=1 equivalence harness", ok, rows)


def atom_bound_slope(b, xi, radii=None):
    """Least-squares slope of ``log bound`` against ``log(1 - r)``."""
    radii = np.linspace(0.9, 0.999, 25) if radii is None else radii
    ub = np.array([clark.atom_mass_upper_bound(b, 1.0, xi, r) for r in radii])
    return float(np.polyfit(np.log(1 - radii), np.log(ub), 1)[0])


def criterion_11(seed=0):
    settings = angular.HarnessSettings(seed=seed)
    e = unit_vector(2)
    rows = {}
    ok = True
    for i, (name, make) in enumerate(N2_SUITE.items()):
        b = make()
        rec = angular.equivalence_harness(b, e, 1.0, settings)
        slope = atom_bound_slope(b, e)
        rows[name] = {
            "membership": rec.membership_verdict,
            "atomMass": rec.atom_mass,
            "boundSlope": slope,
            "cFinite": rec.c_finite,
            "q2Finite": rec.q2_finite,
        }
        ok &= rec.membership_verdict == "diverging" and rec.atom_mass <= 1e-2 and slope >= 0.9
        if i < 2:
            ok &= rec.c_finite
    return CriterionResult(11, "n=2 dimension gap", bool(ok), rows)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}

RUNTIME_LIMITS = {1: 1, 2: 5, 3: 30, 4: 10, 5: 10, 6: 10, 7: 10, 8: 30, 9: 30, 10: 120, 11: 120}


def run_all(seed=0, timings=None):
    """Run criteria 1-11; ``timings`` (a dict) receives wall-clock seconds."""
    results = []
    for k, fn in CRITERIA.items():
        t0 = time.perf_counter()
        res = fn(seed)
        if timings is not None:
            timings[k] = time.perf_counter() - t0
        results.append(res)
    return results
