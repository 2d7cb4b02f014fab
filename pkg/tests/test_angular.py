import math
import os
from unittest import mock

import numpy as np
import pytest

from hbball.angular import (
    HarnessSettings,
    admissible_limit,
    angular_derivative_estimate,
    boundary_kernel_candidate,
    boundary_quotients,
    equivalence_harness,
    essential_norm_lower_bound,
    extrapolate,
    julia_inequality_check,
    worker_count,
)
from hbball.errors import DomainError
from hbball.geometry import Curve, linear_tangential_curve, radial_curve, unit_vector
from hbball.hbspace import CandidateFunction, membership_estimate, nested_radial_configs
from hbball.kernels import hb_kernel_norm
from hbball.symbols import Symbol, affine_half, coordinate_slice, disc_lift, monomial

E1 = unit_vector(1)
E12 = unit_vector(2)
N1_SUITE = {
    "z": coordinate_slice(n=1),
    "z2": monomial((2,)),
    "affineHalf": affine_half(n=1),
    "blaschke": disc_lift(zeros=[0, 0.5]),
}
# classical |b'(1)| for the suite: 1, 2, 1/2, 1 + (1 - 0.25)/(0.5^2) = 1 + 3
C_ORACLE = {"z": 1.0, "z2": 2.0, "affineHalf": 0.5, "blaschke": 1 + 0.75 / 0.25}


def test_quotient_examples():
    b = coordinate_slice(n=2)
    for r in (0.3, 0.9, 0.999):
        bq = boundary_quotients(b, [r, 0], E12)
        assert bq.q1 == pytest.approx(1)
        assert bq.q2 == pytest.approx(1 / (1 - r * r))
        bq = boundary_quotients(coordinate_slice(n=1), [r], E1)
        assert bq.q1 == pytest.approx(1) and bq.q2 == pytest.approx(1)
        bq = boundary_quotients(affine_half(n=2), [r, 0], E12, eta=1)
        assert bq.ad_quotient == pytest.approx(-0.5)
    with pytest.raises(DomainError):
        boundary_quotients(b, [1, 0], E12)


def test_q2_matches_kernel_norm(rng):
    for b in (coordinate_slice(n=2), affine_half(n=2), monomial((1, 1), 2)):
        for _ in range(30):
            z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            z *= rng.random() / np.linalg.norm(z)
            assert boundary_quotients(b, z, E12).q2 == pytest.approx(hb_kernel_norm(b, z)[0], rel=1e-12)


def test_extrapolate():
    k = np.arange(1, 17)
    h = 2.0 ** -k
    assert extrapolate(3 + 2 * h - 5 * h ** 2) == pytest.approx(3, abs=1e-12)
    assert extrapolate(1 / h) == math.inf
    assert extrapolate(np.ones(16)) == 1


def test_ad_examples():
    ad = angular_derivative_estimate(coordinate_slice(n=2), E12)
    assert ad.c_estimate == pytest.approx(1)
    assert ad.eta_estimate == pytest.approx(1)
    assert ad.caratheodory and ad.q2_limit == math.inf
    ad = angular_derivative_estimate(affine_half(n=2), E12)
    assert ad.c_estimate == pytest.approx(0.5, abs=1e-6)
    assert ad.eta_estimate == pytest.approx(1)
    assert ad.derivative_modulus == pytest.approx(0.5, abs=1e-6)
    ad = angular_derivative_estimate(monomial((1, 1)), E12)
    assert ad.c_estimate == math.inf and not ad.caratheodory and ad.eta_estimate is None
    with pytest.raises(ValueError):
        angular_derivative_estimate(coordinate_slice(n=1), E1, K=5)


@pytest.mark.parametrize("name", list(N1_SUITE))
def test_ad_n1_suite_matches_classical_derivative(name):
    ad = angular_derivative_estimate(N1_SUITE[name], E1)
    assert ad.c_estimate == pytest.approx(C_ORACLE[name], rel=1e-4)
    assert ad.q2_limit == pytest.approx(C_ORACLE[name], rel=1e-4)
    assert ad.derivative_modulus == pytest.approx(C_ORACLE[name], rel=1e-4)


def disc_samples(count, seed=0, rmax=0.999):
    rng = np.random.default_rng(seed)
    return (rmax * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count)))[:, None]


def test_julia_examples():
    S = disc_samples(10_000)
    assert julia_inequality_check(coordinate_slice(n=1), E1, 1, 1.0, S).violations == 0
    chk = julia_inequality_check(affine_half(n=1), E1, 1, 0.5, S)
    assert chk.violations == 0 and chk.worst_slack <= 1e-9
    assert julia_inequality_check(affine_half(n=1), E1, 1, 0.25, S).violations > 0


@pytest.mark.parametrize("name", list(N1_SUITE))
def test_julia_with_extrapolated_constant(name):
    b = N1_SUITE[name]
    ad = angular_derivative_estimate(b, E1)
    chk = julia_inequality_check(b, E1, ad.eta_estimate, ad.c_estimate, disc_samples(10_000, 1))
    assert chk.violations == 0


def test_admissible_limit_examples():
    curves = [radial_curve(E12), linear_tangential_curve(E12, [0, 0.5])]
    const = CandidateFunction(lambda Z: np.full(Z.shape[0], 2 - 1j))
    res = admissible_limit(coordinate_slice(n=2), const, E12, 3.0, curves)
    assert res.spread == 0 and all(v == 2 - 1j for v in res.limits_per_curve)
    one = CandidateFunction(lambda Z: np.ones(Z.shape[0]))
    c1 = [radial_curve(E1), Curve(lambda t: np.outer(t * np.exp(1j * (1 - t)), [1.0]), E1, 2.0)]
    res = admissible_limit(coordinate_slice(n=1), one, E1, 3.0, c1)
    assert res.spread <= 1e-9 and res.limits_per_curve[0] == pytest.approx(1)
    kern = CandidateFunction(lambda Z: 1 / (1 - Z[:, 0]))
    res = admissible_limit(coordinate_slice(n=2), kern, E12, 3.0, [radial_curve(E12)])
    assert res.limits_per_curve == [None] and res.spread == math.inf


def test_admissible_limit_rejects_curve_outside_region():
    # tangent to the sphere at e1: leaves every Koranyi region
    c = Curve(lambda t: np.column_stack([np.sqrt(1 - (1 - t) ** 0.5) * 0.999, (1 - t) ** 0.25 * 0.7]), E12)
    one = CandidateFunction(lambda Z: np.ones(Z.shape[0]))
    with pytest.raises(DomainError, match="sample"):
        admissible_limit(coordinate_slice(n=2), one, E12, 1.5, [c])


def ladder(K=16):
    return (1 - 2.0 ** -np.arange(1, K + 1))[:, None]


def test_essential_norm_examples():
    ident = coordinate_slice(n=1)
    assert essential_norm_lower_bound(affine_half(n=1), [ident], ladder()) == pytest.approx(1)
    ident2 = [coordinate_slice(n=2), coordinate_slice([0, 1], n=2)]
    W = np.column_stack([ladder()[:, 0], np.zeros(16)])
    assert essential_norm_lower_bound(affine_half(n=2), ident2, W) == pytest.approx(1)


def test_essential_norm_affine_half_oracle():
    # q2(s) = (3 + s) / (4 (1 + s)) for b = (1 + z)/2, so the ratio at w = r is
    # sqrt(q2(r/2) / q2(r)) -> sqrt((7/12) / (1/2)) = sqrt(7/6)
    q2 = lambda s: (3 + s) / (4 * (1 + s))
    half = Symbol(1, lambda Z: Z[:, 0] / 2, "half")
    W = ladder()
    got = essential_norm_lower_bound(affine_half(n=1), [half], W)
    r = W[-3:, 0]
    assert got == pytest.approx(np.max(np.sqrt(q2(r / 2) / q2(r))), rel=1e-12)
    assert got == pytest.approx(math.sqrt(7 / 6), abs=1e-4)
    assert got == pytest.approx(1.0801234497, abs=1e-4)


def test_essential_norm_rejects_escaping_map():
    out = Symbol(1, lambda Z: 2 * Z[:, 0], "double")
    with pytest.raises(DomainError):
        essential_norm_lower_bound(coordinate_slice(n=1), [out], ladder())


@pytest.mark.parametrize("name", list(N1_SUITE))
def test_membership_controls_kernel_norms(name):
    # |k(z)|^2 <= ||k||_b^2 q2(z) by Cauchy-Schwarz, and q2 stays bounded
    b = N1_SUITE[name]
    ad = angular_derivative_estimate(b, E1)
    k = boundary_kernel_candidate(b, E1, ad.eta_estimate)
    rep = membership_estimate(b, k, nested_radial_configs(E1, 14))
    assert rep.verdict == "bounded"
    L = ladder()
    q2 = ad.q2_values
    assert np.all(np.abs(k(L)) ** 2 <= rep.bound_value * q2 * 1.10)
    assert np.max(q2[7:]) <= rep.bound_value * 1.10


def test_worker_count_env():
    with mock.patch.dict(os.environ, {"HB_BALL_THREADS": "3"}):
        assert worker_count() == 3
    with mock.patch.dict(os.environ, {}, clear=True):
        assert 1 <= worker_count() <= 4


@pytest.mark.parametrize("name", list(N1_SUITE))
def test_harness_n1_suite_consistent(name):
    rec = equivalence_harness(N1_SUITE[name], E1, 1.0)
    assert rec.consistent_n1
    assert rec.c_finite and rec.caratheodory and rec.membership_verdict == "bounded"
    assert rec.atom_mass == pytest.approx(1 / C_ORACLE[name], rel=2e-2)


def test_harness_examples():
    rec = equivalence_harness(coordinate_slice(n=1), E1, 1.0)
    assert rec.c_estimate == pytest.approx(1) and rec.atom_mass == pytest.approx(1, abs=1e-2)
    rec = equivalence_harness(affine_half(n=1), E1, 1.0)
    assert rec.c_estimate == pytest.approx(0.5, abs=1e-6)
    assert rec.atom_mass == pytest.approx(2, abs=0.1)
    rec = equivalence_harness(coordinate_slice(n=2), E12, 1.0)
    assert rec.c_finite and not rec.q2_finite
    assert rec.membership_verdict == "diverging"
    assert rec.atom_mass <= 1e-2
    assert not rec.consistent_n1
    d = rec.to_dict()
    assert d["consistent_n1"] is False and "membershipVerdict" in d


def test_harness_thread_count_does_not_change_result():
    with mock.patch.dict(os.environ, {"HB_BALL_THREADS": "1"}):
        a = equivalence_harness(affine_half(n=1), E1, 1.0, HarnessSettings(grid_size=200))
    with mock.patch.dict(os.environ, {"HB_BALL_THREADS": "4"}):
        b = equivalence_harness(affine_half(n=1), E1, 1.0, HarnessSettings(grid_size=200))
    assert a.to_dict() == b.to_dict()
