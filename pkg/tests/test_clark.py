import numpy as np
import pytest

from hbball.clark import (
    ClarkParameter,
    DiscreteMeasure,
    absolute_continuity_check,
    atom_mass_upper_bound,
    cap_distance,
    clark_inner_identity_check,
    clark_problem,
    poisson_rhs,
    poisson_transform,
    solve_clark,
    vb_transform,
)
from hbball.errors import DimensionError
from hbball.geometry import sphere_grid, unit_vector
from hbball.hbspace import PointConfiguration, gram_matrix
from hbball.kernels import hb_kernel, invariant_poisson, szego_matrix
from hbball.symbols import affine_half, coordinate_slice, disc_lift, monomial, theta

E1 = np.array([1.0 + 0j])
B1 = coordinate_slice(n=1)
AH1 = affine_half(n=1)


@pytest.fixture(scope="module")
def grid1():
    return sphere_grid(1, 400, 0)


@pytest.fixture(scope="module")
def solved(grid1):
    out = {}
    for name, b in [("z", B1), ("affineHalf", AH1), ("z2", monomial((2,))), ("blaschke", disc_lift(zeros=[0, 0.5]))]:
        out[name] = (b, solve_clark(clark_problem(b, 1.0, grid1, atom_candidates=[E1])))
    return out


def test_clark_parameter_unimodular():
    ClarkParameter(1j)
    with pytest.raises(ValueError):
        ClarkParameter(0.9)


def test_poisson_rhs_examples():
    for a in (1, -1, 1j, np.exp(0.3j)):
        assert poisson_rhs(B1, a, [0]) == pytest.approx(1)
    assert poisson_rhs(affine_half(n=2), 1, [0, 0]) == pytest.approx(3)
    for r in (0.1, 0.5, 0.9):
        assert poisson_rhs(B1, 1, [r]) == pytest.approx((1 + r) / (1 - r))
        assert poisson_rhs(B1, 1, [r]) == pytest.approx(invariant_poisson([r], [1.0]))


def test_poisson_transform_examples():
    mu = DiscreteMeasure(sphere_grid(2, 50, 1).nodes, np.full(50, 0.1))
    assert poisson_transform(mu, [0, 0]) == pytest.approx(mu.total_mass)
    assert poisson_transform(DiscreteMeasure.point_mass([1.0]), [0.5]) == pytest.approx(3)
    empty = DiscreteMeasure(np.zeros((0, 2)), np.zeros(0))
    assert poisson_transform(empty, [0.1, 0]) == 0


def test_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure([[1.0]], [-1.0])
    with pytest.raises(DimensionError):
        DiscreteMeasure([[1.0], [1j]], [1.0])
    with pytest.raises(ValueError):
        DiscreteMeasure([[1.0]], [1.0], [[1.0]], [1.0])


def test_cap_distance():
    assert cap_distance([[1.0, 0]], [1.0, 0])[0] == 0
    assert cap_distance([[-1.0, 0]], [1.0, 0])[0] == pytest.approx(np.sqrt(2))
    assert cap_distance([[0, 1.0]], [1.0, 0])[0] == pytest.approx(1)


def test_solve_examples(solved):
    rep = solved["z"][1]
    assert rep.total_mass == pytest.approx(1, abs=1e-2)
    assert rep.measure.atom_weights[0] >= 0.95 * rep.total_mass
    rep = solved["affineHalf"][1]
    assert rep.total_mass == pytest.approx(3, abs=1e-2)
    assert rep.measure.atom_weights[0] == pytest.approx(2, abs=0.1)
    # the remaining unit of mass is spread, not concentrated
    assert rep.measure.weights.max() < 0.1


def test_solve_n2_monomial_has_no_atom():
    b = monomial((1, 1))
    rep = solve_clark(clark_problem(b, 1.0, sphere_grid(2, 400, 0), atom_candidates=[[1.0, 0]]))
    assert rep.measure.atom_weights[0] <= 1e-2


@pytest.mark.parametrize("name", ["z", "affineHalf", "z2", "blaschke"])
def test_mass_identity_and_forward_backward(solved, name):
    b, rep = solved[name]
    u0 = poisson_rhs(b, 1, [0])
    assert abs(rep.total_mass - u0) <= 1e-2 * rep.total_mass
    assert rep.residual_l2 <= 1e-3
    rng = np.random.default_rng(99)
    Z = rng.uniform(0.05, 0.85, 40) * np.exp(2j * np.pi * rng.random(40))
    u = np.array([poisson_rhs(b, 1, [z]) for z in Z])
    v = np.array([poisson_transform(rep.measure, [z]) for z in Z])
    assert np.linalg.norm(v - u) / np.linalg.norm(u) <= 5e-2


def test_mass_identity_n2():
    for b in (coordinate_slice(n=2), affine_half(n=2), monomial((1, 1))):
        rep = solve_clark(clark_problem(b, 1.0, sphere_grid(2, 400, 0), atom_candidates=[[1.0, 0]]))
        assert abs(rep.total_mass - poisson_rhs(b, 1, [0, 0])) <= 1e-2 * rep.total_mass


def test_report_serialization(solved):
    d = solved["affineHalf"][1].to_dict()
    assert set(d) == {"alpha", "totalMass", "residualL2", "atoms", "capMasses"}
    assert d["atoms"][0]["point"] == [[1.0, 0.0]]
    assert set(d["capMasses"]) == {"0.05", "0.1", "0.2"}


def test_measure_csv(solved):
    text = solved["z"][1].measure.to_csv()
    lines = text.splitlines()
    assert lines[0] == "re1,im1,weight,designated"
    assert len(lines) == 402 and lines[-1].endswith(",1")


def test_identity_check_examples(solved):
    for name, (b, rep) in solved.items():
        assert clark_inner_identity_check(b, rep.measure, [0], [0]) <= 1e-2
    assert clark_inner_identity_check(B1, DiscreteMeasure.point_mass([1.0]), [0.3], [0.2j]) <= 1e-14
    b, rep = solved["affineHalf"]
    assert clark_inner_identity_check(b, rep.measure, [0.3], [0.2]) <= 5e-2


def test_vb_examples(solved):
    delta = DiscreteMeasure.point_mass([1.0])
    assert vb_transform(B1, delta, [0.0], [0.3]) == 0
    assert vb_transform(B1, delta, lambda X: np.ones(len(X)), [0.5]) == pytest.approx(1)
    b, rep = solved["affineHalf"]
    w = np.array([0.2 + 0.1j])
    z = np.array([-0.3 + 0.2j])
    g = lambda X: szego_matrix(X, w[None, :])[:, 0]
    want = hb_kernel(b, z, w).value / (1 - np.conj(b(w)))
    assert abs(vb_transform(b, rep.measure, g, z) - want) <= 5e-2 * abs(want)
    with pytest.raises(DimensionError):
        vb_transform(b, rep.measure, [1.0, 2.0], z)


@pytest.mark.parametrize("name", ["affineHalf", "blaschke"])
def test_vb_isometry_on_kernel_span(solved, name):
    b, rep = solved[name]
    rng = np.random.default_rng(5)
    W = (0.6 * rng.random(5) * np.exp(2j * np.pi * rng.random(5)))[:, None]
    c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    X = rep.measure.points
    Kx = szego_matrix(X, W)
    g = Kx @ c
    l2 = float(np.sum(rep.measure.all_weights * np.abs(g) ** 2))
    # V_b K(., w) = K^b(., w) / (1 - conj b(w))
    d = c / (1 - np.conj(b(W)))
    G = gram_matrix(b, PointConfiguration(W)).matrix
    hb = float((np.conj(d) @ G @ d).real)
    assert abs(l2 - hb) <= 5e-2 * hb


def test_atom_bound_examples():
    for r in (0.1, 0.5, 0.9, 0.999):
        assert atom_mass_upper_bound(B1, 1, [1.0], r) == pytest.approx(1)
    assert atom_mass_upper_bound(AH1, 1, [1.0], 0.999) == pytest.approx(3.999 / 1.999)
    b2 = coordinate_slice(n=2)
    rs = np.array([0.9, 0.99, 0.999])
    bounds = np.array([atom_mass_upper_bound(b2, 1, [1.0, 0], r) for r in rs])
    assert np.all(np.diff(bounds) < 0)
    assert np.all(bounds <= 2 * (1 - rs) * 1.01)


def test_atom_bound_dominates_cap_mass(solved):
    for name, (b, rep) in solved.items():
        bound = atom_mass_upper_bound(b, 1, [1.0], 0.9)
        assert rep.measure.cap_mass([1.0], 0.05) <= bound + 1e-2


def test_absolute_continuity_examples(solved):
    mu = solved["affineHalf"][1].measure
    ac = absolute_continuity_check(mu, mu)
    pos = mu.all_weights > 1e-12
    assert np.allclose(ac.density_values[pos], 1)
    assert ac.l2_norm_in_mu == pytest.approx(np.sqrt(mu.total_mass))
    assert ac.comparable
    assert np.allclose(absolute_continuity_check(mu, mu.scaled(2)).density_values[pos], 2)
    smooth = DiscreteMeasure(sphere_grid(1, 400, 0).nodes, np.full(400, 1 / 400))
    ac = absolute_continuity_check(smooth, DiscreteMeasure.point_mass(np.exp(0.123j)))
    assert not ac.comparable and ac.singular_mass == pytest.approx(1)


def test_theta_clark_experiment():
    # n = 1: theta = z, Clark measure is the unit point mass
    rep = solve_clark(clark_problem(theta(n=1), 1.0, sphere_grid(1, 400, 0), atom_candidates=[E1]))
    assert rep.measure.atom_weights[0] == pytest.approx(1, abs=1e-2)
    # n = 2: the boundary data of theta is not the Poisson kernel at e1,
    # so the solved atom is far from a unit point mass
    b = theta(n=2)
    r = 0.9
    u = poisson_rhs(b, 1, [r, 0])
    assert abs(u - invariant_poisson([r, 0], [1.0, 0])) > 1
    rep = solve_clark(clark_problem(b, 1.0, sphere_grid(2, 400, 0), atom_candidates=[[1.0, 0]]))
    assert abs(rep.measure.atom_weights[0] - 1) > 0.2
