import math

import numpy as np
import pytest
from hypothesis import given

from hbball.errors import SingularityError
from hbball.kernels import (
    hb_kernel,
    hb_kernel_matrix,
    hb_kernel_norm,
    invariant_poisson,
    szego,
    szego_matrix,
)
from hbball.symbols import affine_half, coordinate_slice, disc_lift, monomial, theta

from conftest import ball_vectors


def series(s, n, terms=200):
    return sum(math.comb(n + k - 1, k) * s ** k for k in range(terms))


def test_szego_examples():
    assert szego([0, 0], [0.3, 0.2j]).value == 1
    assert szego([0.5, 0], [0.5, 0]).value == pytest.approx(series(0.25, 2), rel=1e-14)
    assert szego([0.5, 0], [0.5, 0]).value == pytest.approx(1.77778, abs=1e-5)
    assert szego([0.5], [0.5]).value == pytest.approx(4 / 3)


def test_szego_singular():
    with pytest.raises(SingularityError) as exc:
        szego([1.0, 0], [1.0, 0])
    assert exc.value.condition_hint < 1e-14


def test_cauchy_kernel_accepts_boundary_point():
    v = szego([0.5, 0], [1.0, 0])
    assert v.value == pytest.approx(4.0)
    assert v.condition_hint == pytest.approx(0.5)


@given(ball_vectors(2, 0.83), ball_vectors(2, 0.83))
def test_szego_series_oracle(z, w):
    s = complex(np.dot(z, np.conj(w)))
    if abs(s) <= 0.7:
        assert szego(z, w).value == pytest.approx(series(s, 2), rel=1e-10)


def test_invariant_poisson_examples():
    assert invariant_poisson([0, 0], [0, 1]) == 1
    assert invariant_poisson([0.5], [1.0]) == pytest.approx(3.0)
    assert invariant_poisson([0.5, 0], [1.0, 0]) == pytest.approx(9.0)


@given(ball_vectors(3, 0.99), ball_vectors(3, 1.0))
def test_poisson_cauchy_identity_and_factorization(z, v):
    if np.linalg.norm(v) < 1e-3:
        return
    xi = v / np.linalg.norm(v)
    if abs(1 - np.dot(z, np.conj(xi))) < 1e-6:
        return
    n = 3
    P = invariant_poisson(z, xi)
    cross = szego(z, xi).value * szego(xi, z).value / szego(z, z).value
    assert P > 0
    assert P == pytest.approx(cross.real, rel=1e-10)
    lhs = P * abs(1 - np.dot(z, np.conj(xi))) ** (2 * n)
    assert lhs == pytest.approx((1 - np.vdot(z, z).real) ** n, rel=1e-12)


def test_hb_kernel_examples():
    b2 = coordinate_slice(n=2)
    assert hb_kernel(b2, [0.3, 0.2], [0, 0]).value == pytest.approx(1.0)
    b1 = coordinate_slice(n=1)
    for z, w in [(0.3, 0.2j), (-0.7, 0.5 + 0.1j)]:
        assert hb_kernel(b1, [z], [w]).value == pytest.approx(1.0, abs=1e-15)
    assert hb_kernel(b2, [0.6, 0], [0.6, 0]).value == pytest.approx(1.5625)


def test_hb_kernel_slot_convention():
    # holomorphic in the first slot: K(z,w) = (1 - conj(b(w)) b(z)) K(z,w)
    b = affine_half(n=1)
    z, w = 0.3 + 0.2j, -0.1 + 0.4j
    bz, bw = (1 + z) / 2, (1 + w) / 2
    want = (1 - np.conj(bw) * bz) / (1 - z * np.conj(w))
    assert hb_kernel(b, [z], [w]).value == pytest.approx(want, rel=1e-14)


SYMBOLS = [
    coordinate_slice(n=2),
    affine_half(n=2),
    monomial((1, 1)),
    disc_lift(zeros=[0, 0.5], n=2),
    theta(n=1),
    affine_half(n=1),
]


@pytest.mark.parametrize("b", SYMBOLS, ids=lambda b: f"{b.kind}{b.dimension}")
def test_hb_kernel_hermitian_and_diagonal(b, rng):
    n = b.dimension
    Z = rng.standard_normal((40, n)) + 1j * rng.standard_normal((40, n))
    Z *= (0.95 * rng.random(40) / np.linalg.norm(Z, axis=1))[:, None]
    M = hb_kernel_matrix(b, Z, Z)
    assert np.allclose(M, M.conj().T, rtol=1e-12, atol=0)
    for z in Z:
        q2, q = hb_kernel_norm(b, z)
        d = hb_kernel(b, z, z).value
        assert abs(d.imag) <= 1e-12 * abs(d)
        assert q2 == pytest.approx(d.real, rel=1e-12)
        assert q2 >= 0 and q == pytest.approx(math.sqrt(q2))


def test_hb_kernel_norm_examples():
    assert hb_kernel_norm(coordinate_slice(n=2), [0, 0])[0] == 1
    b1 = coordinate_slice(n=1)
    for r in (0.1, 0.5, 0.99):
        assert hb_kernel_norm(b1, [r])[0] == pytest.approx(1.0)
    assert hb_kernel_norm(coordinate_slice(n=2), [0.6, 0])[0] == pytest.approx(1.5625)


def test_matrix_helpers_match_scalar(rng):
    Z = (rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))) / 3
    S = szego_matrix(Z, Z)
    for i in range(5):
        for j in range(5):
            assert S[i, j] == pytest.approx(szego(Z[i], Z[j]).value, rel=1e-14)
